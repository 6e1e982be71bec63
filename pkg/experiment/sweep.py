"""Evaluate a config over its sweep grid.

Points are independent; with more than one worker they run on a thread
pool, but rows are always emitted in sweep-index order.
"""
import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from logging import getLogger
from typing import Dict, List, Optional, Tuple

from experiment.config import ExperimentConfig, scenario_at
from experiment.interferometer import RESULT_COLUMNS, ConfigurationResult, run_configuration
from physics.errors import NumericalGuardError

logger = getLogger(__name__)

PROBABILITY_TOL = 1e-12
PURITY_TOL = 1e-10


def default_workers() -> int:
    """FOLM_WORKERS from the environment, else 0 (serial)."""
    value = os.getenv("FOLM_WORKERS")
    if not value:
        return 0
    try:
        return max(0, int(value))
    except ValueError:
        logger.warning(f"ignoring FOLM_WORKERS={value!r}; expected an integer")
        return 0


@dataclass(frozen=True)
class SweepPoint:
    index: int
    assignments: Dict[str, float]


@dataclass
class SweepResult:
    columns: List[str]
    rows: List[Dict[str, object]]
    results: List[ConfigurationResult]


def sweep_points(cfg: ExperimentConfig) -> List[SweepPoint]:
    """Grid points, first axis outermost."""
    if cfg.sweep is None:
        return [SweepPoint(0, {})]
    axes = cfg.sweep.axes
    grids = [axis.values() for axis in axes]
    points = []
    for index, combo in enumerate(itertools.product(*grids)):
        points.append(SweepPoint(index, {axis.path: float(v) for axis, v in zip(axes, combo)}))
    return points


def columns_for(cfg: ExperimentConfig) -> List[str]:
    paths = [axis.path for axis in cfg.sweep.axes] if cfg.sweep is not None else []
    return ["index"] + paths + [c for c in RESULT_COLUMNS if c not in paths]


def check_row(index: int, result: ConfigurationResult) -> None:
    """Raise NumericalGuardError if the point breaks a probability or purity bound."""
    total = result.p_T + result.p_R
    if abs(total - 1.0) > PROBABILITY_TOL:
        raise NumericalGuardError(f"p_T + p_R = {total!r} differs from 1", index=index)
    purity = result.schmidt.purity
    if not 0.5 - PURITY_TOL <= purity <= 1.0 + PURITY_TOL:
        raise NumericalGuardError(f"purity {purity!r} outside [1/2, 1]", index=index)


def evaluate_point(cfg: ExperimentConfig, point: SweepPoint) -> Tuple[Dict[str, object], ConfigurationResult]:
    result = run_configuration(scenario_at(cfg, point.assignments))
    check_row(point.index, result)
    row = {"index": point.index, **result.to_row(), **point.assignments}
    return row, result


def run(cfg: ExperimentConfig, workers: Optional[int] = None) -> SweepResult:
    """One row per sweep point, ordered by index."""
    points = sweep_points(cfg)
    workers = default_workers() if workers is None else workers
    if cfg.sweep is not None and not cfg.sweep.parallel:
        workers = 0
    logger.info(f"evaluating {len(points)} point(s) of a {cfg.configuration.value} config"
                f"{f' on {workers} workers' if workers > 1 else ''}")
    if workers > 1 and len(points) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            evaluated = list(pool.map(lambda p: evaluate_point(cfg, p), points))
    else:
        evaluated = [evaluate_point(cfg, p) for p in points]
    return SweepResult(columns=columns_for(cfg),
                       rows=[row for row, _ in evaluated],
                       results=[res for _, res in evaluated])
