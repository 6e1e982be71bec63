"""Named numerical checks run by ``folm_cli.py check``.

Two kinds of check live here: regressions of the quoted physical estimates
(beat length, fiber length, theta_mz, ...) and seeded property sweeps
(unitarity, purity against the Fock oracle, recycling undo, ...). Every check
reports expected and actual values so a failure is readable on its own.

Constants can be perturbed by name (``--perturb n_F=1.0``) to confirm that
the affected regression fails.
"""
import math
from dataclasses import dataclass, field
from logging import getLogger
from typing import Callable, Dict, List, Optional

import numpy as np
from scipy.optimize import brentq

from experiment.interferometer import (CollapseModel, Configuration, CouplerParams, MagnonSetup,
                                       Scenario, collapsed_transmission, eta, purity_oracle,
                                       purity_symmetric, run_configuration, scattering_matrix,
                                       schmidt_decompose, transmission_reflection)
from physics import bosonic
from physics.errors import ParameterError
from physics.jones import JonesMatrix, rotation, standard_sop
from physics.magnetooptics import (Orientation, birefringence, chi_p, reduce_transverse,
                                   sphere_jones, transformed_dielectric)
from physics.params import (FieldParams, MaterialParams, PhysicalParams, SphereParams, TimingParams,
                            absorption_ratio, beat_length, fiber_length_for_delay,
                            magnon_angle_quantum, spin_count, theta_ife, theta_mz, undo_delays)

logger = getLogger(__name__)

DEFAULT_CONSTANTS: Dict[str, float] = {
    "Q_s": 1e-4,
    "n_0": 2.19,
    "lambda_0": 1550e-9,
    "l_A": 0.5,
    "R_s": 100e-6,
    "M_s": 140e3,
    "f_m": 3e9,
    "gamma_e": 2 * math.pi * 28e9,
    "n_F": 1.47,
    "ife_enhancement": 1.0,
}

ORACLE_DIM = 64


@dataclass
class CheckContext:
    constants: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_CONSTANTS))
    seed: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def material(self) -> MaterialParams:
        c = self.constants
        return MaterialParams(Q_s=c["Q_s"], n_0=c["n_0"], lambda_0=c["lambda_0"], l_A=c["l_A"])

    def sphere(self, R_s: Optional[float] = None) -> SphereParams:
        return SphereParams(R_s=self.constants["R_s"] if R_s is None else R_s, M_s=self.constants["M_s"])

    def field_params(self) -> FieldParams:
        c = self.constants
        return FieldParams(omega_m=2 * math.pi * c["f_m"], gamma_e=c["gamma_e"],
                           ife_enhancement=c["ife_enhancement"])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    expected: float
    actual: float
    tolerance: float
    detail: str = ""


@dataclass(frozen=True)
class Check:
    name: str
    description: str
    run: Callable[[CheckContext], CheckResult]


CHECKS: Dict[str, Check] = {}


def check(name: str, description: str):
    def register(fn: Callable[[CheckContext], CheckResult]):
        CHECKS[name] = Check(name, description, fn)
        return fn
    return register


def _relative(name: str, expected: float, actual: float, rel: float, detail: str = "") -> CheckResult:
    ok = abs(actual - expected) <= rel * abs(expected)
    return CheckResult(name, ok, expected, actual, rel, detail)


def _bound(name: str, actual: float, bound: float, detail: str = "") -> CheckResult:
    """Pass when a non-negative error measure stays within ``bound``."""
    return CheckResult(name, bool(actual <= bound), 0.0, actual, bound, detail)


# Quoted estimates carry two significant figures.
TWO_FIGURES = 0.05


@check("beat_length", "l_P = 7.0 mm at the YIG defaults")
def _beat_length(ctx: CheckContext) -> CheckResult:
    return _relative("beat_length", 7.0e-3, beat_length(ctx.material()), TWO_FIGURES, "m")


@check("absorption_ratio", "l_P / l_A = 0.014 for l_A = 0.5 m")
def _absorption_ratio(ctx: CheckContext) -> CheckResult:
    return _relative("absorption_ratio", 0.014, absorption_ratio(ctx.material()), TWO_FIGURES)


@check("fiber_length", "L_F = 68 mm for one Kittel period at 3 GHz")
def _fiber_length(ctx: CheckContext) -> CheckResult:
    actual = fiber_length_for_delay(ctx.field_params(), ctx.constants["n_F"])
    return _relative("fiber_length", 68e-3, actual, TWO_FIGURES, "m")


@check("theta_mz", "theta_mz = 3.2e-17 at R_s = 125 um")
def _theta_mz(ctx: CheckContext) -> CheckResult:
    return _relative("theta_mz", 3.2e-17, theta_mz(ctx.sphere(125e-6), ctx.field_params()), TWO_FIGURES)


@check("theta_ife_coefficient", "theta_IFE / theta_mz = 0.18 at the defaults")
def _theta_ife(ctx: CheckContext) -> CheckResult:
    s, f = ctx.sphere(), ctx.field_params()
    ratio = theta_ife(ctx.material(), s, f) / theta_mz(s, f)
    return _relative("theta_ife_coefficient", 0.18, ratio, TWO_FIGURES)


@check("theta_m0_scale", "theta_m0 within a factor of 10 of 1e-9")
def _theta_m0_scale(ctx: CheckContext) -> CheckResult:
    actual = magnon_angle_quantum(theta_mz(ctx.sphere(), ctx.field_params()))
    ok = 1e-10 <= actual <= 1e-8
    return CheckResult("theta_m0_scale", ok, 1e-9, actual, 10.0, "factor")


@check("theta_m0_root", "sqrt(theta_mz) solves E_M(theta) - E_M(0) = hbar omega_m")
def _theta_m0_root(ctx: CheckContext) -> CheckResult:
    tmz = theta_mz(ctx.sphere(), ctx.field_params())
    scale = math.sqrt(tmz)
    # 1 - cos written as 2 sin^2 so the difference survives double precision
    x = brentq(lambda u: 4.0 * math.sin(u * scale / 2.0) ** 2 / tmz - 1.0, 0.5, 2.0, xtol=1e-15)
    return _relative("theta_m0_root", magnon_angle_quantum(tmz), x * scale, 1e-9)


@check("spin_count", "about 1e17 spins in a 125 um sphere")
def _spin_count(ctx: CheckContext) -> CheckResult:
    actual = spin_count(ctx.sphere(125e-6), ctx.field_params())
    return CheckResult("spin_count", 1e16 <= actual <= 1e18, 1e17, actual, 10.0, "factor")


@check("dark_port", "3 dB coupler without coupling: p_T = 0")
def _dark_port(ctx: CheckContext) -> CheckResult:
    p_t, _ = transmission_reflection(CouplerParams.three_db(), eta(1.0, 1.0))
    return _bound("dark_port", abs(p_t), 1e-12)


@check("collapse_endpoints", "d = 0 gives p_T = 1/2, d = 1 the unitary value")
def _collapse(ctx: CheckContext) -> CheckResult:
    c = CouplerParams.three_db()
    rng = ctx.rng()
    worst = 0.0
    for _ in range(20):
        chi = complex(*rng.uniform(-0.7, 0.7, 2))
        full, _ = collapsed_transmission(c, chi, 1.0, CollapseModel(0.0))
        unitary, _ = transmission_reflection(c, eta(chi, 1.0))
        kept, _ = collapsed_transmission(c, chi, 1.0, CollapseModel(1.0))
        worst = max(worst, abs(full - 0.5), abs(kept - unitary))
    return _bound("collapse_endpoints", worst, 1e-12)


@check("purity_oracle", "closed-form purity matches the Fock partial trace (N = 64)")
def _purity_oracle(ctx: CheckContext) -> CheckResult:
    rng = ctx.rng()
    f = ctx.field_params()
    worst = 0.0
    for _ in range(50):
        alpha = rng.uniform(0, 2) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        alpha_i = rng.uniform(0, 2) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        dt = rng.uniform(0, 2 * math.pi / f.omega_m)
        ups = rng.uniform(0.25, 1.0)
        c = CouplerParams.from_splitting(1.0 / (1.0 + ups))
        a_plus, a_minus = bosonic.branch_amplitudes(alpha, alpha_i, f, dt)
        closed = schmidt_decompose(c, a_plus, a_minus, ORACLE_DIM).purity
        worst = max(worst, abs(closed - purity_oracle(c, a_plus, a_minus, ORACLE_DIM)))
    return _bound("purity_oracle", worst, 1e-8)


@check("recycling_undo", "cos(omega_m dt / 2) = 0 restores purity 1 and p_T = 0")
def _recycling_undo(ctx: CheckContext) -> CheckResult:
    rng = ctx.rng()
    f = ctx.field_params()
    worst = 0.0
    for dt in undo_delays(f, 3):
        for _ in range(5):
            params = PhysicalParams(material=ctx.material(), sphere=ctx.sphere(), field=f,
                                    timing=TimingParams(t1=0.0, t2=dt))
            magnon = MagnonSetup(alpha=complex(*rng.uniform(-1.5, 1.5, 2)),
                                 alpha_i_mag=float(rng.uniform(0, 2)),
                                 alpha_i_phase=float(rng.uniform(0, 2 * math.pi)))
            res = run_configuration(Scenario(Configuration.PERPENDICULAR, params=params, magnon=magnon))
            worst = max(worst, abs(res.schmidt.purity - 1.0), abs(res.p_T))
    return _bound("recycling_undo", worst, 1e-10)


@check("alpha_independence", "purity does not depend on the initial alpha")
def _alpha_independence(ctx: CheckContext) -> CheckResult:
    f = ctx.field_params()
    alpha_i = 0.8 + 0.3j
    dt = 0.3 / f.omega_m
    c = CouplerParams.three_db()
    values = []
    for k in range(20):
        alpha = 1.5 * np.exp(2j * math.pi * k / 20) * (k + 1) / 20
        a_plus, a_minus = bosonic.branch_amplitudes(alpha, alpha_i, f, dt)
        values.append(schmidt_decompose(c, a_plus, a_minus).purity)
    spread = max(values) - min(values)
    sym = purity_symmetric(alpha_i, f, dt)
    return _bound("alpha_independence", max(spread, abs(values[0] - sym)), 1e-9)


@check("structural_unitarity", "S, J_S unitary and p_T + p_R = 1 on random inputs")
def _structural(ctx: CheckContext) -> CheckResult:
    rng = ctx.rng()
    m, s = ctx.material(), ctx.sphere()
    worst = 0.0
    for _ in range(100):
        c = CouplerParams.from_splitting(float(rng.uniform(0.05, 1.0)), float(rng.uniform(0, 2 * math.pi)))
        S = scattering_matrix(c)
        worst = max(worst, S.unitarity_error(), S.symmetry_error())
        o = Orientation(float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi)),
                        float(rng.uniform(0, 0.05)), float(rng.uniform(0, 2 * math.pi)))
        worst = max(worst, sphere_jones(birefringence(o, m), s, m).unitarity_error())
    for _ in range(1000):
        c = CouplerParams.from_splitting(float(rng.uniform(0.01, 1.0)))
        chi = complex(*rng.uniform(-0.7, 0.7, 2))
        p_t, p_r = transmission_reflection(c, eta(chi, 1.0))
        worst = max(worst, abs(p_t + p_r - 1.0))
    return _bound("structural_unitarity", worst, 1e-12)


@check("tensor_reduction", "closed-form k_0, k_CB, k_LB match the exact 2x2 reduction")
def _tensor_reduction(ctx: CheckContext) -> CheckResult:
    rng = ctx.rng()
    m = ctx.material()
    worst = 0.0
    for _ in range(50):
        theta_m = float(rng.uniform(0, 0.05))
        o = Orientation(float(rng.uniform(0, math.pi)), float(rng.uniform(0, 2 * math.pi)),
                        theta_m, float(rng.uniform(0, 2 * math.pi)))
        exact = reduce_transverse(transformed_dielectric(o, m))
        closed = birefringence(o, m).transverse_matrix()
        bound = 2.5 * theta_m * m.Q_s ** 2 + 1e-15
        worst = max(worst, float(np.max(np.abs(exact - closed))) / bound)
    return _bound("tensor_reduction", worst, 1.0, "error / (2.5 theta_m Q_s^2)")


@check("single_magnon_chi_p", "1 - Re(chi_P) < 1e-16 for a single-magnon rotation")
def _single_magnon(ctx: CheckContext) -> CheckResult:
    m, s, f = ctx.material(), ctx.sphere(), ctx.field_params()
    delta = (s.l_e / beat_length(m)) * magnon_angle_quantum(theta_mz(s, f))
    # J_S(t1)^dagger J_S(t2) for a Faraday rotation changed by delta
    relative = rotation((0.0, 1.0, 0.0), delta)
    worst = max(1.0 - chi_p(standard_sop(label), JonesMatrix.identity(), relative).real for label in "HV")
    return CheckResult("single_magnon_chi_p", worst < 1e-16, 0.0, worst, 1e-16, f"delta = {delta:.3g} rad")


def list_checks() -> List[Check]:
    return list(CHECKS.values())


def parse_perturbations(items: Optional[List[str]]) -> Dict[str, float]:
    """NAME=VALUE strings into a dict; raises ParameterError on bad input."""
    out: Dict[str, float] = {}
    for item in items or []:
        name, sep, value = item.partition("=")
        name = name.strip()
        if not sep or name not in DEFAULT_CONSTANTS:
            raise ParameterError(f"cannot perturb '{item}' (known constants: {', '.join(DEFAULT_CONSTANTS)})")
        try:
            out[name] = float(value)
        except ValueError:
            raise ParameterError(f"perturbation value for {name} is not a number: {value!r}") from None
    return out


def run_checks(seed: int = 0, perturb: Optional[Dict[str, float]] = None,
               names: Optional[List[str]] = None) -> List[CheckResult]:
    """Run the selected checks (all by default); a check that raises is reported as failed."""
    ctx = CheckContext(seed=seed)
    ctx.constants.update(perturb or {})
    results = []
    for name, chk in CHECKS.items():
        if names and name not in names:
            continue
        try:
            res = chk.run(ctx)
        except Exception as e:
            logger.error(f"check {name} raised {type(e).__name__}: {e}")
            res = CheckResult(name, False, float("nan"), float("nan"), float("nan"), f"{type(e).__name__}: {e}")
        logger.debug(f"{name}: expected={res.expected!r} actual={res.actual!r} passed={res.passed}")
        results.append(res)
    return results
