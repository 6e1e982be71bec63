"""Truncated Fock-space numerics for the Kittel magnon mode.

Coherent states, ladder operators, displacements and free precession in an
N-dimensional number basis. These are the brute-force counterparts of the
closed-form coherent-state formulas used by the interferometer; nothing in
the closed-form path depends on them.
"""
import math
from dataclasses import dataclass
from functools import lru_cache
from logging import getLogger
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from physics.errors import ParameterError, TruncationError
from physics.params import FieldParams

logger = getLogger(__name__)

CoherentAmp = complex

MIN_DIMENSION = 32


@dataclass(frozen=True)
class FockState:
    """Amplitudes in the number basis |0>, ..., |N-1>."""
    amplitudes: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", np.asarray(self.amplitudes, dtype=complex).reshape(-1))

    @property
    def dimension(self) -> int:
        return int(self.amplitudes.shape[0])

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "FockState":
        n = self.norm
        if n == 0:
            raise ParameterError("cannot normalize the zero vector")
        return FockState(self.amplitudes / n)

    def __add__(self, other: "FockState") -> "FockState":
        return FockState(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "FockState") -> "FockState":
        return FockState(self.amplitudes - other.amplitudes)

    def scaled(self, factor: complex) -> "FockState":
        return FockState(factor * self.amplitudes)


@dataclass(frozen=True)
class FockOperator:
    """N x N matrix acting on FockState vectors."""
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex))

    @property
    def dimension(self) -> int:
        return int(self.matrix.shape[0])

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(self.matrix @ other.matrix)
        if isinstance(other, FockState):
            return FockState(self.matrix @ other.amplitudes)
        return NotImplemented

    def dagger(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T)


def default_dimension(alpha_abs: float) -> int:
    """max(32, ceil(|a|^2 + 8|a| + 20)); keeps the Poisson tail below 1e-10 for |a| <= 2."""
    a = abs(alpha_abs)
    return max(MIN_DIMENSION, int(math.ceil(a * a + 8 * a + 20)))


def required_dimension(alpha: CoherentAmp) -> int:
    """Smallest N that satisfies both the guard and the default tail rule."""
    a2 = abs(alpha) ** 2
    return max(default_dimension(abs(alpha)), int(math.floor(4 * a2)) + 1)


def check_truncation(alpha: CoherentAmp, N: int) -> None:
    """Raise TruncationError unless |alpha|^2 < N / 4."""
    if N < 1:
        raise ParameterError(f"Fock dimension must be positive, got {N}")
    if not abs(alpha) ** 2 < N / 4:
        need = required_dimension(alpha)
        raise TruncationError(f"|alpha|^2 = {abs(alpha) ** 2:.6g} needs N >= {need} (got N = {N})",
                              required_dim=need)


@lru_cache(maxsize=16)
def _lowering(N: int) -> np.ndarray:
    m = np.diag(np.sqrt(np.arange(1, N, dtype=float)), k=1).astype(complex)
    m.setflags(write=False)
    return m


def annihilation(N: int) -> FockOperator:
    return FockOperator(_lowering(N).copy())


def creation(N: int) -> FockOperator:
    return FockOperator(_lowering(N).T.copy())


def number(N: int) -> FockOperator:
    return FockOperator(np.diag(np.arange(N, dtype=float)).astype(complex))


def vacuum(N: int) -> FockState:
    v = np.zeros(N, dtype=complex)
    v[0] = 1.0
    return FockState(v)


def coherent_state(alpha: CoherentAmp, N: Optional[int] = None) -> FockState:
    """e^{-|a|^2/2} a^n / sqrt(n!) for n < N."""
    N = default_dimension(abs(alpha)) if N is None else N
    check_truncation(alpha, N)
    if alpha == 0:
        return vacuum(N)
    n = np.arange(N)
    log_mag = -abs(alpha) ** 2 / 2 + n * math.log(abs(alpha)) - gammaln(n + 1) / 2
    phase = np.exp(1j * n * np.angle(alpha))
    return FockState(np.exp(log_mag) * phase)


def displacement(alpha: CoherentAmp, N: int) -> FockOperator:
    """D(a) = exp(a a^dagger - a* a)."""
    check_truncation(alpha, N)
    a = _lowering(N)
    return FockOperator(expm(alpha * a.T - np.conj(alpha) * a))


def free_evolution(f: FieldParams, t: float, N: int) -> FockOperator:
    """u(t) = exp(-i omega_m t a^dagger a)."""
    return FockOperator(np.diag(np.exp(-1j * f.omega_m * t * np.arange(N))))


def overlap_analytic(alpha: complex, beta: complex) -> complex:
    """<alpha|beta> for coherent states."""
    return complex(np.exp(-abs(alpha) ** 2 / 2 - abs(beta) ** 2 / 2 + np.conj(alpha) * beta))


def branch_amplitudes(alpha: complex, alpha_i: complex, f: FieldParams,
                      delta_t: float) -> Tuple[complex, complex]:
    """Coherent amplitudes of the two magnon branches after both kicks.

    The clockwise branch is kicked by D(alpha_i) at t1 and then precesses;
    the counter-clockwise branch precesses and is kicked by D(-alpha_i) at t2.
    """
    phase = np.exp(-1j * f.omega_m * delta_t)
    return complex((alpha + alpha_i) * phase), complex(alpha * phase - alpha_i)


def kicked_branches(alpha: complex, alpha_i: complex, f: FieldParams, delta_t: float,
                    N: int) -> Tuple[FockState, FockState]:
    """Fock vectors of both branches built operator by operator."""
    start = coherent_state(alpha, N)
    u = free_evolution(f, delta_t, N)
    plus = u @ (displacement(alpha_i, N) @ start)
    minus = displacement(-alpha_i, N) @ (u @ start)
    return plus, minus


def fock_overlap(a: FockState, b: FockState) -> complex:
    """<a|b>."""
    if a.dimension != b.dimension:
        raise ParameterError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def fidelity(a: FockState, b: FockState) -> float:
    return abs(fock_overlap(a, b)) ** 2


def mean_number(state: FockState) -> float:
    p = np.abs(state.amplitudes) ** 2
    return float(np.dot(np.arange(state.dimension), p) / p.sum())


def reduced_purity(joint: np.ndarray, dims: Sequence[int], keep: int = 1) -> float:
    """Tr rho^2 of one factor of a bipartite pure state.

    ``joint`` is the state vector on the product space with ``dims`` =
    (d0, d1), first factor most significant; ``keep`` selects the factor whose
    reduced density matrix is formed. The state is normalized first.
    """
    d0, d1 = dims
    psi = np.asarray(joint, dtype=complex).reshape(d0, d1)
    norm2 = float(np.vdot(psi, psi).real)
    if norm2 == 0:
        raise ParameterError("joint state is zero")
    psi = psi / math.sqrt(norm2)
    if keep == 1:
        rho = psi.T @ psi.conj()
    elif keep == 0:
        rho = psi @ psi.conj().T
    else:
        raise ParameterError(f"keep must be 0 or 1, got {keep}")
    return float(np.trace(rho @ rho).real)
