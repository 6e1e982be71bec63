"""Two-dimensional polarization calculus.

SOP vectors are stored in the (|H>, |V>) basis; the first component is the
horizontal one. Poincare coordinates follow the six-point table
|V> -> z, |H> -> -z, |D> -> x, |A> -> -x, |R> -> -y, |L> -> y, which in
this basis reads (<sigma_x>, <sigma_y>, -<sigma_z>).
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from physics.errors import ParameterError

UNIT_TOL = 1e-9

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_PAULI = {"0": SIGMA_0, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

# Poincare z axis is flipped relative to <sigma_z>
_POINCARE_SIGNS = np.array([1.0, 1.0, -1.0])

_INV_SQRT2 = 1.0 / math.sqrt(2.0)

_STANDARD_SOPS = {
    "H": (1.0, 0.0),
    "V": (0.0, 1.0),
    "D": (_INV_SQRT2, _INV_SQRT2),
    "A": (_INV_SQRT2, -_INV_SQRT2),
    "R": (_INV_SQRT2, -1j * _INV_SQRT2),
    "L": (_INV_SQRT2, 1j * _INV_SQRT2),
}


@dataclass(frozen=True)
class SopVector:
    """Normalized state of polarization (H, V components)."""
    vector: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(2)
        norm = np.linalg.norm(v)
        if norm == 0:
            raise ParameterError("SOP vector must be non-zero")
        object.__setattr__(self, "vector", v / norm)

    @property
    def h(self) -> complex:
        return complex(self.vector[0])

    @property
    def v(self) -> complex:
        return complex(self.vector[1])


@dataclass(frozen=True)
class PoincareVector:
    """Real 3-vector on (or inside) the Poincare sphere."""
    x: float
    y: float
    z: float

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))

    @classmethod
    def from_array(cls, a) -> "PoincareVector":
        a = np.asarray(a, dtype=float).reshape(3)
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class JonesMatrix:
    """2x2 complex transfer matrix acting on SOP vectors."""
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.asarray(self.matrix, dtype=complex).reshape(2, 2))

    def __matmul__(self, other):
        if isinstance(other, JonesMatrix):
            return JonesMatrix(self.matrix @ other.matrix)
        if isinstance(other, SopVector):
            return SopVector(self.matrix @ other.vector)
        return NotImplemented

    def dagger(self) -> "JonesMatrix":
        return JonesMatrix(self.matrix.conj().T)

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - SIGMA_0)))

    def is_unitary(self, tol: float = 1e-12) -> bool:
        return self.unitarity_error() <= tol

    @classmethod
    def identity(cls) -> "JonesMatrix":
        return cls(SIGMA_0.copy())


def pauli(name: str) -> np.ndarray:
    """sigma_0, sigma_x, sigma_y or sigma_z by name ('0', 'x', 'y', 'z')."""
    try:
        return _PAULI[name].copy()
    except KeyError:
        raise ParameterError(f"unknown Pauli matrix '{name}'") from None


def pauli_vector() -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    return SIGMA_X.copy(), SIGMA_Y.copy(), SIGMA_Z.copy()


def standard_sop(label: str) -> SopVector:
    """One of the six named polarization states V, H, D, A, R, L."""
    key = label.strip().upper() if isinstance(label, str) else label
    if key not in _STANDARD_SOPS:
        raise ParameterError(f"unknown SOP label '{label}' (expected one of {sorted(_STANDARD_SOPS)})")
    return SopVector(np.array(_STANDARD_SOPS[key], dtype=complex))


def circular_basis() -> Tuple[SopVector, SopVector]:
    """u_plus, u_minus with sigma_y u_pm = +-u_pm."""
    u_plus = np.array([np.exp(-1j * math.pi / 4), np.exp(1j * math.pi / 4)]) * _INV_SQRT2
    u_minus = np.array([np.exp(1j * math.pi / 4), np.exp(-1j * math.pi / 4)]) * _INV_SQRT2
    return SopVector(u_plus), SopVector(u_minus)


def _axis_array(axis) -> np.ndarray:
    a = axis.as_array() if isinstance(axis, PoincareVector) else np.asarray(axis, dtype=float).reshape(3)
    if abs(np.linalg.norm(a) - 1.0) > UNIT_TOL:
        raise ParameterError(f"rotation axis must be a unit vector, |u| = {np.linalg.norm(a):.12g}")
    return a


def rotation(axis, phi: float) -> JonesMatrix:
    """B(u, phi) = cos(phi/2) - i (sigma . u) sin(phi/2)."""
    u = _axis_array(axis)
    sigma_u = u[0] * SIGMA_X + u[1] * SIGMA_Y + u[2] * SIGMA_Z
    return JonesMatrix(math.cos(phi / 2) * SIGMA_0 - 1j * math.sin(phi / 2) * sigma_u)


def rotation_axis_angle(j: JonesMatrix) -> Tuple[PoincareVector, float]:
    """Recover (u, phi) of a unitary, ignoring its global phase.

    The angle is returned in [0, 2pi]; for the identity the axis defaults to z.
    """
    m = j.matrix / np.sqrt(np.linalg.det(j.matrix))
    c = np.trace(m).real / 2
    s_vec = np.array([(1j * np.trace(p @ m) / 2).real for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
    s = np.linalg.norm(s_vec)
    if s < 1e-15:
        return PoincareVector(0.0, 0.0, 1.0), (0.0 if c > 0 else 2 * math.pi)
    return PoincareVector.from_array(s_vec / s), 2 * math.atan2(s, c)


def sop_overlap(a: SopVector, b: SopVector) -> complex:
    """<a|b>."""
    return complex(np.vdot(a.vector, b.vector))


def poincare_map(s: SopVector) -> PoincareVector:
    psi = s.vector
    expectations = np.array([np.vdot(psi, p @ psi).real for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
    return PoincareVector.from_array(_POINCARE_SIGNS * expectations)


def poincare_rotation(axis, phi: float) -> np.ndarray:
    """SO(3) action of rotation(axis, phi) on poincare_map coordinates.

    Because the Poincare z axis is mirrored, B(u, phi) turns the sphere by
    phi about (-u_x, -u_y, u_z), which is the image of -u.
    """
    u = _axis_array(axis)
    n = -_POINCARE_SIGNS * u
    k = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    return np.eye(3) + math.sin(phi) * k + (1 - math.cos(phi)) * (k @ k)


def mirror_sop(s: SopVector) -> SopVector:
    """Reflection of the SOP by a pass through the loop, sigma_z |s>."""
    return SopVector(SIGMA_Z @ s.vector)


def loop_jones(j_sphere: JonesMatrix, direction: str) -> JonesMatrix:
    """Loop transfer matrix for one circulation direction.

    Clockwise: J+ = sigma_z J_S(t1). Counter-clockwise: J- = sigma_z J_S(t2) sigma_z sigma_z.
    """
    sz = JonesMatrix(SIGMA_Z)
    if direction in ("cw", "+"):
        return sz @ j_sphere
    if direction in ("ccw", "-"):
        return sz @ j_sphere @ sz @ sz
    raise ParameterError(f"direction must be 'cw' or 'ccw', got '{direction}'")
