"""Dielectric-tensor machinery for the magnetized sphere.

Builds the permittivity of a saturated magnet, rotates it into the frame of
the propagation direction, reduces it to the 2x2 transverse matrix
M_T = k_0 sigma_0 + k_B . sigma and turns k_B into the sphere Jones matrix.

Rotations R_u with R_u u = z use the minimal-geodesic choice (rotate about
u x z by the angle between u and z). An Euler (z then y) choice is also
available; k_0, k_CB, |k_LB| and the eigenvalues of M_T do not depend on it.
"""
import math
from dataclasses import dataclass
from logging import getLogger
from typing import Optional, Tuple

import numpy as np
from scipy.constants import epsilon_0
from scipy.spatial.transform import Rotation

from physics.errors import ParameterError
from physics.jones import (JonesMatrix, PoincareVector, SopVector, SIGMA_X, SIGMA_Y, SIGMA_Z,
                           rotation)
from physics.params import MaterialParams, SphereParams, beat_length

logger = getLogger(__name__)

Tensor3 = np.ndarray

M_C = np.array([[0.0, -1.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 0.0, 0.0]])

X_HAT = np.array([1.0, 0.0, 0.0])
Y_HAT = np.array([0.0, 1.0, 0.0])
Z_HAT = np.array([0.0, 0.0, 1.0])

UNIT_TOL = 1e-9
# first-order formulas for k_CB / k_LB are not trusted beyond this tilt
THETA_M_WARN = 0.3


def unit_vector(theta: float, phi: float) -> np.ndarray:
    return np.array([math.sin(theta) * math.cos(phi),
                     math.sin(theta) * math.sin(phi),
                     math.cos(theta)])


@dataclass(frozen=True)
class Orientation:
    """Propagation direction (theta, phi) and magnetization direction (theta_m, phi_m)."""
    theta: float = 0.0
    phi: float = 0.0
    theta_m: float = 0.0
    phi_m: float = 0.0

    def __post_init__(self):
        for name in ("theta", "theta_m"):
            value = getattr(self, name)
            if not 0.0 <= value <= math.pi:
                raise ParameterError(f"{name} must lie in [0, pi], got {value}")

    @property
    def q_hat(self) -> np.ndarray:
        return unit_vector(self.theta, self.phi)

    @property
    def m_hat(self) -> np.ndarray:
        return unit_vector(self.theta_m, self.phi_m)

    @classmethod
    def parallel(cls, theta_m: float = 0.0, phi_m: float = 0.0) -> "Orientation":
        """Light travelling along H_dc (z)."""
        return cls(0.0, 0.0, theta_m, phi_m)

    @classmethod
    def perpendicular(cls, phi: float = 0.0, theta_m: float = 0.0, phi_m: float = 0.0) -> "Orientation":
        """Light travelling in the xy plane, normal to H_dc."""
        return cls(math.pi / 2, phi, theta_m, phi_m)


@dataclass(frozen=True)
class BirefringenceVector:
    """Poincare-space decomposition of the transverse dielectric response."""
    k_0: float
    k_CB: np.ndarray
    k_LB: np.ndarray

    @property
    def k_B(self) -> np.ndarray:
        return self.k_CB + self.k_LB

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.k_B))

    def transverse_matrix(self) -> np.ndarray:
        """M_T = k_0 sigma_0 + k_B . sigma."""
        k = self.k_B
        return self.k_0 * np.eye(2) + k[0] * SIGMA_X + k[1] * SIGMA_Y + k[2] * SIGMA_Z


def _unit(u) -> np.ndarray:
    u = np.asarray(u, dtype=float).reshape(3)
    if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
        raise ParameterError(f"expected a unit vector, |u| = {np.linalg.norm(u):.12g}")
    return u


def permittivity(Q: float, n_0: float) -> Tensor3:
    """epsilon_m = n_0^2 (1 + i Q M_C) for magnetization along z."""
    return n_0 ** 2 * (np.eye(3) + 1j * Q * M_C)


def cross_matrix(u) -> Tensor3:
    """C_u with C_u v = u x v."""
    x, y, z = _unit(u)
    return np.array([[0.0, -z, y],
                     [z, 0.0, -x],
                     [-y, x, 0.0]])


def projection(u) -> Tensor3:
    u = _unit(u)
    return np.outer(u, u)


def perpendicular_correction(theta_m: float, phi_m: float) -> Tensor3:
    """M_perp, the first-order-in-theta_m part of C_m - M_C."""
    s, c = math.sin(phi_m), math.cos(phi_m)
    return theta_m * np.array([[0.0, 0.0, s],
                               [0.0, 0.0, -c],
                               [-s, c, 0.0]])


def rotation_to_z(u, convention: str = "geodesic") -> Tensor3:
    """Proper rotation R_u with R_u u = z."""
    u = _unit(u)
    if convention == "geodesic":
        axis = np.cross(u, Z_HAT)
        s = np.linalg.norm(axis)
        if s < 1e-15:
            if u[2] > 0:
                return np.eye(3)
            return Rotation.from_rotvec(math.pi * X_HAT).as_matrix()
        angle = math.atan2(s, float(u[2]))
        return Rotation.from_rotvec(axis / s * angle).as_matrix()
    if convention == "euler":
        theta = math.acos(max(-1.0, min(1.0, float(u[2]))))
        phi = math.atan2(float(u[1]), float(u[0]))
        return Rotation.from_euler("zy", [-phi, -theta]).as_matrix()
    raise ParameterError(f"unknown rotation convention '{convention}'")


def transformed_dielectric(o: Orientation, m: MaterialParams, n: Optional[float] = None,
                           convention: str = "geodesic") -> Tensor3:
    """M'_eps in the frame whose z axis is the propagation direction.

    (R_q R_m^-1 eps_m R_m R_q^-1 + n^2 P_z) / n_0^2 - 1; ``n`` defaults to n_0
    so that the P_z term is taken with n^2 / n_0^2 = 1.

    The isotropic part of eps_m cancels against the -1 exactly, so the
    result is assembled as i Q_s R M_C R^T + (n / n_0)^2 P_z, keeping the
    O(Q_s^2) entries free of cancellation noise.
    """
    n = m.n_0 if n is None else n
    r_q = rotation_to_z(o.q_hat, convention)
    r_m = rotation_to_z(o.m_hat, convention)
    r = r_q @ r_m.T
    return 1j * m.Q_s * (r @ M_C @ r.T) + (n / m.n_0) ** 2 * projection(Z_HAT)


def reduce_transverse(m_eps: Tensor3) -> np.ndarray:
    """Effective 2x2 matrix for the transverse field.

    Eliminates the longitudinal component by a Schur complement,
    M_T = A_TT - A_T3 A_3T / A_33.
    """
    a = np.asarray(m_eps, dtype=complex)
    return a[:2, :2] - np.outer(a[:2, 2], a[2, :2]) / a[2, 2]


def decompose_pauli(m_t: np.ndarray) -> Tuple[float, np.ndarray]:
    """(k_0, k) with m_t = k_0 sigma_0 + k . sigma for Hermitian m_t."""
    m_t = np.asarray(m_t, dtype=complex)
    k_0 = np.trace(m_t).real / 2
    k = np.array([(np.trace(p @ m_t) / 2).real for p in (SIGMA_X, SIGMA_Y, SIGMA_Z)])
    return float(k_0), k


def _squeeze(calq: complex, rho: float) -> float:
    """S(rho) = [e^{i(rho-pi/4)} Q^2 + c.c.] / 4."""
    phase = np.exp(1j * (rho - math.pi / 4))
    return float(((phase * calq ** 2 + np.conj(phase) * np.conj(calq) ** 2) / 4).real)


def birefringence(o: Orientation, m: MaterialParams) -> BirefringenceVector:
    """Circular (Faraday) and linear (Voigt) birefringence vectors.

    k_CB = Q_s (0, q.m, 0) and k_LB = Q_s^2 (S(-pi/4), 0, S(pi/4)) with
    calQ = (Q_x + i Q_y) / Q_s and (Q_x, Q_y, Q_z) = Q_s q. Terms of order
    theta_m Q_s^2 are dropped.
    """
    if abs(o.theta_m) >= THETA_M_WARN:
        logger.warning(f"theta_m = {o.theta_m:.3g} rad is outside the small-tilt regime "
                       f"of the birefringence expansion")
    q = o.q_hat
    big_q = m.Q_s * q
    calq = complex(q[0], q[1])
    k_cb = m.Q_s * np.array([0.0, float(np.dot(q, o.m_hat)), 0.0])
    k_lb = m.Q_s ** 2 * np.array([_squeeze(calq, -math.pi / 4), 0.0, _squeeze(calq, math.pi / 4)])
    k_0 = -(big_q[0] ** 2 + big_q[1] ** 2) / 2
    return BirefringenceVector(k_0=float(k_0), k_CB=k_cb, k_LB=k_lb)


def sphere_jones(b: BirefringenceVector, s: SphereParams, m: MaterialParams) -> JonesMatrix:
    """J_S = B(k_B / |k_B|, (l_e / l_P) |k_B| / Q_s)."""
    mag = b.magnitude
    if mag == 0:
        return JonesMatrix.identity()
    angle = (s.l_e / beat_length(m)) * mag / m.Q_s
    return rotation(PoincareVector.from_array(b.k_B / mag), angle)


def faraday_angle(o: Orientation, s: SphereParams, m: MaterialParams) -> float:
    """Signed rotation angle of a pure-CB sphere pass, (l_e / l_P) q.m."""
    return (s.l_e / beat_length(m)) * float(np.dot(o.q_hat, o.m_hat))


def chi_p(p_i: SopVector, j1: JonesMatrix, j2: JonesMatrix) -> complex:
    """<p_i| J1^dagger J2 |p_i>."""
    return complex(np.vdot(p_i.vector, j1.matrix.conj().T @ j2.matrix @ p_i.vector))


def circular_indices(b: BirefringenceVector, m: MaterialParams) -> Tuple[float, float]:
    """n_pm = n_0 (1 +- |k_CB|)^(1/2)."""
    k = float(np.linalg.norm(b.k_CB))
    return m.n_0 * math.sqrt(1 + k), m.n_0 * math.sqrt(1 - k)


def energy_density(e_plus: complex, e_minus: complex, b: BirefringenceVector,
                   m: MaterialParams) -> Tuple[float, float, float]:
    """Electric energy density (u_E, u_E0, u_E1) in the circular basis.

    u_E0 is the isotropic part, u_E1 the part proportional to
    |k_CB| (|E+|^2 - |E-|^2) that drives the inverse Faraday effect.
    """
    n_plus, n_minus = circular_indices(b, m)
    ip, im = abs(e_plus) ** 2, abs(e_minus) ** 2
    u_e = epsilon_0 * (n_plus ** 2 * ip + n_minus ** 2 * im) / 2
    u_e0 = epsilon_0 * m.n_0 ** 2 * (ip + im) / 2
    u_e1 = epsilon_0 * m.n_0 ** 2 * float(np.linalg.norm(b.k_CB)) * (ip - im) / 2
    return u_e, u_e0, u_e1
