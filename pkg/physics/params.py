"""Physical constants and parameter groups for the loop-mirror / sphere model.

Everything inside the library is SI. The ``from_*`` constructors accept the
lab-friendly units (nm, um, GHz) and convert at the boundary.

Default values describe a YIG sphere probed in the telecom band:
Q_s = 1e-4, n_0 = 2.19, lambda_0 = 1550 nm, M_s = 140 kA/m,
gamma_e / 2pi = 28 GHz/T, n_F = 1.47, omega_m / 2pi = 3 GHz.
"""
import math
from dataclasses import dataclass, field as dc_field
from logging import getLogger
from typing import List, Optional

from scipy import constants

from physics.errors import ParameterError

logger = getLogger(__name__)

HBAR = constants.hbar
C_LIGHT = constants.c
MU_0 = constants.mu_0

GAMMA_E_DEFAULT = 2 * math.pi * 28e9  # rad / (s T)

# omega_m * t_p above this is no longer an instantaneous kick
PULSE_SHORTNESS_LIMIT = 0.1


@dataclass(frozen=True)
class MaterialParams:
    """Magneto-optic material constants."""
    Q_s: float = 1e-4
    n_0: float = 2.19
    lambda_0: float = 1550e-9  # m
    l_A: float = 0.5  # m, absorption length

    def __post_init__(self):
        if not 0 < self.Q_s < 0.01:
            raise ParameterError(f"Q_s must satisfy 0 < Q_s < 0.01, got {self.Q_s}")
        if self.n_0 < 1:
            raise ParameterError(f"n_0 must be >= 1, got {self.n_0}")
        if self.lambda_0 <= 0:
            raise ParameterError(f"lambda_0 must be positive, got {self.lambda_0}")
        if self.l_A <= 0:
            raise ParameterError(f"l_A must be positive, got {self.l_A}")

    @classmethod
    def from_nm(cls, lambda_0_nm: float = 1550.0, Q_s: float = 1e-4,
                n_0: float = 2.19, l_A: float = 0.5) -> "MaterialParams":
        return cls(Q_s=Q_s, n_0=n_0, lambda_0=lambda_0_nm * 1e-9, l_A=l_A)


@dataclass(frozen=True)
class SphereParams:
    """Ferrimagnetic sphere geometry and magnetization."""
    R_s: float = 100e-6  # m
    M_s: float = 140e3  # A/m

    def __post_init__(self):
        if self.R_s <= 0:
            raise ParameterError(f"R_s must be positive, got {self.R_s}")
        if self.M_s <= 0:
            raise ParameterError(f"M_s must be positive, got {self.M_s}")

    @property
    def V_s(self) -> float:
        return 4.0 * math.pi * self.R_s ** 3 / 3.0

    @property
    def l_e(self) -> float:
        """Effective optical travel length inside the sphere."""
        return 2.0 * self.R_s

    @classmethod
    def from_um(cls, R_s_um: float = 100.0, M_s: float = 140e3) -> "SphereParams":
        return cls(R_s=R_s_um * 1e-6, M_s=M_s)


@dataclass(frozen=True)
class FieldParams:
    """Kittel-mode frequency and the constants that tie it to H_dc.

    ``ife_enhancement`` multiplies the semiclassical inverse-Faraday field,
    which is known to underestimate measured values; 1.0 keeps the
    semiclassical result.
    """
    omega_m: float = 2 * math.pi * 3e9  # rad/s
    gamma_e: float = GAMMA_E_DEFAULT
    mu_0: float = MU_0
    ife_enhancement: float = 1.0

    def __post_init__(self):
        if self.omega_m <= 0:
            raise ParameterError(f"omega_m must be positive, got {self.omega_m}")
        if self.gamma_e <= 0:
            raise ParameterError(f"gamma_e must be positive, got {self.gamma_e}")
        if self.mu_0 <= 0:
            raise ParameterError(f"mu_0 must be positive, got {self.mu_0}")
        if self.ife_enhancement <= 0:
            raise ParameterError(f"ife_enhancement must be positive, got {self.ife_enhancement}")

    @property
    def H_dc(self) -> float:
        return self.omega_m / (self.mu_0 * self.gamma_e)

    @classmethod
    def from_ghz(cls, f_m_GHz: float = 3.0, gamma_e: float = GAMMA_E_DEFAULT,
                 ife_enhancement: float = 1.0) -> "FieldParams":
        return cls(omega_m=2 * math.pi * f_m_GHz * 1e9, gamma_e=gamma_e,
                   ife_enhancement=ife_enhancement)

    @classmethod
    def from_field(cls, H_dc: float, gamma_e: float = GAMMA_E_DEFAULT) -> "FieldParams":
        """Build from the static field, omega_m = gamma_e mu_0 H_dc."""
        return cls(omega_m=gamma_e * MU_0 * H_dc, gamma_e=gamma_e)


@dataclass(frozen=True)
class TimingParams:
    """Interaction times of the two sub-pulses and the loop fiber."""
    t1: float = 0.0
    t2: float = 0.0
    n_F: float = 1.47
    t_p: float = 100e-15  # s

    def __post_init__(self):
        if self.t2 < self.t1:
            raise ParameterError(f"t2 ({self.t2}) must not precede t1 ({self.t1})")
        if self.n_F <= 0:
            raise ParameterError(f"n_F must be positive, got {self.n_F}")
        if self.t_p < 0:
            raise ParameterError(f"t_p must be non-negative, got {self.t_p}")

    @property
    def delta_t(self) -> float:
        return self.t2 - self.t1

    @classmethod
    def from_periods(cls, f: FieldParams, periods: float, t1: float = 0.0,
                     n_F: float = 1.47, t_p: float = 100e-15) -> "TimingParams":
        """Delay expressed in Kittel-mode periods."""
        return cls(t1=t1, t2=t1 + periods * magnon_period(f), n_F=n_F, t_p=t_p)


# ---------------------------------------------------------------------------
# Derived scalars
# ---------------------------------------------------------------------------

def beat_length(m: MaterialParams) -> float:
    """Polarization beat length l_P = lambda_0 / (n_0 Q_s)."""
    return m.lambda_0 / (m.n_0 * m.Q_s)


def absorption_ratio(m: MaterialParams) -> float:
    """l_P / l_A, the fraction of an absorption length per beat length."""
    return beat_length(m) / m.l_A


def theta_mz(s: SphereParams, f: FieldParams) -> float:
    """theta_mz = 2 hbar gamma_e / (V_s M_s)."""
    return 2.0 * HBAR * f.gamma_e / (s.V_s * s.M_s)


def spin_count(s: SphereParams, f: FieldParams) -> float:
    return s.V_s * s.M_s / (HBAR * f.gamma_e)


def stoner_wohlfarth_energy(theta_m: float, f: FieldParams, theta_mz_value: float) -> float:
    """Zeeman energy of the macrospin, -2 hbar omega_m cos(theta_m) / theta_mz."""
    if theta_mz_value <= 0:
        raise ParameterError(f"theta_mz must be positive, got {theta_mz_value}")
    return -2.0 * HBAR * f.omega_m * math.cos(theta_m) / theta_mz_value


def magnon_angle_quantum(theta_mz_value: float) -> float:
    """Tilt angle of a single magnon excitation, sqrt(theta_mz).

    Small-angle solution of E_M(theta) - E_M(0) = hbar omega_m; exact to
    machine precision for theta_mz ~ 1e-17.
    """
    if theta_mz_value <= 0:
        raise ParameterError(f"theta_mz must be positive, got {theta_mz_value}")
    return math.sqrt(theta_mz_value)


def kittel_frequency(f: FieldParams) -> float:
    """omega_m / 2pi in Hz."""
    return f.omega_m / (2 * math.pi)


def magnon_period(f: FieldParams) -> float:
    return 2 * math.pi / f.omega_m


def undo_delays(f: FieldParams, count: int) -> List[float]:
    """First ``count`` delays with cos(omega_m dt / 2) = 0, dt = (2k+1) pi / omega_m."""
    return [(2 * k + 1) * math.pi / f.omega_m for k in range(count)]


def fiber_length_for_delay(f: FieldParams, n_F: float, cycles: float = 1.0) -> float:
    """Loop fiber length giving a delay of ``cycles`` Kittel periods."""
    if cycles <= 0:
        raise ParameterError(f"cycles must be positive, got {cycles}")
    if n_F <= 0:
        raise ParameterError(f"n_F must be positive, got {n_F}")
    return cycles * C_LIGHT / n_F / kittel_frequency(f)


def pulse_shortness(timing: TimingParams, f: FieldParams) -> float:
    """omega_m t_p; warns when the instantaneous-kick picture breaks down."""
    ratio = f.omega_m * timing.t_p
    if ratio >= PULSE_SHORTNESS_LIMIT:
        logger.warning(f"omega_m * t_p = {ratio:.3g} is not << 1; "
                       f"the instantaneous kick model is questionable")
    return ratio


def single_photon_omega(wavelength: float) -> float:
    """omega_e = 2 pi c / lambda for a single photon."""
    if wavelength <= 0:
        raise ParameterError(f"wavelength must be positive, got {wavelength}")
    return 2 * math.pi * C_LIGHT / wavelength


def ife_field(omega_e: float, m: MaterialParams, s: SphereParams, f: FieldParams) -> float:
    """Inverse-Faraday effective field magnitude in A/m.

    H_IFE = 2 hbar omega_e Q_s / (mu_0 V_s M_s), scaled by
    ``f.ife_enhancement``.
    """
    if omega_e <= 0:
        raise ParameterError(f"omega_e must be positive, got {omega_e}")
    base = 2.0 * HBAR * omega_e * m.Q_s / (f.mu_0 * s.V_s * s.M_s)
    return f.ife_enhancement * base


def theta_ife(m: MaterialParams, s: SphereParams, f: FieldParams, wavelength: Optional[float] = None) -> float:
    """Magnetization rotation produced by one photon crossing the sphere.

    mu_0 gamma_e H_IFE times the transit time 2 n_0 R_s / c, which reduces to
    4 pi n_0 Q_s R_s theta_mz / lambda.
    """
    wavelength = m.lambda_0 if wavelength is None else wavelength
    h = ife_field(single_photon_omega(wavelength), m, s, f)
    return f.mu_0 * f.gamma_e * h * (2.0 * m.n_0 * s.R_s / C_LIGHT)


def alpha_i_magnitude(m: MaterialParams, s: SphereParams, f: FieldParams,
                      wavelength: Optional[float] = None) -> float:
    """|alpha_i| = theta_IFE / theta_m0."""
    return theta_ife(m, s, f, wavelength) / magnon_angle_quantum(theta_mz(s, f))


@dataclass(frozen=True)
class PhysicalParams:
    """All parameter groups plus the derived quantities the experiment reports."""
    material: MaterialParams = dc_field(default_factory=MaterialParams)
    sphere: SphereParams = dc_field(default_factory=SphereParams)
    field: FieldParams = dc_field(default_factory=FieldParams)
    timing: TimingParams = dc_field(default_factory=TimingParams)

    @property
    def beat_length(self) -> float:
        return beat_length(self.material)

    @property
    def theta_mz(self) -> float:
        return theta_mz(self.sphere, self.field)

    @property
    def theta_m0(self) -> float:
        return magnon_angle_quantum(self.theta_mz)

    @property
    def theta_ife(self) -> float:
        return theta_ife(self.material, self.sphere, self.field)

    @property
    def alpha_i_magnitude(self) -> float:
        return alpha_i_magnitude(self.material, self.sphere, self.field)

    @property
    def fiber_length(self) -> float:
        """Fiber length for the configured delay t2 - t1 (0 when there is none)."""
        if self.timing.delta_t == 0:
            return 0.0
        cycles = self.timing.delta_t / magnon_period(self.field)
        return fiber_length_for_delay(self.field, self.timing.n_F, cycles)

    @property
    def pulse_shortness(self) -> float:
        return pulse_shortness(self.timing, self.field)
