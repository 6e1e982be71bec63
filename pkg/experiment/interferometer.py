"""Loop-mirror observables: coupler, port probabilities, entanglement and collapse.

Port convention: the clockwise sub-pulse is the one transmitted by the
coupler (amplitude t) and meets the sphere at t1; the counter-clockwise
sub-pulse is reflected (amplitude r) and meets it at t2. Port a2 is the
transmission (dark) port, a1 the reflection port.
"""
import math
from dataclasses import dataclass, field
from enum import Enum
from logging import getLogger
from typing import Dict, Optional, Tuple, Union

import numpy as np

from physics import bosonic
from physics.bosonic import FockState, overlap_analytic
from physics.errors import ParameterError
from physics.jones import JonesMatrix, loop_jones, sop_overlap, standard_sop
from physics.magnetooptics import Orientation, birefringence, chi_p, sphere_jones
from physics.params import FieldParams, PhysicalParams, pulse_shortness

logger = getLogger(__name__)

PROB_TOL = 1e-12
# below this nu_+ the (|a+> + |a->) branch is treated as empty
DEGENERATE_NU = 1e-14


class Configuration(Enum):
    PARALLEL = "parallel"
    PERPENDICULAR = "perpendicular"


@dataclass(frozen=True)
class CouplerParams:
    """Optical coupler with t' = t and r' = r = i t |r/t|.

    ``phase`` is a global phase on t; observables do not depend on it.
    """
    t_mag: float = math.sqrt(0.5)
    r_mag: float = math.sqrt(0.5)
    phase: float = 0.0

    def __post_init__(self):
        if self.t_mag <= 0 or self.r_mag < 0:
            raise ParameterError(f"coupler needs |t| > 0 and |r| >= 0, got |t|={self.t_mag}, |r|={self.r_mag}")
        total = self.t_mag ** 2 + self.r_mag ** 2
        if abs(total - 1.0) > PROB_TOL:
            raise ParameterError(f"coupler |t|^2 + |r|^2 = {total!r} (must be 1)")

    @property
    def t(self) -> complex:
        return self.t_mag * complex(math.cos(self.phase), math.sin(self.phase))

    @property
    def r(self) -> complex:
        return 1j * self.t * (self.r_mag / self.t_mag)

    @property
    def t_prime(self) -> complex:
        return self.t

    @property
    def r_prime(self) -> complex:
        return self.r

    @property
    def upsilon(self) -> float:
        return (self.r_mag / self.t_mag) ** 2

    @classmethod
    def three_db(cls) -> "CouplerParams":
        return cls(math.sqrt(0.5), math.sqrt(0.5))

    @classmethod
    def from_splitting(cls, transmission: float, phase: float = 0.0) -> "CouplerParams":
        """Build from the power splitting |t|^2."""
        if not 0 < transmission <= 1:
            raise ParameterError(f"splitting ratio |t|^2 must lie in (0, 1], got {transmission}")
        return cls(math.sqrt(transmission), math.sqrt(1.0 - transmission), phase)


@dataclass(frozen=True)
class ScatteringMatrix:
    """4x4 S over ports (a1, a2, b1, b2): E_out = S E_in."""
    matrix: np.ndarray

    def apply(self, e_in) -> np.ndarray:
        return self.matrix @ np.asarray(e_in, dtype=complex)

    def unitarity_error(self) -> float:
        return float(np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(4))))

    def symmetry_error(self) -> float:
        return float(np.max(np.abs(self.matrix.T - self.matrix)))


def scattering_matrix(c: CouplerParams) -> ScatteringMatrix:
    t, r, tp, rp = c.t, c.r, c.t_prime, c.r_prime
    return ScatteringMatrix(np.array([[0, 0, tp, rp],
                                      [0, 0, rp, tp],
                                      [t, r, 0, 0],
                                      [r, t, 0, 0]], dtype=complex))


@dataclass(frozen=True)
class BranchOverlaps:
    chi_P: complex
    chi_M: complex
    eta: float

    def __post_init__(self):
        for name in ("chi_P", "chi_M"):
            if abs(getattr(self, name)) > 1 + PROB_TOL:
                raise ParameterError(f"|{name}| = {abs(getattr(self, name))!r} exceeds 1")


def eta(chi_P: complex, chi_M: complex, retention: float = 1.0) -> float:
    """(1 - d Re(chi_P chi_M)) / 2; d = 1 is the unitary case."""
    return (1.0 - retention * (chi_P * chi_M).real) / 2.0


def transmission_reflection(c: CouplerParams, eta_value: float) -> Tuple[float, float]:
    """p_T = (|t|^2 - |r|^2)^2 + 4|tr|^2 eta and p_R = 4|tr|^2 (1 - eta)."""
    t2 = c.t_mag ** 2 / (c.t_mag ** 2 + c.r_mag ** 2)
    r2 = 1.0 - t2
    cross = 4.0 * t2 * r2
    return (t2 - r2) ** 2 + cross * eta_value, cross * (1.0 - eta_value)


@dataclass(frozen=True)
class FinalState:
    """Amplitude prefactors of |psi_f> and the port probabilities they give."""
    amplitudes: Dict[str, complex]
    overlaps: BranchOverlaps
    p_T: float
    p_R: float


def final_state_symbolic(c: CouplerParams, chi_P: complex, chi_M: complex) -> FinalState:
    """|psi_f> = t r' |a1,+> + r t' |a1,-> + t t' |a2,+> + r r' |a2,->."""
    amplitudes = {
        "a1_plus": c.t * c.r_prime,
        "a1_minus": c.r * c.t_prime,
        "a2_plus": c.t * c.t_prime,
        "a2_minus": c.r * c.r_prime,
    }
    e = eta(chi_P, chi_M)
    p_t, p_r = transmission_reflection(c, e)
    return FinalState(amplitudes, BranchOverlaps(chi_P, chi_M, e), p_t, p_r)


def port_probability(plus_amp: complex, minus_amp: complex, branch_overlap: complex) -> float:
    """<psi|Pi_port|psi> for two normalized branches with <+|-> = branch_overlap."""
    gram = np.array([[1.0, branch_overlap], [np.conj(branch_overlap), 1.0]])
    v = np.array([plus_amp, minus_amp])
    return float(np.vdot(v, gram @ v).real)


@dataclass(frozen=True)
class CollapseModel:
    """Retention factor d of the branch coherence: 1 unitary, 0 full collapse."""
    d: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.d <= 1.0:
            raise ParameterError(f"collapse retention d must lie in [0, 1], got {self.d}")


def collapsed_transmission(c: CouplerParams, chi_P: complex, chi_M: complex,
                           cm: CollapseModel) -> Tuple[float, float]:
    return transmission_reflection(c, eta(chi_P, chi_M, retention=cm.d))


# ---------------------------------------------------------------------------
# Schmidt decomposition and purity
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchmidtData:
    """|psi_f> = v1 |a1> (x) |m1> + v2 |a2> (x) |m2>."""
    v1: complex
    v2: complex
    mu: complex
    nu_plus: float
    nu_minus: float
    m_overlap: complex
    purity: float
    m1: Optional[FockState] = None
    m2: Optional[FockState] = None

    @property
    def mu_re(self) -> float:
        return self.mu.real

    @property
    def mu_im(self) -> float:
        return self.mu.imag


def schmidt_from_overlap(c: CouplerParams, mu: complex) -> SchmidtData:
    """Closed-form Schmidt data for branch states with overlap mu = <+|->.

    Purity is evaluated as 1 - 2|v1 v2|^2 + 2|v1 v2 <m1|m2>|^2 so that no
    division by nu_+ or by the m2 norm is needed.
    """
    ups = c.upsilon
    t2 = c.t * c.t
    nu_plus = max(0.0, 2.0 * (1.0 + mu.real))
    nu_minus = max(0.0, 2.0 * (1.0 - mu.real))
    d2 = (1.0 - ups) ** 2 + ups * nu_minus
    v1 = 1j * t2 * math.sqrt(ups * nu_plus)
    v2 = t2 * math.sqrt(d2)
    # <(+ + -)|(+ - ups -)> before normalization
    raw = 1.0 - ups - ups * mu + np.conj(mu)
    cross = abs(t2) ** 4 * ups * abs(raw) ** 2
    purity = 1.0 - 2.0 * abs(v1 * v2) ** 2 + 2.0 * cross
    norm = math.sqrt(nu_plus * d2)
    m_overlap = complex(raw / norm) if norm > DEGENERATE_NU else 0j
    return SchmidtData(v1=complex(v1), v2=complex(v2), mu=complex(mu), nu_plus=nu_plus,
                       nu_minus=nu_minus, m_overlap=m_overlap, purity=float(purity))


def _orthogonal_to(vec: np.ndarray) -> np.ndarray:
    """A normalized vector orthogonal to ``vec`` (Gram-Schmidt on a shifted copy)."""
    u = vec / np.linalg.norm(vec)
    w = np.roll(u, 1)
    w = w - np.vdot(u, w) * u
    n = np.linalg.norm(w)
    if n < 1e-12:
        w = np.zeros_like(u)
        w[int(np.argmin(np.abs(u)))] = 1.0
        w = w - np.vdot(u, w) * u
        n = np.linalg.norm(w)
    return w / n


def schmidt_decompose(c: CouplerParams, alpha_plus: complex, alpha_minus: complex,
                      N: Optional[int] = None) -> SchmidtData:
    """Schmidt data for coherent branches |alpha_+>, |alpha_->, with Fock vectors m1, m2.

    When nu_+ is degenerate, v1 comes from the Gram norm of |a+> + |a-> in the
    Fock representation and m1 is any unit vector orthogonal to |a+>; the
    same applies to m2 when its normalization vanishes.
    """
    if N is None:
        N = max(bosonic.required_dimension(alpha_plus), bosonic.required_dimension(alpha_minus))
    data = schmidt_from_overlap(c, overlap_analytic(alpha_plus, alpha_minus))
    plus = bosonic.coherent_state(alpha_plus, N).amplitudes
    minus = bosonic.coherent_state(alpha_minus, N).amplitudes
    ups = c.upsilon
    v1 = data.v1
    m1_raw = plus + minus
    if data.nu_plus < DEGENERATE_NU:
        v1 = complex(1j * c.t * c.t * math.sqrt(ups) * float(np.linalg.norm(m1_raw)))
        m1 = _orthogonal_to(plus)
    else:
        m1 = m1_raw / math.sqrt(data.nu_plus)
    d2 = (1.0 - ups) ** 2 + ups * data.nu_minus
    if d2 < DEGENERATE_NU:
        m2 = _orthogonal_to(plus)
    else:
        m2 = (plus - ups * minus) / math.sqrt(d2)
    return SchmidtData(v1=v1, v2=data.v2, mu=data.mu, nu_plus=data.nu_plus,
                       nu_minus=data.nu_minus, m_overlap=data.m_overlap, purity=data.purity,
                       m1=FockState(m1), m2=FockState(m2))


def purity_symmetric(alpha_i: complex, f: FieldParams, delta_t: float) -> float:
    """3 dB purity, (1 + exp(-4 |a_i|^2 cos^2(omega_m dt / 2))) / 2; independent of alpha."""
    c = math.cos(f.omega_m * delta_t / 2.0)
    return (1.0 + math.exp(-4.0 * abs(alpha_i) ** 2 * c * c)) / 2.0


BranchVector = Union[FockState, np.ndarray]


def _amplitudes(v: BranchVector) -> np.ndarray:
    return v.amplitudes if isinstance(v, FockState) else np.asarray(v, dtype=complex).reshape(-1)


def joint_state(c: CouplerParams, plus: BranchVector, minus: BranchVector) -> np.ndarray:
    """Port (x) branch vector of |psi_f>, port index 0 = a1, 1 = a2."""
    p, m = _amplitudes(plus), _amplitudes(minus)
    a1 = c.t * c.r_prime * p + c.r * c.t_prime * m
    a2 = c.t * c.t_prime * p + c.r * c.r_prime * m
    return np.concatenate([a1, a2])


def joint_state_fock(c: CouplerParams, alpha_plus: complex, alpha_minus: complex, N: int) -> np.ndarray:
    return joint_state(c, bosonic.coherent_state(alpha_plus, N), bosonic.coherent_state(alpha_minus, N))


def purity_oracle(c: CouplerParams, alpha_plus: complex, alpha_minus: complex, N: int) -> float:
    """Tr rho_M^2 by explicit partial trace of the truncated joint state."""
    return bosonic.reduced_purity(joint_state_fock(c, alpha_plus, alpha_minus, N), (2, N), keep=1)


def port_probabilities(joint: np.ndarray) -> Tuple[float, float]:
    """(p_T, p_R) read off a joint state vector."""
    half = joint.shape[0] // 2
    return float(np.vdot(joint[half:], joint[half:]).real), float(np.vdot(joint[:half], joint[:half]).real)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OpticsSetup:
    """Input SOP and magnetization angles at t1 and t2 (parallel configuration)."""
    input_sop: str = "H"
    theta: float = 0.0
    phi: float = 0.0
    theta_m1: float = 0.0
    phi_m1: float = 0.0
    theta_m2: float = 0.0
    phi_m2: float = 0.0

    def orientation(self, second: bool) -> Orientation:
        if second:
            return Orientation(self.theta, self.phi, self.theta_m2, self.phi_m2)
        return Orientation(self.theta, self.phi, self.theta_m1, self.phi_m1)


@dataclass(frozen=True)
class MagnonSetup:
    """Initial coherent amplitude and the IFE kick (perpendicular configuration).

    ``alpha_i_mag`` of None means |alpha_i| = theta_IFE / theta_m0.
    """
    alpha: complex = 0j
    alpha_i_mag: Optional[float] = None
    alpha_i_phase: float = 0.0

    def __post_init__(self):
        if self.alpha_i_mag is not None and self.alpha_i_mag < 0:
            raise ParameterError(f"alpha_i_mag must be non-negative, got {self.alpha_i_mag}")

    def alpha_i(self, params: PhysicalParams) -> complex:
        mag = params.alpha_i_magnitude if self.alpha_i_mag is None else self.alpha_i_mag
        return mag * complex(math.cos(self.alpha_i_phase), math.sin(self.alpha_i_phase))


@dataclass(frozen=True)
class Scenario:
    configuration: Configuration = Configuration.PERPENDICULAR
    params: PhysicalParams = field(default_factory=PhysicalParams)
    coupler: CouplerParams = field(default_factory=CouplerParams)
    optics: OpticsSetup = field(default_factory=OpticsSetup)
    magnon: MagnonSetup = field(default_factory=MagnonSetup)
    collapse: CollapseModel = field(default_factory=CollapseModel)
    oracle: bool = False
    fock_dim: Optional[int] = None


@dataclass(frozen=True)
class IntermediateOverlaps:
    """Branch overlaps between the two kicks, at tau = (t2 - t1) / 2."""
    chi_P: complex
    chi_M: complex
    eta: float
    p_T: float
    purity: float
    alpha_plus: complex = 0j
    alpha_minus: complex = 0j


def _sphere_jones(scenario: Scenario, second: bool) -> JonesMatrix:
    p = scenario.params
    b = birefringence(scenario.optics.orientation(second), p.material)
    return sphere_jones(b, p.sphere, p.material)


def intermediate_overlaps(scenario: Scenario) -> IntermediateOverlaps:
    """Overlaps after the clockwise kick but before the counter-clockwise one.

    Parallel: chi_P = <p_i| J_S(t1)^dagger |p_i>, chi_M = 1.
    Perpendicular: chi_P = 1 and the magnon branches are (alpha + alpha_i) e^{-i omega_m tau}
    and alpha e^{-i omega_m tau}.
    """
    c = scenario.coupler
    p = scenario.params
    alpha_plus = alpha_minus = 0j
    if scenario.configuration is Configuration.PARALLEL:
        chi_P = chi_p(standard_sop(scenario.optics.input_sop), _sphere_jones(scenario, False),
                      JonesMatrix.identity())
        chi_M = 1.0 + 0j
        mu = chi_P
    else:
        alpha = scenario.magnon.alpha
        alpha_i = scenario.magnon.alpha_i(p)
        tau = p.timing.delta_t / 2.0
        phase = np.exp(-1j * p.field.omega_m * tau)
        alpha_plus = complex((alpha + alpha_i) * phase)
        alpha_minus = complex(alpha * phase)
        chi_P = 1.0 + 0j
        chi_M = overlap_analytic(alpha_plus, alpha_minus)
        mu = chi_M
    e = eta(chi_P, chi_M)
    p_t, _ = transmission_reflection(c, e)
    purity = schmidt_from_overlap(c, mu).purity
    return IntermediateOverlaps(chi_P=complex(chi_P), chi_M=complex(chi_M), eta=e, p_T=p_t,
                                purity=purity, alpha_plus=alpha_plus, alpha_minus=alpha_minus)


INPUT_COLUMNS = (
    "configuration",
    "Q_s", "n_0", "lambda_0", "l_A",
    "R_s", "M_s",
    "omega_m", "gamma_e", "mu_0", "ife_enhancement",
    "t1", "t2", "delta_t", "n_F", "t_p",
    "t_mag", "r_mag", "coupler_phase",
    "input_sop", "theta", "phi", "theta_m1", "phi_m1", "theta_m2", "phi_m2",
    "alpha_re", "alpha_im", "alpha_i_phase",
    "collapse_d", "oracle", "fock_dim",
)

RESULT_COLUMNS = INPUT_COLUMNS + (
    "chi_P_re", "chi_P_im", "chi_M_re", "chi_M_im", "eta",
    "p_T_unitary", "p_R_unitary", "p_T_collapsed",
    "purity_closed_form", "purity_oracle", "intermediate_eta", "intermediate_purity",
    "L_F", "theta_mz", "theta_IFE", "alpha_i_mag", "omega_m_tp_ratio",
)


@dataclass(frozen=True)
class ConfigurationResult:
    scenario: Scenario
    overlaps: BranchOverlaps
    p_T: float
    p_R: float
    p_T_collapsed: float
    p_R_collapsed: float
    schmidt: SchmidtData
    intermediate: IntermediateOverlaps
    purity_oracle: Optional[float] = None
    alpha_plus: complex = 0j
    alpha_minus: complex = 0j
    alpha_i: complex = 0j

    @property
    def purity(self) -> float:
        return self.schmidt.purity

    def to_row(self) -> Dict[str, object]:
        """Flat record of the observables in ResultRow column order."""
        s = self.scenario
        p = s.params
        m, sph, f, tm, o = p.material, p.sphere, p.field, p.timing, s.optics
        return {
            "configuration": s.configuration.value,
            "Q_s": m.Q_s,
            "n_0": m.n_0,
            "lambda_0": m.lambda_0,
            "l_A": m.l_A,
            "R_s": sph.R_s,
            "M_s": sph.M_s,
            "omega_m": f.omega_m,
            "gamma_e": f.gamma_e,
            "mu_0": f.mu_0,
            "ife_enhancement": f.ife_enhancement,
            "t1": tm.t1,
            "t2": tm.t2,
            "delta_t": tm.delta_t,
            "n_F": tm.n_F,
            "t_p": tm.t_p,
            "t_mag": s.coupler.t_mag,
            "r_mag": s.coupler.r_mag,
            "coupler_phase": s.coupler.phase,
            "input_sop": o.input_sop,
            "theta": o.theta,
            "phi": o.phi,
            "theta_m1": o.theta_m1,
            "phi_m1": o.phi_m1,
            "theta_m2": o.theta_m2,
            "phi_m2": o.phi_m2,
            "alpha_re": complex(s.magnon.alpha).real,
            "alpha_im": complex(s.magnon.alpha).imag,
            "alpha_i_phase": s.magnon.alpha_i_phase,
            "collapse_d": s.collapse.d,
            "oracle": s.oracle,
            "fock_dim": s.fock_dim,
            "chi_P_re": self.overlaps.chi_P.real,
            "chi_P_im": self.overlaps.chi_P.imag,
            "chi_M_re": self.overlaps.chi_M.real,
            "chi_M_im": self.overlaps.chi_M.imag,
            "eta": self.overlaps.eta,
            "p_T_unitary": self.p_T,
            "p_R_unitary": self.p_R,
            "p_T_collapsed": self.p_T_collapsed,
            "purity_closed_form": self.schmidt.purity,
            "purity_oracle": self.purity_oracle,
            "intermediate_eta": self.intermediate.eta,
            "intermediate_purity": self.intermediate.purity,
            "L_F": p.fiber_length,
            "theta_mz": p.theta_mz,
            "theta_IFE": p.theta_ife,
            "alpha_i_mag": abs(self.alpha_i),
            "omega_m_tp_ratio": pulse_shortness(p.timing, p.field),
        }


def _parallel_chi_p(scenario: Scenario) -> complex:
    p_i = standard_sop(scenario.optics.input_sop)
    j_plus = loop_jones(_sphere_jones(scenario, False), "cw")
    j_minus = loop_jones(_sphere_jones(scenario, True), "ccw")
    return sop_overlap(j_plus @ p_i, j_minus @ p_i)


def _oracle_dimension(scenario: Scenario, *amplitudes: complex) -> int:
    if scenario.fock_dim is not None:
        return scenario.fock_dim
    return max(bosonic.required_dimension(abs(a)) for a in amplitudes)


def run_configuration(scenario: Scenario) -> ConfigurationResult:
    """Evaluate one scenario: overlaps, port probabilities, purity and the optional Fock oracle."""
    c = scenario.coupler
    p = scenario.params
    alpha_plus = alpha_minus = alpha_i = 0j
    oracle_value = None
    if scenario.configuration is Configuration.PARALLEL:
        chi_P = _parallel_chi_p(scenario)
        chi_M = 1.0 + 0j
        schmidt = schmidt_from_overlap(c, chi_P)
        if scenario.oracle:
            p_i = standard_sop(scenario.optics.input_sop)
            plus = loop_jones(_sphere_jones(scenario, False), "cw") @ p_i
            minus = loop_jones(_sphere_jones(scenario, True), "ccw") @ p_i
            oracle_value = bosonic.reduced_purity(joint_state(c, plus.vector, minus.vector), (2, 2))
    else:
        alpha = complex(scenario.magnon.alpha)
        alpha_i = scenario.magnon.alpha_i(p)
        alpha_plus, alpha_minus = bosonic.branch_amplitudes(alpha, alpha_i, p.field, p.timing.delta_t)
        chi_P = 1.0 + 0j
        chi_M = overlap_analytic(alpha_plus, alpha_minus)
        N = _oracle_dimension(scenario, alpha_plus, alpha_minus, abs(alpha) + abs(alpha_i))
        schmidt = schmidt_decompose(c, alpha_plus, alpha_minus, N)
        if scenario.oracle:
            oracle_value = purity_oracle(c, alpha_plus, alpha_minus, N)
    e = eta(chi_P, chi_M)
    p_t, p_r = transmission_reflection(c, e)
    p_tc, p_rc = collapsed_transmission(c, chi_P, chi_M, scenario.collapse)
    logger.debug(f"{scenario.configuration.value}: chi_P={chi_P:.6g} chi_M={chi_M:.6g} "
                 f"eta={e:.6g} p_T={p_t:.6g}")
    return ConfigurationResult(
        scenario=scenario,
        overlaps=BranchOverlaps(complex(chi_P), complex(chi_M), e),
        p_T=p_t, p_R=p_r, p_T_collapsed=p_tc, p_R_collapsed=p_rc,
        schmidt=schmidt,
        intermediate=intermediate_overlaps(scenario),
        purity_oracle=oracle_value,
        alpha_plus=alpha_plus, alpha_minus=alpha_minus, alpha_i=alpha_i,
    )
