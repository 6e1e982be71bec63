#!/usr/bin/env python3
"""Checks for the loop-mirror observables: coupler, port probabilities, purity and collapse."""
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from experiment.interferometer import (INPUT_COLUMNS, RESULT_COLUMNS, BranchOverlaps, CollapseModel,
                                       Configuration, CouplerParams, MagnonSetup, OpticsSetup, Scenario,
                                       collapsed_transmission, eta, final_state_symbolic,
                                       intermediate_overlaps,
                                       joint_state, joint_state_fock, port_probabilities,
                                       port_probability, purity_oracle, purity_symmetric,
                                       run_configuration, scattering_matrix, schmidt_decompose,
                                       schmidt_from_overlap, transmission_reflection)
from physics import bosonic
from physics.errors import ParameterError
from physics.params import (FieldParams, MaterialParams, PhysicalParams, SphereParams, TimingParams,
                            magnon_period)

N = 64
SEED = 2024
ANCHOR = (1.0 + math.exp(-4.0)) / 2.0  # 0.50916

splittings = st.floats(min_value=0.01, max_value=1.0)
overlaps = st.builds(lambda r, phi: r * complex(math.cos(phi), math.sin(phi)),
                     st.floats(0.0, 1.0), st.floats(0.0, 2 * math.pi))


def _perpendicular(alpha_i_mag, delta_t=0.0, alpha=0j, coupler=None, collapse_d=1.0, oracle=False):
    f = FieldParams()
    params = PhysicalParams(field=f, timing=TimingParams(t1=0.0, t2=delta_t))
    return Scenario(configuration=Configuration.PERPENDICULAR, params=params,
                    coupler=coupler or CouplerParams.three_db(),
                    magnon=MagnonSetup(alpha=alpha, alpha_i_mag=alpha_i_mag),
                    collapse=CollapseModel(collapse_d), oracle=oracle, fock_dim=N if oracle else None)


def test_coupler_validation():
    with pytest.raises(ParameterError):
        CouplerParams(0.5, 0.5)
    with pytest.raises(ParameterError):
        CouplerParams(0.0, 1.0)
    with pytest.raises(ParameterError):
        CouplerParams.from_splitting(0.0)
    c = CouplerParams.from_splitting(0.8)
    assert abs(c.upsilon - 0.25) < 1e-12
    assert abs(c.r / c.t - 0.5j) < 1e-12


@given(splittings, st.floats(0.0, 2 * math.pi))
def test_scattering_matrix_unitary_and_symmetric(transmission, phase):
    s = scattering_matrix(CouplerParams.from_splitting(transmission, phase))
    assert s.unitarity_error() < 1e-12
    assert s.symmetry_error() < 1e-15


def test_pure_transmission_is_permutation():
    s = scattering_matrix(CouplerParams(1.0, 0.0))
    out = s.apply([1.0, 0.0, 0.0, 0.0])
    assert np.allclose(np.abs(out), [0, 0, 1, 0])


def test_dark_port_without_which_path_information():
    p_t, p_r = transmission_reflection(CouplerParams.three_db(), eta(1.0, 1.0))
    assert p_t == 0.0
    assert abs(p_r - 1.0) < 1e-15


@given(splittings, overlaps)
def test_probabilities_sum_to_one(transmission, chi):
    p_t, p_r = transmission_reflection(CouplerParams.from_splitting(transmission), eta(chi, 1.0))
    assert abs(p_t + p_r - 1.0) < 1e-12
    assert 0.0 <= p_t <= 1.0 + 1e-12


@given(splittings, overlaps)
def test_gram_route_matches_closed_form(transmission, chi):
    c = CouplerParams.from_splitting(transmission)
    final = final_state_symbolic(c, chi, 1.0)
    a = final.amplitudes
    assert abs(port_probability(a["a2_plus"], a["a2_minus"], chi) - final.p_T) < 1e-12
    assert abs(port_probability(a["a1_plus"], a["a1_minus"], chi) - final.p_R) < 1e-12
    assert abs(sum(abs(v) ** 2 for v in a.values()) - 1.0) < 1e-12


def test_branch_overlaps_reject_unphysical():
    with pytest.raises(ParameterError):
        BranchOverlaps(1.1, 1.0, 0.0)


def test_collapse_endpoints():
    c = CouplerParams.three_db()
    chi = 0.3 + 0.2j
    unitary = transmission_reflection(c, eta(chi, 1.0))
    assert collapsed_transmission(c, chi, 1.0, CollapseModel(1.0)) == unitary
    p_t, p_r = collapsed_transmission(c, chi, 1.0, CollapseModel(0.0))
    assert abs(p_t - 0.5) < 1e-15
    assert abs(p_r - 0.5) < 1e-15
    with pytest.raises(ParameterError):
        CollapseModel(1.5)


@pytest.mark.parametrize("coupler", [CouplerParams.three_db(), CouplerParams.from_splitting(0.5)],
                         ids=["three_db", "from_splitting"])
@pytest.mark.parametrize("chi", [1.0, 0.3 + 0.2j, -0.6 + 0.1j, 0.0])
def test_full_collapse_gives_exactly_half(coupler, chi):
    p_t, p_r = collapsed_transmission(coupler, chi, 1.0, CollapseModel(0.0))
    assert p_t == 0.5
    assert p_r == 0.5


def test_collapse_interpolates_linearly():
    c = CouplerParams.from_splitting(0.6)
    values = [collapsed_transmission(c, 0.4, 1.0, CollapseModel(d))[0] for d in (0.0, 0.5, 1.0)]
    assert abs(values[1] - (values[0] + values[2]) / 2) < 1e-15


@given(overlaps)
def test_symmetric_purity_depends_on_modulus(mu):
    purity = schmidt_from_overlap(CouplerParams.three_db(), mu).purity
    assert abs(purity - (1.0 + abs(mu) ** 2) / 2.0) < 1e-12


def test_purity_limits():
    c = CouplerParams.three_db()
    assert abs(schmidt_from_overlap(c, 1.0 + 0j).purity - 1.0) < 1e-15
    assert abs(schmidt_from_overlap(c, 0j).purity - 0.5) < 1e-15


def test_degenerate_overlap_has_no_nan():
    data = schmidt_from_overlap(CouplerParams.three_db(), -1.0 + 0j)
    assert data.nu_plus == 0.0
    assert data.m_overlap == 0j
    assert abs(data.purity - 1.0) < 1e-15


def test_anchor_purity():
    f = FieldParams()
    assert abs(purity_symmetric(1.0, f, 0.0) - ANCHOR) < 1e-15
    a_plus, a_minus = bosonic.branch_amplitudes(0j, 1.0, f, 0.0)
    assert abs(abs(a_plus - a_minus) - 2.0) < 1e-15
    assert abs(schmidt_decompose(CouplerParams.three_db(), a_plus, a_minus).purity - ANCHOR) < 1e-12
    assert abs(purity_oracle(CouplerParams.three_db(), a_plus, a_minus, N) - ANCHOR) < 1e-8


def test_schmidt_vectors_rebuild_joint_state():
    c = CouplerParams.from_splitting(0.7, 0.4)
    a_plus, a_minus = 0.9 - 0.2j, -0.4 + 1.1j
    data = schmidt_decompose(c, a_plus, a_minus, N)
    rebuilt = np.concatenate([data.v1 * data.m1.amplitudes, data.v2 * data.m2.amplitudes])
    assert np.allclose(rebuilt, joint_state_fock(c, a_plus, a_minus, N), atol=1e-12)
    assert abs(data.m1.norm - 1.0) < 1e-10
    assert abs(data.m2.norm - 1.0) < 1e-10
    assert abs(bosonic.fock_overlap(data.m1, data.m2) - data.m_overlap) < 1e-10


def test_closed_form_purity_matches_partial_trace():
    rng = np.random.default_rng(SEED)
    f = FieldParams()
    for _ in range(50):
        alpha = complex(*rng.uniform(-1.4, 1.4, 2))
        alpha_i = complex(*rng.uniform(-1.4, 1.4, 2))
        delta_t = rng.uniform(0, 2 * math.pi) / f.omega_m
        c = CouplerParams.from_splitting(float(rng.uniform(0.5, 0.8)), float(rng.uniform(0, 2 * math.pi)))
        a_plus, a_minus = bosonic.branch_amplitudes(alpha, alpha_i, f, delta_t)
        closed = schmidt_decompose(c, a_plus, a_minus, N).purity
        assert abs(closed - purity_oracle(c, a_plus, a_minus, N)) < 1e-8


def test_joint_state_probabilities():
    c = CouplerParams.from_splitting(0.65)
    a_plus, a_minus = 0.5 + 0.5j, -0.3j
    p_t, p_r = port_probabilities(joint_state_fock(c, a_plus, a_minus, N))
    expected = transmission_reflection(c, eta(1.0, bosonic.overlap_analytic(a_plus, a_minus)))
    assert abs(p_t - expected[0]) < 1e-10
    assert abs(p_r - expected[1]) < 1e-10


def test_joint_state_accepts_plain_vectors():
    c = CouplerParams.three_db()
    joint = joint_state(c, np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    p_t, _ = port_probabilities(joint)
    assert abs(p_t) < 1e-15


def test_global_phase_invariance():
    rng = np.random.default_rng(SEED)
    base = run_configuration(_perpendicular(0.9, 0.2 / FieldParams().omega_m, alpha=0.3j,
                                            coupler=CouplerParams.from_splitting(0.7)))
    for phase in rng.uniform(0, 2 * math.pi, 5):
        c = CouplerParams.from_splitting(0.7, float(phase))
        r = run_configuration(_perpendicular(0.9, 0.2 / FieldParams().omega_m, alpha=0.3j, coupler=c))
        assert abs(r.p_T - base.p_T) < 1e-12
        assert abs(r.purity - base.purity) < 1e-12


def test_perpendicular_anchor_with_oracle():
    result = run_configuration(_perpendicular(1.0, oracle=True))
    assert abs(result.purity - ANCHOR) < 1e-12
    assert abs(result.purity_oracle - ANCHOR) < 1e-8
    assert abs(result.p_T + result.p_R - 1.0) < 1e-12


def test_half_period_delay_undoes_kick():
    f = FieldParams()
    result = run_configuration(_perpendicular(1.5, magnon_period(f) / 2, alpha=0.4 - 0.1j))
    assert abs(result.overlaps.chi_M - 1.0) < 1e-12
    assert result.p_T < 1e-12
    assert abs(result.purity - 1.0) < 1e-12


def test_strong_kick_and_collapse():
    result = run_configuration(_perpendicular(3.0, collapse_d=0.0))
    mu = bosonic.overlap_analytic(result.alpha_plus, result.alpha_minus)
    assert abs(result.p_T - (1 - mu.real) / 2) < 1e-12
    assert abs(result.p_T_collapsed - 0.5) < 1e-15
    assert abs(result.intermediate.purity - 0.5) < 0.02


def test_intermediate_overlap_uses_half_delay():
    f = FieldParams()
    delta_t = 0.8 / f.omega_m
    inter = intermediate_overlaps(_perpendicular(0.7, delta_t, alpha=0.2))
    phase = np.exp(-0.4j)
    assert abs(inter.alpha_plus - 0.9 * phase) < 1e-12
    assert abs(inter.alpha_minus - 0.2 * phase) < 1e-12
    assert inter.chi_P == 1.0


def test_default_kick_is_negligible():
    result = run_configuration(Scenario())
    assert result.alpha_i != 0
    assert abs(result.alpha_i) < 1e-3
    assert result.p_T < 1e-6
    assert result.purity > 1 - 1e-6


def test_parallel_identical_orientations_are_dark():
    scenario = Scenario(configuration=Configuration.PARALLEL,
                        optics=OpticsSetup(input_sop="D", theta=0.3, theta_m1=0.01, theta_m2=0.01),
                        oracle=True)
    result = run_configuration(scenario)
    assert abs(result.overlaps.chi_P - 1.0) < 1e-12
    assert result.p_T < 1e-12
    assert abs(result.purity_oracle - 1.0) < 1e-12


def test_parallel_tilt_reveals_path():
    scenario = Scenario(configuration=Configuration.PARALLEL,
                        optics=OpticsSetup(input_sop="H", theta_m2=0.2), oracle=True)
    result = run_configuration(scenario)
    assert abs(result.overlaps.chi_P) <= 1.0 + 1e-12
    assert abs(result.purity - result.purity_oracle) < 1e-10
    assert result.overlaps.chi_M == 1.0


def test_result_row_columns():
    row = run_configuration(_perpendicular(0.5)).to_row()
    assert tuple(row) == RESULT_COLUMNS
    assert row["configuration"] == "perpendicular"
    assert row["purity_oracle"] is None
    assert abs(row["alpha_i_mag"] - 0.5) < 1e-15
    assert row["L_F"] == 0.0


def test_result_row_echoes_inputs():
    f = FieldParams.from_ghz(2.5, ife_enhancement=3.0)
    params = PhysicalParams(material=MaterialParams(Q_s=2e-4, n_0=2.2, lambda_0=1300e-9, l_A=0.4),
                            sphere=SphereParams(R_s=150e-6, M_s=130e3), field=f,
                            timing=TimingParams(t1=1e-9, t2=1.2e-9, n_F=1.45, t_p=50e-15))
    scenario = Scenario(configuration=Configuration.PARALLEL, params=params,
                        coupler=CouplerParams.from_splitting(0.6, phase=0.2),
                        optics=OpticsSetup("D", 0.3, 0.4, 0.01, 0.5, 0.02, 0.6),
                        magnon=MagnonSetup(alpha=0.1 - 0.2j, alpha_i_phase=0.7),
                        collapse=CollapseModel(0.25), fock_dim=48)
    row = run_configuration(scenario).to_row()
    assert set(INPUT_COLUMNS) <= set(row)
    expected = {
        "configuration": "parallel", "Q_s": 2e-4, "n_0": 2.2, "lambda_0": 1300e-9, "l_A": 0.4,
        "R_s": 150e-6, "M_s": 130e3, "omega_m": f.omega_m, "gamma_e": f.gamma_e, "mu_0": f.mu_0,
        "ife_enhancement": 3.0, "t1": 1e-9, "t2": 1.2e-9, "n_F": 1.45, "t_p": 50e-15,
        "coupler_phase": 0.2, "input_sop": "D", "theta": 0.3, "phi": 0.4, "theta_m1": 0.01,
        "phi_m1": 0.5, "theta_m2": 0.02, "phi_m2": 0.6, "alpha_re": 0.1, "alpha_im": -0.2,
        "alpha_i_phase": 0.7, "collapse_d": 0.25, "oracle": False, "fock_dim": 48,
    }
    for key, value in expected.items():
        assert row[key] == value, key
    assert abs(row["delta_t"] - 0.2e-9) < 1e-22
    assert abs(row["t_mag"] ** 2 - 0.6) < 1e-15


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
