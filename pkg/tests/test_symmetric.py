import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaussqi.errors import CurvatureTooLarge, OutOfRange, ValidationError
from gaussqi.gaussian import GaussianState
from gaussqi.scenario import (
    ChannelSpec,
    HypothesisPair,
    SourceSpec,
    c_quantum,
    hypothesis_pair_coherent,
    hypothesis_pair_generic,
)
from gaussqi.symmetric import (
    advantage_threshold,
    appendix_fit,
    closed_form_error_bounds,
    exponent_fit,
    golden_section_min,
    qbb,
    qcb,
    s_overlap,
)


def thermal_overlap(s, n0, n1):
    """sum_n p_n^s q_n^(1-s) for two geometric distributions."""
    a, b = n0 / (n0 + 1), n1 / (n1 + 1)
    return (1 - a) ** s * (1 - b) ** (1 - s) / (1 - a ** s * b ** (1 - s))


@pytest.mark.parametrize("s", [0.1, 0.5, 0.9])
@pytest.mark.parametrize("alpha2", [0.3, 1.0, 4.0])
def test_vacuum_vs_coherent_is_fidelity(s, alpha2):
    vac = GaussianState.vacuum(1)
    coh = GaussianState(np.array([math.sqrt(2 * alpha2), 0.0]), 0.5 * np.eye(2))
    assert s_overlap(vac, coh, s).c_s == pytest.approx(math.exp(-alpha2), rel=1e-12)


# occupations below ~1e-13 are not resolvable in a variance of 1/2 + n
@given(st.floats(0.05, 0.95), st.just(0.0) | st.floats(1e-4, 5.0), st.floats(0.01, 5.0))
def test_thermal_overlap_matches_series(s, n0, n1):
    got = s_overlap(GaussianState.thermal(1, n0), GaussianState.thermal(1, n1), s).c_s
    assert got == pytest.approx(thermal_overlap(s, n0, n1), rel=1e-10)


def test_overlap_of_identical_states_is_one():
    rho = GaussianState.thermal(2, 0.7)
    assert s_overlap(rho, rho, 0.3).log_c_s == pytest.approx(0.0, abs=1e-14)


def test_golden_section_on_parabola():
    x, fx = golden_section_min(lambda t: (t - 0.3) ** 2 + 1.0, 0.0, 1.0)
    assert x == pytest.approx(0.3, abs=1e-7)
    assert fx == pytest.approx(1.0)


def test_golden_section_endpoint_minimum():
    x, _ = golden_section_min(lambda t: t, 0.1, 0.9)
    assert x == pytest.approx(0.1)


@pytest.mark.parametrize("c_frac", [0.0, 0.5, 1.0])
def test_chernoff_below_bhattacharyya(c_frac):
    n_s = 0.2
    pair = hypothesis_pair_generic(SourceSpec.generic(n_s, c_frac * c_quantum(n_s)),
                                   ChannelSpec(0.1, 0.5))
    assert qcb(pair, 10).p_err_bound <= qbb(pair, 10).p_err_bound * (1 + 1e-12)


def test_identical_hypotheses_give_half():
    rho = GaussianState.thermal(1, 1.0)
    res = qcb(HypothesisPair(rho, rho))
    assert res.p_err_bound == pytest.approx(0.5) and res.exponent_per_copy == 0.0


def test_coherent_qcb_equals_qbb():
    pair = hypothesis_pair_coherent(0.5, ChannelSpec(0.1, 2.0))
    a, b = qcb(pair), qbb(pair)
    assert a.s_star == pytest.approx(0.5, abs=1e-6)
    assert a.exponent_per_copy == pytest.approx(b.exponent_per_copy, rel=1e-9)


def test_bound_scales_with_copies():
    pair = hypothesis_pair_coherent(0.5, ChannelSpec(0.1, 2.0))
    one, many = qbb(pair, 1), qbb(pair, 1e6)
    assert many.log_p_err_bound == pytest.approx(-math.log(2) - 1e6 * one.exponent_per_copy)


def test_closed_forms_factor_four():
    b = closed_form_error_bounds(1e-3, 1e3, 1e-4, 1e6, c_quantum(1e-3))
    assert b["tmsv"].exponent_per_copy / b["cs"].exponent_per_copy == 4.0
    assert b["gen"].exponent_per_copy == pytest.approx(b["tmsv"].exponent_per_copy)


@pytest.mark.parametrize("n_s", [1e-4, 1e-2, 0.5])
def test_threshold_matches_coherent_exponent(n_s):
    thr = advantage_threshold(n_s)
    b = closed_form_error_bounds(n_s, 100.0, 1e-3, 1.0, thr["c_min"])
    assert b["gen"].exponent_per_copy == pytest.approx(b["cs"].exponent_per_copy, rel=1e-14)


def test_separable_feasibility_boundary():
    assert advantage_threshold(1 / 3)["separable_feasible"]
    assert not advantage_threshold(1 / 3 - 1e-9)["separable_feasible"]


def test_bound_input_validation():
    with pytest.raises(OutOfRange):
        closed_form_error_bounds(0.1, 1.0, 0.1, 0.5, 0.1)


def test_fit_linear_through_origin():
    fit = exponent_fit(1e-2, 20.0, c_quantum(1e-2))
    assert fit.curvature < 0.01
    assert fit.x_coeff > 0


def test_fit_rejects_curvature():
    with pytest.raises(CurvatureTooLarge):
        exponent_fit(1e-2, 20.0, c_quantum(1e-2), curvature_tol=1e-12)


def test_fit_grid_validation():
    with pytest.raises(ValidationError):
        exponent_fit(1e-2, 20.0, 0.05, kappa_grid=[1e-4, 2e-4])
    with pytest.raises(ValidationError):
        exponent_fit(1e-2, 20.0, 0.05, kappa_grid=np.linspace(1e-3, 1e-2, 6))


def test_appendix_normalisation_endpoints():
    rows = appendix_fit(1e-2, 20.0)
    # only the O(kappa^2) occupation shift survives at C = 0
    assert rows[0].g_fitted == pytest.approx(0.0, abs=1e-6)
    assert rows[-1].g_fitted == pytest.approx(1.0, abs=1e-12)
    assert all(r.g_raw <= r.g_fitted + 1e-12 for r in rows)
