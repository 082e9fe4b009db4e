import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from gaussqi.errors import NotInHighLossRegime, OutOfRange, Unphysical, ValidationError
from gaussqi.scenario import (
    ChannelSpec,
    LinkBudget,
    SourceSpec,
    c_quantum,
    c_separable,
    correlation_of_p,
    generic_source_state,
    hypothesis_pair_coherent,
    hypothesis_pair_generic,
    kappa_of_range,
    link_budget_convert,
    planck_occupation,
    range_of_kappa,
    snr,
)


def test_correlation_limits():
    assert c_quantum(1.0) == pytest.approx(math.sqrt(2.0))
    assert c_separable(0.4) == 0.4
    assert correlation_of_p(0.4, 0.0) == pytest.approx(c_quantum(0.4))
    assert correlation_of_p(0.4, 1.0) == pytest.approx(0.4)


def test_p_out_of_range():
    with pytest.raises(OutOfRange):
        correlation_of_p(1.0, 1.5)


def test_source_above_tmsv_is_unphysical():
    with pytest.raises(Unphysical):
        generic_source_state(0.2, c_quantum(0.2) * 1.001)


def test_h0_has_no_correlations():
    pair = hypothesis_pair_generic(SourceSpec.generic(0.1, 0.2), ChannelSpec(0.1, 2.0))
    cov0 = pair.rho0.cov
    assert cov0[0, 1] == 0.0 and cov0[0, 0] == 2.5 and cov0[1, 1] == pytest.approx(0.6)
    assert pair.rho1.cov[0, 1] == pytest.approx(math.sqrt(0.1) * 0.2)
    assert pair.rho1.cov[2, 3] == pytest.approx(-math.sqrt(0.1) * 0.2)
    assert pair.rho1.cov[0, 0] == pytest.approx(0.1 * 0.1 + 2.5)


def test_coherent_pair_means():
    pair = hypothesis_pair_coherent(0.3, ChannelSpec(0.5, 0.4))
    np.testing.assert_allclose(pair.rho1.mean, [math.sqrt(0.3), 0.0])
    np.testing.assert_allclose(pair.rho0.cov, 0.9 * np.eye(2))


def test_channel_validation():
    with pytest.raises(OutOfRange):
        ChannelSpec(1.0, 1.0)
    with pytest.raises(OutOfRange):
        ChannelSpec(0.1, 0.0)


def test_planck_room_temperature_microwave():
    n_b = planck_occupation(1e9, 290.0)
    assert 5.8e3 < n_b < 6.3e3
    assert planck_occupation(1e9, 0.0) == 0.0
    assert planck_occupation(1e15, 1.0) == 0.0


def test_radar_equation():
    assert kappa_of_range(0.1, 1.0) == pytest.approx(6.33e-4, rel=1e-3)
    assert kappa_of_range(0.1, 2.0) == pytest.approx(kappa_of_range(0.1, 1.0) / 4)
    with pytest.raises(NotInHighLossRegime):
        kappa_of_range(10.0, 0.1)


@given(st.floats(1e-3, 10.0), st.floats(1.0, 1e4))
def test_range_round_trip(area, r):
    kappa = area / (4 * math.pi * r) ** 2
    if kappa >= 1:
        return
    assert range_of_kappa(area, kappa_of_range(area, r)) == pytest.approx(r, rel=1e-12)


def test_link_budget_convert_needs_exactly_one():
    with pytest.raises(ValidationError):
        link_budget_convert(0.1)
    out = link_budget_convert(0.1, kappa=6.332573977646e-4)
    assert out["range_m"] == pytest.approx(1.0, rel=1e-9)


def test_snr_fig2_both_panels_agree():
    n_b = planck_occupation(1e9, 290.0)
    a = snr(kappa_of_range(0.1, 1.0), 1.0, n_b)["gamma_db"]
    b = snr(kappa_of_range(0.1, 0.1), 0.01, n_b)["gamma_db"]
    assert a == pytest.approx(-69.8, abs=0.2)
    assert a == pytest.approx(b, abs=1e-10)


def test_link_budget_restrictions():
    budget = LinkBudget(1e9, 290.0, 0.1, 1.0)
    assert budget.channel().kappa == pytest.approx(budget.kappa)
    with pytest.raises(ValidationError):
        LinkBudget(1e9, 290.0, 0.1, 1.0, form_factor=0.5)
    with pytest.raises(ValidationError):
        LinkBudget(1e9, 290.0, 0.1, 1.0, priors=(0.3, 0.7))


def test_pair_swap():
    pair = hypothesis_pair_generic(SourceSpec.generic(0.1, 0.1), ChannelSpec(0.1, 1.0))
    assert pair.swapped().rho0 is pair.rho1
