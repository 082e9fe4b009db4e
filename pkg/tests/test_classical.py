import math

import numpy as np
import pytest
from scipy import special

from gaussqi.classical import (
    ClassicalRocParams,
    homodyne_pfa,
    homodyne_roc,
    homodyne_threshold,
    marcum_roc,
)
from gaussqi.errors import DomainError, OutOfRange


@pytest.mark.parametrize("p_fa", [1e-6, 1e-3, 0.1, 0.5, 0.9])
def test_homodyne_without_target(p_fa):
    pt = homodyne_roc(p_fa, ClassicalRocParams(100, 0.0, 1.0, 5.0))
    assert pt.p_md == pytest.approx(1.0 - p_fa, abs=1e-10)


@pytest.mark.parametrize("p_fa", [1e-6, 1e-3, 0.1, 0.5, 0.9])
def test_marcum_without_signal(p_fa):
    assert marcum_roc(p_fa, 0.0).p_md == pytest.approx(1.0 - p_fa, abs=1e-10)


def test_threshold_round_trip():
    params = ClassicalRocParams(1e4, 1e-3, 1.0, 10.0)
    assert homodyne_pfa(homodyne_threshold(1e-4, params), params) == pytest.approx(1e-4, rel=1e-12)


def test_homodyne_closed_form():
    params = ClassicalRocParams(1e8, 6.3e-4, 1.0, 6e3)
    p_fa = 1e-2
    x = params.noise_scale * special.erfcinv(2 * p_fa)
    ref = 0.5 * special.erfc((params.signal - x) / params.noise_scale)
    assert homodyne_roc(p_fa, params).p_md == pytest.approx(ref, rel=1e-11)


def test_deep_tail_log_value_is_finite():
    params = ClassicalRocParams(1e12, 1e-3, 1.0, 1.0)
    pt = homodyne_roc(0.1, params)
    assert pt.p_md == 0.0 and math.isfinite(pt.log_p_md) and pt.log_p_md < -700


def test_rocs_are_monotone():
    grid = np.logspace(-6, -1e-3, 50)
    params = ClassicalRocParams(1e8, 6.3e-4, 1.0, 6e3)
    hom = [homodyne_roc(p, params).log_p_md for p in grid]
    mar = [marcum_roc(p, 10.5).log_p_md for p in grid]
    assert np.all(np.diff(hom) <= 1e-12) and np.all(np.diff(mar) <= 1e-12)


def test_marcum_tag_and_validation():
    assert marcum_roc(0.1, 2.0).source_tag == "marcum_lower_bound"
    with pytest.raises(DomainError):
        marcum_roc(0.0, 1.0)
    with pytest.raises(OutOfRange):
        ClassicalRocParams(0.5, 0.1, 1.0, 1.0)
