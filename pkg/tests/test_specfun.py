import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import special, stats

from gaussqi import specfun
from gaussqi.errors import DomainError

BACKENDS = ["python"]
try:
    specfun.backend_module("cython")
    BACKENDS.append("cython")
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def kern(request):
    return specfun.backend_module(request.param)


def test_backend_flag():
    assert specfun.BACKEND in ("python", "cython")


@pytest.mark.parametrize("z", [-5.0, -0.5, 0.0, 0.7, 3.0, 10.0, 25.9, 26.1, 40.0, 1e3, 1e8])
def test_log_erfc(kern, z):
    ref = float(special.log_ndtr(-z * math.sqrt(2.0))) + math.log(2.0)
    assert kern.log_erfc(z) == pytest.approx(ref, rel=1e-13, abs=1e-15)


@pytest.mark.parametrize("x", [0.0, 1e-3, 0.5, 5.0, 29.9, 30.1, 100.0, 1e4])
def test_i0e(kern, x):
    assert kern.i0e(x) == pytest.approx(float(special.i0e(x)), rel=1e-13)


@pytest.mark.parametrize("x,y", [(0.5, 0.5), (2.0, 1.0), (1.0, 4.0), (8.0, 7.5), (3.0, 12.0),
                                 (20.0, 18.0), (0.0, 2.0)])
def test_marcum_against_noncentral_chi2(kern, x, y):
    upper = kern.marcum_upper(x, y)
    lower = kern.marcum_lower(x, y)
    assert upper == pytest.approx(stats.ncx2.sf(y * y, 2, x * x) if x else math.exp(-y * y / 2),
                                  rel=1e-10, abs=1e-300)
    assert lower == pytest.approx(stats.ncx2.cdf(y * y, 2, x * x) if x else -math.expm1(-y * y / 2),
                                  rel=1e-10, abs=1e-300)


def test_backends_agree():
    if len(BACKENDS) < 2:
        pytest.skip("compiled extension not built")
    py, cy = (specfun.backend_module(b) for b in BACKENDS)
    for x, y in [(0.3, 0.1), (5.0, 5.0), (12.0, 3.0)]:
        assert py.marcum_upper(x, y) == pytest.approx(cy.marcum_upper(x, y), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, 0.5, 3.0, 30.0])
def test_marcum_at_zero_threshold(x):
    assert specfun.marcum_q1(x, 0.0) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("y", [0.0, 0.1, 1.0, 3.0, 6.0])
def test_marcum_zero_signal(y):
    assert specfun.marcum_q1(0.0, y) == pytest.approx(math.exp(-y * y / 2), abs=1e-12)


@given(st.floats(0.0, 15.0), st.floats(0.0, 15.0))
def test_marcum_complement(x, y):
    assert specfun.marcum_q1(x, y) + specfun.one_minus_marcum_q1(x, y) == pytest.approx(1.0, abs=1e-12)


def test_marcum_domain():
    with pytest.raises(DomainError):
        specfun.marcum_q1(-1.0, 1.0)


@pytest.mark.parametrize("p", [1e-300, 1e-50, 1e-10, 0.01, 0.02425, 0.3, 0.5, 0.9, 1 - 1e-10])
def test_normal_quantile(p):
    assert specfun.normal_quantile(p) == pytest.approx(float(special.ndtri(p)), rel=1e-14, abs=1e-15)


@given(st.floats(1e-250, 1.0 - 1e-12))
def test_normal_quantile_round_trip(p):
    x = specfun.normal_quantile(p)
    assert math.exp(specfun.log_normal_cdf(x) - math.log(p)) == pytest.approx(1.0, rel=1e-12)


@pytest.mark.parametrize("y", [1e-200, 1e-5, 0.5, 1.0, 1.5, 2.0 - 1e-9])
def test_erfc_inv(y):
    x = specfun.erfc_inv(y)
    assert x == pytest.approx(float(special.erfcinv(y)), rel=1e-13, abs=1e-15)


def test_quantile_domain():
    for bad in (0.0, 1.0, -0.1):
        with pytest.raises(DomainError):
            specfun.normal_quantile(bad)
    with pytest.raises(DomainError):
        specfun.erfc_inv(2.0)


def test_vectorised_variants():
    out = specfun.log_erfc_v(np.array([0.0, 1.0, 50.0]))
    assert out.shape == (3,) and np.all(np.diff(out) < 0)
