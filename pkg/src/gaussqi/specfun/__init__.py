"""Special functions with log-domain variants.

The scalar kernels (``log_erfc``, ``i0e`` and the Marcum quadrature) come
from the compiled ``_ckernels`` extension when it is importable and fall back
to ``_pykernels`` otherwise. Set ``GAUSSQI_PURE_PYTHON=1`` to force the
fallback.
"""

from __future__ import annotations

import math
import os

import numpy as np

from ..errors import DomainError
from . import _pykernels

if os.environ.get("GAUSSQI_PURE_PYTHON", "") not in ("", "0"):
    _kernels = _pykernels
else:
    try:
        from . import _ckernels as _kernels
    except ImportError:  # extension not built
        _kernels = _pykernels

BACKEND = "cython" if _kernels is not _pykernels else "python"

SQRT2 = math.sqrt(2.0)
_LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)

# Acklam's rational approximation to the normal quantile
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def backend_module(name: str | None = None):
    """Kernel module for ``name`` in {"cython", "python"}; default active one."""
    if name is None:
        return _kernels
    if name == "python":
        return _pykernels
    if name == "cython":
        from . import _ckernels
        return _ckernels
    raise ValueError(f"unknown backend {name!r}")


def erfc(z: float) -> float:
    return math.erfc(z)


def log_erfc(z: float) -> float:
    """Natural log of erfc(z), finite for z up to ~1e154."""
    return _kernels.log_erfc(float(z))


def normal_cdf(y: float) -> float:
    return 0.5 * math.erfc(-y / SQRT2)


def log_normal_cdf(y: float) -> float:
    return log_erfc(-y / SQRT2) - math.log(2.0)


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
                / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    r = q * q
    return ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
            / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))


def normal_quantile(p: float) -> float:
    """Inverse of the standard normal CDF on (0, 1)."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"normal_quantile needs p in (0, 1), got {p}")
    if p > 0.5:
        return -normal_quantile(1.0 - p) if 1.0 - p > 0.0 else math.inf
    x = _acklam(p)
    # one Halley step; the residual is formed in the log domain to avoid overflow
    e = normal_cdf(x) - p
    if e != 0.0:
        u = math.copysign(math.exp(math.log(abs(e)) + _LOG_2PI_HALF + 0.5 * x * x), e)
        x -= u / (1.0 + 0.5 * x * u)
    return x


def erfc_inv(y: float) -> float:
    """Inverse complementary error function on (0, 2)."""
    if not 0.0 < y < 2.0:
        raise DomainError(f"erfc_inv needs y in (0, 2), got {y}")
    if y == 1.0:
        return 0.0
    return -normal_quantile(0.5 * y) / SQRT2


def bessel_i0_scaled(x: float) -> float:
    """exp(-x) I_0(x) for x >= 0."""
    if x < 0:
        raise DomainError("bessel_i0_scaled needs x >= 0")
    return _kernels.i0e(float(x))


def _check_xy(x: float, y: float) -> None:
    if x < 0 or y < 0:
        raise DomainError("Marcum Q needs x >= 0 and y >= 0")


def marcum_q1(x: float, y: float) -> float:
    """First-order Marcum Q by quadrature of its defining integral."""
    _check_xy(x, y)
    if y == 0.0:
        return 1.0
    return min(1.0, _kernels.marcum_upper(float(x), float(y)))


def one_minus_marcum_q1(x: float, y: float) -> float:
    """``1 - Q(x, y)`` integrated over [0, y] directly (no cancellation)."""
    _check_xy(x, y)
    if y == 0.0:
        return 0.0
    return min(1.0, _kernels.marcum_lower(float(x), float(y)))


log_erfc_v = np.vectorize(log_erfc, otypes=[float])
normal_quantile_v = np.vectorize(normal_quantile, otypes=[float])
marcum_q1_v = np.vectorize(marcum_q1, otypes=[float])
one_minus_marcum_q1_v = np.vectorize(one_minus_marcum_q1, otypes=[float])
