"""Pure-Python scalar kernels; mirrors ``_ckernels.pyx`` line for line."""

import math

SQRT_PI = math.sqrt(math.pi)
LOG_SQRT_PI = 0.5 * math.log(math.pi)
LOG_ERFC_SWITCH = 26.0
I0_SERIES_MAX = 30.0
STACK_MAX = 512

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1]
XGK = (
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
)
WGK = (
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
)
WG = (
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
)


def log_erfc(z):
    if z < LOG_ERFC_SWITCH:
        return math.log(math.erfc(z))
    # erfc(z) = exp(-z^2) / (z sqrt(pi)) * sum_n (-1)^n (2n-1)!! / (2 z^2)^n
    inv = 1.0 / (2.0 * z * z)
    term = 1.0
    total = 1.0
    n = 1
    while True:
        term *= -(2 * n - 1) * inv
        total += term
        if abs(term) < 1e-17 * abs(total) or n > 60:
            break
        n += 1
    return -z * z - math.log(z) - LOG_SQRT_PI + math.log(total)


def i0e(x):
    """exp(-x) I_0(x) for x >= 0."""
    if x <= I0_SERIES_MAX:
        q = 0.25 * x * x
        term = 1.0
        total = 1.0
        k = 1
        while True:
            term *= q / (k * k)
            total += term
            if term < 1e-17 * total:
                break
            k += 1
        return total * math.exp(-x)
    inv = 1.0 / (8.0 * x)
    term = 1.0
    total = 1.0
    k = 1
    while k < 2.0 * x:
        term *= (2 * k - 1) ** 2 * inv / k
        total += term
        if term < 1e-17 * total:
            break
        k += 1
    return total / math.sqrt(2.0 * math.pi * x)


def _marcum_integrand(t, x):
    u = t - x
    return t * math.exp(-0.5 * u * u) * i0e(t * x)


def _gk15(x, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    fc = _marcum_integrand(c, x)
    kron = fc * WGK[7]
    gauss = fc * WG[3]
    for j in range(7):
        dx = h * XGK[j]
        f1 = _marcum_integrand(c - dx, x)
        f2 = _marcum_integrand(c + dx, x)
        kron += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            gauss += WG[j // 2] * (f1 + f2)
    return kron * h, abs((kron - gauss) * h)


def _adaptive(x, a, b, tol):
    total = 0.0
    stack = [(a, b, tol)]
    while stack:
        lo, hi, eps = stack.pop()
        val, err = _gk15(x, lo, hi)
        # round-off floor: exp(-u^2/2) carries relative noise ~ eps * u^2
        u = max(abs(lo - x), abs(hi - x))
        noise = 1e-15 * (1.0 + 0.5 * u * u) * abs(val)
        if err <= eps or err <= noise or hi - lo < 1e-10 or len(stack) + 2 >= STACK_MAX:
            total += val
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid, 0.5 * eps))
            stack.append((mid, hi, 0.5 * eps))
    return total


def _breakpoints(x, a, b):
    pts = [a]
    for p in (x - 8.0, x, x + 8.0):
        if a < p < b:
            pts.append(p)
    pts.append(b)
    return pts


def _piecewise(x, a, b, tol):
    pts = _breakpoints(x, a, b)
    return sum(_adaptive(x, pts[i], pts[i + 1], tol) for i in range(len(pts) - 1))


def _relative(x, a, b, rtol):
    # absolute pass first, then tighten the absolute tolerance to
    # rtol * estimate until it is met; the integrand is positive
    eps = rtol
    total = _piecewise(x, a, b, eps)
    for _ in range(6):
        if total <= 0.0 or eps <= rtol * total:
            break
        eps = 0.5 * rtol * total
        total = _piecewise(x, a, b, eps)
    return total


def marcum_upper(x, y, rtol=1e-13):
    """Integral of t exp(-(t^2+x^2)/2) I_0(t x) over [y, inf)."""
    return _relative(x, y, max(x, y) + 40.0, rtol)


def marcum_lower(x, y, rtol=1e-13):
    """Same integrand over [0, y]."""
    if y <= 0.0:
        return 0.0
    return _relative(x, 0.0, y, rtol)
