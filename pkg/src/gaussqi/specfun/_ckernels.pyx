# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scalar kernels; same algorithms as ``_pykernels``."""

from libc.math cimport erfc, exp, fabs, fmax, log, sqrt, M_PI

cdef double LOG_SQRT_PI = 0.5 * log(M_PI)
cdef double LOG_ERFC_SWITCH = 26.0
cdef double I0_SERIES_MAX = 30.0

cdef double XGK[8]
cdef double WGK[8]
cdef double WG[4]
XGK[:] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
]
WGK[:] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
]
WG[:] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
]

cdef enum:
    STACK_MAX = 512


cpdef double log_erfc(double z):
    cdef double inv, term, total
    cdef int n
    if z < LOG_ERFC_SWITCH:
        return log(erfc(z))
    inv = 1.0 / (2.0 * z * z)
    term = 1.0
    total = 1.0
    n = 1
    while True:
        term *= -(2 * n - 1) * inv
        total += term
        if fabs(term) < 1e-17 * fabs(total) or n > 60:
            break
        n += 1
    return -z * z - log(z) - LOG_SQRT_PI + log(total)


cdef double _i0e_nogil(double x) nogil:
    cdef double q, term, total, inv
    cdef int k
    if x <= 30.0:
        q = 0.25 * x * x
        term = 1.0
        total = 1.0
        k = 1
        while True:
            term *= q / (<double>k * k)
            total += term
            if term < 1e-17 * total:
                break
            k += 1
        return total * exp(-x)
    inv = 1.0 / (8.0 * x)
    term = 1.0
    total = 1.0
    k = 1
    while k < 2.0 * x:
        term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) * inv / k
        total += term
        if term < 1e-17 * total:
            break
        k += 1
    return total / sqrt(2.0 * M_PI * x)


cpdef double i0e(double x):
    return _i0e_nogil(x)


cdef inline double _integrand(double t, double x) nogil:
    cdef double u = t - x
    return t * exp(-0.5 * u * u) * _i0e_nogil(t * x)


cdef void _gk15(double x, double a, double b, double* val, double* err) nogil:
    cdef double c = 0.5 * (a + b)
    cdef double h = 0.5 * (b - a)
    cdef double fc = _integrand(c, x)
    cdef double kron = fc * WGK[7]
    cdef double gauss = fc * WG[3]
    cdef double dx, f1, f2
    cdef int j
    for j in range(7):
        dx = h * XGK[j]
        f1 = _integrand(c - dx, x)
        f2 = _integrand(c + dx, x)
        kron += WGK[j] * (f1 + f2)
        if j % 2 == 1:
            gauss += WG[j // 2] * (f1 + f2)
    val[0] = kron * h
    err[0] = fabs((kron - gauss) * h)


cdef double _adaptive(double x, double a, double b, double tol) nogil:
    cdef double lo_s[STACK_MAX]
    cdef double hi_s[STACK_MAX]
    cdef double eps_s[STACK_MAX]
    cdef int top = 1
    cdef double total = 0.0
    cdef double lo, hi, eps, val, err, mid, u, noise
    lo_s[0] = a
    hi_s[0] = b
    eps_s[0] = tol
    while top > 0:
        top -= 1
        lo = lo_s[top]
        hi = hi_s[top]
        eps = eps_s[top]
        _gk15(x, lo, hi, &val, &err)
        # round-off floor: exp(-u^2/2) carries relative noise ~ eps * u^2
        u = fmax(fabs(lo - x), fabs(hi - x))
        noise = 1e-15 * (1.0 + 0.5 * u * u) * fabs(val)
        if err <= eps or err <= noise or hi - lo < 1e-10 or top + 2 >= STACK_MAX:
            total += val
        else:
            mid = 0.5 * (lo + hi)
            lo_s[top] = lo
            hi_s[top] = mid
            eps_s[top] = 0.5 * eps
            lo_s[top + 1] = mid
            hi_s[top + 1] = hi
            eps_s[top + 1] = 0.5 * eps
            top += 2
    return total


cdef double _piecewise(double x, double a, double b, double tol) nogil:
    cdef double pts[5]
    cdef double cand[3]
    cdef int n = 1, i
    cdef double total = 0.0
    pts[0] = a
    cand[0] = x - 8.0
    cand[1] = x
    cand[2] = x + 8.0
    for i in range(3):
        if a < cand[i] < b:
            pts[n] = cand[i]
            n += 1
    pts[n] = b
    for i in range(n):
        total += _adaptive(x, pts[i], pts[i + 1], tol)
    return total


cdef double _relative(double x, double a, double b, double rtol) nogil:
    # absolute pass first, then tighten the absolute tolerance to
    # rtol * estimate until it is met; the integrand is positive
    cdef double eps = rtol
    cdef double total = _piecewise(x, a, b, eps)
    cdef int it
    for it in range(6):
        if total <= 0.0 or eps <= rtol * total:
            break
        eps = 0.5 * rtol * total
        total = _piecewise(x, a, b, eps)
    return total


cpdef double marcum_upper(double x, double y, double rtol=1e-13):
    cdef double top = (x if x > y else y) + 40.0
    with nogil:
        return _relative(x, y, top, rtol)


cpdef double marcum_lower(double x, double y, double rtol=1e-13):
    if y <= 0.0:
        return 0.0
    with nogil:
        return _relative(x, 0.0, y, rtol)
