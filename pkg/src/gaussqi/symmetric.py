"""Symmetric hypothesis testing: s-overlap, Chernoff and Bhattacharyya bounds.

Everything is carried in the log domain; at ``N_b ~ 1e4`` the overlap only
deviates from one in the seventh digit and ``M ~ 1e8`` copies are typical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CurvatureTooLarge, OutOfRange, SingularSigma, ValidationError
from .gaussian import GaussianState, PHYSICALITY_TOL, williamson
from .scenario import (
    ChannelSpec,
    HypothesisPair,
    SourceSpec,
    c_quantum,
    hypothesis_pair_generic,
)

S_LO = 1e-6
S_HI = 1.0 - 1e-6
GOLDEN_TOL = 1e-8
PURE_TOL = 1e-13
_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OverlapResult:
    s: float
    log_c_s: float

    @property
    def c_s(self) -> float:
        return math.exp(self.log_c_s)


@dataclass(frozen=True)
class BoundResult:
    """Upper bound ``p_err_bound = exp(-M * exponent_per_copy) / 2``."""

    log_p_err_bound: float
    exponent_per_copy: float
    m: float
    formula: str
    s_star: float | None = None

    @property
    def p_err_bound(self) -> float:
        return math.exp(self.log_p_err_bound)

    @classmethod
    def from_exponent(cls, exponent: float, m: float, formula: str,
                      s_star: float | None = None) -> "BoundResult":
        return cls(-math.log(2.0) - m * exponent, exponent, m, formula, s_star)


def _nu_clip(nu: np.ndarray) -> np.ndarray:
    """Snap numerically pure modes to exactly 1/2.

    ``(nu - 1/2)^s`` has infinite slope at the pure point, so eigen-solver
    noise of ~1e-16 would otherwise move C_s by ~1e-2 at small s.
    """
    if np.any(nu < 0.5 - PHYSICALITY_TOL):
        raise ValidationError("state is unphysical (symplectic eigenvalue < 1/2)")
    return np.where(nu - 0.5 < PURE_TOL, 0.5, nu)


def _log_g(s: float, nu: np.ndarray) -> np.ndarray:
    """log G_s(nu) = -log((nu + 1/2)^s - (nu - 1/2)^s), stable for large nu."""
    out = np.zeros_like(nu)
    mixed = nu > 0.5
    x = nu[mixed] - 0.5
    # (x+1)^s - x^s = x^s * expm1(s * log1p(1/x))
    out[mixed] = -(s * np.log(x) + np.log(np.expm1(s * np.log1p(1.0 / x))))
    return out


def _lambda(s: float, nu: np.ndarray) -> np.ndarray:
    out = np.ones_like(nu)
    mixed = nu > 0.5
    x = nu[mixed] - 0.5
    out[mixed] = 1.0 + 2.0 / np.expm1(s * np.log1p(1.0 / x))
    return out


class _OverlapKernel:
    """Caches both Williamson decompositions across many values of s."""

    def __init__(self, rho0: GaussianState, rho1: GaussianState):
        if rho0.n_modes != rho1.n_modes:
            raise ValidationError("states have different mode counts")
        self.n = rho0.n_modes
        w0 = williamson(rho0.cov)
        w1 = williamson(rho1.cov)
        self.nu0 = _nu_clip(w0.nu)
        self.nu1 = _nu_clip(w1.nu)
        self.s0 = w0.s_mat
        self.s1 = w1.s_mat
        self.d = rho0.mean - rho1.mean

    def log_overlap(self, s: float) -> float:
        if not 0.0 < s < 1.0:
            raise OutOfRange(f"s must lie in (0, 1), got {s}")
        log_det_pi = 2.0 * float(np.sum(_log_g(s, self.nu0)) + np.sum(_log_g(1.0 - s, self.nu1)))
        lam0 = np.tile(_lambda(s, self.nu0), 2)
        lam1 = np.tile(_lambda(1.0 - s, self.nu1), 2)
        sigma = (self.s0 * lam0) @ self.s0.T + (self.s1 * lam1) @ self.s1.T
        sigma = 0.5 * (sigma + sigma.T)
        try:
            chol = np.linalg.cholesky(sigma)
        except np.linalg.LinAlgError as exc:
            raise SingularSigma("Sigma_s is not positive definite") from exc
        log_det_sigma = 2.0 * float(np.sum(np.log(np.diag(chol))))
        z = np.linalg.solve(chol, self.d)
        return (self.n * math.log(2.0) + 0.5 * (log_det_pi - log_det_sigma)
                - float(z @ z))


def s_overlap(rho0: GaussianState, rho1: GaussianState, s: float) -> OverlapResult:
    """Gaussian closed form of ``Tr(rho0^s rho1^(1-s))``."""
    return OverlapResult(s, _OverlapKernel(rho0, rho1).log_overlap(s))


def golden_section_min(f, lo: float, hi: float, tol: float = GOLDEN_TOL):
    """Minimise a unimodal scalar function; returns ``(x_min, f(x_min))``."""
    a, b = lo, hi
    c = b - _INV_PHI * (b - a)
    d = a + _INV_PHI * (b - a)
    fc, fd = f(c), f(d)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _INV_PHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INV_PHI * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    fx = f(x)
    # endpoints are legitimate minimisers for nested-support pairs
    for cand in (lo, hi):
        fv = f(cand)
        if fv < fx:
            x, fx = cand, fv
    return x, fx


def _identical(pair: HypothesisPair) -> bool:
    return (np.array_equal(pair.rho0.mean, pair.rho1.mean)
            and np.array_equal(pair.rho0.cov, pair.rho1.cov))


def qcb(pair: HypothesisPair, m: float = 1) -> BoundResult:
    """Quantum Chernoff bound for ``m`` copies."""
    if m < 1:
        raise OutOfRange("m must be >= 1")
    if _identical(pair):
        return BoundResult.from_exponent(0.0, m, "qcb", 0.5)
    kernel = _OverlapKernel(pair.rho0, pair.rho1)
    s_star, log_c = golden_section_min(kernel.log_overlap, S_LO, S_HI)
    return BoundResult.from_exponent(max(-log_c, 0.0), m, "qcb", s_star)


def qbb(pair: HypothesisPair, m: float = 1) -> BoundResult:
    """Quantum Bhattacharyya bound (s = 1/2) for ``m`` copies."""
    if m < 1:
        raise OutOfRange("m must be >= 1")
    if _identical(pair):
        return BoundResult.from_exponent(0.0, m, "qbb", 0.5)
    log_c = _OverlapKernel(pair.rho0, pair.rho1).log_overlap(0.5)
    return BoundResult.from_exponent(max(-log_c, 0.0), m, "qbb", 0.5)


def closed_form_error_bounds(n_s: float, n_b: float, kappa: float, m: float,
                             c: float) -> dict[str, BoundResult]:
    """Low-brightness, high-noise asymptotic bounds for TMSV, coherent and generic sources."""
    if n_s <= 0 or n_b <= 0 or kappa <= 0 or m < 1:
        raise OutOfRange("n_s, n_b, kappa must be positive and m >= 1")
    gamma = kappa * n_s / n_b
    ratio = c * c / (n_s * (n_s + 1.0))
    return {
        "tmsv": BoundResult.from_exponent(gamma, m, "closed_form_tmsv"),
        "cs": BoundResult.from_exponent(gamma / 4.0, m, "closed_form_cs"),
        "gen": BoundResult.from_exponent(gamma * ratio, m, "closed_form_gen"),
    }


def advantage_threshold(n_s: float) -> dict:
    """Minimum correlation for the generic bound to beat coherent states."""
    if n_s <= 0:
        raise OutOfRange("n_s must be positive")
    return {
        "c_min": 0.5 * c_quantum(n_s),
        "separable_feasible": bool(n_s >= 1.0 / 3.0 - 1e-12),
    }


@dataclass(frozen=True)
class FitResult:
    x_coeff: float
    g: float
    curvature: float
    kappa_grid: tuple[float, ...]


def default_kappa_grid(n: int = 9) -> np.ndarray:
    return np.logspace(-5, -3, n)


def exponent_fit(n_s: float, n_b: float, c: float, kappa_grid=None,
                 curvature_tol: float = 0.01) -> FitResult:
    """Fit ``1 - 2 P_QBB = x kappa`` through the origin on a small-kappa grid.

    ``g = x n_b / n_s``. Raises :class:`CurvatureTooLarge` if a quadratic
    term across the grid exceeds ``curvature_tol`` of the linear scale
    ``max(|x|, n_s / n_b)``.
    """
    grid = default_kappa_grid() if kappa_grid is None else np.asarray(kappa_grid, float)
    if grid.size < 5:
        raise ValidationError("kappa grid needs at least 5 points")
    if np.any(grid <= 0) or np.any(grid > 1e-3 * (1 + 1e-12)):
        raise ValidationError("kappa grid must lie in (0, 1e-3]")
    source = SourceSpec.generic(n_s, c)
    y = np.empty(grid.size)
    for i, kappa in enumerate(grid):
        pair = hypothesis_pair_generic(source, ChannelSpec(float(kappa), n_b))
        log_c = _OverlapKernel(pair.rho0, pair.rho1).log_overlap(0.5)
        y[i] = -math.expm1(log_c)
    x = float(grid @ y / (grid @ grid))
    design = np.column_stack([grid, grid ** 2])
    (lin, quad), *_ = np.linalg.lstsq(design, y, rcond=None)
    curvature = abs(quad) * float(grid.max())
    scale = max(abs(lin), n_s / n_b)
    if curvature > curvature_tol * scale:
        raise CurvatureTooLarge(
            f"quadratic term {curvature:.3e} exceeds {curvature_tol:.0%} of {scale:.3e}")
    return FitResult(x, x * n_b / n_s, curvature / scale, tuple(map(float, grid)))


@dataclass(frozen=True)
class AppendixRow:
    c: float
    x_coeff: float
    g_raw: float
    g_fitted: float
    g_model: float


def appendix_fit(n_s: float, n_b: float, c_grid=None, kappa_grid=None,
                 curvature_tol: float = 0.01) -> list[AppendixRow]:
    """Linear-in-kappa coefficient of the Bhattacharyya exponent across C.

    ``g_fitted`` is normalized so that the maximally correlated source has
    ``g = 1``; ``g_raw = x n_b / n_s`` keeps the unnormalized slope. The
    model value is ``C^2 / C_q^2``.
    """
    cq = c_quantum(n_s)
    grid = np.linspace(0.0, cq, 11) if c_grid is None else np.asarray(c_grid, float)
    ref = exponent_fit(n_s, n_b, cq, kappa_grid, curvature_tol).x_coeff
    rows = []
    for c in grid:
        fit = exponent_fit(n_s, n_b, float(c), kappa_grid, curvature_tol)
        rows.append(AppendixRow(float(c), fit.x_coeff, fit.g, fit.x_coeff / ref,
                                float(c) ** 2 / cq ** 2))
    return rows
