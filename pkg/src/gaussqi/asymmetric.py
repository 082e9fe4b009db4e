"""Asymmetric hypothesis testing: Gaussian relative entropy, its variance, ROC bounds.

The relative entropy is taken as ``D(rho0 || rho1)`` with ``rho0`` the
target-absent state, so it is the decay rate of the mis-detection
probability at a fixed false-alarm level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .errors import NegativeD, OutOfRange, SingularGibbs
from .gaussian import symplectic_form, williamson
from .scenario import HypothesisPair

GIBBS_TOL = 1e-9


@dataclass(frozen=True)
class SteinQuantities:
    d: float
    v: float
    provenance: str


@dataclass(frozen=True)
class RocPoint:
    p_fa: float
    log_p_md: float
    source_tag: str

    @property
    def p_md(self) -> float:
        return min(1.0, math.exp(self.log_p_md))


def _gibbs_from_williamson(w) -> np.ndarray:
    x = w.nu - 0.5
    if np.any(x <= GIBBS_TOL):
        raise SingularGibbs("Gibbs matrix undefined: a symplectic eigenvalue is 1/2")
    beta = np.tile(np.log1p(1.0 / x), 2)
    n = w.nu.shape[0]
    omega = symplectic_form(n)
    s_inv = -omega @ w.s_mat.T @ omega
    return (s_inv.T * beta) @ s_inv


def gibbs_matrix(cov) -> np.ndarray:
    """Quadratic-form generator G with rho proportional to exp(-x^T G x / 2)."""
    g = _gibbs_from_williamson(williamson(cov))
    return 0.5 * (g + g.T)


def _log_det_v_plus(nu: np.ndarray) -> float:
    """ln det(V + i Omega / 2) through the symplectic spectrum."""
    x = nu - 0.5
    return float(np.sum(np.log(x) + np.log1p(x)))


def stein_quantities_exact(pair: HypothesisPair) -> SteinQuantities:
    """Relative entropy and relative-entropy variance of two Gaussian states."""
    v0, v1 = pair.rho0.cov, pair.rho1.cov
    w0, w1 = williamson(v0), williamson(v1)
    g0 = _gibbs_from_williamson(w0)
    g1 = _gibbs_from_williamson(w1)
    g0 = 0.5 * (g0 + g0.T)
    g1 = 0.5 * (g1 + g1.T)
    delta = pair.rho0.mean - pair.rho1.mean
    gamma = g0 - g1

    d = 0.5 * (_log_det_v_plus(w1.nu) - _log_det_v_plus(w0.nu)
               - float(np.sum(v0 * gamma)) + float(delta @ g1 @ delta))
    if d < -1e-10:
        raise NegativeD(f"relative entropy evaluated to {d:.3e}")

    omega = symplectic_form(pair.rho0.n_modes)
    gv = gamma @ v0
    go = gamma @ omega
    v = (0.5 * float(np.trace(gv @ gv)) + 0.125 * float(np.trace(go @ go))
         + float(delta @ g1 @ v0 @ g1 @ delta))
    return SteinQuantities(max(d, 0.0), max(v, 0.0), "exact")


def stein_quantities_asymptotic(n_s: float, c: float, kappa: float,
                                n_b: float) -> SteinQuantities:
    """Leading large-N_b expansion for the generic source."""
    if n_b <= 0 or n_s <= 0:
        raise OutOfRange("n_s and n_b must be positive")
    log_term = math.log1p(1.0 / n_s)
    d = kappa * c * c / n_b * log_term
    v = kappa * c * c * (2.0 * n_s + 1.0) / n_b * log_term ** 2
    return SteinQuantities(d, v, "asymptotic")


def coherent_stein_quantities(n_s: float, kappa: float, n_b: float) -> SteinQuantities:
    log_term = math.log1p(1.0 / n_b)
    return SteinQuantities(kappa * n_s * log_term,
                           kappa * n_s * (2.0 * n_b + 1.0) * log_term ** 2,
                           "closed_form_cs")


def advantage_ratio(c: float, n_s: float) -> float:
    """Ratio of generic-source to coherent-state relative-entropy exponents."""
    if n_s <= 0 or c < 0:
        raise OutOfRange("n_s must be positive and c non-negative")
    return c * c / n_s * math.log1p(1.0 / n_s)


def _check_pfa(p_fa: float) -> None:
    if not 0.0 < p_fa < 1.0:
        raise OutOfRange(f"false-alarm probability must lie in (0, 1), got {p_fa}")


def _clamped(p_fa: float, log_p_md: float, tag: str) -> RocPoint:
    if log_p_md > 0.0:
        return RocPoint(p_fa, 0.0, tag + ":vacuous")
    return RocPoint(p_fa, log_p_md, tag)


def second_order_pmd(stein: SteinQuantities, m: float, epsilon: float) -> RocPoint:
    """Second-order Stein upper bound on P_md at false-alarm level ``epsilon``.

    The O(1) remainder is dropped; a positive exponent argument is clamped to
    ``p_md = 1`` and tagged ``:vacuous``.
    """
    if m < 1:
        raise OutOfRange("m must be >= 1")
    _check_pfa(epsilon)
    log_p_md = -(m * stein.d + math.sqrt(m * stein.v) * specfun.normal_quantile(epsilon))
    return _clamped(epsilon, log_p_md, f"second_order_{stein.provenance}")


def roc_gen(p_fa: float, m: float, n_s: float, c: float, kappa: float,
            n_b: float) -> RocPoint:
    """Closed-form generic-source ROC bound in the large M, large N_b regime."""
    _check_pfa(p_fa)
    if n_s <= 0 or n_b <= 0 or kappa <= 0 or m < 1:
        raise OutOfRange("n_s, n_b, kappa must be positive and m >= 1")
    gamma = kappa * n_s / n_b
    root = math.sqrt(m * gamma / n_s)
    lam = root * c + math.sqrt(2.0 * n_s + 1.0) * specfun.normal_quantile(p_fa)
    log_p_md = -root * lam * c * math.log1p(1.0 / n_s)
    return _clamped(p_fa, log_p_md, "roc_gen")
