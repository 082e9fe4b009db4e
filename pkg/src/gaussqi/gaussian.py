"""Multimode Gaussian states: symplectic algebra and Williamson decomposition.

Quadratures are ordered ``(q_1, ..., q_N, p_1, ..., p_N)`` and the vacuum
has variance 1/2, so a thermal mode with mean occupation ``n`` has covariance
``(n + 1/2) * I_2``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import Asymmetric, IllConditioned, NonConvergent, Unphysical

PHYSICALITY_TOL = 1e-10
SYMMETRY_TOL = 1e-12
MAX_CONDITION = 1e12


def symplectic_form(n_modes: int) -> np.ndarray:
    """Return ``[[0, I_N], [-I_N, 0]]`` for ``n_modes`` modes."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    eye = np.eye(n_modes)
    zero = np.zeros((n_modes, n_modes))
    return np.block([[zero, eye], [-eye, zero]])


@dataclass(frozen=True)
class GaussianState:
    """Mean vector and covariance matrix of ``n_modes`` bosonic modes."""

    mean: np.ndarray
    cov: np.ndarray
    n_modes: int = field(init=False)

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=float).reshape(-1)
        cov = np.asarray(self.cov, dtype=float)
        if cov.ndim != 2 or cov.shape[0] != cov.shape[1] or cov.shape[0] % 2:
            raise ValueError(f"covariance must be 2N x 2N, got {cov.shape}")
        if mean.shape[0] != cov.shape[0]:
            raise ValueError("mean and covariance dimensions differ")
        mean.setflags(write=False)
        cov.setflags(write=False)
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)
        object.__setattr__(self, "n_modes", cov.shape[0] // 2)

    @classmethod
    def thermal(cls, n_modes: int, n_mean: float) -> "GaussianState":
        dim = 2 * n_modes
        return cls(np.zeros(dim), (n_mean + 0.5) * np.eye(dim))

    @classmethod
    def vacuum(cls, n_modes: int = 1) -> "GaussianState":
        return cls.thermal(n_modes, 0.0)

    def is_pure(self, tol: float = 1e-9) -> bool:
        return bool(np.all(symplectic_eigenvalues(self.cov) < 0.5 + tol))


@dataclass(frozen=True)
class WilliamsonDecomposition:
    """``cov = s_mat @ diag(nu, nu) @ s_mat.T`` with ``s_mat`` symplectic."""

    nu: np.ndarray
    s_mat: np.ndarray

    @property
    def diagonal(self) -> np.ndarray:
        return np.diag(np.concatenate([self.nu, self.nu]))

    def reassemble(self) -> np.ndarray:
        return self.s_mat @ self.diagonal @ self.s_mat.T


def _check_symmetric(cov: np.ndarray) -> None:
    asym = np.max(np.abs(cov - cov.T)) if cov.size else 0.0
    scale = max(1.0, np.max(np.abs(cov)))
    if asym > SYMMETRY_TOL * scale:
        raise Asymmetric(f"covariance asymmetry {asym:.3e} exceeds tolerance")


def _sqrtm_psd(cov: np.ndarray) -> np.ndarray:
    w, u = np.linalg.eigh(cov)
    if w[0] <= 0:
        raise Unphysical("covariance matrix is not positive definite")
    if w[-1] / w[0] > MAX_CONDITION:
        raise IllConditioned(f"condition number {w[-1] / w[0]:.3e} too large")
    return (u * np.sqrt(w)) @ u.T


def _hermitian_form(cov: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Eigensystem of ``i V^1/2 Omega V^1/2``, whose spectrum is ``+-nu``."""
    cov = np.asarray(cov, dtype=float)
    _check_symmetric(cov)
    cov = 0.5 * (cov + cov.T)
    n = cov.shape[0] // 2
    root = _sqrtm_psd(cov)
    herm = 1j * (root @ symplectic_form(n) @ root)
    try:
        w, u = np.linalg.eigh(herm)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NonConvergent(str(exc)) from exc
    return root, w, u


def symplectic_eigenvalues(cov) -> np.ndarray:
    """Symplectic spectrum of ``cov`` in ascending order (N values)."""
    _, w, _ = _hermitian_form(cov)
    n = w.shape[0] // 2
    # eigh sorts ascending: the top N are the positive branch +nu_k
    return np.sort(w[n:])


def williamson(cov) -> WilliamsonDecomposition:
    """Williamson normal form of a positive definite covariance matrix.

    Eigenvectors ``u = a + ib`` of ``i V^1/2 Omega V^1/2`` with eigenvalue
    ``+nu`` give an orthogonal ``O = sqrt(2) [a..., -b...]`` that brings the
    antisymmetric form to ``Omega diag(nu, nu)``; then ``S = V^1/2 O D^-1/2``.
    """
    root, w, u = _hermitian_form(cov)
    n = w.shape[0] // 2
    nu = w[n:]
    vecs = u[:, n:].copy()
    for k in range(n):
        v = vecs[:, k]
        idx = np.flatnonzero(np.abs(v) > 1e-12 * np.max(np.abs(v)))[0]
        vecs[:, k] = v * (abs(v[idx]) / v[idx])
    ortho = np.sqrt(2.0) * np.hstack([vecs.real, -vecs.imag])
    d = np.concatenate([nu, nu])
    s_mat = root @ ortho / np.sqrt(d)
    return WilliamsonDecomposition(nu=nu, s_mat=s_mat)


def min_symplectic_eigenvalue(cov) -> float:
    return float(symplectic_eigenvalues(cov)[0])


def validate_state(state: GaussianState) -> GaussianState:
    """Return ``state`` unchanged if it is a bona fide Gaussian state."""
    _check_symmetric(state.cov)
    nu_min = min_symplectic_eigenvalue(state.cov)
    if nu_min < 0.5 - PHYSICALITY_TOL:
        raise Unphysical(f"minimum symplectic eigenvalue {nu_min:.12g} < 1/2")
    return state


def partial_transpose(cov: np.ndarray, mode: int = 1) -> np.ndarray:
    """Flip the sign of the momentum of ``mode`` (0-based)."""
    cov = np.asarray(cov, dtype=float)
    n = cov.shape[0] // 2
    flip = np.ones(2 * n)
    flip[n + mode] = -1.0
    return cov * np.outer(flip, flip)


def ppt_separable_two_mode(cov, tol: float = PHYSICALITY_TOL) -> bool:
    """Peres-Horodecki-Simon test: True iff the partial transpose is physical."""
    cov = np.asarray(cov, dtype=float)
    if cov.shape != (4, 4):
        raise ValueError("expected a two-mode (4x4) covariance matrix")
    nu = symplectic_eigenvalues(partial_transpose(cov, 1))
    return bool(nu[0] >= 0.5 - tol)


def direct_sum_qp(q_block: np.ndarray, p_block: np.ndarray) -> np.ndarray:
    """Assemble a CM from its position and momentum blocks (no q-p terms)."""
    q_block = np.asarray(q_block, dtype=float)
    p_block = np.asarray(p_block, dtype=float)
    zero = np.zeros_like(q_block)
    return np.block([[q_block, zero], [zero, p_block]])
