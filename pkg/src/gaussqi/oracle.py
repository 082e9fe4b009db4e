"""Truncated Fock-space brute force used to verify the Gaussian closed forms.

Density operators are stored block-diagonally with respect to a conserved
U(1) charge ``sum_j w_j n_j``. Two-mode squeezing conserves ``n_0 - n_1``,
a beam splitter conserves ``n_0 + n_1`` and a phase-covariant loss channel
acting on mode 0 shifts both sides of ``|p><p'|`` by the same amount, so the
states of interest never leave this structure. A charge vector of zeros
means a single dense block. Every matrix function is evaluated by a dense
Hermitian eigendecomposition of each block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.linalg import expm

from .errors import CutoffTooSmall, SupportMismatch, ValidationError

TAIL_TOL = 1e-10
LEAKAGE_TOL = 1e-8
EIG_FLOOR = 1e-18


def ladder_ops(cutoff: int) -> dict[str, np.ndarray]:
    """Truncated annihilation, creation and number operators."""
    if cutoff < 2:
        raise ValidationError("cutoff must be >= 2")
    a = np.diag(np.sqrt(np.arange(1.0, cutoff)), 1)
    return {"a": a, "a_dagger": a.T.copy(), "n_op": np.diag(np.arange(float(cutoff)))}


def _sparse_lowering(cutoff: int) -> sp.csr_matrix:
    return sp.diags(np.sqrt(np.arange(1.0, cutoff)), 1, format="csr")


def _embed(ops: list, dims: tuple[int, ...]) -> sp.csr_matrix:
    """Kronecker product of per-mode operators (None means identity)."""
    out = None
    for op, d in zip(ops, dims):
        factor = sp.identity(d, format="csr") if op is None else op
        out = factor if out is None else sp.kron(out, factor, format="csr")
    return out


def thermal_probs(n_mean: float, cutoff: int) -> tuple[np.ndarray, float]:
    """Truncated Bose-Einstein distribution and the discarded tail mass."""
    if n_mean < 0:
        raise ValidationError("thermal occupation must be >= 0")
    if n_mean == 0:
        p = np.zeros(cutoff)
        p[0] = 1.0
        return p, 0.0
    q = n_mean / (n_mean + 1.0)
    n = np.arange(cutoff)
    return (1.0 - q) * q ** n, q ** cutoff


@dataclass
class DensityOperator:
    """Block-diagonal density matrix on ``prod(dims)`` Fock levels.

    ``blocks[label]`` is the Hermitian matrix restricted to the basis states
    whose charge ``sum_j charge[j] * n_j`` equals ``label``; flat indices are
    row-major with mode 0 most significant, matching ``np.kron``.
    """

    dims: tuple[int, ...]
    charge: tuple[int, ...]
    blocks: dict[int, np.ndarray]
    tail_mass: float = 0.0
    _basis: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_modes(self) -> int:
        return len(self.dims)

    @property
    def dim_per_mode(self) -> tuple[int, ...]:
        return self.dims

    @cached_property
    def _labels_all(self) -> np.ndarray:
        grids = np.indices(self.dims).reshape(len(self.dims), -1)
        return np.asarray(self.charge) @ grids

    def basis(self, label: int) -> np.ndarray:
        if label not in self._basis:
            self._basis[label] = np.flatnonzero(self._labels_all == label)
        return self._basis[label]

    def digits(self, flat: np.ndarray) -> np.ndarray:
        return np.array(np.unravel_index(flat, self.dims))

    @property
    def matrix(self) -> np.ndarray:
        dim = int(np.prod(self.dims))
        out = np.zeros((dim, dim), dtype=complex)
        for label, block in self.blocks.items():
            idx = self.basis(label)
            out[np.ix_(idx, idx)] = block
        return out

    def trace(self) -> float:
        return float(sum(np.trace(b).real for b in self.blocks.values()))

    def purity(self) -> float:
        return float(sum(np.sum(np.abs(b) ** 2) for b in self.blocks.values()))

    def expectation(self, op: sp.spmatrix) -> complex:
        """``Tr(rho op)`` for a sparse operator on the full product space."""
        op = sp.csr_matrix(op)
        total = 0.0 + 0.0j
        for label, block in self.blocks.items():
            idx = self.basis(label)
            sub = op[idx][:, idx].toarray()
            total += np.sum(block * sub.T)
        return complex(total)

    def boundary_mass(self) -> float:
        """Population sitting on the top Fock level of any mode."""
        mass = 0.0
        for label, block in self.blocks.items():
            dig = self.digits(self.basis(label))
            top = np.any(dig == (np.array(self.dims) - 1)[:, None], axis=0)
            mass += float(np.sum(np.diag(block).real[top]))
        return mass

    def eigenvalues(self) -> np.ndarray:
        return np.concatenate([np.linalg.eigvalsh(b) for b in self.blocks.values()])


def _dense_operator(matrix: np.ndarray, tail_mass: float = 0.0) -> DensityOperator:
    d = matrix.shape[0]
    return DensityOperator((d,), (0,), {0: np.asarray(matrix)}, tail_mass)


def _block_unitaries(generator: sp.spmatrix, dims, charge, scale: float) -> dict[int, np.ndarray]:
    """``expm(scale * G)`` restricted to each charge sector of ``G``."""
    proto = DensityOperator(tuple(dims), tuple(charge), {})
    labels = proto._labels_all
    g = sp.csr_matrix(generator)
    coo = g.tocoo()
    if np.any(labels[coo.row] != labels[coo.col]):
        raise ValidationError("generator does not conserve the requested charge")
    out = {}
    for label in np.unique(labels):
        idx = proto.basis(int(label))
        out[int(label)] = expm(scale * g[idx][:, idx].toarray())
    return out


def _two_mode_squeeze_generator(d0: int, d1: int) -> sp.csr_matrix:
    a = _sparse_lowering(d0)
    b = _sparse_lowering(d1)
    ab = sp.kron(a, b, format="csr")
    return (ab.T - ab).tocsr()


def _beam_splitter_generator(d0: int, d1: int) -> sp.csr_matrix:
    a = _sparse_lowering(d0)
    b = _sparse_lowering(d1)
    adag_b = sp.kron(a.T, b, format="csr")
    return (adag_b - adag_b.T).tocsr()


def gaussian_unitary(kind: str, param, cutoff: int, check_leakage: bool = True) -> np.ndarray:
    """Dense truncated Gaussian unitary.

    ``kind`` is ``"displacement"`` (complex alpha, one mode),
    ``"two_mode_squeeze"`` (real r) or ``"beam_splitter"`` (transmissivity
    tau, with ``tau = cos^2 theta``). With ``check_leakage`` the image of the
    vacuum must keep less than ``LEAKAGE_TOL`` on the top Fock level.
    """
    if kind == "displacement":
        a = ladder_ops(cutoff)["a"]
        alpha = complex(param)
        u = expm(alpha * a.T - np.conj(alpha) * a)
        dims = (cutoff,)
    elif kind in ("two_mode_squeeze", "beam_splitter"):
        dims = (cutoff, cutoff)
        if kind == "two_mode_squeeze":
            gen, charge, scale = _two_mode_squeeze_generator(cutoff, cutoff), (1, -1), float(param)
        else:
            tau = float(param)
            if not 0.0 <= tau <= 1.0:
                raise ValidationError("beam-splitter transmissivity must lie in [0, 1]")
            gen, charge, scale = _beam_splitter_generator(cutoff, cutoff), (1, 1), math.acos(math.sqrt(tau))
        blocks = _block_unitaries(gen, dims, charge, scale)
        proto = DensityOperator(dims, charge, {})
        u = np.zeros((cutoff ** 2, cutoff ** 2))
        for label, blk in blocks.items():
            idx = proto.basis(label)
            u[np.ix_(idx, idx)] = blk
    else:
        raise ValidationError(f"unknown Gaussian unitary {kind!r}")
    if check_leakage:
        vac_image = u[:, 0]
        dig = np.array(np.unravel_index(np.arange(vac_image.size), dims))
        top = np.any(dig == (np.array(dims) - 1)[:, None], axis=0)
        leak = float(np.sum(np.abs(vac_image[top]) ** 2))
        if leak > LEAKAGE_TOL:
            raise CutoffTooSmall(f"{kind} leaks {leak:.2e} onto the cutoff boundary")
    return u


def _require_converged(rho: DensityOperator, tol: float) -> DensityOperator:
    if rho.tail_mass > tol:
        raise CutoffTooSmall(
            f"tail mass {rho.tail_mass:.3e} exceeds {tol:.1e} at cutoffs {rho.dims}")
    return rho


def thermal_state(n_mean: float, cutoff: int, tail_tol: float = TAIL_TOL) -> DensityOperator:
    p, tail = thermal_probs(n_mean, cutoff)
    rho = _dense_operator(np.diag(p / p.sum()), tail)
    return _require_converged(rho, tail_tol)


def coherent_state(n_s: float, cutoff: int, tail_tol: float = TAIL_TOL) -> DensityOperator:
    """Displaced vacuum |sqrt(n_s)> from the truncated displacement unitary."""
    u = gaussian_unitary("displacement", math.sqrt(n_s), cutoff, check_leakage=False)
    psi = u[:, 0]
    rho = _dense_operator(np.outer(psi, psi.conj()))
    rho.tail_mass = rho.boundary_mass()
    return _require_converged(rho, tail_tol)


def generic_source(n_s: float, c: float, cutoffs: tuple[int, int],
                   tail_tol: float = TAIL_TOL) -> DensityOperator:
    """Two-mode squeezer acting on two equal thermal modes.

    The thermal occupation is ``sqrt(S^2 - C^2) - 1/2`` and the squeezing
    ``tanh(2r) = C/S`` with ``S = n_s + 1/2``.
    """
    s = n_s + 0.5
    if c < 0 or c * c > s * s - 0.25 + 1e-12:
        raise ValidationError("correlation outside the physical range")
    n_th = max(math.sqrt(max(s * s - c * c, 0.25)) - 0.5, 0.0)
    r = 0.5 * math.atanh(c / s)
    d0, d1 = cutoffs
    p0, t0 = thermal_probs(n_th, d0)
    p1, t1 = thermal_probs(n_th, d1)
    dims, charge = (d0, d1), (1, -1)
    proto = DensityOperator(dims, charge, {})
    diag = np.kron(p0, p1)
    units = _block_unitaries(_two_mode_squeeze_generator(d0, d1), dims, charge, r)
    blocks = {}
    for label, u in units.items():
        idx = proto.basis(label)
        blocks[label] = (u * diag[idx]) @ u.conj().T
    rho = DensityOperator(dims, charge, blocks)
    rho.tail_mass = t0 + t1 + rho.boundary_mass()
    return _require_converged(rho, tail_tol)


def synth_state(spec: dict, cutoff, tail_tol: float = TAIL_TOL) -> DensityOperator:
    """Build a state from ``{"kind": "thermal"|"coherent"|"generic_gaussian", ...}``."""
    kind = spec["kind"]
    if kind == "thermal":
        return thermal_state(spec["n"], int(cutoff), tail_tol)
    if kind == "coherent":
        return coherent_state(spec["n_s"], int(cutoff), tail_tol)
    if kind == "generic_gaussian":
        cutoffs = (cutoff, cutoff) if np.isscalar(cutoff) else tuple(cutoff)
        return generic_source(spec["n_s"], spec["c"], cutoffs, tail_tol)
    raise ValidationError(f"unknown state kind {kind!r}")


@lru_cache(maxsize=16)
def _loss_transfer(kappa: float, n_env: float, d_sig: int, d_env: int):
    """Coefficients of ``|p><p'| -> |p+delta><p'+delta|`` for thermal loss.

    Returns ``(T, env_tail)`` with ``T[delta + d_sig - 1]`` a ``d_sig x d_sig``
    matrix indexed by the input levels ``(p, p')``. Cached; treat as read-only.
    """
    w, env_tail = thermal_probs(n_env, d_env)
    dims, charge = (d_sig, d_env), (1, 1)
    proto = DensityOperator(dims, charge, {})
    theta = math.acos(math.sqrt(kappa))
    units = _block_unitaries(_beam_splitter_generator(d_sig, d_env), dims, charge, theta)
    n_delta = d_sig + d_env - 1
    kraus = np.zeros((n_delta, d_env, d_sig))
    for label, u in units.items():
        s_idx, e_idx = proto.digits(proto.basis(label))
        # u[out, in]; the freed env quanta determine the signal shift
        delta = e_idx[None, :] - e_idx[:, None]
        kraus[delta + d_sig - 1, e_idx[None, :].repeat(len(e_idx), 0),
              s_idx[None, :].repeat(len(s_idx), 0)] = u
    transfer = np.matmul(kraus.transpose(0, 2, 1), w[None, :, None] * kraus)
    transfer.flags.writeable = False
    return transfer, env_tail


def apply_loss_channel(rho: DensityOperator, kappa: float, n_env: float,
                       env_cutoff: int | None = None,
                       tail_tol: float = TAIL_TOL) -> DensityOperator:
    """Mix mode 0 with a thermal environment on a beam splitter of transmissivity kappa.

    ``kappa = 0`` replaces mode 0 by the environment state. The environment
    cutoff defaults to the cutoff of mode 0.
    """
    if not 0.0 <= kappa <= 1.0:
        raise ValidationError("kappa must lie in [0, 1]")
    d_sig = rho.dims[0]
    d_env = d_sig if env_cutoff is None else int(env_cutoff)
    transfer, env_tail = _loss_transfer(float(kappa), float(n_env), d_sig, d_env)
    stride = int(np.prod(rho.dims[1:])) if rho.n_modes > 1 else 1
    shift = rho.charge[0]
    live = np.flatnonzero(np.max(np.abs(transfer), axis=(1, 2)) > 1e-300)
    deltas = live - (d_sig - 1)

    # every output block lives in one flat buffer
    labels_all = rho._labels_all
    labels = np.unique(labels_all)
    sizes = {int(l): rho.basis(int(l)).size for l in labels}
    offsets, total = {}, 0
    for l in labels:
        offsets[int(l)] = total
        total += sizes[int(l)] ** 2
    position = np.empty(labels_all.size, dtype=np.int64)
    for l in labels:
        position[rho.basis(int(l))] = np.arange(sizes[int(l)])
    dtype = np.result_type(transfer, *rho.blocks.values())
    buf = np.zeros(total, dtype=dtype)

    for label, block in rho.blocks.items():
        idx = rho.basis(label)
        p = idx // stride % d_sig
        new_p = p[None, :] + deltas[:, None]
        ok = (new_p >= 0) & (new_p < d_sig)
        rows = np.flatnonzero(ok.any(axis=1))
        if rows.size == 0:
            continue
        ok = ok[rows]
        d_k = deltas[rows]
        new_labels = label + shift * d_k
        off = np.array([offsets.get(int(l), -1) for l in new_labels])
        size = np.array([sizes.get(int(l), 0) for l in new_labels])
        target = np.where(ok, idx[None, :] + d_k[:, None] * stride, 0)
        pos = position[target]
        flat = off[:, None, None] + pos[:, :, None] * size[:, None, None] + pos[:, None, :]
        vals = transfer[np.ix_(live[rows], p, p)] * block[None, :, :]
        mask = ok[:, :, None] & ok[:, None, :]
        if shift != 0:
            # distinct shifts land in distinct output blocks: no collisions
            buf[flat[mask]] += vals[mask]
        else:
            sel = flat[mask]
            buf += np.bincount(sel, vals[mask].real, total)
            if np.iscomplexobj(buf):
                buf += 1j * np.bincount(sel, vals[mask].imag, total)

    out = {}
    for l in labels:
        l = int(l)
        chunk = buf[offsets[l]:offsets[l] + sizes[l] ** 2]
        if np.any(chunk):
            out[l] = chunk.reshape(sizes[l], sizes[l])
    result = DensityOperator(rho.dims, rho.charge, out, 0.0, rho._basis)
    result.tail_mass = rho.tail_mass + env_tail + result.boundary_mass()
    return _require_converged(result, tail_tol)


def moments(rho: DensityOperator) -> tuple[np.ndarray, np.ndarray]:
    """Mean vector and covariance matrix in (q..., p...) ordering."""
    n = rho.n_modes
    lows = [_embed([_sparse_lowering(d) if j == k else None for j, d in enumerate(rho.dims)],
                   rho.dims) for k in range(n)]
    alpha = np.array([rho.expectation(a) for a in lows])
    big_n = np.array([[rho.expectation(lows[j].T @ lows[k]) for k in range(n)] for j in range(n)])
    big_m = np.array([[rho.expectation(lows[j] @ lows[k]) for k in range(n)] for j in range(n)])
    mean = np.sqrt(2.0) * np.concatenate([alpha.real, alpha.imag])
    second_qq = (big_m + big_n).real + 0.5 * np.eye(n)
    second_pp = (big_n - big_m).real + 0.5 * np.eye(n)
    second_qp = (big_m + big_n).imag
    second = np.block([[second_qq, second_qp], [second_qp.T, second_pp]])
    cov = second - np.outer(mean, mean)
    return mean, 0.5 * (cov + cov.T)


def _matched_blocks(rho0: DensityOperator, rho1: DensityOperator):
    if rho0.dims != rho1.dims:
        raise ValidationError("states live on different truncated spaces")
    if rho0.charge != rho1.charge:
        rho0 = DensityOperator(rho0.dims, (0,) * rho0.n_modes, {0: rho0.matrix}, rho0.tail_mass)
        rho1 = DensityOperator(rho1.dims, (0,) * rho1.n_modes, {0: rho1.matrix}, rho1.tail_mass)
    for label in sorted(set(rho0.blocks) | set(rho1.blocks)):
        size = rho0.basis(label).size
        zero = np.zeros((size, size), dtype=complex)
        yield rho0.blocks.get(label, zero), rho1.blocks.get(label, zero)


def _eigh(block: np.ndarray):
    w, u = np.linalg.eigh(0.5 * (block + block.conj().T))
    if w.size and w[0] < -1e-10:
        raise ValidationError(f"density block has eigenvalue {w[0]:.3e} < 0")
    return np.clip(w, 0.0, None), u


def _power(block: np.ndarray, s: float) -> np.ndarray:
    w, u = _eigh(block)
    return (u * w ** s) @ u.conj().T


def brute_s_overlap(rho0: DensityOperator, rho1: DensityOperator, s: float) -> float:
    total = 0.0
    for b0, b1 in _matched_blocks(rho0, rho1):
        total += float(np.sum(_power(b0, s) * _power(b1, 1.0 - s).T).real)
    return total


def brute_helstrom(rho0: DensityOperator, rho1: DensityOperator) -> float:
    """Minimum single-copy error probability for equal priors."""
    norm = 0.0
    for b0, b1 in _matched_blocks(rho0, rho1):
        diff = b0 - b1
        norm += float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))
    return 0.5 * (1.0 - 0.5 * norm)


SUPPORT_TOL = 1e-8


def brute_stein(rho0: DensityOperator, rho1: DensityOperator,
                support_tol: float = SUPPORT_TOL,
                floor: float = EIG_FLOOR) -> dict[str, float]:
    """Relative entropy D(rho0||rho1) and its variance by matrix logarithms.

    Eigenvalues of ``rho1`` below ``EIG_FLOOR`` are projected out. The weight
    of ``rho0`` on that subspace is returned as ``dropped_weight``; above
    ``support_tol`` it is treated as a genuine support mismatch.
    """
    first = 0.0
    second = 0.0
    dropped = 0.0
    for b0, b1 in _matched_blocks(rho0, rho1):
        w0, u0 = _eigh(b0)
        w1, u1 = _eigh(b1)
        keep0 = w0 > floor
        keep1 = w1 > floor
        log0 = (u0[:, keep0] * np.log(w0[keep0])) @ u0[:, keep0].conj().T
        log1 = (u1[:, keep1] * np.log(w1[keep1])) @ u1[:, keep1].conj().T
        # weight of rho0 on the numerical kernel of rho1
        null1 = u1[:, ~keep1]
        if null1.size:
            dropped += float(np.trace(null1.conj().T @ b0 @ null1).real)
            if dropped > support_tol:
                raise SupportMismatch(f"rho0 has weight {dropped:.3e} outside supp(rho1)")
        diff = log0 - log1
        prod = b0 @ diff
        first += float(np.trace(prod).real)
        second += float(np.sum(prod * diff.T).real)
    return {"d": first, "v": second - first ** 2, "dropped_weight": dropped}


def auto_cutoff(n_mean: float, tol: float = 1e-12, minimum: int = 4) -> int:
    """Smallest cutoff whose thermal tail at occupation ``n_mean`` is below ``tol``."""
    if n_mean <= 0:
        return minimum
    q = n_mean / (n_mean + 1.0)
    return max(minimum, int(math.ceil(math.log(tol) / math.log(q))))


@dataclass(frozen=True)
class OracleCutoffs:
    signal: int
    idler: int
    env: int

    def scaled(self, factor: int) -> "OracleCutoffs":
        return OracleCutoffs(self.signal * factor, self.idler * factor, self.env * factor)


def default_cutoffs(n_s: float, kappa: float, n_b: float, tol: float = 1e-20) -> OracleCutoffs:
    n_env = n_b / (1.0 - kappa)
    return OracleCutoffs(signal=auto_cutoff(max(n_s, kappa * n_s + n_b, n_b), tol),
                         idler=auto_cutoff(n_s, tol),
                         env=auto_cutoff(max(n_env, n_b), tol))


def generic_pair(n_s: float, c: float, kappa: float, n_b: float,
                 cutoffs: OracleCutoffs | None = None, tail_tol: float = TAIL_TOL):
    """Truncated (H0, H1) states for the generic source and thermal-loss channel.

    H0 replaces the return mode by a thermal state of mean ``n_b``; H1
    transmits it with transmissivity ``kappa`` into an environment of mean
    ``n_b / (1 - kappa)``.
    """
    cut = cutoffs or default_cutoffs(n_s, kappa, n_b)
    src = generic_source(n_s, c, (cut.signal, cut.idler), tail_tol)
    rho0 = apply_loss_channel(src, 0.0, n_b, cut.env, tail_tol)
    rho1 = apply_loss_channel(src, kappa, n_b / (1.0 - kappa), cut.env, tail_tol)
    return rho0, rho1


def coherent_pair(n_s: float, kappa: float, n_b: float,
                  cutoffs: OracleCutoffs | None = None, tail_tol: float = TAIL_TOL):
    cut = cutoffs or default_cutoffs(n_s, kappa, n_b)
    d = max(cut.signal, auto_cutoff(n_s + 1.0, 1e-14))
    src = coherent_state(n_s, d, tail_tol)
    rho0 = apply_loss_channel(src, 0.0, n_b, cut.env, tail_tol)
    rho1 = apply_loss_channel(src, kappa, n_b / (1.0 - kappa), cut.env, tail_tol)
    return rho0, rho1


def brute_quantities(rho0: DensityOperator, rho1: DensityOperator, s: float = 0.5) -> dict:
    stein = brute_stein(rho0, rho1)
    return {"c_s": brute_s_overlap(rho0, rho1, s),
            "helstrom": brute_helstrom(rho0, rho1),
            "d": stein["d"], "v": stein["v"],
            "tail_mass": max(rho0.tail_mass, rho1.tail_mass)}


@dataclass(frozen=True)
class Certificate:
    """Brute-force values at two cutoffs and their largest disagreement."""

    base: dict
    doubled: dict
    cutoffs: OracleCutoffs
    max_change: float
    states: tuple = field(default=(), repr=False, compare=False)

    def converged(self, tol: float = 1e-8) -> bool:
        return self.max_change < tol


def certify(build, cutoffs: OracleCutoffs, s: float = 0.5) -> Certificate:
    """Evaluate ``build(cutoffs)`` at ``cutoffs`` and at twice ``cutoffs``."""
    states = build(cutoffs)
    base = brute_quantities(*states, s)
    doubled = brute_quantities(*build(cutoffs.scaled(2)), s)
    keys = ("c_s", "helstrom", "d", "v")
    change = max(abs(base[k] - doubled[k]) for k in keys)
    return Certificate(base, doubled, cutoffs, change, tuple(states))
