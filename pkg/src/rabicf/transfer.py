"""Block-tridiagonal eigenvalues through the transfer-matrix determinant.

Write the null-vector equations of ``M - z I`` row by row::

    C_k psi_{k-1} + (A_k - z) psi_k + B_{k+1} psi_{k+1} = 0,   psi_{-1} = 0

where ``B_{k+1}`` is the block above the diagonal in row ``k`` and
``C_k = B_k^T`` the one below.  With ``psi_k = Q_k psi_0`` this gives the
``m x m`` recursion::

    Q_0 = I,  Q_{-1} = 0
    Q_{k+1} = -B_{k+1}^{-1} (A_k - z) Q_k - B_{k+1}^{-1} C_k Q_{k-1}

and the last row leaves ``F(z) psi_0 = 0`` with
``F = (A_n - z) Q_n + C_n Q_{n-1}``, the top-left block of the full transfer
matrix product.  ``det F(z)`` is ``det(M - z I)`` times the constant
``(-1)**(n m) / prod_k det B_k``, so its zeros are exactly the eigenvalues.

Between steps the pair ``[Q_{k+1}; Q_k]`` is re-orthonormalised by a thin QR
factorisation, and the discarded ``det R`` factors are kept in sign/log form.
That keeps the columns from collapsing onto the dominant growing solution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import BlockTridiagonal, ModelParams, assemble_dense
from .errors import ConvergenceFailure, PoleEncountered, SingularOffDiagonal, UnsupportedSpin
from .oracle import eig_dense_symmetric

__all__ = [
    "COND_LIMIT",
    "TransferPair",
    "transfer_recursion",
    "transfer_t11",
    "transfer_t11_batch",
    "BlockSpectrum",
    "eig_block",
    "sm_base_half",
    "sm_step_half",
]

COND_LIMIT = 1e12
MAX_REFINE_ROUNDS = 60
SPLIT = 4


@dataclass(frozen=True)
class TransferPair:
    """Normalised ``(Q_k, Q_{k-1})`` with the factored-out determinant."""

    t_curr: np.ndarray
    t_prev: np.ndarray
    sign: float
    scale_log: float


class _Prepared:
    """z-independent pieces of the recursion for one matrix."""

    def __init__(self, mtx: BlockTridiagonal):
        self.mtx = mtx
        self.m = mtx.block_dim
        eye = np.eye(self.m)
        self.steps = []
        for k, upper in enumerate(mtx.offdiag):
            if not np.all(np.isfinite(upper)):
                raise SingularOffDiagonal(f"off-diagonal block {k + 1} is not finite")
            cond = np.linalg.cond(upper)
            if not cond < COND_LIMIT:
                raise SingularOffDiagonal(
                    f"off-diagonal block {k + 1} has condition number {cond:.3g} >= {COND_LIMIT:g}"
                )
            inv = np.linalg.solve(upper, eye)
            lower = mtx.offdiag[k - 1].T if k > 0 else np.zeros((self.m, self.m))
            self.steps.append((inv @ mtx.diag[k], inv, inv @ lower))
        self.last_lower = mtx.offdiag[-1].T if mtx.offdiag else np.zeros((self.m, self.m))


def _run(prep: _Prepared, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    m = prep.m
    nz = z.size
    zz = z[:, None, None]
    curr = np.broadcast_to(np.eye(m), (nz, m, m)).copy()
    prev = np.zeros((nz, m, m))
    sign = np.ones(nz)
    log = np.zeros(nz)
    for g, inv, kl in prep.steps:
        nxt = -(g @ curr) + zz * (inv @ curr) - kl @ prev
        q, r = np.linalg.qr(np.concatenate([nxt, curr], axis=1))
        d = np.diagonal(r, axis1=1, axis2=2)
        sign *= np.prod(np.sign(d), axis=1)
        with np.errstate(divide="ignore"):
            log += np.sum(np.log(np.abs(d)), axis=1)
        curr, prev = q[:, :m, :], q[:, m:, :]
    a_last = prep.mtx.diag[-1]
    f = a_last @ curr - zz * curr + prep.last_lower @ prev
    s, ld = np.linalg.slogdet(f)
    return sign * s, log + ld


def transfer_recursion(mtx: BlockTridiagonal, z: float) -> TransferPair:
    """Normalised final pair ``(Q_n, Q_{n-1})`` at ``z`` with its determinant factor."""
    prep = _Prepared(mtx)
    m = prep.m
    curr, prev = np.eye(m), np.zeros((m, m))
    sign, log = 1.0, 0.0
    for g, inv, kl in prep.steps:
        nxt = -(g @ curr) + z * (inv @ curr) - kl @ prev
        q, r = np.linalg.qr(np.vstack([nxt, curr]))
        d = np.diag(r)
        sign *= float(np.prod(np.sign(d)))
        log += float(np.sum(np.log(np.abs(d))))
        curr, prev = q[:m], q[m:]
    return TransferPair(curr, prev, sign, log)


def transfer_t11_batch(mtx: BlockTridiagonal, z) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`transfer_t11` over an array of ``z``."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    return _run(_Prepared(mtx), z)


def transfer_t11(mtx: BlockTridiagonal, z: float) -> tuple[float, float]:
    """Sign and log-magnitude of ``det T_{n,11}(z)``."""
    s, ld = transfer_t11_batch(mtx, [z])
    return float(s[0]), float(ld[0])


def _gershgorin(mtx: BlockTridiagonal) -> tuple[float, float]:
    lo, hi = math.inf, -math.inf
    for k, a in enumerate(mtx.diag):
        radius = np.sum(np.abs(a), axis=1) - np.abs(np.diag(a))
        if k > 0:
            radius += np.sum(np.abs(mtx.offdiag[k - 1].T), axis=1)
        if k < len(mtx.offdiag):
            radius += np.sum(np.abs(mtx.offdiag[k]), axis=1)
        lo = min(lo, float(np.min(np.diag(a) - radius)))
        hi = max(hi, float(np.max(np.diag(a) + radius)))
    return lo, hi


@dataclass(frozen=True)
class BlockSpectrum:
    """Result of :func:`eig_block`; ``fallback`` marks a dense-oracle answer."""

    eigenvalues: np.ndarray
    fallback: bool
    roots_found: int
    grid_points: int


def _inertia_count(mtx: BlockTridiagonal, z: np.ndarray) -> np.ndarray:
    """Eigenvalues of ``M`` below each ``z`` from the block LDL^T inertia of ``M - z``."""
    m = mtx.block_dim
    zz = z[:, None, None]
    eye = np.eye(m)
    d = mtx.diag[0] - zz * eye
    count = np.zeros(z.size, dtype=np.int64)
    for k in range(len(mtx.diag)):
        if k > 0:
            b = mtx.offdiag[k - 1]
            d = mtx.diag[k] - zz * eye - b.T @ np.linalg.solve(d, np.broadcast_to(b, d.shape))
        d = 0.5 * (d + np.swapaxes(d, 1, 2))
        count += np.sum(np.linalg.eigvalsh(d) < 0, axis=1)
    return count


def _find_brackets(prep: _Prepared, lo: float, hi: float, n_expected: int, min_width: float):
    z = np.linspace(lo, hi, 4 * n_expected + 1)
    s, _ = _run(prep, z)
    for _ in range(MAX_REFINE_ROUNDS):
        if np.any(s == 0):
            # nudge exact hits off the root so every root shows as a sign change
            bump = 1e-3 * np.min(np.diff(z))
            z = np.where(s == 0, z + bump, z)
            s, _ = _run(prep, z)
            continue
        if np.count_nonzero(s[:-1] != s[1:]) >= n_expected:
            break
        # a sign change only shows an odd number of roots; the inertia count
        # says exactly which cells still hold two or more
        count = _inertia_count(prep.mtx, z)
        refine = (np.diff(count) >= 2) & (np.diff(z) > min_width)
        if not refine.any():
            break
        starts = z[:-1][refine]
        widths = np.diff(z)[refine]
        extra = starts[:, None] + widths[:, None] * (np.arange(1, SPLIT) / SPLIT)[None, :]
        z = np.unique(np.concatenate([z, extra.ravel()]))
        s, _ = _run(prep, z)
    idx = np.flatnonzero(s[:-1] != s[1:])
    return z[idx], z[idx + 1], s[idx], z.size


def eig_block(mtx: BlockTridiagonal, tol: float = 1e-12) -> BlockSpectrum:
    """All eigenvalues of a block-tridiagonal matrix from sign changes of ``det T_{n,11}``.

    Grid cells that hold several roots are split until each shows a sign
    change, guided by the block LDL^T inertia count.  Roots closer than about
    ``1e-13`` times the spectral scale (exact degeneracies) never separate; if
    the scan cannot account for every eigenvalue, the dense oracle supplies the
    spectrum and the result is flagged with ``fallback=True``.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    prep = _Prepared(mtx)
    n_expected = mtx.dim
    glo, ghi = _gershgorin(mtx)
    scale = max(1.0, abs(glo), abs(ghi))
    pad = 1e-9 * scale
    lo, hi, s_lo, n_grid = _find_brackets(prep, glo - pad, ghi + pad, n_expected, 1e-13 * scale)

    iters = 0
    while lo.size:
        mid = 0.5 * (lo + hi)
        done = (hi - lo <= tol * np.maximum(1.0, np.abs(mid))) | (mid <= lo) | (mid >= hi)
        if done.all():
            break
        if iters >= 200:
            raise ConvergenceFailure("bisection on det T did not converge")
        s_mid, _ = _run(prep, mid)
        same = (s_mid == s_lo) & ~done
        other = (s_mid != s_lo) & ~done
        lo = np.where(same, mid, lo)
        hi = np.where(other, mid, hi)
        iters += 1
    roots = np.sort(0.5 * (lo + hi))

    if roots.size == n_expected:
        return BlockSpectrum(roots, False, int(roots.size), n_grid)

    dense = eig_dense_symmetric(assemble_dense(mtx))
    agree = roots.size < n_expected and all(
        np.min(np.abs(dense - r)) <= 1e-6 * scale for r in roots
    )
    if not agree:
        raise ConvergenceFailure(
            f"transfer scan found {roots.size} roots, dense oracle has {dense.size}"
        )
    return BlockSpectrum(dense, True, int(roots.size), n_grid)


def _half_spin_check(params: ModelParams) -> None:
    if params.r.twice_j != 1:
        raise UnsupportedSpin("the 2x2 S_m recursion needs r = 1/2")


def _coupling_sq(params: ModelParams, k: float) -> float:
    ll = params.l.j * (params.l.j + 1)
    return (0.5 * params.g) ** 2 * (ll - k * (k - 1))


def _sigma1_block(params: ModelParams, k: float, z: float) -> np.ndarray:
    # sigma_1 (A_k - z) = (k omega - z) sigma_1 - i (delta/2) sigma_2
    x = k * params.omega - z
    h = 0.5 * params.delta
    return np.array([[0.0, x - h], [x + h, 0.0]])


def sm_base_half(params: ModelParams, z: float) -> np.ndarray:
    """``S_{-l} = sigma_1 (A_{-l} - z)``, anti-diagonal with corners ``-l omega - z -/+ delta/2``."""
    _half_spin_check(params)
    return _sigma1_block(params, -params.l.j, z)


def sm_step_half(params: ModelParams, z: float, s_prev: np.ndarray, k: float) -> np.ndarray:
    """One step ``S_k = sigma_1 (A_k - z) - beta_k^2 S_{k-1}^{-1}`` for ``r = 1/2``.

    ``beta_k = (g/2) sqrt(l(l+1) - k(k-1))`` is the scalar coupling carried by
    ``B_k = beta_k sigma_1``.  Anti-diagonal input gives anti-diagonal output.
    """
    _half_spin_check(params)
    s_prev = np.asarray(s_prev, dtype=float)
    if s_prev[0, 0] != 0.0 or s_prev[1, 1] != 0.0:
        raise ValueError("s_prev must be anti-diagonal")
    upper, lower = s_prev[0, 1], s_prev[1, 0]
    if upper == 0.0 or lower == 0.0:
        raise PoleEncountered(f"S_{k - 1} has a zero corner at z={z!r}")
    inv = np.array([[0.0, 1.0 / lower], [1.0 / upper, 0.0]])
    return _sigma1_block(params, k, z) - _coupling_sq(params, k) * inv
