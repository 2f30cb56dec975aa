"""Reference dense symmetric eigensolver and truncated-Fock Rabi Hamiltonian.

Everything else in the package is validated against this module, so it uses
no external eigensolver.  Two orthogonal-similarity methods are provided:

* cyclic Jacobi rotations in parallel (round-robin) order, used for small and
  moderate dimensions, and
* Householder tridiagonalisation followed by implicit-shift QL, used for the
  large truncated-Fock matrices where Jacobi's sweep cost is prohibitive.

The two share no code, and the test suite checks them against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import RabiParams
from .errors import ConvergenceFailure

__all__ = [
    "DenseSymmetric",
    "eig_dense_symmetric",
    "jacobi_eigenvalues",
    "householder_ql_eigenvalues",
    "rabi_dense_truncated",
]

JACOBI_MAX_DIM = 160
MAX_SWEEPS = 100
QL_MAX_ITERS = 60


@dataclass(frozen=True)
class DenseSymmetric:
    """Real symmetric matrix, checked for symmetry on construction."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float, copy=True)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ValueError(f"expected a non-empty square matrix, got shape {a.shape}")
        scale = max(np.abs(a).max(), 1.0)
        if np.abs(a - a.T).max() > 1e-14 * scale:
            raise ValueError("matrix is not symmetric")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def n(self) -> int:
        return self.entries.shape[0]


def eig_dense_symmetric(a, tol: float = 1e-14, method: str = "auto") -> np.ndarray:
    """All eigenvalues of a real symmetric matrix, sorted ascending.

    Parameters
    ----------
    a : DenseSymmetric or array_like
        The matrix.  Plain arrays are wrapped (and symmetry-checked).
    tol : float
        Iteration stops once the off-diagonal Frobenius norm is below
        ``tol * ||a||_F``.
    method : {"auto", "jacobi", "householder-ql"}
        ``"auto"`` uses Jacobi up to dimension ``JACOBI_MAX_DIM``.
    """
    if not isinstance(a, DenseSymmetric):
        a = DenseSymmetric(a)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method == "auto":
        method = "jacobi" if a.n <= JACOBI_MAX_DIM else "householder-ql"
    if method == "jacobi":
        return jacobi_eigenvalues(a.entries, tol)
    if method == "householder-ql":
        return householder_ql_eigenvalues(a.entries, tol)
    raise ValueError(f"unknown method {method!r}")


@lru_cache(maxsize=64)
def _round_robin(n: int) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    # circle-method tournament: every index pair meets exactly once per sweep
    m = n + (n % 2)
    players = list(range(m))
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p < n and q < n]
        p = np.array([pq[0] for pq in pairs], dtype=np.intp)
        q = np.array([pq[1] for pq in pairs], dtype=np.intp)
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return tuple(rounds)


def _off_norm(a: np.ndarray) -> float:
    return math.sqrt(2.0 * float(np.sum(np.triu(a, 1) ** 2)))


def jacobi_eigenvalues(a: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Cyclic Jacobi with disjoint rotations applied simultaneously per round."""
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    if n == 1 or norm == 0.0:
        return np.sort(np.diag(a).copy())
    rounds = _round_robin(n)
    for _ in range(MAX_SWEEPS):
        if _off_norm(a) <= tol * norm:
            return np.sort(np.diag(a).copy())
        for p, q in rounds:
            apq = a[p, q]
            if not np.any(apq):
                continue
            app = a[p, p]
            aqq = a[q, q]
            with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
                tau = (aqq - app) / (2.0 * apq)
                t = np.where(tau >= 0, 1.0, -1.0) / (np.abs(tau) + np.sqrt(1.0 + tau * tau))
            t = np.where(apq == 0.0, 0.0, np.nan_to_num(t, nan=0.0, posinf=0.0, neginf=0.0))
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = t * c

            rp = a[p, :]
            rq = a[q, :]
            a[p, :] = c[:, None] * rp - s[:, None] * rq
            a[q, :] = s[:, None] * rp + c[:, None] * rq
            cp = a[:, p]
            cq = a[:, q]
            a[:, p] = cp * c - cq * s
            a[:, q] = cp * s + cq * c
            a[p, q] = 0.0
            a[q, p] = 0.0
    if _off_norm(a) <= tol * norm:
        return np.sort(np.diag(a).copy())
    raise ConvergenceFailure(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")


def _householder_tridiagonal(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        alpha = float(np.linalg.norm(x))
        if alpha == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(alpha, x[0])
        v /= np.linalg.norm(v)
        # two-sided reflection of the trailing block, H = I - 2 v v^T
        sub = a[k + 1:, k:]
        sub -= 2.0 * np.outer(v, v @ sub)
        sub = a[k:, k + 1:]
        sub -= 2.0 * np.outer(sub @ v, v)
    return np.diag(a).copy(), np.diag(a, -1).copy()


def _ql_implicit(d: np.ndarray, e: np.ndarray, tol_abs: float) -> np.ndarray:
    # eigenvalues of the symmetric tridiagonal (d, e) by QL with implicit
    # Wilkinson-type shifts; e[i] couples i and i+1
    d = [float(x) for x in d]
    n = len(d)
    e = [float(x) for x in e] + [0.0]
    eps = np.finfo(float).eps
    for lo in range(n):
        iters = 0
        while True:
            m = lo
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd or abs(e[m]) <= tol_abs:
                    break
                m += 1
            if m == lo:
                break
            iters += 1
            if iters > QL_MAX_ITERS:
                raise ConvergenceFailure("QL iteration did not converge")
            g = (d[lo + 1] - d[lo]) / (2.0 * e[lo])
            r = math.hypot(g, 1.0)
            g = d[m] - d[lo] + e[lo] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            deflated = False
            while i >= lo:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[lo] -= p
            e[lo] = g
            e[m] = 0.0
    return np.sort(np.array(d))


def householder_ql_eigenvalues(a: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Householder reduction to tridiagonal form, then implicit QL."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    if n == 1:
        return a.diagonal().copy()
    d, e = _householder_tridiagonal(a)
    # a per-entry threshold that bounds the discarded off-diagonal Frobenius mass
    tol_abs = tol * float(np.linalg.norm(a)) / math.sqrt(2.0 * n)
    return _ql_implicit(d, e, tol_abs)


def rabi_dense_truncated(p: RabiParams, n_photons: int) -> DenseSymmetric:
    """Rabi Hamiltonian in the Fock basis truncated at ``n_photons`` photons.

    Basis index ``2*n + s`` with photon number ``n`` and ``s = 0`` for spin up
    (sigma_3 = +1), ``s = 1`` for spin down.
    """
    if n_photons < 1:
        raise ValueError("n_photons must be >= 1")
    dim = 2 * (n_photons + 1)
    h = np.zeros((dim, dim))
    n = np.repeat(np.arange(n_photons + 1, dtype=float), 2)
    spin = np.tile([1.0, -1.0], n_photons + 1)
    h[np.arange(dim), np.arange(dim)] = p.omega * n + 0.5 * p.delta * spin
    # g sigma_1 (a + a^dag): |n, s> <-> |n+1, 1-s> with amplitude g sqrt(n+1)
    for k in range(n_photons):
        amp = p.g * math.sqrt(k + 1)
        for s in (0, 1):
            i, j = 2 * k + s, 2 * (k + 1) + (1 - s)
            h[i, j] = h[j, i] = amp
    return DenseSymmetric(h)
