"""Scalar tridiagonal eigenvalues from leading-minor recursions and Sturm counts.

For the tridiagonal matrix with diagonal ``a_0..a_n``, superdiagonal
``b_1..b_n`` and subdiagonal ``c_1..c_n`` the leading minors of ``A - z I``
obey::

    D_{-1} = 1,   D_0 = a_0 - z,   D_k = (a_k - z) D_{k-1} - b_k c_k D_{k-2}

and their ratio ``S_k = D_k / D_{k-1} = (a_k - z) - b_k c_k / S_{k-1}`` is the
terminating continued fraction whose zeros are the eigenvalues.  When every
``b_k c_k > 0`` the minors form a Sturm sequence: the number of sign changes
along ``D_{-1}, D_0, ..., D_n`` equals the number of eigenvalues strictly
below ``z``.  Roots are located by bisecting on that count, never by chasing
zeros of the continued fraction itself (it has poles between them).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceFailure, SturmConditionViolated

__all__ = [
    "Tridiagonal",
    "SturmEvaluation",
    "delta_sequence",
    "sk_value",
    "sturm_count",
    "gershgorin_bounds",
    "bisect_eigenvalues",
    "bracket_and_refine",
    "split_at_zero_couplings",
]

RESCALE_HIGH = 1e100
RESCALE_LOW = 1e-100
MAX_BISECTIONS = 200


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix; ``b[k-1]`` and ``c[k-1]`` hold ``b_k`` and ``c_k``."""

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float).ravel()
        b = np.array(self.b, dtype=float).ravel()
        c = np.array(self.c, dtype=float).ravel()
        if a.size < 1:
            raise ValueError("empty tridiagonal")
        if b.size != a.size - 1 or c.size != a.size - 1:
            raise ValueError("len(b) and len(c) must equal len(a) - 1")
        for v in (a, b, c):
            v.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @classmethod
    def symmetric(cls, diag, offdiag) -> "Tridiagonal":
        return cls(diag, offdiag, offdiag)

    @property
    def n(self) -> int:
        """Index of the last row (the matrix is ``(n+1) x (n+1)``)."""
        return self.a.size - 1

    @property
    def bc(self) -> np.ndarray:
        return self.b * self.c

    def dense(self) -> np.ndarray:
        return np.diag(self.a) + np.diag(self.b, 1) + np.diag(self.c, -1)

    def symmetrized(self) -> "Tridiagonal":
        """Similar symmetric matrix with couplings ``sqrt(b_k c_k)``; needs ``b_k c_k >= 0``."""
        if np.any(self.bc < 0):
            raise SturmConditionViolated("cannot symmetrize: some b_k c_k < 0")
        s = np.sqrt(self.bc)
        return Tridiagonal(self.a, s, s)

    def shifted(self, s: float) -> "Tridiagonal":
        return Tridiagonal(self.a + s, self.b, self.c)

    def leading(self, k: int) -> "Tridiagonal":
        """Leading ``(k+1) x (k+1)`` principal submatrix."""
        return Tridiagonal(self.a[:k + 1], self.b[:k], self.c[:k])


@dataclass(frozen=True)
class SturmEvaluation:
    """Rescaled leading minors at ``z``.

    ``deltas[i]`` holds ``D_{i-1}`` divided by ``exp(log_scales[i])``;
    ``scale_log`` is the total accumulated log-rescaling.
    """

    z: float
    deltas: tuple[float, ...]
    log_scales: tuple[float, ...]
    scale_log: float
    sign_changes: int

    def true_log_abs(self, k: int) -> float:
        """``log|D_k|`` undoing the rescaling (``-inf`` for an exact zero)."""
        d = self.deltas[k + 1]
        return (math.log(abs(d)) if d else -math.inf) + self.log_scales[k + 1]


def _next_sign(value, prev_sign):
    # a zero minor inherits its predecessor's sign, so an eigenvalue sitting
    # exactly at z is not counted as lying below it
    return np.where(value > 0, 1, np.where(value < 0, -1, prev_sign))


def delta_sequence(t: Tridiagonal, z: float) -> SturmEvaluation:
    z = float(z)
    bc = t.bc
    prev, curr = 1.0, t.a[0] - z
    deltas, scales = [prev, curr], [0.0, 0.0]
    log_scale = 0.0
    sign = 1
    new_sign = int(_next_sign(curr, sign))
    changes = int(new_sign != sign)
    sign = new_sign
    for k in range(1, t.n + 1):
        prev, curr = curr, (t.a[k] - z) * curr - bc[k - 1] * prev
        big = max(abs(prev), abs(curr))
        if big > RESCALE_HIGH or 0 < big < RESCALE_LOW:
            prev /= big
            curr /= big
            log_scale += math.log(big)
        deltas.append(curr)
        scales.append(log_scale)
        new_sign = int(_next_sign(curr, sign))
        changes += new_sign != sign
        sign = new_sign
    return SturmEvaluation(z, tuple(deltas), tuple(scales), log_scale, changes)


def sk_value(t: Tridiagonal, k: int, z: float) -> float:
    """Continued-fraction value ``S_k(z) = D_k(z) / D_{k-1}(z)``; signed infinity at poles."""
    if not 0 <= k <= t.n:
        raise IndexError(f"k={k} outside 0..{t.n}")
    ev = delta_sequence(t.leading(k), z)
    num, den = ev.deltas[k + 1], ev.deltas[k]
    if den == 0.0:
        if num == 0.0:
            return math.nan
        # sign of the zero denominator follows the sign convention for minors
        den_sign = 1
        for d in ev.deltas[:k]:
            den_sign = int(_next_sign(d, den_sign))
        return math.copysign(math.inf, num * den_sign)
    return num / den * math.exp(ev.log_scales[k + 1] - ev.log_scales[k])


def sturm_count(t: Tridiagonal, z) -> np.ndarray:
    """Number of eigenvalues strictly below each ``z`` (vectorised over ``z``)."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    bc = t.bc
    prev = np.ones_like(z)
    curr = t.a[0] - z
    sign = np.ones(z.shape, dtype=np.int8)
    new_sign = _next_sign(curr, sign)
    count = (new_sign != sign).astype(np.int64)
    sign = new_sign
    for k in range(1, t.n + 1):
        prev, curr = curr, (t.a[k] - z) * curr - bc[k - 1] * prev
        big = np.maximum(np.abs(prev), np.abs(curr))
        rescale = (big > RESCALE_HIGH) | ((big < RESCALE_LOW) & (big > 0))
        if rescale.any():
            f = np.where(rescale, big, 1.0)
            prev = prev / f
            curr = curr / f
        new_sign = _next_sign(curr, sign)
        count += new_sign != sign
        sign = new_sign
    return count


def gershgorin_bounds(t: Tridiagonal) -> tuple[float, float]:
    radius = np.zeros_like(t.a)
    radius[:-1] += np.abs(t.b)
    radius[1:] += np.abs(t.c)
    return float(np.min(t.a - radius)), float(np.max(t.a + radius))


def check_sturm_condition(t: Tridiagonal) -> None:
    bad = np.flatnonzero(~(t.bc > 0))
    if bad.size:
        k = int(bad[0]) + 1
        raise SturmConditionViolated(f"b_{k} c_{k} = {t.bc[k - 1]!r} is not positive")


def bisect_eigenvalues(t: Tridiagonal, indices, lo, hi, tol: float):
    """Refine eigenvalues ``indices`` (0-based, ascending order) from brackets.

    Each bracket must satisfy ``count(lo) <= i < count(hi)``.  Bisection stops
    once the bracket is narrower than ``tol * max(1, |E|)`` or no float lies
    strictly inside it.

    Returns
    -------
    values, widths, iterations
    """
    idx = np.asarray(indices, dtype=np.int64)
    lo = np.array(lo, dtype=float, copy=True) * np.ones(idx.shape)
    hi = np.array(hi, dtype=float, copy=True) * np.ones(idx.shape)
    iters = 0
    while True:
        mid = 0.5 * (lo + hi)
        done = (hi - lo <= tol * np.maximum(1.0, np.abs(mid))) | (mid <= lo) | (mid >= hi)
        if done.all():
            break
        if iters >= MAX_BISECTIONS:
            raise ConvergenceFailure(f"bisection did not converge in {MAX_BISECTIONS} steps")
        active = ~done
        counts = sturm_count(t, mid[active])
        go_left = counts > idx[active]
        act = np.flatnonzero(active)
        hi[act[go_left]] = mid[act[go_left]]
        lo[act[~go_left]] = mid[act[~go_left]]
        iters += 1
    return 0.5 * (lo + hi), hi - lo, iters


def bracket_and_refine(t: Tridiagonal, tol: float = 1e-12, *, return_info: bool = False):
    """All eigenvalues of ``t`` in ascending order.

    Every eigenvalue starts from the Gershgorin interval and is bisected on
    the Sturm count; repeated eigenvalues come out as repeated entries.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    check_sturm_condition(t)
    lo, hi = gershgorin_bounds(t)
    pad = 1e-12 * max(1.0, abs(lo), abs(hi)) + 1e-300
    idx = np.arange(t.n + 1)
    values, widths, iters = bisect_eigenvalues(t, idx, lo - pad, hi + pad, tol)
    values = np.sort(values)
    if return_info:
        return values, float(widths.max()), iters
    return values


def split_at_zero_couplings(t: Tridiagonal) -> list[Tridiagonal]:
    """Split into independent diagonal blocks wherever ``b_k c_k == 0``.

    The spectrum of ``t`` is the union of the pieces' spectra, and each piece
    satisfies the strict Sturm condition (or is 1 x 1).
    """
    cuts = [0] + [k for k in range(1, t.n + 1) if t.bc[k - 1] == 0.0] + [t.n + 1]
    return [Tridiagonal(t.a[s:e], t.b[s:e - 1], t.c[s:e - 1]) for s, e in zip(cuts[:-1], cuts[1:])]
