"""Parity-split continued-fraction spectra of the generalized model and the Rabi model.

For ``r = 1/2`` the block-tridiagonal ``H_L`` splits into two scalar chains
(``+`` and ``-``), each a tridiagonal matrix indexed by ``m = -l .. l``::

    a_m = m omega -/+ (-1)**m delta/2,     b_m = (g/2) sqrt(l(l+1) - m(m-1))

The zeros of the terminating continued fractions ``S_{l,+}`` and ``S_{l,-}``
are the eigenvalues of these chains.  The Rabi model gives the same structure
on ``k = 0, 1, 2, ...`` with couplings ``b_k = g sqrt(k)``; the infinite chain
is truncated at ``k_max`` and the truncation doubled until the requested
levels stop moving.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import ModelParams, RabiParams
from .errors import ConvergenceFailure, UnsupportedSpin
from .tridiag import (
    Tridiagonal,
    bisect_eigenvalues,
    bracket_and_refine,
    gershgorin_bounds,
    split_at_zero_couplings,
    sturm_count,
)

__all__ = [
    "Parity",
    "SolveMeta",
    "SpectrumResult",
    "RabiParams",
    "hl_parity_tridiagonal",
    "hl_spectrum",
    "rabi_parity_tridiagonal",
    "rabi_parity_levels",
    "rabi_spectrum",
]

MIN_TRUNCATION = 64
MAX_TRUNCATION = 2 ** 20
# Rabi levels are bisected to (near) machine precision so that the change
# between truncations measures truncation error rather than bisection noise
RABI_BISECTION_TOL = 1e-14


class Parity(enum.IntEnum):
    """Label of the scalar chain ``S_{m,+}`` / ``S_{m,-}``."""

    PLUS = 1
    MINUS = -1

    @property
    def symbol(self) -> str:
        return "+" if self is Parity.PLUS else "-"


@dataclass(frozen=True)
class SolveMeta:
    tol_achieved: float
    truncation_k: int | None
    bisection_iters_max: int
    truncation_changes: tuple[float, ...] = ()


@dataclass(frozen=True)
class SpectrumResult:
    """Sorted eigenvalues with the parity chain each one came from."""

    params: object
    values: np.ndarray
    parities: tuple[Parity, ...]
    meta: SolveMeta

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.size != len(self.parities):
            raise ValueError("need one parity label per eigenvalue")
        if np.any(np.diff(values) < 0):
            raise ValueError("eigenvalues must be sorted ascending")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def eigenvalues(self) -> list[tuple[float, Parity]]:
        return list(zip(self.values.tolist(), self.parities))

    def of_parity(self, parity: Parity) -> np.ndarray:
        return self.values[[p is parity for p in self.parities]]


def _merge(per_parity: dict[Parity, np.ndarray], limit: int | None = None):
    rows = sorted(
        (float(v), par) for par in (Parity.PLUS, Parity.MINUS) for v in per_parity[par]
    )
    if limit is not None:
        rows = rows[:limit]
    return np.array([v for v, _ in rows]), tuple(p for _, p in rows)


def _chain_diagonal(index: np.ndarray, omega: float, delta: float, parity: Parity) -> np.ndarray:
    alternating = np.where(np.asarray(index) % 2 == 0, 1.0, -1.0)
    return index * omega - int(parity) * alternating * 0.5 * delta


def hl_parity_tridiagonal(p: ModelParams, parity: Parity, shift: float = 0.0) -> Tridiagonal:
    """Scalar chain of ``H_L`` (``r = 1/2``, integer ``l``) for one parity."""
    if p.r.twice_j != 1:
        raise UnsupportedSpin(f"parity chains need r = 1/2, got r = {p.r}")
    if not p.l.is_integer:
        raise UnsupportedSpin(f"parity chains need integer l, got l = {p.l}")
    l = p.l.twice_j // 2
    m = np.arange(-l, l + 1)
    a = _chain_diagonal(m, p.omega, p.delta, parity) + shift
    mk = m[1:].astype(float)
    b = 0.5 * p.g * np.sqrt(l * (l + 1) - mk * (mk - 1))
    return Tridiagonal.symmetric(a, b)


def _chain_eigenvalues(t: Tridiagonal, tol: float) -> tuple[np.ndarray, float, int]:
    values, widths, iters = [], 0.0, 0
    for piece in split_at_zero_couplings(t):
        if piece.n == 0:
            values.append(piece.a.copy())
            continue
        v, w, it = bracket_and_refine(piece, tol, return_info=True)
        values.append(v)
        widths = max(widths, w)
        iters = max(iters, it)
    return np.sort(np.concatenate(values)), widths, iters


def hl_spectrum(p: ModelParams, tol: float = 1e-12, shift: float = 0.0) -> SpectrumResult:
    """Full spectrum of ``H_L`` as the union of both parity chains."""
    per, width, iters = {}, 0.0, 0
    for parity in (Parity.PLUS, Parity.MINUS):
        v, w, it = _chain_eigenvalues(hl_parity_tridiagonal(p, parity, shift), tol)
        per[parity] = v
        width, iters = max(width, w), max(iters, it)
    values, labels = _merge(per)
    return SpectrumResult(p, values, labels, SolveMeta(width, None, iters))


def rabi_parity_tridiagonal(
    p: RabiParams, parity: Parity, k_max: int, shift: float = 0.0
) -> Tridiagonal:
    """Rabi chain truncated to ``k = 0 .. k_max``."""
    if k_max < p.levels + 20:
        raise ValueError(f"k_max={k_max} must be at least levels + 20 = {p.levels + 20}")
    k = np.arange(k_max + 1)
    a = _chain_diagonal(k, p.omega, p.delta, parity) + shift
    b = p.g * np.sqrt(k[1:].astype(float))
    return Tridiagonal.symmetric(a, b)


def _lowest(t: Tridiagonal, count: int, previous: np.ndarray | None):
    """Lowest ``count`` eigenvalues; ``previous`` are those of a leading submatrix."""
    idx = np.arange(count)
    glo, ghi = gershgorin_bounds(t)
    pad = 1e-12 * max(1.0, abs(glo), abs(ghi))
    glo, ghi = glo - pad, ghi + pad
    if previous is None or t.bc.min() <= 0:
        lo = np.full(count, glo)
        hi = np.full(count, ghi)
    else:
        # Cauchy interlacing: enlarging the chain can only lower the i-th
        # eigenvalue, so the previous root bounds the new one from above; the
        # lower end is pushed down until the Sturm count confirms it
        hi = previous + 1e-9 * np.maximum(1.0, np.abs(previous))
        bad_hi = sturm_count(t, hi) <= idx
        hi[bad_hi] = ghi
        step = np.maximum(1e-6, 1e-6 * np.abs(previous))
        lo = previous - step
        while True:
            bad = sturm_count(t, lo) > idx
            if not bad.any():
                break
            step[bad] *= 4
            lo[bad] = np.maximum(previous[bad] - step[bad], glo)
    if t.bc.min() > 0:
        return bisect_eigenvalues(t, idx, lo, hi, RABI_BISECTION_TOL)
    values, width, iters = _chain_eigenvalues(t, RABI_BISECTION_TOL)
    return values[:count], np.full(count, width), iters


def _rabi_chains(p: RabiParams, shift: float, count: int):
    k_max = max(MIN_TRUNCATION, 4 * p.levels, p.levels + 20)
    per, width, iters = {}, {}, 0
    for parity in Parity:
        v, w, it = _lowest(rabi_parity_tridiagonal(p, parity, k_max, shift), count, None)
        per[parity], width[parity], iters = v, w, max(iters, it)
    changes = []
    while True:
        if 2 * k_max > MAX_TRUNCATION:
            raise ConvergenceFailure(
                f"Rabi levels did not stabilise to {p.tol:g} below k_max = {MAX_TRUNCATION}"
            )
        k_max *= 2
        change = 0.0
        for parity in Parity:
            t = rabi_parity_tridiagonal(p, parity, k_max, shift)
            v, w, it = _lowest(t, count, per[parity])
            change = max(change, float(np.max(np.abs(v - per[parity]))))
            per[parity], width[parity], iters = v, w, max(iters, it)
        changes.append(change)
        if change < p.tol:
            break
    tol_achieved = max(float(np.max(w)) for w in width.values())
    return per, SolveMeta(tol_achieved, k_max, iters, tuple(changes))


def rabi_parity_levels(p: RabiParams, parity: Parity, shift: float = 0.0) -> np.ndarray:
    """Lowest ``p.levels`` eigenvalues of a single parity chain."""
    per, _ = _rabi_chains(p, shift, p.levels)
    return per[parity]


def rabi_spectrum(p: RabiParams, shift: float = 0.0) -> SpectrumResult:
    """Lowest ``p.levels`` Rabi eigenvalues over both parities, with adaptive truncation."""
    per, meta = _rabi_chains(p, shift, p.levels)
    values, labels = _merge(per, p.levels)
    return SpectrumResult(p, values, labels, meta)
