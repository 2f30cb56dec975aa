"""Numerical check that spin-l operators contract to a boson mode as l grows.

With ``c = 1/sqrt(2l)`` the rescaled ladder operators ``h_+ = c J_+`` and
``h_- = c J_-`` act on the lowest states ``n = l + m`` like ``a^dag`` and
``a``: ``[h_+, h_-] = 2c^2 J_3`` tends to ``-I`` there, and
``c <n+1|J_+|n> = sqrt((1 - n/(2l)) (n+1))`` tends to ``sqrt(n+1)``.

For the spectra, the finite chain re-indexed by ``n = m + l`` and shifted by
``l omega`` has squared couplings ``g_l^2 n (2l+1-n)``.  Choosing
``g_l = g / sqrt(2l)`` makes them ``g^2 n (2l+1-n) / (2l) -> g^2 n``, the Rabi
values.  Because ``B_k`` carries ``R_1 = sigma_1/2``, the matching
:class:`ModelParams` coupling is ``2 g_l``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ModelParams, RabiParams, Spin, angular_momentum_matrices
from .spectra import hl_spectrum, rabi_spectrum

__all__ = [
    "ContractionScheme",
    "ConvergenceRow",
    "ConvergenceTable",
    "ladder_element_error",
    "commutator_error",
    "finite_coupling_sq",
    "spectral_convergence",
]


def _as_spin(l) -> Spin:
    return l if isinstance(l, Spin) else Spin.of(l)


@dataclass(frozen=True)
class ContractionScheme:
    l: Spin
    omega: float
    g_rabi: float

    def __post_init__(self):
        object.__setattr__(self, "l", _as_spin(self.l))
        if not self.l.is_integer or self.l.twice_j == 0:
            raise ValueError("contraction needs a positive integer l")

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(2 * self.l.j)

    @property
    def g_l(self) -> float:
        return self.g_rabi / math.sqrt(2 * self.l.j)

    @property
    def energy_shift(self) -> float:
        return self.l.j * self.omega

    def model_params(self, delta: float) -> ModelParams:
        return ModelParams(self.omega, delta, 2.0 * self.g_l, self.l)


def finite_coupling_sq(g: float, l: int, n) -> np.ndarray:
    """Squared chain coupling into level ``n`` of the contracted finite model."""
    n = np.asarray(n, dtype=float)
    return g * g * n * (2 * l + 1 - n) / (2 * l)


def _check_range(l: Spin, n_max: int) -> None:
    if not 0 <= n_max < 2 * l.j:
        raise ValueError(f"n_max must satisfy 0 <= n_max < 2l = {l.twice_j}")


def ladder_element_error(l, n_max: int) -> float:
    """``max_n |c <n+1|J_+|n> - sqrt(n+1)|`` over ``n = 0 .. n_max``."""
    l = _as_spin(l)
    _check_range(l, n_max)
    c = 1.0 / math.sqrt(2 * l.j)
    jp = angular_momentum_matrices(l).j_plus
    n = np.arange(n_max + 1)
    contracted = c * jp[n + 1, n]
    return float(np.max(np.abs(contracted - np.sqrt(n + 1.0))))


def commutator_error(l, n_max: int) -> float:
    """Largest entry of ``[h_+, h_-] + I`` on the states ``n = 0 .. n_max``."""
    l = _as_spin(l)
    _check_range(l, n_max)
    rep = angular_momentum_matrices(l)
    c = 1.0 / math.sqrt(2 * l.j)
    hp, hm = c * rep.j_plus, c * rep.j_minus
    k = n_max + 1
    # only the leading k x k corner is needed, so multiply the thin slices
    comm = hp[:k] @ hm[:, :k] - hm[:k] @ hp[:, :k] + np.eye(k)
    return float(np.max(np.abs(comm)))


@dataclass(frozen=True)
class ConvergenceRow:
    l: int
    g_l: float
    shift: float
    per_level_errors: tuple[float, ...]
    max_err: float


@dataclass(frozen=True)
class ConvergenceTable:
    rabi: RabiParams
    reference: tuple[float, ...]
    rows: tuple[ConvergenceRow, ...]

    def max_errors(self) -> list[float]:
        return [row.max_err for row in self.rows]

    def improves(self) -> bool:
        """Whether the largest ``l`` beats the smallest one."""
        return self.rows[-1].max_err < self.rows[0].max_err


def spectral_convergence(rp: RabiParams, l_list, tol: float = 1e-13) -> ConvergenceTable:
    """Compare shifted ``H_L`` spectra against the Rabi spectrum for each ``l``."""
    spins = sorted({_as_spin(l) for l in l_list})
    if not spins:
        raise ValueError("l_list is empty")
    reference = rabi_spectrum(rp).values
    rows = []
    for spin in spins:
        if spin.dim < rp.levels + 10:
            raise ValueError(f"l={spin} too small for {rp.levels} levels (need 2l+1 >= levels+10)")
        scheme = ContractionScheme(spin, rp.omega, rp.g)
        finite = hl_spectrum(scheme.model_params(rp.delta), tol).values + scheme.energy_shift
        errors = np.abs(finite[: rp.levels] - reference)
        rows.append(
            ConvergenceRow(
                int(spin.j), scheme.g_l, scheme.energy_shift,
                tuple(errors.tolist()), float(errors.max()),
            )
        )
    return ConvergenceTable(rp, tuple(reference.tolist()), tuple(rows))
