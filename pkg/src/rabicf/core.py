"""Angular-momentum matrices and the block-tridiagonal generalized Rabi Hamiltonian.

The generalized model couples two angular momenta ``L`` (magnitude ``l``) and
``R`` (magnitude ``r``)::

    H_L = omega L_3 + delta R_3 + (coupling) L_x R_1

In the product basis ``|l, m_l> (x) |r, m_r>`` with ``m_l`` as the outer
(block) index, ``H_L`` is block tridiagonal with ``(2r+1) x (2r+1)`` blocks::

    A_k = k omega I + delta R_3
    B_k = g sqrt(l(l+1) - k(k-1)) R_1        (couples blocks k-1 and k)

so ``g`` multiplies the raising-operator matrix element directly.  With
``R_1 = sigma_1 / 2`` for ``r = 1/2`` the scalar coupling inside each parity
chain is ``(g/2) sqrt(l(l+1) - k(k-1))``.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "Spin",
    "ModelParams",
    "RabiParams",
    "AngularMomentumRep",
    "BlockTridiagonal",
    "angular_momentum_matrices",
    "build_hl_blocks",
    "assemble_dense",
    "basis_labels",
    "verify_selection_rule",
]


@dataclass(frozen=True, order=True)
class Spin:
    """Spin magnitude stored as ``twice_j`` so half-integers are exact."""

    twice_j: int

    def __post_init__(self):
        if int(self.twice_j) != self.twice_j or self.twice_j < 0:
            raise ValueError(f"twice_j must be a non-negative integer, got {self.twice_j!r}")
        object.__setattr__(self, "twice_j", int(self.twice_j))

    @classmethod
    def of(cls, j) -> "Spin":
        """Build from ``j`` given as int, float, str or Fraction (``Spin.of("1/2")``)."""
        twice = Fraction(j) * 2
        if twice.denominator != 1:
            raise ValueError(f"{j!r} is not a multiple of 1/2")
        return cls(int(twice))

    @property
    def j(self) -> float:
        return self.twice_j / 2

    @property
    def dim(self) -> int:
        return self.twice_j + 1

    @property
    def is_integer(self) -> bool:
        return self.twice_j % 2 == 0

    def m_values(self) -> np.ndarray:
        """Azimuthal values ``-j, -j+1, ..., j``."""
        return (np.arange(self.dim) * 2 - self.twice_j) / 2

    def __str__(self):
        return str(self.twice_j // 2) if self.is_integer else f"{self.twice_j}/2"


HALF = Spin(1)


@dataclass(frozen=True)
class ModelParams:
    """Parameters of the generalized model.

    ``g`` may be negative: spectra depend on ``g**2`` only, and the tests check
    that rather than assuming it.
    """

    omega: float
    delta: float
    g: float
    l: Spin
    r: Spin = HALF

    def __post_init__(self):
        for name in ("l", "r"):
            value = getattr(self, name)
            if not isinstance(value, Spin):
                object.__setattr__(self, name, Spin.of(value))
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.delta >= 0:
            raise ValueError("delta must be non-negative")
        if not math.isfinite(self.g):
            raise ValueError("g must be finite")

    def with_g(self, g: float) -> "ModelParams":
        return ModelParams(self.omega, self.delta, g, self.l, self.r)


@dataclass(frozen=True)
class RabiParams:
    """Parameters of the Rabi model ``omega a^dag a + delta/2 sigma_3 + g sigma_1 (a + a^dag)``."""

    omega: float
    delta: float
    g: float
    levels: int = 10
    tol: float = 1e-8

    def __post_init__(self):
        if not self.omega > 0:
            raise ValueError("omega must be positive")
        if not self.delta >= 0:
            raise ValueError("delta must be non-negative")
        if not math.isfinite(self.g):
            raise ValueError("g must be finite")
        if int(self.levels) != self.levels or self.levels < 1:
            raise ValueError("levels must be a positive integer")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class AngularMomentumRep:
    """Cartesian angular-momentum matrices in the ``|j, m>`` basis, m ascending."""

    j: Spin
    j1: np.ndarray
    j2: np.ndarray
    j3: np.ndarray

    @functools.cached_property
    def j_plus(self) -> np.ndarray:
        return _read_only((self.j1 + 1j * self.j2).real)

    @functools.cached_property
    def j_minus(self) -> np.ndarray:
        return _read_only((self.j1 - 1j * self.j2).real)


def _read_only(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


# results are read-only, so repeated calls can share them
@functools.lru_cache(maxsize=32)
def angular_momentum_matrices(j: Spin) -> AngularMomentumRep:
    m = j.m_values()
    jj = j.j * (j.j + 1)
    raise_elems = np.sqrt(np.maximum(jj - m[:-1] * (m[:-1] + 1), 0.0))
    j_plus = np.diag(raise_elems, -1)  # <m+1|J+|m>: row m+1, column m
    j_minus = j_plus.T
    j1 = 0.5 * (j_plus + j_minus)
    j2 = (j_plus - j_minus) / 2j
    j3 = np.diag(m)
    for a in (j1, j2, j3):
        a.setflags(write=False)
    return AngularMomentumRep(j, j1, j2, j3)


@dataclass(frozen=True)
class BlockTridiagonal:
    """Symmetric block-tridiagonal matrix.

    ``offdiag[k]`` sits above the diagonal, coupling ``diag[k]`` to
    ``diag[k+1]``; its transpose sits below.
    """

    diag: tuple[np.ndarray, ...]
    offdiag: tuple[np.ndarray, ...]
    block_dim: int = field(init=False)

    def __post_init__(self):
        diag = tuple(np.array(a, dtype=float) for a in self.diag)
        offdiag = tuple(np.array(b, dtype=float) for b in self.offdiag)
        if not diag:
            raise ValueError("need at least one diagonal block")
        m = diag[0].shape[0]
        if len(offdiag) != len(diag) - 1:
            raise ValueError("need exactly one fewer off-diagonal block than diagonal blocks")
        for a in diag:
            if a.shape != (m, m):
                raise ValueError("all blocks must be square with the same size")
            if not np.allclose(a, a.T, rtol=0, atol=1e-14 * max(1.0, np.abs(a).max())):
                raise ValueError("diagonal blocks must be symmetric")
        for b in offdiag:
            if b.shape != (m, m):
                raise ValueError("all blocks must be square with the same size")
        for a in diag + offdiag:
            a.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)
        object.__setattr__(self, "block_dim", m)

    @property
    def n_blocks(self) -> int:
        return len(self.diag)

    @property
    def dim(self) -> int:
        return self.n_blocks * self.block_dim


def build_hl_blocks(p: ModelParams) -> BlockTridiagonal:
    """Blocks of ``H_L`` for ``k = -l .. l`` (diagonal) and ``k = -l+1 .. l`` (couplings)."""
    r = angular_momentum_matrices(p.r)
    ks = p.l.m_values()
    ll = p.l.j * (p.l.j + 1)
    eye = np.eye(p.r.dim)
    diag = [k * p.omega * eye + p.delta * r.j3 for k in ks]
    offdiag = [math.sqrt(ll - k * (k - 1)) * p.g * r.j1 for k in ks[1:]]
    return BlockTridiagonal(tuple(diag), tuple(offdiag))


def assemble_dense(b: BlockTridiagonal) -> np.ndarray:
    m = b.block_dim
    h = np.zeros((b.dim, b.dim))
    for k, a in enumerate(b.diag):
        h[k * m:(k + 1) * m, k * m:(k + 1) * m] = a
    for k, off in enumerate(b.offdiag):
        h[k * m:(k + 1) * m, (k + 1) * m:(k + 2) * m] = off
        h[(k + 1) * m:(k + 2) * m, k * m:(k + 1) * m] = off.T
    return h


def basis_labels(p: ModelParams) -> np.ndarray:
    """``(m_l, m_r)`` for each row of the assembled ``H_L``, shape ``(dim, 2)``."""
    ml, mr = np.meshgrid(p.l.m_values(), p.r.m_values(), indexing="ij")
    return np.column_stack([ml.ravel(), mr.ravel()])


def verify_selection_rule(h, q_values, atol: float = 1e-14) -> bool:
    """True iff ``h[i, j]`` vanishes whenever ``|q_i - q_j| > 1``."""
    h = np.asarray(h)
    q = np.asarray(q_values, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or q.shape != (h.shape[0],):
        raise ValueError(f"shape mismatch: matrix {h.shape}, labels {q.shape}")
    far = np.abs(q[:, None] - q[None, :]) > 1
    return bool(np.all(np.abs(h[far]) < atol))
