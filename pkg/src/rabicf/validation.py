"""Seeded property/oracle suites behind ``rabicf validate``.

Every check draws from one ``numpy`` generator seeded by the caller, so a
given seed always produces the same instances and the same report text.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .contraction import commutator_error, ladder_element_error, spectral_convergence
from .core import BlockTridiagonal, ModelParams, RabiParams, assemble_dense, build_hl_blocks
from .oracle import eig_dense_symmetric, rabi_dense_truncated
from .spectra import hl_spectrum, rabi_spectrum
from .transfer import eig_block, sm_base_half, sm_step_half
from .tridiag import Tridiagonal, bracket_and_refine, sturm_count

__all__ = ["Check", "SUITES", "run_suites", "format_report"]


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    passed: bool
    metric: float
    limit: float


def _check(suite, name, metric, limit, strict=True) -> Check:
    metric = float(metric)
    ok = metric < limit if strict else metric <= limit
    return Check(suite, name, bool(ok), metric, float(limit))


def random_tridiagonal(rng: np.random.Generator, n: int, symmetric: bool = True) -> Tridiagonal:
    a = rng.uniform(-3, 3, n)
    b = rng.uniform(0.1, 2.0, n - 1) * rng.choice([-1.0, 1.0], n - 1)
    if symmetric:
        return Tridiagonal.symmetric(a, b)
    c = rng.uniform(0.1, 2.0, n - 1) * np.sign(b)
    return Tridiagonal(a, b, c)


def random_block(rng: np.random.Generator, m: int, blocks: int) -> BlockTridiagonal:
    diag = []
    for _ in range(blocks):
        x = rng.standard_normal((m, m))
        diag.append(0.5 * (x + x.T))
    off = [np.eye(m) + 0.3 * rng.standard_normal((m, m)) for _ in range(blocks - 1)]
    return BlockTridiagonal(tuple(diag), tuple(off))


def _suite_cf(rng):
    worst_count = 0
    worst_eig = 0.0
    for _ in range(20):
        t = random_tridiagonal(rng, int(rng.integers(2, 31)), symmetric=bool(rng.integers(2)))
        ref = eig_dense_symmetric(t.symmetrized().dense())
        z = rng.uniform(ref[0] - 1, ref[-1] + 1, 20)
        expected = np.searchsorted(ref, z, side="left")
        worst_count = max(worst_count, int(np.max(np.abs(sturm_count(t, z) - expected))))
    for _ in range(20):
        t = random_tridiagonal(rng, int(rng.integers(2, 51)))
        ref = eig_dense_symmetric(t.dense())
        worst_eig = max(worst_eig, float(np.max(np.abs(bracket_and_refine(t, 1e-13) - ref))))
    interlace_violations = 0
    for _ in range(10):
        t = random_tridiagonal(rng, int(rng.integers(3, 13)))
        prev = None
        for k in range(t.n + 1):
            roots = eig_dense_symmetric(t.leading(k).dense())
            if prev is not None:
                ok = np.all(roots[:-1] < prev) and np.all(prev < roots[1:])
                interlace_violations += int(not ok)
            prev = roots
    return [
        _check("cf", "sturm count vs oracle (max miscount)", worst_count, 0, strict=False),
        _check("cf", "bracket_and_refine vs oracle", worst_eig, 1e-10),
        _check("cf", "interlacing violations", interlace_violations, 0, strict=False),
    ]


def _suite_block(rng):
    worst = 0.0
    fallbacks = 0
    for _ in range(10):
        mtx = random_block(rng, int(rng.integers(1, 5)), int(rng.integers(2, 9)))
        res = eig_block(mtx)
        fallbacks += res.fallback
        worst = max(worst, float(np.max(np.abs(res.eigenvalues - eig_dense_symmetric(assemble_dense(mtx))))))
    worst_hl = 0.0
    for l in range(1, 5):
        p = ModelParams(1.0, float(rng.uniform(0.1, 2)), float(rng.uniform(0.1, 1.5)), l)
        res = eig_block(build_hl_blocks(p))
        fallbacks += res.fallback
        ref = eig_dense_symmetric(assemble_dense(build_hl_blocks(p)))
        worst_hl = max(worst_hl, float(np.max(np.abs(res.eigenvalues - ref))))
    diag_entries = 0.0
    for _ in range(200):
        p = ModelParams(float(rng.uniform(0.5, 2)), float(rng.uniform(0, 2)),
                        float(rng.uniform(0.05, 1.5)), int(rng.integers(1, 6)))
        z = float(rng.uniform(-3, 3))
        s = sm_base_half(p, z)
        for k in np.arange(-p.l.j + 1, p.l.j + 1):
            s = sm_step_half(p, z, s, k)
            diag_entries = max(diag_entries, abs(s[0, 0]), abs(s[1, 1]))
    return [
        _check("block", "eig_block vs oracle (random)", worst, 1e-8),
        _check("block", "eig_block vs oracle (H_L)", worst_hl, 1e-8),
        _check("block", "oracle fallbacks on generic input", fallbacks, 0, strict=False),
        _check("block", "S_m anti-diagonal closure", diag_entries, 0, strict=False),
    ]


def _suite_spectra(rng):
    worst = 0.0
    for l in range(1, 9):
        for delta in (0.0, 0.5, 2.0):
            for g in (0.0, 0.3, 1.5):
                p = ModelParams(1.0, delta, g, l)
                ref = eig_dense_symmetric(assemble_dense(build_hl_blocks(p)))
                worst = max(worst, float(np.max(np.abs(hl_spectrum(p, 1e-13).values - ref))))
        p = ModelParams(float(rng.uniform(0.5, 2)), float(rng.uniform(0, 2)), float(rng.uniform(0, 1.5)), l)
        ref = eig_dense_symmetric(assemble_dense(build_hl_blocks(p)))
        worst = max(worst, float(np.max(np.abs(hl_spectrum(p, 1e-13).values - ref))))

    rp = RabiParams(1.0, 0.4, 0.0, levels=10)
    k = np.arange(10)
    free = np.sort(np.concatenate([k - 0.2, k + 0.2]))[:10]
    err_free = float(np.max(np.abs(rabi_spectrum(rp).values - free)))
    rp = RabiParams(1.0, 0.0, 0.5, levels=10)
    ladder = np.repeat(np.arange(5) - 0.25, 2)
    err_ladder = float(np.max(np.abs(rabi_spectrum(rp).values - ladder)))
    rp = RabiParams(1.0, float(rng.choice([0.2, 0.4, 0.8])), float(rng.choice([0.1, 0.7, 1.2])), levels=10)
    res = rabi_spectrum(rp)
    ref = eig_dense_symmetric(rabi_dense_truncated(rp, 4 * res.meta.truncation_k))[: rp.levels]
    err_oracle = float(np.max(np.abs(res.values - ref)))
    return [
        _check("spectra", "H_L parity CF vs oracle (l<=8)", worst, 1e-10),
        _check("spectra", "Rabi g=0 limit", err_free, 1e-12),
        _check("spectra", "Rabi delta=0 displaced ladder", err_ladder, 1e-8),
        _check("spectra", "Rabi CF vs truncated Fock oracle", err_oracle, 1e-8),
    ]


def _suite_contraction(rng):
    ladder = [ladder_element_error(l, 4) for l in (8, 16, 32, 64, 128)]
    monotone = all(b < a for a, b in zip(ladder, ladder[1:]))
    ratio = ladder[1] / ladder[0]
    comm = max(abs(commutator_error(l, n) - n / l) for l in (10, 40, 160) for n in (0, 1, 5, 9))
    table = spectral_convergence(RabiParams(1.0, 0.4, 0.7, levels=6), [8, 16, 32, 64])
    errs = table.max_errors()
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    return [
        _check("contraction", "ladder error monotone in l", 0 if monotone else 1, 0, strict=False),
        _check("contraction", "ladder error ratio l=8->16 off 0.5", abs(ratio - 0.5), 0.1, strict=False),
        _check("contraction", "commutator error vs n/l", comm, 1e-13),
        _check("contraction", "spectral error decreasing in l", 0 if decreasing else 1, 0, strict=False),
        _check("contraction", "l=64 / l=8 spectral error", errs[-1] / errs[0], 0.25),
    ]


SUITES: dict[str, Callable[[np.random.Generator], list[Check]]] = {
    "cf": _suite_cf,
    "block": _suite_block,
    "spectra": _suite_spectra,
    "contraction": _suite_contraction,
}


def run_suites(name: str, seed: int = 0) -> list[Check]:
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise KeyError(name)
    checks = []
    for suite in names:
        rng = np.random.default_rng([seed, list(SUITES).index(suite)])
        checks.extend(SUITES[suite](rng))
    return checks


def format_report(checks: list[Check]) -> str:
    width = max(len(c.name) for c in checks)
    lines = [f"{'suite':<12} {'check':<{width}}  {'status':<6} {'metric':>12} {'limit':>10}"]
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(f"{c.suite:<12} {c.name:<{width}}  {status:<6} {c.metric:>12.3e} {c.limit:>10.1e}")
    n_pass = sum(c.passed for c in checks)
    lines.append(f"{n_pass}/{len(checks)} checks passed")
    return "\n".join(lines) + "\n"
