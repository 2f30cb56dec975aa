"""Acceptance criteria, one test each.

Every test prints a single ``criterion N: PASS|FAIL`` line with its metric and
wall time, then asserts.  Under pytest the lines are repeated in an
"acceptance criteria" section of the terminal summary; run
``python tests/test_acceptance.py`` for the bare report.
"""

import subprocess
import sys
import time

import numpy as np
import pytest

from rabicf.contraction import commutator_error, ladder_element_error, spectral_convergence
from rabicf.core import ModelParams, RabiParams, Spin, assemble_dense, build_hl_blocks
from rabicf.oracle import eig_dense_symmetric, rabi_dense_truncated
from rabicf.spectra import Parity, hl_spectrum, rabi_parity_levels, rabi_spectrum
from rabicf.transfer import eig_block
from rabicf.tridiag import bracket_and_refine, sturm_count
from rabicf.validation import random_block, random_tridiagonal

SEED = 20241016
# collected for the terminal summary; pytest captures the live prints
RESULTS: list[str] = []


def report(number, passed, detail, elapsed, limit=None):
    budget = f" / {limit:.0f} s" if limit else ""
    line = f"criterion {number}: {'PASS' if passed else 'FAIL'}  {detail}  [{elapsed:.2f} s{budget}]"
    RESULTS.append(line)
    print(line)
    return passed


def _hl_oracle(p):
    return eig_dense_symmetric(assemble_dense(build_hl_blocks(p)))


def test_criterion_1_finite_model_exactness():
    rng = np.random.default_rng([SEED, 1])
    start = time.perf_counter()
    worst, cases = 0.0, 0
    for l in range(1, 21):
        grid = [(d, g) for d in (0.0, 0.5, 2.0) for g in (0.0, 0.3, 1.5)]
        grid += [(float(rng.uniform(0, 2)), float(rng.uniform(0, 1.5))) for _ in range(18)]
        for delta, g in grid:
            p = ModelParams(1.0, delta, g, l)
            worst = max(worst, float(np.max(np.abs(hl_spectrum(p, 1e-13).values - _hl_oracle(p)))))
            cases += 1
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 60 and cases == 540
    report(1, ok, f"{cases} cases, max |CF - oracle| = {worst:.2e} (< 1e-10)", elapsed, 60)
    assert ok


def test_criterion_2_transfer_matrix_equivalence():
    rng = np.random.default_rng([SEED, 2])
    start = time.perf_counter()
    worst, fallbacks, cases = 0.0, 0, 0
    for _ in range(50):
        mtx = random_block(rng, int(rng.integers(1, 5)), int(rng.integers(2, 9)))
        res = eig_block(mtx)
        fallbacks += res.fallback
        worst = max(worst, float(np.max(np.abs(res.eigenvalues - eig_dense_symmetric(assemble_dense(mtx))))))
        cases += 1
    for twice_l in range(1, 11):
        for _ in range(3):
            p = ModelParams(1.0, float(rng.uniform(0.1, 2)), float(rng.uniform(0.1, 1.5)), Spin(twice_l))
            res = eig_block(build_hl_blocks(p))
            fallbacks += res.fallback
            worst = max(worst, float(np.max(np.abs(res.eigenvalues - _hl_oracle(p)))))
            cases += 1
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and fallbacks == 0 and elapsed < 60
    report(2, ok, f"{cases} matrices, max |det T roots - oracle| = {worst:.2e} (< 1e-8), "
                  f"oracle fallbacks = {fallbacks}", elapsed, 60)
    assert ok


def test_criterion_3_rabi_closed_form_limits():
    start = time.perf_counter()
    err_free = 0.0
    for omega, delta in ((1.0, 0.4), (1.0, 0.0), (1.3, 2.1)):
        res = rabi_spectrum(RabiParams(omega, delta, 0.0, levels=10))
        k = np.arange(10)
        exact = np.sort(np.concatenate([k * omega - delta / 2, k * omega + delta / 2]))[:10]
        err_free = max(err_free, float(np.max(np.abs(res.values - exact))))
    err_ladder = 0.0
    for omega, g in ((1.0, 0.2), (1.0, 0.5), (1.0, 1.0), (2.0, 1.5)):
        p = RabiParams(omega, 0.0, g, levels=10)
        k = np.arange(10)
        ladder = k * omega - g * g / omega
        for parity in Parity:
            err_ladder = max(err_ladder, float(np.max(np.abs(rabi_parity_levels(p, parity) - ladder))))
        merged = rabi_spectrum(p).values
        err_ladder = max(err_ladder, float(np.max(np.abs(merged - np.repeat(ladder[:5], 2)))))
    elapsed = time.perf_counter() - start
    ok = err_free < 1e-12 and err_ladder < 1e-8 and elapsed < 10
    report(3, ok, f"g=0 err = {err_free:.2e} (< 1e-12), delta=0 err = {err_ladder:.2e} (< 1e-8)", elapsed, 10)
    assert ok


@pytest.mark.slow
def test_criterion_4_rabi_oracle_agreement():
    start = time.perf_counter()
    worst, ratio = 0.0, np.inf
    for delta in (0.2, 0.4, 0.8):
        for g in (0.1, 0.7, 1.2):
            p = RabiParams(1.0, delta, g, levels=10)
            res = rabi_spectrum(p)
            cutoff = 4 * res.meta.truncation_k
            ratio = min(ratio, cutoff / res.meta.truncation_k)
            ref = eig_dense_symmetric(rabi_dense_truncated(p, cutoff))[:10]
            worst = max(worst, float(np.max(np.abs(res.values - ref))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and ratio >= 4 and elapsed < 180
    report(4, ok, f"9 points, cutoff = {ratio:.0f} x k_max, max |CF - Fock| = {worst:.2e} (< 1e-8)", elapsed, 180)
    assert ok


def test_criterion_5_contraction_convergence():
    start = time.perf_counter()
    table = spectral_convergence(RabiParams(1.0, 0.4, 0.7, levels=6), [8, 16, 32, 64])
    errs = table.max_errors()
    decreasing = all(b < a for a, b in zip(errs, errs[1:]))
    elapsed = time.perf_counter() - start
    ok = decreasing and errs[-1] < 0.25 * errs[0] and elapsed < 120
    shown = ", ".join(f"{e:.3e}" for e in errs)
    report(5, ok, f"max err over l=8,16,32,64: {shown}; l=64/l=8 = {errs[-1] / errs[0]:.3f} (< 0.25)",
           elapsed, 120)
    assert ok


def test_criterion_6_operator_contraction():
    start = time.perf_counter()
    ladder = [ladder_element_error(l, 4) for l in (8, 16, 32, 64, 128)]
    monotone = all(b < a for a, b in zip(ladder, ladder[1:]))
    ratio = ladder[1] / ladder[0]
    comm = max(
        abs(commutator_error(l, n) - n / l)
        for l in (8, 10, 16, 32, 64, 128, 1000) for n in range(0, min(2 * l, 20))
    )
    elapsed = time.perf_counter() - start
    ok = monotone and 0.4 <= ratio <= 0.6 and comm < 1e-13 and elapsed < 5
    report(6, ok, f"ladder monotone = {monotone}, l=8->16 ratio = {ratio:.4f} in [0.4, 0.6], "
                  f"max |comm - n/l| = {comm:.1e} (< 1e-13)", elapsed, 5)
    assert ok


def test_criterion_7_sturm_machinery():
    rng = np.random.default_rng([SEED, 7])
    start = time.perf_counter()
    interlace_bad = 0
    for _ in range(30):
        t = random_tridiagonal(rng, int(rng.integers(2, 13)), symmetric=bool(rng.integers(2)))
        prev = None
        for k in range(t.n + 1):
            roots = eig_dense_symmetric(t.leading(k).symmetrized().dense())
            if prev is not None:
                interlace_bad += int(not (np.all(roots[:-1] < prev) and np.all(prev < roots[1:])))
            prev = roots
    miscount = 0
    worst = 0.0
    for _ in range(100):
        t = random_tridiagonal(rng, int(rng.integers(1, 51)), symmetric=bool(rng.integers(2)))
        ref = eig_dense_symmetric(t.symmetrized().dense())
        z = rng.uniform(ref[0] - 1, ref[-1] + 1, 100)
        miscount += int(np.count_nonzero(sturm_count(t, z) != np.searchsorted(ref, z, side="left")))
        worst = max(worst, float(np.max(np.abs(bracket_and_refine(t, 1e-13) - ref))))
    elapsed = time.perf_counter() - start
    ok = interlace_bad == 0 and miscount == 0 and worst < 1e-10 and elapsed < 30
    report(7, ok, f"interlacing violations = {interlace_bad}, count mismatches = {miscount}/10000, "
                  f"max |bisection - oracle| = {worst:.2e} (< 1e-10)", elapsed, 30)
    assert ok


@pytest.mark.slow
def test_criterion_8_determinism():
    cmd = [sys.executable, "-m", "rabicf", "validate", "--suite", "all", "--seed", "0"]
    start = time.perf_counter()
    runs = [subprocess.run(cmd, capture_output=True, check=False) for _ in range(2)]
    elapsed = time.perf_counter() - start
    same = runs[0].stdout == runs[1].stdout and runs[0].returncode == runs[1].returncode
    ok = same and len(runs[0].stdout) > 0 and runs[0].returncode == 0
    report(8, ok, f"two runs byte-identical = {same}, {len(runs[0].stdout)} bytes, "
                  f"exit code {runs[0].returncode}", elapsed)
    assert ok


if __name__ == "__main__":
    failures = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failures += 1
    sys.exit(1 if failures else 0)
