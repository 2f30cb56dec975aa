import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rabicf.errors import ConvergenceFailure, SturmConditionViolated
from rabicf.oracle import eig_dense_symmetric
from rabicf.tridiag import (
    Tridiagonal,
    bisect_eigenvalues,
    bracket_and_refine,
    delta_sequence,
    gershgorin_bounds,
    sk_value,
    split_at_zero_couplings,
    sturm_count,
)
from rabicf.validation import random_tridiagonal

CHAIN3 = Tridiagonal.symmetric([0.0, 0.0, 0.0], [1.0, 1.0])


def _oracle(t):
    return eig_dense_symmetric(t.symmetrized().dense())


class TestTridiagonalType:
    def test_shape_validation(self):
        with pytest.raises(ValueError):
            Tridiagonal([1.0, 2.0], [1.0, 2.0], [1.0])
        with pytest.raises(ValueError):
            Tridiagonal([], [], [])

    def test_dense_layout(self):
        t = Tridiagonal([1.0, 2.0, 3.0], [4.0, 5.0], [6.0, 7.0])
        d = t.dense()
        assert d[0, 1] == 4.0 and d[1, 0] == 6.0 and d[2, 1] == 7.0
        assert t.n == 2 and np.array_equal(t.bc, [24.0, 35.0])

    def test_leading_and_shift(self):
        t = Tridiagonal.symmetric([1.0, 2.0, 3.0], [0.5, 0.5])
        assert t.leading(0).n == 0 and t.leading(1).dense().shape == (2, 2)
        assert np.array_equal(t.shifted(1.0).a, [2.0, 3.0, 4.0])

    def test_symmetrized_rejects_negative_products(self):
        with pytest.raises(SturmConditionViolated):
            Tridiagonal([0.0, 0.0], [1.0], [-1.0]).symmetrized()


class TestDeltaSequence:
    def test_single_entry_at_its_eigenvalue(self):
        ev = delta_sequence(Tridiagonal.symmetric([5.0], []), 5.0)
        assert ev.deltas == (1.0, 0.0)
        assert ev.sign_changes == 0

    def test_three_chain_at_zero(self):
        ev = delta_sequence(CHAIN3, 0.0)
        assert ev.deltas == (1.0, 0.0, -1.0, 0.0)
        assert ev.sign_changes == 1
        assert np.allclose(_oracle(CHAIN3), [-math.sqrt(2), 0.0, math.sqrt(2)], atol=1e-15)

    def test_median_of_random_six(self, rng):
        t = random_tridiagonal(rng, 6, symmetric=False)
        ref = _oracle(t)
        assert delta_sequence(t, float(np.median(ref))).sign_changes == 3
        assert sturm_count(t, np.median(ref))[0] == 3

    def test_rescaling_keeps_true_log(self):
        n = 400
        t = Tridiagonal.symmetric(np.linspace(-50, 50, n), np.full(n - 1, 20.0))
        ev = delta_sequence(t, 0.3)
        assert ev.scale_log > 0
        assert all(math.isfinite(d) and abs(d) <= 1e100 for d in ev.deltas)
        # compare with log|det| from a small leading block computed directly
        k = 30
        _, ld = np.linalg.slogdet(t.leading(k).dense() - 0.3 * np.eye(k + 1))
        assert ev.true_log_abs(k) == pytest.approx(ld, rel=1e-12)

    def test_count_survives_overflow(self):
        n = 600
        t = Tridiagonal.symmetric(np.arange(n, dtype=float) * 10.0, np.full(n - 1, 3.0))
        ref = eig_dense_symmetric(t.dense())
        z = 0.5 * (ref[299] + ref[300])
        assert delta_sequence(t, z).sign_changes == 300


class TestSkValue:
    def test_base_case(self, rng):
        t = random_tridiagonal(rng, 4)
        assert sk_value(t, 0, 0.7) == pytest.approx(t.a[0] - 0.7)

    def test_pole_of_three_chain(self):
        assert sk_value(CHAIN3, 0, 1.0) == -1.0
        assert sk_value(CHAIN3, 1, 1.0) == 0.0
        assert sk_value(CHAIN3, 2, 1.0) == -math.inf

    def test_ratio_consistency(self, rng):
        for _ in range(20):
            t = random_tridiagonal(rng, 5, symmetric=False)
            z = float(rng.uniform(-4, 4))
            ev = delta_sequence(t, z)
            s = sk_value(t, t.n, z)
            assert s * ev.deltas[-2] == pytest.approx(ev.deltas[-1], rel=1e-12)

    def test_continued_fraction_form(self, rng):
        t = random_tridiagonal(rng, 7, symmetric=False)
        z = 0.123
        s = t.a[0] - z
        for k in range(1, t.n + 1):
            s = t.a[k] - z - t.bc[k - 1] / s
            assert sk_value(t, k, z) == pytest.approx(s, rel=1e-11)

    def test_index_range(self):
        with pytest.raises(IndexError):
            sk_value(CHAIN3, 3, 0.0)


class TestSturmCount:
    def test_gershgorin_limits(self, rng):
        for _ in range(10):
            t = random_tridiagonal(rng, int(rng.integers(1, 30)), symmetric=False)
            lo, hi = gershgorin_bounds(t)
            assert sturm_count(t, lo - 1)[0] == 0
            assert sturm_count(t, hi + 1)[0] == t.n + 1

    def test_non_decreasing(self, rng):
        t = random_tridiagonal(rng, 25)
        lo, hi = gershgorin_bounds(t)
        counts = sturm_count(t, np.linspace(lo - 1, hi + 1, 2001))
        assert np.all(np.diff(counts) >= 0)

    def test_strictly_below(self):
        t = Tridiagonal.symmetric([1.0, 2.0, 3.0], [0.0, 0.0])
        assert np.array_equal(sturm_count(t, [1.0, 2.0, 3.0, 3.5]), [0, 1, 2, 3])

    @given(seed=st.integers(0, 2**32 - 1), scale=st.floats(1e-3, 1e3))
    def test_scale_invariance(self, seed, scale):
        rng = np.random.default_rng(seed)
        t = random_tridiagonal(rng, int(rng.integers(1, 20)), symmetric=False)
        z = rng.uniform(-5, 5, 15)
        scaled = Tridiagonal(scale * t.a, scale * t.b, scale * t.c)
        assert np.array_equal(sturm_count(t, z), sturm_count(scaled, scale * z))

    def test_matches_oracle(self, rng):
        for _ in range(30):
            t = random_tridiagonal(rng, int(rng.integers(1, 40)), symmetric=bool(rng.integers(2)))
            ref = _oracle(t)
            z = rng.uniform(ref[0] - 1, ref[-1] + 1, 50)
            assert np.array_equal(sturm_count(t, z), np.searchsorted(ref, z, side="left"))


class TestBracketAndRefine:
    def test_three_chain(self):
        vals = bracket_and_refine(CHAIN3)
        assert np.max(np.abs(vals - [-math.sqrt(2), 0.0, math.sqrt(2)])) < 1e-12

    def test_weakly_coupled_diagonal(self):
        t = Tridiagonal.symmetric([1.0, 2.0, 3.0], [1e-8, 1e-8])
        assert np.max(np.abs(bracket_and_refine(t) - [1.0, 2.0, 3.0])) < 1e-7

    def test_random_ten(self, rng):
        t = random_tridiagonal(rng, 10)
        assert np.max(np.abs(bracket_and_refine(t) - _oracle(t))) < 1e-10

    def test_nonsymmetric_matches_symmetrized(self, rng):
        t = random_tridiagonal(rng, 15, symmetric=False)
        assert np.max(np.abs(bracket_and_refine(t) - _oracle(t))) < 1e-10

    def test_requires_positive_products(self):
        with pytest.raises(SturmConditionViolated):
            bracket_and_refine(Tridiagonal([0.0, 0.0], [1.0], [-1.0]))
        with pytest.raises(SturmConditionViolated):
            bracket_and_refine(Tridiagonal.symmetric([0.0, 1.0], [0.0]))

    def test_tol_validation(self):
        with pytest.raises(ValueError):
            bracket_and_refine(CHAIN3, 0.0)

    def test_bisection_cap(self, monkeypatch):
        import rabicf.tridiag as mod

        monkeypatch.setattr(mod, "MAX_BISECTIONS", 3)
        with pytest.raises(ConvergenceFailure):
            bracket_and_refine(CHAIN3)

    def test_info(self):
        vals, width, iters = bracket_and_refine(CHAIN3, 1e-10, return_info=True)
        assert width <= 1e-10 * 2 and iters > 0 and vals.size == 3

    def test_bisect_subset(self, rng):
        t = random_tridiagonal(rng, 20)
        lo, hi = gershgorin_bounds(t)
        vals, widths, _ = bisect_eigenvalues(t, [0, 19], lo, hi, 1e-13)
        ref = _oracle(t)
        assert np.max(np.abs(vals - ref[[0, 19]])) < 1e-12


class TestInterlacing:
    def test_roots_interlace(self, rng):
        for _ in range(20):
            t = random_tridiagonal(rng, int(rng.integers(3, 13)), symmetric=False)
            prev = None
            for k in range(t.n + 1):
                roots = bracket_and_refine(t.leading(k), 1e-14)
                if prev is not None:
                    assert np.all(roots[:-1] < prev) and np.all(prev < roots[1:])
                prev = roots


class TestSplit:
    def test_split_pieces(self):
        t = Tridiagonal.symmetric([1.0, 2.0, 3.0, 4.0], [0.5, 0.0, 0.0])
        pieces = split_at_zero_couplings(t)
        assert [p.n + 1 for p in pieces] == [2, 1, 1]
        union = np.sort(np.concatenate([eig_dense_symmetric(p.dense()) for p in pieces]))
        assert np.allclose(union, eig_dense_symmetric(t.dense()), atol=1e-14)

    def test_no_split(self):
        assert len(split_at_zero_couplings(CHAIN3)) == 1
