from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from artinlen.algebra import field_algebra
from artinlen.series import (
    alternating_tail,
    fit_rational,
    partial_euler,
    poincare_of_k,
    ratio_limit_check,
    rational_expansion,
    ratios,
)


def geometric_sum(h, n):
    return [(h ** (i + 1) - 1) // (h - 1) for i in range(n + 1)]


class TestPoincare:
    def test_m2zero(self, m2zero):
        assert poincare_of_k(m2zero, 6) == [1, 2, 4, 8, 16, 32, 64]

    def test_ci(self, x2y2):
        assert poincare_of_k(x2y2, 6) == [1, 2, 3, 4, 5, 6, 7]

    def test_field(self):
        assert poincare_of_k(field_algebra(7), 3) == [1, 0, 0, 0]

    def test_lescot_fits_closed_form(self, lescot132):
        assert fit_rational(poincare_of_k(lescot132, 8), 3, 2)


class TestFitRational:
    @pytest.mark.parametrize("seq,d,a,expect", [
        ([1, 3, 7, 15, 31], 3, 2, True),
        ([1, 2, 3, 4, 5], 2, 1, True),
        ([1, 2, 4], 3, 2, False),
        ([], 2, 1, False),
    ])
    def test_examples(self, seq, d, a, expect):
        assert fit_rational(seq, d, a) is expect

    @given(st.integers(1, 6), st.integers(0, 8), st.integers(1, 15))
    def test_recurrence(self, d, a, n):
        seq = rational_expansion(d, a, n)
        assert fit_rational(seq, d, a)
        for i in range(2, n):
            assert seq[i] == d * seq[i - 1] - a * seq[i - 2]


class TestRatioLimit:
    def test_geometric_sum(self):
        seq = geometric_sum(2, 21)
        rep = ratio_limit_check(seq, 2, tol=0.01, window=(10, 20))
        assert rep.passed
        assert abs(rep.tail_estimate - 2) < Fraction(1, 10**6)

    def test_powers_exact(self):
        assert all(r == 2 for r in ratios([2**n for n in range(12)]))

    def test_linear_fails_against_two(self):
        seq = list(range(1, 22))
        assert not ratio_limit_check(seq, 2).passed
        assert ratio_limit_check(seq, 1, tol=Fraction(1, 10)).passed

    def test_closed_form(self):
        seq = geometric_sum(3, 15)
        assert ratio_limit_check(seq, 3, fit=(4, 3)).closed_form
        assert not ratio_limit_check(seq, 3, fit=(4, 4)).passed

    def test_bad_window(self):
        with pytest.raises(ValueError):
            ratio_limit_check([1, 2, 4], 2, window=(0, 5))

    @settings(max_examples=30)
    @given(st.integers(1, 4), st.integers(0, 3))
    def test_fit_implies_convergence_to_larger_root(self, r1, gap):
        r2 = r1 + 1 + gap
        seq = rational_expansion(r1 + r2, r1 * r2, 40)
        assert ratio_limit_check(seq, r2, tol=Fraction(1, 100), fit=(r1 + r2, r1 * r2)).passed


class TestAlternatingTail:
    def test_single_term(self):
        assert alternating_tail([1], 1, start=1) == 0

    def test_powers(self):
        assert alternating_tail([2**n for n in range(6)], 5) == Fraction(11, 32)

    def test_geometric_sum_limit(self):
        r = alternating_tail(geometric_sum(2, 40), 40)
        assert abs(r - Fraction(1, 3)) < Fraction(1, 10**9)

    def test_missing_term(self):
        with pytest.raises(ValueError):
            alternating_tail([1, 2], 5)

    @pytest.mark.parametrize("xi", [2, 3, 5])
    @pytest.mark.parametrize("kind", ["powers", "sums"])
    def test_convergence(self, xi, kind):
        theta = [xi**n for n in range(61)] if kind == "powers" else geometric_sum(xi, 60)
        errors = [abs(alternating_tail(theta, n) - Fraction(1, xi + 1)) for n in (10, 30, 60)]
        assert errors[0] >= errors[1] >= errors[2]
        assert errors[2] < Fraction(1, 10**6)

    @settings(max_examples=50)
    @given(st.lists(st.integers(1, 100), min_size=2, max_size=20))
    def test_recursion(self, theta):
        # r_n theta_n + r_{n-1} theta_{n-1} = theta_{n-1}
        n = len(theta) - 1
        assert (alternating_tail(theta, n) * theta[n] + alternating_tail(theta, n - 1) * theta[n - 1]
                == theta[n - 1])


class TestPartialEuler:
    def test_examples(self):
        assert partial_euler([0, 0, 0]) == 0
        assert partial_euler([2, 1, 1]) == 2
        assert partial_euler([2, 1, 1], 1) == 0

    def test_negative_index(self):
        with pytest.raises(ValueError):
            partial_euler([1], -1)

    @pytest.mark.parametrize("s", [1, 2, 5, 8])
    def test_truncated_resolution_of_k(self, x2y2, s):
        # homology of A (x) (0 -> F_s -> ... -> F_0 -> 0) is k in degree 0,
        # Omega^{s+1} k in degree s, so chi_0 matches the Betti sum
        from artinlen.resolution import resolve
        from artinlen.series import residue_field

        table, _ = resolve(residue_field(x2y2), s + 1, periodicity=False)
        H = [0] * (s + 1)
        H[0] += 1
        H[s] += table.syzygy_lengths[s + 1]
        weighted = sum((-1) ** i * b * x2y2.dim for i, b in enumerate(table.betti[: s + 1]))
        assert partial_euler(H) == weighted
