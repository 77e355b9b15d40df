import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from carleman_dsolve.carleman import CarlemanSequence, diagnose_class, log_weight, weight_eval
from carleman_dsolve.errors import DomainError, InvalidInputError


def brute_force_weight(terms, x):
    """Exact rational scan of (M_n / n!) x^n; returns (value, first argmin)."""
    xq = Fraction(x)
    vals = [Fraction(m) / math.factorial(n) * xq**n for n, m in enumerate(terms)]
    best = min(vals)
    return float(best), vals.index(best)


class TestWeight:
    def test_factorial_at_two_is_one_at_zero(self):
        w = weight_eval(CarlemanSequence.builtin("factorial"), 2.0)
        assert w.value == 1.0 and w.argmin_index == 0 and not w.upper_bound

    def test_factorial_squared_at_tenth_matches_scan(self):
        M = CarlemanSequence.builtin("factorial_squared", n_max=20)
        val, idx = brute_force_weight([math.factorial(n) ** 2 for n in range(21)], Fraction(1, 10))
        w = weight_eval(M, 0.1)
        # 9! 0.1^9 and 10! 0.1^10 tie exactly; the smaller index wins
        assert idx == 9 and w.argmin_index == 9
        assert w.value == pytest.approx(val, rel=1e-12)
        assert w.value == pytest.approx(3.6288e-4, rel=1e-12)

    def test_still_decreasing_is_flagged(self):
        w = weight_eval(CarlemanSequence.builtin("factorial", n_max=40), 0.5)
        assert w.upper_bound and w.argmin_index == 40
        assert w.value == pytest.approx(0.5**40, rel=1e-12)

    @pytest.mark.parametrize("x", [0.0, -1.0])
    def test_nonpositive_argument(self, x):
        with pytest.raises(DomainError):
            weight_eval(CarlemanSequence.builtin("factorial"), x)

    def test_vectorised_matches_scalar(self):
        M = CarlemanSequence.builtin("factorial_log")
        xs = np.array([0.03, 0.2, 0.7, 3.0])
        assert np.allclose(log_weight(M, xs), [weight_eval(M, x).log_value for x in xs], rtol=0, atol=1e-12)


class TestSequence:
    def test_empty_rejected(self):
        with pytest.raises(InvalidInputError):
            CarlemanSequence.from_terms([])

    def test_nonpositive_rejected(self):
        with pytest.raises(InvalidInputError):
            CarlemanSequence.from_terms([1.0] * 5 + [0.0] + [1.0] * 5)

    def test_too_short_rejected(self):
        with pytest.raises(InvalidInputError):
            CarlemanSequence.from_terms([1.0] * 8)

    def test_unknown_builtin(self):
        with pytest.raises(InvalidInputError):
            CarlemanSequence.builtin("catalan")

    def test_large_indices_stay_finite(self):
        M = CarlemanSequence.builtin("factorial_squared", n_max=400)
        assert np.all(np.isfinite(M.log_terms))

    @pytest.mark.parametrize("spec", ["factorial", {"builtin": "factorial_log", "n_max": 30},
                                      {"terms": [1.0, 2.0, 5.0, 20.0, 90.0, 500.0, 3e3, 2e4, 2e5]}])
    def test_config_round_trip(self, spec):
        M = CarlemanSequence.from_config(spec)
        again = CarlemanSequence.from_config(M.to_config())
        assert np.allclose(M.log_terms, again.log_terms, rtol=1e-14, atol=1e-14)


class TestDiagnostics:
    def test_factorial_is_logconvex(self):
        assert diagnose_class(CarlemanSequence.builtin("factorial")).logconvex_ok

    def test_factorial_squared(self):
        d = diagnose_class(CarlemanSequence.builtin("factorial_squared", n_max=30))
        assert d.logconvex_ok
        assert np.all(np.diff(d.root_growth) > 0)
        # independent check with exact integers
        m = [Fraction(math.factorial(n)) for n in range(31)]
        assert all(m[n + 1] ** 2 <= m[n] * m[n + 2] for n in range(29))

    def test_alternating_fails_at_zero(self):
        d = diagnose_class(CarlemanSequence.from_terms([1, 10] * 6))
        assert not d.logconvex_ok and d.first_logconvex_violation == 0

    def test_partial_sum_and_hints(self):
        d = diagnose_class(CarlemanSequence.builtin("factorial", n_max=50))
        assert d.dc_partial_sum == pytest.approx(sum(1 / (n + 1) for n in range(50)), rel=1e-12)
        assert d.quasianalytic_hint.startswith("divergent")
        assert diagnose_class(CarlemanSequence.builtin("factorial_squared", n_max=50)).quasianalytic_hint == \
            "convergent trend"
        assert d.sup_ratio_estimate >= 0

    def test_pure(self):
        M = CarlemanSequence.builtin("factorial_log")
        assert diagnose_class(M).as_dict() == diagnose_class(M).as_dict()


seq_terms = st.lists(st.floats(min_value=1e-3, max_value=1e3), min_size=9, max_size=30)
pos = st.floats(min_value=1e-3, max_value=50.0)


@settings(max_examples=60, deadline=None)
@given(seq_terms, pos, pos)
def test_weight_monotone(terms, x1, x2):
    M = CarlemanSequence.from_terms(terms)
    lo, hi = sorted((x1, x2))
    assert weight_eval(M, lo).log_value <= weight_eval(M, hi).log_value + 1e-12


@settings(max_examples=60, deadline=None)
@given(seq_terms, pos)
def test_weight_below_first_term(terms, x):
    M = CarlemanSequence.from_terms(terms)
    assert weight_eval(M, x).value <= terms[0] * (1 + 1e-12)


@settings(max_examples=60, deadline=None)
@given(seq_terms, pos, st.floats(min_value=1e-3, max_value=1e3))
def test_weight_scaling(terms, x, c):
    M = CarlemanSequence.from_terms(terms)
    a, b = weight_eval(M, x), weight_eval(M.scaled(c), x)
    assert b.argmin_index == a.argmin_index
    assert b.value == pytest.approx(c * a.value, rel=1e-10)
