import random
import pytest

from stacky_volumes.ratfun import (
    DegreePositive,
    InsufficientCoefficients,
    NoRationalFit,
    RationalFunctionFit,
    Series,
    fit_rational,
    limit_at_infinity,
)
from stacky_volumes.scalar import ExactScalar, q_power


def test_geometric_series_fit():
    fit = fit_rational(Series([1] * 10), 1, 1)
    assert fit.numerator == [ExactScalar.zero(), ExactScalar.one()]
    assert fit.limit_at_infinity() == -1


def test_shifted_linear_fit():
    fit = fit_rational(Series([r + 1 for r in range(1, 13)]), 1, 2)
    assert fit.numerator == [ExactScalar.zero(), ExactScalar.from_rational(2),
                             ExactScalar.from_rational(-1)]
    assert fit.limit_at_infinity() == -1


def test_half_point_series_fit():
    fit = fit_rational(Series([0, 1] * 6), 2, 1)
    assert fit.numerator == [ExactScalar.zero(), ExactScalar.zero(), ExactScalar.one()]
    assert fit.limit_at_infinity() == -1


def test_limit_positive_leading_ratio():
    fit = fit_rational(Series([r - 1 for r in range(1, 14)]), 1, 2)
    assert fit.limit_at_infinity() == 1


def test_zero_series():
    fit = fit_rational(Series([0] * 8), 1, 1)
    assert fit.numerator == []
    assert fit.limit_at_infinity() == 0
    assert fit.expand(5) == Series([0] * 5)


def test_no_rational_fit():
    with pytest.raises(NoRationalFit):
        fit_rational(Series([2 ** r for r in range(1, 12)]), 1, 1)


def test_insufficient_coefficients():
    with pytest.raises(InsufficientCoefficients):
        fit_rational(Series([1, 1, 1]), 2, 3)


def test_degree_positive():
    bad = RationalFunctionFit([0, 0, 1], 1, 1, 0)  # T^2/(1-T)
    with pytest.raises(DegreePositive):
        bad.limit_at_infinity()


def test_round_trip_random_numerators():
    rng = random.Random(3)
    for _ in range(15):
        delta = rng.choice([1, 2, 3])
        big_d = rng.choice([0, 1, 2])
        deg = delta * big_d
        num = [ExactScalar.from_rational(rng.randint(-4, 4)) for _ in range(deg + 1)]
        num[0] = ExactScalar.zero()  # series have no constant term
        fit0 = RationalFunctionFit(num, delta, big_d, 0)
        order = delta * big_d + delta + 4
        series = fit0.expand(order)
        fit = fit_rational(series, delta, big_d)
        assert fit.expand(order) == series
        padded = list(fit.numerator) + [ExactScalar.zero()] * (len(num) - len(fit.numerator))
        trimmed = list(num)
        while trimmed and trimmed[-1].is_zero():
            trimmed.pop()
        assert fit.numerator == trimmed or padded == num


def test_shift_robustness_larger_big_d():
    series = Series([r + 1 for r in range(1, 20)])
    fit2 = fit_rational(series, 1, 2)
    fit3 = fit_rational(series, 1, 3)
    assert fit2.expand(19) == fit3.expand(19)
    assert fit2.limit_at_infinity() == fit3.limit_at_infinity()


def test_limit_invariant_under_common_factor():
    # multiply numerator and denominator by (1 - T^delta)
    series = Series([1] * 12)
    fit = fit_rational(series, 1, 1)
    num2 = [ExactScalar.zero()] * (len(fit.numerator) + 1)
    for k, c in enumerate(fit.numerator):
        num2[k] = num2[k] + c
        num2[k + 1] = num2[k + 1] - c
    fit2 = RationalFunctionFit(num2, 1, 2, fit.witnessed_order)
    assert fit2.limit_at_infinity() == fit.limit_at_infinity()


def test_symbolic_coefficient_fit():
    q = q_power(1)
    series = Series([2 * q_power(-1) + q_power(-1) / (q - 1) + (r - 1) / (q - 1)
                     for r in range(1, 10)])
    fit = fit_rational(series, 1, 2)
    assert -fit.limit_at_infinity() == q_power(-1)


def test_series_accessors():
    s = Series([5, 7])
    assert s.coeff(1) == 5 and s.coeff(2) == 7
    with pytest.raises(IndexError):
        s.coeff(3)
    with pytest.raises(IndexError):
        s.coeff(0)


def test_limit_module_function():
    assert limit_at_infinity(fit_rational(Series([1] * 8), 1, 1)) == -1
