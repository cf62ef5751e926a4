import pytest
from fractions import Fraction
from pathlib import Path
import sys

from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import QQ, QQ_I

# Adjust import path
repo_root = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(repo_root))

from tools.errors import SeriesNormalizationError, TruncationOrderError
from tools.scalars import (
    I,
    ONE,
    ZERO,
    GaussianRational,
    TruncUniSeries,
    product_of_inverses,
    series_invert,
    series_mul,
)

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)
gaussians = st.builds(GaussianRational, rationals, rationals)


class TestGaussianRational:

    def test_field_operations(self):
        """Test products, quotients and powers in Q(i)."""
        a = GaussianRational(1, 1)
        b = GaussianRational(1, -1)
        assert a * b == 2
        assert a / b == I
        assert I ** 2 == -1
        assert I ** -1 == GaussianRational(0, -1)
        assert (a - a) == ZERO

    def test_backed_by_gaussian_rational_domain(self):
        a = GaussianRational(Fraction(1, 2), -3)
        assert QQ_I.of_type(a.value)
        assert a.value == QQ_I(QQ(1, 2), -3)
        assert GaussianRational.from_domain(QQ_I(0, 1)) == I
        assert a.re == Fraction(1, 2) and a.im == -3

    def test_conjugate(self):
        assert GaussianRational(Fraction(1, 2), 3).conjugate() == GaussianRational(Fraction(1, 2), -3)

    def test_text_forms(self):
        """Test the display form and the canonical JSON form."""
        assert str(GaussianRational(Fraction(1, 2))) == "1/2"
        assert str(GaussianRational(0, 1)) == "(0+1i)"
        assert str(GaussianRational(-1, Fraction(-1, 2))) == "(-1-1/2i)"
        assert GaussianRational(Fraction(1, 2)).canonical() == "1/2+0/1i"
        assert GaussianRational(Fraction(-3, 4), -2).canonical() == "-3/4-2/1i"

    def test_rejects_floats(self):
        with pytest.raises(TypeError):
            GaussianRational.coerce(0.5)
        with pytest.raises(TypeError):
            GaussianRational.coerce(1j)

    def test_division_by_zero(self):
        with pytest.raises(ZeroDivisionError):
            ONE / ZERO

    def test_real_values_hash_like_fractions(self):
        assert hash(GaussianRational(Fraction(2, 3))) == hash(Fraction(2, 3))
        assert GaussianRational(3) == 3

    @given(gaussians, gaussians, gaussians)
    def test_distributive(self, a, b, c):
        assert (a + b) * c == a * c + b * c

    @given(gaussians, gaussians)
    def test_conjugation_is_multiplicative(self, a, b):
        assert (a * b).conjugate() == a.conjugate() * b.conjugate()


class TestTruncUniSeries:

    def test_invert_one_plus_t(self):
        """Test 1/(1+t) = 1 - t + t^2 - t^3."""
        c = series_invert(TruncUniSeries.from_coeffs([1, 1], 3))
        assert c.coeffs == (1, -1, 1, -1)

    def test_invert_cubic_perturbation(self):
        """Test C for D = 1 + t + 5t^3 by the inversion recursion."""
        c = series_invert(TruncUniSeries.from_coeffs([1, 1, 0, 5], 3))
        assert c.coeffs == (1, -1, 1, -6)

    def test_invert_requires_unit_constant(self):
        with pytest.raises(SeriesNormalizationError):
            series_invert(TruncUniSeries.from_coeffs([2, 1], 3))

    def test_from_coeffs_pads_and_truncates(self):
        assert TruncUniSeries.from_coeffs([1], 2).coeffs == (1, 0, 0)
        assert TruncUniSeries.from_coeffs([1, 2, 3, 4], 1).coeffs == (1, 2)
        assert TruncUniSeries.from_coeffs([0, 0, 3], 3).leading_order() == 2

    @given(st.lists(rationals, max_size=5))
    @settings(max_examples=50)
    def test_inverse_is_exact(self, tail):
        d = TruncUniSeries.from_coeffs([1, *tail], 5)
        assert series_mul(d, series_invert(d)) == TruncUniSeries.one(5)


class TestProductOfInverses:

    def setup_method(self):
        self.c_one = TruncUniSeries.one(4)

    def test_r_zero_is_one(self):
        assert product_of_inverses(0, self.c_one, 3).coeffs == (1, 0, 0, 0)

    def test_r_one_with_unit_c(self):
        """Test u/(1+u) = u - u^2 + u^3."""
        assert product_of_inverses(1, self.c_one, 3).coeffs == (0, 1, -1, 1)

    def test_r_two_with_unit_c(self):
        """Test (1/2) u^2 / ((1+u)(1+2u)) = u^2/2 - 3u^3/2 + ..."""
        assert product_of_inverses(2, self.c_one, 3).coeffs == (0, 0, Fraction(1, 2), Fraction(-3, 2))

    def test_requires_enough_c_coefficients(self):
        with pytest.raises(TruncationOrderError):
            product_of_inverses(1, TruncUniSeries.one(1), 4)
