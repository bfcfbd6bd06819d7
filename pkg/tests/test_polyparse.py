"""
Tests for the polynomial expression parser.
"""

import pytest

from mahler_lab import PolynomialParseError, parse_polynomial, parse_univariate
from mahler_lab.polyparse import parse_sparse


class TestParsePolynomial:
    """Test parsing into IntPolynomial over the standard basis."""

    def test_circle(self):
        p = parse_polynomial("x1**2 + x2**2 - 1", 2)
        assert p.basis.k == 2
        assert p.a0 == -1
        assert p.q == (0, 0, 1, 0, 1)

    def test_products_expand(self):
        """Test that products of sums are expanded and collected."""
        p = parse_polynomial("(x1 + x2)*(x1 - x2)", 2)
        assert p.q == (0, 0, 1, 0, -1)
        assert p.a0 == 0

    def test_plain_x_in_one_variable(self):
        p = parse_polynomial("3*x**2 - x + 2", 1)
        assert p.q == (-1, 3)
        assert p.a0 == 2

    def test_explicit_degree_pads_basis(self):
        p = parse_polynomial("x1 - 2", 2, k=3)
        assert p.basis.n == 9
        assert p.q[0] == 1
        assert not any(p.q[1:])

    def test_degree_above_k_rejected(self):
        with pytest.raises(PolynomialParseError):
            parse_polynomial("x1**3", 2, k=2)

    def test_constant_gets_degree_one_basis(self):
        p = parse_polynomial("5", 2)
        assert p.basis.k == 1
        assert p.a0 == 5
        assert not any(p.q)

    def test_cancelling_terms(self):
        p = parse_polynomial("x**2 - x**2 + x", 1)
        assert p.basis.k == 1
        assert p.q == (1,)


class TestRejectedExpressions:
    """Test that non-polynomial input is refused."""

    @pytest.mark.parametrize(
        "expression",
        [
            "x1 / 2",
            "x1 ** x2",
            "2 ** x1",
            "x1 * 1.5",
            "sin(x1)",
            "y + 1",
            "x3",
            "x1 ** 100",
            "x1 +",
            "0.5",
        ],
    )
    def test_rejected(self, expression):
        with pytest.raises(PolynomialParseError):
            parse_polynomial(expression, 2)

    def test_x_alias_only_in_one_variable(self):
        with pytest.raises(PolynomialParseError):
            parse_polynomial("x + 1", 2)

    def test_error_carries_expression(self):
        with pytest.raises(PolynomialParseError) as exc_info:
            parse_polynomial("x1 / 2", 2)
        assert exc_info.value.details["value"] == "x1 / 2"


class TestParseUnivariate:
    """Test ascending coefficient output."""

    def test_ascending_coefficients(self):
        assert parse_univariate("x**2 - x - 1") == (-1, -1, 1)
        assert parse_univariate("x**3 - 2") == (-2, 0, 0, 1)

    def test_integer_constants_fold(self):
        assert parse_univariate("2**3*x - 4") == (-4, 8)

    def test_sparse_degree(self):
        assert parse_sparse("x1*x2**2 + 1", 2).degree == 3
