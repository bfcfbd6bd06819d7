"""
Tests for test point construction, parsing and sampling.
"""

from fractions import Fraction

import pytest
from conftest import PHI, SQRT2, assert_encloses

from mahler_lab import (
    DimensionMismatchError,
    PointKind,
    PointSpec,
    PointSpecError,
    ResourceLimitError,
    RootIsolationError,
    certify_zero,
    make_algebraic,
    make_liouville,
    on_zero_set,
    parse_point,
    parse_polynomial,
    refine,
    sample_point,
    sample_points,
)


class TestAlgebraic:
    """Test algebraic oracles."""

    def test_golden_ratio_enclosure(self, phi):
        enclosure = refine(phi, 50)
        assert enclosure.width <= Fraction(1, 1 << 50)
        assert_encloses(enclosure.lower, enclosure.upper, PHI)
        assert phi.algebraic.coefficients == (-1, -1, 1)

    def test_refinement_is_monotone(self, sqrt2):
        coarse = refine(sqrt2, 10)
        fine = refine(sqrt2, 40)
        assert coarse.lower <= fine.lower <= fine.upper <= coarse.upper
        assert_encloses(fine.lower, fine.upper, SQRT2)

    def test_rational_root_is_exact(self):
        oracle = make_algebraic((-1, 2), (Fraction(0), Fraction(1)))
        assert oracle.exact == Fraction(1, 2)
        assert oracle.algebraic is not None

    def test_reducible_defining_polynomial(self):
        oracle = make_algebraic((6, -2, -3, 1), (Fraction(1), Fraction(2)))
        assert oracle.exact is None
        enclosure = refine(oracle, 30)
        assert_encloses(enclosure.lower, enclosure.upper, SQRT2, slack=1e-8)

    @pytest.mark.parametrize(
        "interval",
        [(Fraction(2), Fraction(3)), (Fraction(-2), Fraction(2)), (Fraction(2), Fraction(1))],
    )
    def test_isolation_failures(self, interval):
        with pytest.raises(RootIsolationError):
            make_algebraic((-2, 0, 1), interval)


class TestLiouville:
    """Test truncated Liouville series."""

    def test_exact_value_and_truncation(self):
        oracle = make_liouville(10, 3)
        assert oracle.exact == Fraction(1, 10) + Fraction(1, 100) + Fraction(1, 10**6)
        assert oracle.meta["truncation_height"] == 100
        assert oracle.tag == "liouville"

    def test_invalid_parameters(self):
        with pytest.raises(PointSpecError):
            make_liouville(1, 3)
        with pytest.raises(PointSpecError):
            make_liouville(10, 0)

    def test_bit_budget(self, tight_limits):
        with pytest.raises(ResourceLimitError):
            make_liouville(10, 5, tight_limits)


class TestZeroSet:
    """Test points on polynomial zero sets."""

    def test_circle_rational_slice(self):
        spec = on_zero_set(parse_polynomial("x1**2 + x2**2 - 1", 2), [Fraction(3, 5)])
        assert spec.exact == (Fraction(3, 5), Fraction(4, 5))
        assert spec.kind is PointKind.ZERO_SET

    def test_circle_irrational_slice(self):
        p = parse_polynomial("x1**2 + x2**2 - 1", 2)
        spec = on_zero_set(p, [Fraction(1, 2)])
        assert spec.exact is None
        assert certify_zero(p, spec.coordinates) is True
        last = refine(spec.coordinates[1], 40)
        assert_encloses(last.lower, last.upper, 3**0.5 / 2, slack=1e-9)

    def test_explicit_interval_selects_negative_root(self):
        spec = on_zero_set(parse_polynomial("x**2 - 2", 1), [], (Fraction(-2), Fraction(-1)))
        enclosure = refine(spec.coordinates[0], 30)
        assert_encloses(enclosure.lower, enclosure.upper, -SQRT2, slack=1e-8)

    def test_wrong_number_of_free_coordinates(self):
        with pytest.raises(DimensionMismatchError):
            on_zero_set(parse_polynomial("x1**2 + x2**2 - 1", 2), [])

    @pytest.mark.parametrize(
        "expression,free",
        [
            ("x1 - 1", [Fraction(1)]),
            ("x1 - 2", [Fraction(1)]),
            ("x1**2 + x2**2 + 1", [Fraction(0)]),
        ],
    )
    def test_degenerate_slices(self, expression, free):
        with pytest.raises(PointSpecError):
            on_zero_set(parse_polynomial(expression, 2), free)


class TestOracleWidth:
    """Test that every oracle kind meets the requested width."""

    @pytest.fixture
    def oracles(self, phi, sqrt2):
        circle = on_zero_set(parse_polynomial("x1**2 + x2**2 - 1", 2), [Fraction(1, 3)])
        return [phi, sqrt2, make_liouville(10, 4), circle.coordinates[1]]

    @pytest.mark.parametrize("precision", [16, 64, 256])
    def test_width_at_most_requested(self, oracles, precision):
        for oracle in oracles:
            enclosure = refine(oracle, precision)
            assert enclosure.width <= Fraction(1, 1 << precision), oracle.tag
            if oracle.exact is not None:
                assert enclosure.contains(oracle.exact)


class TestSampling:
    """Test reproducible sampling."""

    def test_same_seed_same_point(self):
        a = sample_point("lebesgue", 7, 2, 64)
        b = sample_point(PointKind.LEBESGUE, 7, 2, 64)
        assert a.exact == b.exact
        assert a.text == "lebesgue:7,64"

    def test_lebesgue_grid(self):
        spec = sample_point("lebesgue", 11, 3, 32)
        for value in spec.exact:
            assert 0 <= value < 1
            assert (1 << 32) % value.denominator == 0

    def test_cantor_digits(self):
        spec = sample_point("cantor", 3, 2, 20)
        for value in spec.exact:
            n = value * 3**20
            assert n.denominator == 1
            n = n.numerator
            for _ in range(20):
                n, digit = divmod(n, 3)
                assert digit in (0, 2)

    def test_batch_matches_indexed_parse(self):
        batch = sample_points("lebesgue", 5, 2, 48, 4)
        assert len(batch) == 4
        assert len({spec.exact for spec in batch}) == 4
        for index, spec in enumerate(batch):
            assert parse_point(f"lebesgue:5,48,{index}", 2).exact == spec.exact

    def test_unsupported_kind(self):
        with pytest.raises(PointSpecError):
            sample_point("rational", 1, 1, 8)

    def test_resolution_limit(self, tight_limits):
        with pytest.raises(ResourceLimitError):
            sample_points("cantor", 1, 1, 128, 2, tight_limits)


class TestParsePoint:
    """Test point specification strings."""

    def test_rational(self):
        spec = parse_point("rational:3/5, 4/5", 2)
        assert spec.exact == (Fraction(3, 5), Fraction(4, 5))
        assert spec.text == "rational:3/5,4/5"

    def test_algebraic_with_rational_coordinate(self):
        spec = parse_point("algebraic:x**2-x-1@1:2;1/3", 2)
        assert spec.coordinates[1].exact == Fraction(1, 3)
        assert spec.coordinates[0].algebraic.coefficients == (-1, -1, 1)
        assert spec.text == "algebraic:x**2-x-1@1:2;1/3"

    def test_liouville(self):
        spec = parse_point("liouville:10,4", 1)
        assert spec.params["truncation_height"] == str(10**6)

    def test_zero_set_forms(self):
        assert parse_point("zero:x1**2+x2**2-1@3/5", 2).exact == (Fraction(3, 5), Fraction(4, 5))
        assert parse_point("zero:x1*x2-1@2", 2).exact == (Fraction(2), Fraction(1, 2))
        spec = parse_point("zero_set:x**2-2", 1)
        assert spec.exact is None

    def test_dict_round_trip_keeps_text(self):
        spec = parse_point("algebraic:x**2-2@1:2", 1)
        assert PointSpec.from_dict(spec.to_dict()) == spec

    @pytest.mark.parametrize(
        "text",
        ["nope:1", "rational", "rational:a", "liouville:10", "algebraic:x**2-2@2:3"],
    )
    def test_invalid(self, text):
        with pytest.raises(PointSpecError):
            parse_point(text, 1)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            parse_point("rational:1/2", 2)
