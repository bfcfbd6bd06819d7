"""
End-to-end acceptance runs.

Each class exercises one headline behaviour at a size that finishes in
seconds; the full-scale versions are marked ``slow`` and deselected by
default (run them with ``pytest -m slow``).
"""

from fractions import Fraction

import numpy as np
import pytest
from conftest import GOLDEN_BADNESS, SQRT2_BADNESS

from mahler_lab import (
    Method,
    ProfileVerdict,
    WeightVector,
    basis,
    choose_method,
    detect_k_vwa,
    dirichlet_profile,
    epsilon_star,
    estimate_omega_k,
    finiteness_check,
    make_liouville,
    on_zero_set,
    parse_polynomial,
    record_scan,
    sample_points,
    transference_equality_holds,
    weighted_bad_statistic,
)


def lebesgue(seed: int, d: int, count: int, resolution: int = 32):
    """Helper to draw reproducible uniform points."""
    return sample_points("lebesgue", seed, d, resolution, count)


def assert_dirichlet_bound(points, d: int, k: int, schedule: list[int]) -> None:
    """Helper to assert ε*(Q) ≤ 1 on every sample of every profile."""
    b = basis(d, k)
    method = choose_method(b.n, schedule[-1])
    for spec in points:
        profile = dirichlet_profile(spec.coordinates, b, schedule, method)
        violations = [s.q_bound for s in profile.samples if s.value.upper > 1]
        assert violations == [], (spec.text, violations)


class TestDirichletBound:
    """Test ε*(Q) ≤ 1 on uniform samples."""

    @pytest.mark.parametrize("d,k", [(1, 1), (1, 2), (2, 1)])
    def test_small(self, d, k):
        assert_dirichlet_bound(lebesgue(11, d, 5), d, k, list(range(2, 11)))

    @pytest.mark.slow
    @pytest.mark.parametrize("d,k", [(1, 1), (1, 2), (1, 3), (2, 1), (2, 2)])
    def test_full(self, d, k):
        assert_dirichlet_bound(lebesgue(2024, d, 100), d, k, list(range(2, 41)))


class TestCorollaryFloor:
    """Test ω̂_k ≥ n − 1/2 on uniform samples without exact zeros."""

    @pytest.mark.parametrize("k,q_max", [(1, 1000), (2, 100)])
    def test_small(self, k, q_max):
        n = basis(1, k).n
        for spec in lebesgue(5, 1, 4):
            estimate = estimate_omega_k(spec.coordinates, 1, k, q_max)
            assert not estimate.infinite
            assert estimate.value >= n - Fraction(1, 2), (spec.text, estimate)

    @pytest.mark.slow
    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_lattice_full(self, k):
        n = basis(1, k).n
        for spec in lebesgue(2024, 1, 20, resolution=128):
            estimate = estimate_omega_k(spec.coordinates, 1, k, 10**5, Method.LATTICE)
            assert estimate.value >= n - Fraction(1, 4), (spec.text, estimate)


class TestBadnessConstants:
    """Test c_min for the golden ratio and √2."""

    def test_golden_ratio(self, phi, line_basis):
        c_min = record_scan([phi], line_basis, 10**4).c_min
        assert c_min is not None
        assert abs(float(c_min) - GOLDEN_BADNESS) < 1e-5

    def test_sqrt2(self, sqrt2, line_basis):
        c_min = record_scan([sqrt2], line_basis, 10**4).c_min
        assert c_min is not None
        assert abs(float(c_min) - SQRT2_BADNESS) < 1e-5


class TestSingularityDetection:
    """Test singular-trend detection on rational and quadratic points."""

    def test_rational_point_profile(self, half, line_basis):
        schedule = list(range(2, 65))
        profile = dirichlet_profile(half, line_basis, schedule)
        assert [s.value.exact * s.q_bound for s in profile.samples] == [2] * len(schedule)
        assert profile.verdict is ProfileVerdict.SINGULAR_TREND

    def test_golden_ratio_profile(self, phi, line_basis):
        schedule = [2**i for i in range(1, 14)] + [10**4]
        profile = dirichlet_profile([phi], line_basis, schedule)
        # the tail oscillates between 5^(-1/4) and (φ/√5)^(1/2)
        assert Fraction(3, 5) <= profile.tail_sup <= Fraction(87, 100)
        assert profile.verdict is ProfileVerdict.NON_SINGULAR


class TestAlgebraicPointIsSingular:
    """Test that a point on x1² + x2² = 1 is singular for k = 2."""

    def test_circle(self):
        p = parse_polynomial("x1**2 + x2**2 - 1", 2)
        point = on_zero_set(p, [Fraction(3, 5)])
        b = basis(2, 2)
        profile = dirichlet_profile(point.coordinates, b, [2, 4, 8, 16])
        assert all(s.value.upper <= Fraction(1, s.q_bound) for s in profile.samples)
        assert profile.verdict is ProfileVerdict.SINGULAR_TREND

        table = record_scan(point.coordinates, b, 16)
        assert table.exact_zero
        assert table.best.polynomial.render() == "x1**2 + x2**2 - 1"


class TestLiouvilleWitness:
    """Test VWA witnesses on truncated Liouville series."""

    def test_base_two(self):
        x = make_liouville(2, 4)
        result = detect_k_vwa([x], 1, 1, Fraction(1), (2, 64))
        assert 64 in [w.heights.full for w in result.witnesses]

    @pytest.mark.slow
    def test_base_ten(self):
        x = make_liouville(10, 5)
        result = detect_k_vwa([x], 1, 1, Fraction(1), (1, 10**6))
        assert result.witnesses
        assert estimate_omega_k([x], 1, 1, 10**6).value >= Fraction(29, 10)


class TestFiniteness:
    """Test witness count stabilization for √2."""

    @pytest.mark.slow
    def test_sqrt2(self, sqrt2):
        report = finiteness_check([sqrt2], 1, 1, Fraction(1, 2), 10**3, 10**6)
        assert report.stabilized


@pytest.mark.slow
class TestMetricProxy:
    """Test that VWA witnesses are rare among generic points."""

    @pytest.mark.parametrize(
        "kind,limit", [("lebesgue", Fraction(2, 100)), ("cantor", Fraction(5, 100))]
    )
    def test_fraction_with_witness(self, kind, limit):
        points = sample_points(kind, 2024, 1, 128, 1000)
        hits = sum(
            1
            for spec in points
            if detect_k_vwa(spec.coordinates, 1, 2, Fraction(1, 2), (10**2, 10**4)).witnesses
        )
        assert Fraction(hits, len(points)) <= limit


class TestOracleEquivalence:
    """Test that lattice search never beats exhaustive search."""

    @staticmethod
    def check(points, d: int, k: int, q_bound: int) -> None:
        b = basis(d, k)
        for spec in points:
            brute = epsilon_star(spec.coordinates, b, q_bound, method=Method.BRUTE)
            lattice = epsilon_star(spec.coordinates, b, q_bound, method=Method.LATTICE)
            assert lattice.value.upper >= brute.value.lower, spec.text
            assert lattice.value.upper <= 1, spec.text

    @pytest.mark.parametrize("d,k", [(2, 1), (1, 3)])
    def test_small(self, d, k):
        self.check(lebesgue(3, d, 5), d, k, 12)

    @pytest.mark.slow
    @pytest.mark.parametrize("d,k", [(2, 1), (1, 2), (1, 3), (3, 1)])
    def test_full(self, d, k):
        self.check(lebesgue(99, d, 50), d, k, 30)


class TestWeightedConvention:
    """Test that a zero weight deletes its coordinate."""

    def test_zero_weight_coordinate(self):
        rng = np.random.Generator(np.random.PCG64(20))
        for _ in range(20):
            y = [Fraction(int(a), int(b)) for a, b in rng.integers(1, 97, size=(3, 2))]
            full = weighted_bad_statistic(y, WeightVector.parse("1/2,0,1/2"), 50)
            reduced = weighted_bad_statistic([y[0], y[2]], WeightVector.parse("1/2,1/2"), 50)
            assert full.minimum.lower == reduced.minimum.lower
            assert full.minimum.upper == reduced.minimum.upper
            assert [r.q for r in full.records] == [r.q for r in reduced.records]


class TestTransferenceEquality:
    """Test the Dirichlet regime of the transference inequalities."""

    def test_equality_up_to_six(self):
        assert all(transference_equality_holds(n) for n in range(1, 7))
