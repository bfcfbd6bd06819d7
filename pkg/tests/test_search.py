"""
Tests for record scans, Dirichlet profiles and multiple scans.
"""

from fractions import Fraction

import numpy as np
import pytest
from conftest import GOLDEN_BADNESS, SQRT2_BADNESS

from mahler_lab import (
    DEFAULT_LIMITS,
    ConfigError,
    Method,
    ProfileVerdict,
    ResourceLimitError,
    Statistic,
    WeightVector,
    WeightVectorError,
    admissible_box,
    basis,
    brute_force_best,
    choose_method,
    dirichlet_profile,
    epsilon_star,
    is_dirichlet_improvable,
    make_liouville,
    make_rational,
    prefix_weights,
    record_scan,
    refine,
    scan_multiples,
    small_value_scan,
    weighted_bad_statistic,
)
from mahler_lab.search import CertifiedValue


def _heights(table):
    return [e.heights.reduced for e in table.entries]


class TestCertifiedValue:
    """Test certified comparisons."""

    def test_exact_comparison(self):
        a = CertifiedValue.of_fraction(Fraction(1, 3), 64)
        b = CertifiedValue.of_fraction(Fraction(1, 2), 64)
        assert a.below(b) is True
        assert b.below(a) is False

    def test_overlap_is_undecided(self, phi):
        a = CertifiedValue(refine(phi, 8))
        b = CertifiedValue(refine(phi, 16))
        assert a.below(b) is None

    def test_scaled(self):
        v = CertifiedValue.of_fraction(Fraction(1, 4), 16).scaled(8)
        assert v.exact == 2
        assert v.enclosure.contains(2)


class TestWeights:
    """Test weight vectors and admissible boxes."""

    def test_parse_and_uniform(self):
        w = WeightVector.parse("1/2, 1/2")
        assert w.is_uniform
        assert w == WeightVector.uniform(2)

    @pytest.mark.parametrize("text", ["1/2,1/3", "3/2,-1/2", "a,b", "1/0"])
    def test_invalid_weights(self, text):
        with pytest.raises(WeightVectorError):
            WeightVector.parse(text)

    def test_prefix_weights(self):
        """Test the degree-1 prefix inside basis(1, 2)."""
        w = prefix_weights(basis(1, 2), 1)
        assert w.weights == (Fraction(1), Fraction(0))
        assert w.is_prefix_form
        assert not WeightVector.parse("1/2,1/4,1/4").is_prefix_form

    def test_admissible_box(self):
        """Test floor(Q^(n*r_i)) with zero weights forcing zero coefficients."""
        w = prefix_weights(basis(1, 2), 1)
        assert admissible_box(w, 3) == (9, 0)
        assert admissible_box(WeightVector.uniform(3), 10) == (10, 10, 10)
        assert admissible_box(WeightVector.parse("1/2,1/4,1/4"), 16) == (64, 8, 8)


class TestRecordScan:
    """Test successive-minimum record tables."""

    def test_golden_ratio_records_are_fibonacci(self, phi, line_basis):
        table = record_scan([phi], line_basis, 20)
        assert _heights(table) == [1, 2, 3, 5, 8, 13]
        assert table.entries[0].polynomial.render() == "x1 - 2"
        assert not table.exact_zero
        assert abs(float(table.c_min) - GOLDEN_BADNESS) < 1e-9

    def test_sqrt2_records_are_pell(self, sqrt2, line_basis):
        table = record_scan([sqrt2], line_basis, 200)
        assert _heights(table) == [1, 2, 5, 12, 29, 70, 169]
        assert abs(float(table.c_min) - SQRT2_BADNESS) < 1e-9

    def test_values_strictly_decrease(self, sqrt2, line_basis):
        table = record_scan([sqrt2], line_basis, 200)
        uppers = [e.value.upper for e in table.entries]
        lowers = [e.value.lower for e in table.entries]
        assert all(u < l for u, l in zip(uppers[1:], lowers[:-1]))

    def test_rational_point_stops_at_exact_zero(self, half, line_basis):
        table = record_scan(half, line_basis, 8)
        assert _heights(table) == [1, 2]
        assert table.exact_zero
        assert table.best.value.exact == 0
        assert table.best.ratio is None
        assert table.entries[0].value.exact == Fraction(1, 2)

    def test_algebraic_relation_found_at_height_one(self, phi):
        """Test that x^2 - x - 1 is certified as an exact zero in degree 2."""
        table = record_scan([phi], basis(1, 2), 5)
        assert table.exact_zero
        assert table.best.polynomial.q == (1, -1)
        assert table.best.polynomial.a0 == 1

    def test_circle_point_relation(self, circle_point, conic_basis):
        table = record_scan(circle_point, conic_basis, 4)
        assert table.exact_zero
        assert table.best.heights.reduced <= 4

    def test_ratio_lower_bound(self, sqrt2, line_basis):
        """Test that log ratios of the records are certified to exceed 1 for sqrt 2."""
        table = record_scan([sqrt2], line_basis, 200)
        ratios = [e.ratio for e in table.entries if e.ratio is not None]
        assert ratios
        assert all(r > 1 for r in ratios)
        assert ratios[-1] < Fraction(3, 2)

    def test_sharding_does_not_change_records(self, sqrt2, line_basis, two_threads):
        single = record_scan([sqrt2], line_basis, 200)
        sharded = record_scan([sqrt2], line_basis, 200, limits=two_threads)
        explicit = record_scan([sqrt2], line_basis, 200, limits=two_threads, shards=3)
        expected = [e.polynomial.q for e in single.entries]
        assert [e.polynomial.q for e in sharded.entries] == expected
        assert [e.polynomial.q for e in explicit.entries] == expected
        assert sharded.c_min == single.c_min

    def test_lattice_agrees_with_brute(self, sqrt2, line_basis):
        brute = record_scan([sqrt2], line_basis, 100)
        lattice = record_scan([sqrt2], line_basis, 100, method="lattice")
        assert _heights(lattice) == _heights(brute)

    def test_box_limit(self, circle_point, conic_basis, tight_limits):
        with pytest.raises(ResourceLimitError):
            record_scan(circle_point, conic_basis, 40, limits=tight_limits)

    def test_invalid_q_max(self, half, line_basis):
        with pytest.raises(ConfigError):
            record_scan(half, line_basis, 0)

    def test_liouville_clamped_to_truncation(self, line_basis):
        point = make_liouville(10, 3)
        table = record_scan([point], line_basis, 1000)
        assert table.q_max == 100

    def test_brute_force_best(self, phi, line_basis):
        best = brute_force_best([phi], line_basis, 10)
        assert best.polynomial.q == (8,)
        assert best.polynomial.a0 == -13

    def test_table_dict_stringifies_heights(self, sqrt2, line_basis):
        data = record_scan([sqrt2], line_basis, 20).to_dict()
        assert data["Q_max"] == "20"
        assert data["entries"][1]["H_tilde"] == "2"
        assert data["method"] == "brute"


class TestEpsilonStar:
    """Test Dirichlet improvability profiles."""

    def test_rational_profile(self, half, line_basis):
        """Test eps*(Q) = 2/Q for x = 1/2."""
        profile = dirichlet_profile(half, line_basis, [2, 4, 8])
        assert [s.value.exact for s in profile.samples] == [1, Fraction(1, 2), Fraction(1, 4)]
        assert profile.verdict is ProfileVerdict.SINGULAR_TREND
        assert profile.samples[0].witness.render() == "x1 - 1"

    def test_golden_ratio_single_scale(self, phi, line_basis):
        sample = epsilon_star([phi], line_basis, 3)
        assert sample.witness.q == (2,)
        assert abs(float(sample.value.upper) - 0.708203932) < 1e-8

    def test_golden_ratio_is_not_singular(self, phi, line_basis):
        profile = dirichlet_profile([phi], line_basis, [4, 8, 16, 32, 64, 128])
        assert profile.verdict is ProfileVerdict.NON_SINGULAR
        assert all(s.value.lower > Fraction(3, 5) for s in profile.samples)

    def test_lattice_matches_brute(self, phi, line_basis):
        brute = epsilon_star([phi], line_basis, 20)
        lattice = epsilon_star([phi], line_basis, 20, method=Method.LATTICE)
        assert brute.witness.q == lattice.witness.q == (13,)
        assert abs(float(brute.value.upper) - float(lattice.value.upper)) < 1e-12

    def test_weighted_prefix_box(self, half):
        """Test the weighted objective with the degree-1 prefix of basis(1, 2)."""
        b = basis(1, 2)
        sample = epsilon_star(half, b, 3, weights=prefix_weights(b, 1))
        assert sample.value.exact == Fraction(2, 9)
        assert sample.witness.q == (2, 0)

    def test_uniform_weights_match_unweighted(self, phi, line_basis):
        plain = epsilon_star([phi], line_basis, 10)
        weighted = epsilon_star([phi], line_basis, 10, weights=WeightVector.uniform(1))
        assert plain.witness.q == weighted.witness.q

    @pytest.mark.parametrize("m,k,q_bound", [(2, 1, 2), (2, 1, 3), (3, 1, 2), (4, 2, 3)])
    def test_prefix_weights_reduce_to_lower_degree(self, m, k, q_bound):
        """Test that r_k inside basis(1, m) is the unweighted degree-k problem at Q^(m/k)."""
        big, small = basis(1, m), basis(1, k)
        weights = prefix_weights(big, k)
        scaled = q_bound ** (m // k)
        assert admissible_box(weights, q_bound) == (scaled,) * k + (0,) * (m - k)
        rng = np.random.Generator(np.random.PCG64(40 + m))
        for a in rng.integers(1, 97, size=3):
            x = make_rational([Fraction(int(a), 97)])
            weighted = epsilon_star(x, big, q_bound, weights=weights)
            plain = epsilon_star(x, small, scaled)
            assert weighted.value.exact == plain.value.exact
            assert not any(weighted.witness.q[k:])

    def test_weighted_screen_truncation_warns(self, package_log):
        """Test that tied survivors beyond the candidate cap are reported."""
        x = make_rational([Fraction(1, 2)] * 3)
        weights = WeightVector.parse("1/6,5/12,5/12")
        limits = DEFAULT_LIMITS.with_overrides(max_shell_candidates=1)
        sample = epsilon_star(x, basis(3, 1), 4, weights=weights, limits=limits)
        assert sample.witness.q[0] == 0
        assert any("truncated to cap 1" in r.getMessage() for r in package_log.records)

    def test_weight_length_mismatch(self, phi, line_basis):
        with pytest.raises(WeightVectorError):
            epsilon_star([phi], line_basis, 10, weights=WeightVector.uniform(2))

    def test_empty_schedule(self, half, line_basis):
        with pytest.raises(ConfigError):
            dirichlet_profile(half, line_basis, [])

    def test_improvability(self, half, line_basis):
        profile = dirichlet_profile(half, line_basis, [2, 4, 8])
        assert is_dirichlet_improvable(profile, Fraction(1, 2), 4) is True
        assert is_dirichlet_improvable(profile, Fraction(1, 2), 2) is False
        assert is_dirichlet_improvable(profile, Fraction(1, 2), 100) is None

    def test_profile_dict(self, half, line_basis):
        data = dirichlet_profile(half, line_basis, [2, 4, 8]).to_dict()
        assert data["verdict"] == "singular-trend"
        assert data["samples"][1]["Q"] == "4"
        assert data["samples"][1]["eps"]["exact"] == "1/2"


class TestScanMultiples:
    """Test one-dimensional multiple scans."""

    def test_bad_statistic_of_half(self):
        scan = weighted_bad_statistic(make_rational([Fraction(1, 2)]), WeightVector.uniform(1), 2)
        assert [r.q for r in scan.records] == [1, 2]
        assert scan.minimum.exact == 0
        assert scan.to_dict()["argmin"] == "2"

    def test_zero_weight_coordinate_ignored(self, sqrt2):
        y = [Fraction(1, 2), sqrt2]
        scan = scan_multiples(y, 10, Statistic.BAD, WeightVector.parse("1,0"))
        assert scan.best.q == 2
        assert scan.minimum.exact == 0

    def test_simultaneous_golden_ratio(self, phi):
        scan = scan_multiples([phi], 20, "simultaneous")
        assert [r.q for r in scan.records] == [1, 2, 3, 5, 8, 13]

    def test_multiplicative(self):
        scan = scan_multiples(make_rational([Fraction(1, 2), Fraction(1, 3)]), 10, "multiplicative")
        assert scan.records[0].value.exact == Fraction(1, 6)
        assert scan.best.q == 2
        assert scan.minimum.exact == 0

    def test_weighted_bad_irrational_pair(self, phi, sqrt2):
        scan = weighted_bad_statistic([phi, sqrt2], WeightVector.uniform(2), 50)
        assert scan.minimum.upper > 0
        qs = [r.q for r in scan.records]
        assert qs == sorted(qs)
        values = [r.value for r in scan.records]
        assert all(later.upper < earlier.lower for earlier, later in zip(values, values[1:]))

    def test_scan_limit(self, tight_limits):
        with pytest.raises(ResourceLimitError):
            scan_multiples([Fraction(1, 3)], 5000, "simultaneous", limits=tight_limits)


class TestSmallValueScan:
    """Test the full-box screen behind VWA detection."""

    def test_keeps_non_record_multiples(self, line_basis):
        x = make_rational([Fraction(1, 3) + Fraction(1, 10**9)])
        scan = small_value_scan(x, line_basis, Fraction(1), 30)
        qs = [r.polynomial.q[0] for r in scan.records]
        assert {3, 6, 9, 12} <= set(qs)
        assert qs == sorted(qs)
        assert scan.exponent == 2

    def test_sharding_does_not_change_candidates(self, sqrt2, line_basis, two_threads):
        single = small_value_scan([sqrt2], line_basis, Fraction(1, 2), 300)
        sharded = small_value_scan([sqrt2], line_basis, Fraction(1, 2), 300, limits=two_threads)
        assert [r.polynomial.q for r in single.records] == [r.polynomial.q for r in sharded.records]

    def test_candidate_cap_warns(self, half, line_basis, package_log):
        limits = DEFAULT_LIMITS.with_overrides(max_shell_candidates=2)
        scan = small_value_scan(half, line_basis, Fraction(1, 2), 8, limits=limits)
        assert scan.truncated
        assert [r.polynomial.q for r in scan.records] == [(1,), (2,)]
        assert any("truncated to cap 2" in r.getMessage() for r in package_log.records)

    def test_clamped_to_truncation(self, line_basis):
        x = make_liouville(10, 3)
        scan = small_value_scan([x], line_basis, Fraction(1), 10**4)
        assert scan.h_max == 100


class TestChooseMethod:
    """Test automatic method selection."""

    def test_small_box_uses_brute(self):
        assert choose_method(1, 1000) is Method.BRUTE

    def test_large_box_uses_lattice(self):
        assert choose_method(5, 10**6) is Method.LATTICE

    def test_respects_limits(self, tight_limits):
        assert choose_method(2, 100, tight_limits) is Method.LATTICE
        assert choose_method(1, 100, tight_limits) is Method.BRUTE
