"""
Pytest configuration and fixtures for mahler-lab tests.
"""

import logging
import math
from fractions import Fraction

import pytest

from mahler_lab import (
    DEFAULT_LIMITS,
    MonomialBasis,
    RealOracle,
    ResourceLimits,
    basis,
    make_algebraic,
    make_liouville,
    make_rational,
)

# ============================================================
# Constants
# ============================================================

PHI = (1 + math.sqrt(5)) / 2
SQRT2 = math.sqrt(2)
GOLDEN_BADNESS = (3 - math.sqrt(5)) / 2
SQRT2_BADNESS = 2 * (3 - 2 * math.sqrt(2))


# ============================================================
# Point Fixtures
# ============================================================


@pytest.fixture
def phi() -> RealOracle:
    """Golden ratio as the root of x^2 - x - 1 in [1, 2]."""
    return make_algebraic((-1, -1, 1), (Fraction(1), Fraction(2)))


@pytest.fixture
def sqrt2() -> RealOracle:
    """Square root of two as the root of x^2 - 2 in [1, 2]."""
    return make_algebraic((-2, 0, 1), (Fraction(1), Fraction(2)))


@pytest.fixture
def half() -> tuple[RealOracle, ...]:
    """The rational point (1/2)."""
    return make_rational([Fraction(1, 2)])


@pytest.fixture
def circle_point() -> tuple[RealOracle, ...]:
    """The rational point (3/5, 4/5) on the unit circle."""
    return make_rational([Fraction(3, 5), Fraction(4, 5)])


@pytest.fixture
def liouville() -> RealOracle:
    """Liouville-type point with base 10 and four terms."""
    return make_liouville(10, 4)


# ============================================================
# Basis Fixtures
# ============================================================


@pytest.fixture
def line_basis() -> MonomialBasis:
    """basis(1, 1)."""
    return basis(1, 1)


@pytest.fixture
def conic_basis() -> MonomialBasis:
    """basis(2, 2)."""
    return basis(2, 2)


# ============================================================
# Limit Fixtures
# ============================================================


@pytest.fixture
def tight_limits() -> ResourceLimits:
    """Small caps for resource refusal tests."""
    return DEFAULT_LIMITS.with_overrides(
        max_brute_evaluations=1000,
        max_basis_size=10,
        max_resolution=64,
        max_liouville_bits=256,
    )


@pytest.fixture
def two_threads() -> ResourceLimits:
    """Two workers and small chunks so sharding really happens."""
    return DEFAULT_LIMITS.with_overrides(threads=2, chunk_size=64)


@pytest.fixture
def package_log(caplog):
    """caplog attached to the package logger, which stops propagating once the CLI runs."""
    logger = logging.getLogger("mahler_lab")
    logger.addHandler(caplog.handler)
    caplog.set_level(logging.WARNING, logger="mahler_lab")
    yield caplog
    logger.removeHandler(caplog.handler)


# ============================================================
# Helper Functions
# ============================================================


def assert_encloses(lower: Fraction, upper: Fraction, value: float, slack: float = 1e-12) -> None:
    """Helper to assert a certified interval contains a float reference value."""
    assert float(lower) - slack <= value <= float(upper) + slack, (lower, upper, value)
