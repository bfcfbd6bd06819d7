# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
自检

`mahler-lab selftest` 运行的快速不变量子集。每项检查在秒级完成；
完整规模的验收在测试套件中以 slow 标记运行。
"""

import logging
import math
import time
from collections.abc import Callable
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import numpy as np

from .classify import transference_equality_holds
from .exceptions import MahlerLabError
from .gallery import make_algebraic, make_rational, on_zero_set, sample_points
from .lattice import is_lll_reduced, lll_reduce
from .monomials import basis
from .polyparse import parse_polynomial
from .search import dirichlet_profile, record_scan, weighted_bad_statistic, WeightVector

logger = logging.getLogger(__name__)

# (3 - √5)/2
GOLDEN_BADNESS = (3 - math.sqrt(5)) / 2


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "seconds": f"{self.seconds:.3f}",
        }


# ============================================================
# 检查项
# ============================================================


def _check_basis() -> str:
    b = basis(2, 2)
    assert b.n == 5, f"n={b.n}"
    assert b.to_list() == ["[1,0]", "[0,1]", "[2,0]", "[1,1]", "[0,2]"], b.to_list()
    return "basis(2,2) 有 5 个单项式"


def _check_rational_profile() -> str:
    profile = dirichlet_profile(make_rational([Fraction(1, 2)]), basis(1, 1), [2, 4, 8])
    values = [s.value.exact for s in profile.samples]
    assert values == [Fraction(1), Fraction(1, 2), Fraction(1, 4)], values
    return "x=1/2 时 ε*(Q) = 2/Q"


def _check_golden_badness() -> str:
    phi = make_algebraic((-1, -1, 1), (Fraction(1), Fraction(2)))
    table = record_scan([phi], basis(1, 1), 200)
    c_min = table.c_min
    assert c_min is not None and abs(float(c_min) - GOLDEN_BADNESS) < 1e-5, c_min
    return f"φ 的 c_min ≈ {float(c_min):.6f}"


def _check_zero_set() -> str:
    p = parse_polynomial("x1**2 + x2**2 - 1", 2)
    point = on_zero_set(p, [Fraction(3, 5)])
    table = record_scan(point.coordinates, basis(2, 2), 1)
    assert table.exact_zero, table.to_dict()
    assert table.best is not None
    return f"(3/5, 4/5) 在 k=2 上有精确零 {table.best.polynomial.render()}"


def _check_lll() -> str:
    rng = np.random.Generator(np.random.PCG64(2024))
    for _ in range(5):
        while True:
            rows = [[int(v) for v in rng.integers(-50, 51, size=4)] for _ in range(4)]
            try:
                reduced = lll_reduce(rows)
                break
            except MahlerLabError:
                continue
        assert is_lll_reduced(reduced), reduced
    return "随机 4×4 基约化后满足 LLL 条件"


def _check_bad_statistic() -> str:
    scan = weighted_bad_statistic([Fraction(1, 2)], WeightVector.uniform(1), 2)
    assert scan.minimum.exact == 0, scan.to_dict()
    return "y=1/2 时 Bad 统计量在 q=2 处为 0"


def _check_transference() -> str:
    assert all(transference_equality_holds(n) for n in range(1, 7))
    return "ω = n、λ = 1/n 时两个转移不等式取等号 (n ≤ 6)"


def _check_sampling() -> str:
    first = sample_points("cantor", 7, 2, 32, 3)
    second = sample_points("cantor", 7, 2, 32, 3)
    assert [p.exact for p in first] == [p.exact for p in second]
    return "相同种子的 Cantor 采样可复现"


CHECKS: dict[str, Callable[[], str]] = {
    "basis": _check_basis,
    "rational_profile": _check_rational_profile,
    "golden_badness": _check_golden_badness,
    "zero_set": _check_zero_set,
    "lll": _check_lll,
    "bad_statistic": _check_bad_statistic,
    "transference": _check_transference,
    "sampling": _check_sampling,
}


# ============================================================
# 运行
# ============================================================


def run_selftest(names: list[str] | None = None) -> list[CheckResult]:
    """运行自检，返回每项的结果（失败不抛异常）"""
    results: list[CheckResult] = []
    for name in names or list(CHECKS):
        start = time.perf_counter()
        try:
            detail = CHECKS[name]()
            passed = True
        except (AssertionError, MahlerLabError) as e:
            detail = f"{type(e).__name__}: {e}"
            passed = False
        elapsed = time.perf_counter() - start
        logger.debug("selftest %s: %s (%.3fs)", name, "ok" if passed else "FAILED", elapsed)
        results.append(CheckResult(name, passed, detail, elapsed))
    return results
