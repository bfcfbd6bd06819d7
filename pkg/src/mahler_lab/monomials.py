# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
单项式空间

总次数 1..k 的 d 元单项式基与 Veronese 映射 f(x)：
- 分级排序：先按次数，同次数块内按 x₁ 优先的字典序降序
- n = C(k+d, d) − 1
- 有理点精确求值，其它点返回有证预言机
"""

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Union

from .exceptions import ConfigError, DimensionMismatchError
from .limits import ResourceGuard, ResourceLimits
from .numerics import DyadicInterval, RationalLike, RealOracle, as_oracle, refine

Coordinate = Union[RealOracle, int, Fraction]


def _exponents_of_degree(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """和为 total 的 parts 元指数向量，字典序降序"""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _exponents_of_degree(total - first, parts - 1):
            yield (first, *rest)


def basis_size(d: int, k: int) -> int:
    """n = C(k+d, d) − 1"""
    return comb(k + d, d) - 1


@dataclass(frozen=True)
class MonomialBasis:
    """单项式基 f = (f_1, ..., f_n)"""

    d: int  # 变量个数
    k: int  # 最高总次数
    exponents: tuple[tuple[int, ...], ...]  # 每个单项式的指数向量

    @property
    def n(self) -> int:
        return len(self.exponents)

    def prefix_length(self, j: int) -> int:
        """次数 ≤ j 的单项式个数 n_j"""
        if not 0 <= j <= self.k:
            raise ValueError(f"次数 {j} 不在 0..{self.k} 内")
        return basis_size(self.d, j)

    def block(self, j: int) -> slice:
        """次数恰为 j 的单项式所在切片"""
        return slice(self.prefix_length(j - 1), self.prefix_length(j))

    def label(self, i: int) -> str:
        """第 i 个单项式的可读形式，如 x1^2*x2"""
        factors = []
        for var, e in enumerate(self.exponents[i], start=1):
            if e == 1:
                factors.append(f"x{var}")
            elif e > 1:
                factors.append(f"x{var}^{e}")
        return "*".join(factors)

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.label(i) for i in range(self.n))

    def to_list(self) -> list[str]:
        """序列化为 "[1,0]" 形式的字符串列表"""
        return ["[" + ",".join(str(e) for e in exps) + "]" for exps in self.exponents]

    @classmethod
    def from_list(cls, items: Sequence[str]) -> "MonomialBasis":
        exponents = tuple(
            tuple(int(part) for part in item.strip("[]").split(",")) for item in items
        )
        if not exponents:
            raise ConfigError("空的单项式基")
        d = len(exponents[0])
        k = max(sum(e) for e in exponents)
        rebuilt = basis(d, k)
        if rebuilt.exponents != exponents:
            raise ConfigError(
                "单项式基的顺序不是标准分级顺序", key="basis", value=list(items)
            )
        return rebuilt


def basis(d: int, k: int, limits: ResourceLimits | None = None) -> MonomialBasis:
    """构造 basis(d, k)

    Raises:
        ConfigError: d < 1 或 k < 1
        ResourceLimitError: n 超过上限
    """
    if d < 1 or k < 1:
        raise ConfigError(f"需要 d ≥ 1 且 k ≥ 1 (d={d}, k={k})")
    ResourceGuard(limits).check_basis(basis_size(d, k))
    exponents = tuple(
        exps for degree in range(1, k + 1) for exps in _exponents_of_degree(degree, d)
    )
    return MonomialBasis(d=d, k=k, exponents=exponents)


# ============================================================
# Veronese 求值
# ============================================================


def _monomial(exps: tuple[int, ...], xs: Sequence[Fraction]) -> Fraction:
    value = Fraction(1)
    for x, e in zip(xs, exps):
        if e:
            value *= x**e
    return value


def rational_coordinates(x: Sequence[Coordinate]) -> tuple[Fraction, ...] | None:
    """所有坐标都有已知有理值时返回它们，否则 None"""
    values = []
    for c in x:
        if isinstance(c, RealOracle):
            if c.exact is None:
                return None
            values.append(c.exact)
        else:
            values.append(Fraction(c))
    return tuple(values)


def _monomial_oracle(exps: tuple[int, ...], coords: Sequence[RealOracle]) -> RealOracle:
    degree = sum(exps)
    coarse = [refine(c, 4) for c in coords]
    bound = max(max(abs(e.lower), abs(e.upper)) for e in coarse) + 1
    guard = degree * int(bound).bit_length() + degree.bit_length() + 2

    def query(p: int) -> DyadicInterval:
        value = DyadicInterval.from_int(1)
        for c, e in zip(coords, exps):
            if e:
                value = value * refine(c, p + guard) ** e
        return value.round_outward(p + 2)

    return RealOracle(query=query, tag="derived", meta={"exponents": exps})


def veronese_eval(
    b: MonomialBasis, x: Sequence[Coordinate]
) -> tuple[Fraction, ...] | tuple[RealOracle, ...]:
    """f(x)：有理点返回精确有理数元组，否则返回每个单项式的预言机

    Raises:
        DimensionMismatchError: 坐标个数不等于 d
    """
    if len(x) != b.d:
        raise DimensionMismatchError(b.d, len(x))
    exact = rational_coordinates(x)
    if exact is not None:
        return tuple(_monomial(exps, exact) for exps in b.exponents)
    coords = [as_oracle(c) for c in x]
    result = []
    for exps in b.exponents:
        if sum(exps) == 1:
            result.append(coords[exps.index(1)])
        else:
            result.append(_monomial_oracle(exps, coords))
    return tuple(result)


def veronese_oracles(b: MonomialBasis, x: Sequence[Coordinate]) -> tuple[RealOracle, ...]:
    """f(x) 统一表示为预言机元组（有理值保留在 exact 字段中）"""
    values = veronese_eval(b, x)
    return tuple(as_oracle(v) for v in values)


def as_coordinates(values: Sequence[RationalLike | RealOracle]) -> tuple[Coordinate, ...]:
    return tuple(v if isinstance(v, RealOracle) else Fraction(v) for v in values)
