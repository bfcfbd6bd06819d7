# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
精确数值核心

提供整个工具包共享的精确算术：
- 有理数（fractions.Fraction，始终为既约形式）
- 二进分区间 DyadicInterval，端点为 m·2^e，向外取整
- 实数预言机 RealOracle：给定精度 p 返回宽度 ≤ 2^-p 的包围区间
- 到最近整数的距离 int_dist 与三值判定 decide_below
- 有证对数、整数开方与有理幂的包围区间
"""

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from decimal import ROUND_CEILING, ROUND_FLOOR, Decimal, localcontext
from enum import Enum
from fractions import Fraction
from typing import Any, Union

from .cache import RefinementCache
from .exceptions import OracleConvergenceError
from .limits import DEFAULT_LIMITS, ResourceLimits

logger = logging.getLogger(__name__)

Rational = Fraction
RationalLike = Union[int, Fraction]


def _to_fraction(mantissa: int, exponent: int) -> Fraction:
    if exponent >= 0:
        return Fraction(mantissa << exponent)
    return Fraction(mantissa, 1 << -exponent)


def _floor_scaled(x: Fraction, p: int) -> int:
    """floor(x·2^p)"""
    if p >= 0:
        return (x.numerator << p) // x.denominator
    return x.numerator // (x.denominator << -p)


def _ceil_scaled(x: Fraction, p: int) -> int:
    """ceil(x·2^p)"""
    return -_floor_scaled(-x, p)


# ============================================================
# 二进分区间
# ============================================================


@dataclass(frozen=True)
class DyadicInterval:
    """二进分区间 [lo·2^exponent, hi·2^exponent]

    所有运算结果都包含真实结果；需要截断时向外取整。
    """

    lo: int  # 下端尾数
    hi: int  # 上端尾数
    exponent: int  # 共享的二进制指数

    def __post_init__(self) -> None:
        if self.lo > self.hi:
            raise ValueError(f"区间端点逆序: {self.lo} > {self.hi}")

    # ---------- 构造 ----------

    @classmethod
    def from_int(cls, n: int) -> "DyadicInterval":
        """退化区间 [n, n]"""
        return cls(n, n, 0)

    @classmethod
    def from_fraction(cls, x: RationalLike, p: int) -> "DyadicInterval":
        """把有理数向外取整到 2^-p 网格；x 可在网格上表示时结果精确"""
        x = Fraction(x)
        if x.denominator == 1:
            n = x.numerator
            return cls(n, n, 0)
        return cls(_floor_scaled(x, p), _ceil_scaled(x, p), -p)

    @classmethod
    def from_bounds(cls, lower: RationalLike, upper: RationalLike, p: int) -> "DyadicInterval":
        """包含 [lower, upper] 的 2^-p 网格区间"""
        lower, upper = Fraction(lower), Fraction(upper)
        return cls(_floor_scaled(lower, p), _ceil_scaled(upper, p), -p)

    # ---------- 属性 ----------

    @property
    def lower(self) -> Fraction:
        return _to_fraction(self.lo, self.exponent)

    @property
    def upper(self) -> Fraction:
        return _to_fraction(self.hi, self.exponent)

    @property
    def width(self) -> Fraction:
        return _to_fraction(self.hi - self.lo, self.exponent)

    @property
    def midpoint(self) -> Fraction:
        return (self.lower + self.upper) / 2

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: RationalLike) -> bool:
        return self.lower <= Fraction(x) <= self.upper

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def intersects(self, other: "DyadicInterval") -> bool:
        return self.lower <= other.upper and other.lower <= self.upper

    def definitely_below(self, other: "DyadicInterval") -> bool:
        """self 中每个点都严格小于 other 中每个点"""
        return self.upper < other.lower

    # ---------- 算术 ----------

    def _aligned(self, other: "DyadicInterval") -> tuple[int, int, int, int, int]:
        e = min(self.exponent, other.exponent)
        s1, s2 = self.exponent - e, other.exponent - e
        return self.lo << s1, self.hi << s1, other.lo << s2, other.hi << s2, e

    def __add__(self, other: "DyadicInterval | int") -> "DyadicInterval":
        if isinstance(other, int):
            other = DyadicInterval.from_int(other)
        a, b, c, d, e = self._aligned(other)
        return DyadicInterval(a + c, b + d, e)

    __radd__ = __add__

    def __neg__(self) -> "DyadicInterval":
        return DyadicInterval(-self.hi, -self.lo, self.exponent)

    def __sub__(self, other: "DyadicInterval | int") -> "DyadicInterval":
        return self + (-other)

    def __rsub__(self, other: int) -> "DyadicInterval":
        return (-self) + other

    def __mul__(self, other: "DyadicInterval | int") -> "DyadicInterval":
        if isinstance(other, int):
            if other >= 0:
                return DyadicInterval(self.lo * other, self.hi * other, self.exponent)
            return DyadicInterval(self.hi * other, self.lo * other, self.exponent)
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return DyadicInterval(min(products), max(products), self.exponent + other.exponent)

    __rmul__ = __mul__

    def __abs__(self) -> "DyadicInterval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return DyadicInterval(0, max(-self.lo, self.hi), self.exponent)

    def __pow__(self, k: int) -> "DyadicInterval":
        if k < 0:
            raise ValueError("负指数不受支持")
        result = DyadicInterval.from_int(1)
        for _ in range(k):
            result = result * self
        if k % 2 == 0 and self.contains_zero():
            result = DyadicInterval(0, result.hi, result.exponent)
        return result

    def round_outward(self, p: int) -> "DyadicInterval":
        """向外取整到 2^-p 网格；已足够粗时原样返回"""
        if self.exponent >= -p:
            return self
        shift = -p - self.exponent
        return DyadicInterval(self.lo >> shift, -((-self.hi) >> shift), -p)

    def hull(self, other: "DyadicInterval") -> "DyadicInterval":
        a, b, c, d, e = self._aligned(other)
        return DyadicInterval(min(a, c), max(b, d), e)

    def maximum(self, other: "DyadicInterval") -> "DyadicInterval":
        """{max(s, t) : s ∈ self, t ∈ other} 的包围"""
        a, b, c, d, e = self._aligned(other)
        return DyadicInterval(max(a, c), max(b, d), e)

    def minimum(self, other: "DyadicInterval") -> "DyadicInterval":
        a, b, c, d, e = self._aligned(other)
        return DyadicInterval(min(a, c), min(b, d), e)

    # ---------- 序列化 ----------

    def to_dict(self) -> dict[str, str]:
        return {"lo": str(self.lo), "hi": str(self.hi), "exponent": str(self.exponent)}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DyadicInterval":
        return cls(int(data["lo"]), int(data["hi"]), int(data["exponent"]))

    def to_decimal_pair(self, digits: int = 20) -> tuple[str, str]:
        """向外取整的十进制端点（仍是合法包围）"""
        lower, upper = self.lower, self.upper
        with localcontext() as ctx:
            ctx.prec = digits
            ctx.rounding = ROUND_FLOOR
            lo = Decimal(lower.numerator) / Decimal(lower.denominator)
            ctx.rounding = ROUND_CEILING
            hi = Decimal(upper.numerator) / Decimal(upper.denominator)
        return str(lo), str(hi)

    def __float__(self) -> float:
        return float(self.midpoint)


# ============================================================
# 实数预言机
# ============================================================


@dataclass(frozen=True)
class AlgebraicData:
    """代数坐标的精确描述：定义多项式（升幂整数系数）与隔离区间"""

    coefficients: tuple[int, ...]  # a_0, a_1, ..., a_deg
    interval: tuple[Fraction, Fraction]  # 只含一个根的闭区间


@dataclass(frozen=True, eq=False)
class RealOracle:
    """实数预言机

    query(p) 返回包含该实数的区间，宽度目标为 2^-p；
    refine 负责在宽度不达标时提升内部精度并缓存结果。
    """

    query: Callable[[int], DyadicInterval]  # 精度 → 包围区间
    tag: str  # 来源标签：rational / algebraic / liouville / lebesgue / cantor / derived
    exact: Fraction | None = None  # 已知有理值
    algebraic: AlgebraicData | None = None  # 代数坐标信息
    meta: Mapping[str, Any] = field(default_factory=dict)  # 其它元数据（截断高度等）
    cache: RefinementCache = field(default_factory=RefinementCache, repr=False)

    def __call__(self, p: int) -> DyadicInterval:
        return refine(self, p)

    @classmethod
    def from_rational(cls, value: RationalLike, tag: str = "rational", **meta: Any) -> "RealOracle":
        """有理数的预言机（网格可表示时区间退化为点）"""
        value = Fraction(value)
        return cls(
            query=lambda p: DyadicInterval.from_fraction(value, p),
            tag=tag,
            exact=value,
            meta=dict(meta),
        )


def refine(oracle: RealOracle, p: int, limits: ResourceLimits | None = None) -> DyadicInterval:
    """返回宽度 ≤ 2^-p 的包围区间

    Raises:
        OracleConvergenceError: 迭代上限内未达到精度
    """
    p = max(p, 0)
    hit, cached = oracle.cache.get(p)
    if hit:
        return cached  # type: ignore[no-any-return]
    target = Fraction(1, 1 << p)
    cap = (limits or DEFAULT_LIMITS).oracle_iteration_cap
    extra = 0
    for _ in range(cap):
        enclosure = oracle.query(p + extra)
        if enclosure.width <= target:
            oracle.cache.put(p, enclosure)
            return enclosure
        extra += max(8, p // 2)
        logger.debug("oracle %s: escalating to %d extra bits", oracle.tag, extra)
    raise OracleConvergenceError(oracle.tag, p, cap)


def as_oracle(value: "RealOracle | RationalLike") -> RealOracle:
    if isinstance(value, RealOracle):
        return value
    return RealOracle.from_rational(value)


# ============================================================
# 到整数的距离与三值判定
# ============================================================


def int_dist(v: DyadicInterval) -> DyadicInterval:
    """{‖t‖ : t ∈ v} 的包围，‖t‖ 为 t 到最近整数的距离，结果 ⊆ [0, 1/2]"""
    e = min(v.exponent, -1)
    shift = v.exponent - e
    lo, hi = v.lo << shift, v.hi << shift
    one = 1 << -e
    half = one >> 1
    if hi - lo >= one:
        return DyadicInterval(0, half, e)
    base = (lo // one) * one
    a, b = lo - base, hi - base  # 0 ≤ a < one, b < 2·one

    def dist(t: int) -> int:
        return min(t, abs(t - one), abs(t - 2 * one))

    has_integer = a == 0 or a <= one <= b
    has_half = a <= half <= b or a <= one + half <= b
    low = 0 if has_integer else min(dist(a), dist(b))
    high = half if has_half else max(dist(a), dist(b))
    return DyadicInterval(low, high, e)


class Verdict(str, Enum):
    """三值判定结果"""

    YES = "yes"
    NO = "no"
    UNDECIDED = "undecided"


def decide_below(
    stream: Callable[[int], DyadicInterval],
    threshold: RationalLike,
    p_max: int,
    p_start: int = 16,
) -> Verdict:
    """判定 stream 所包围的值是否严格小于 threshold

    逐步加倍精度；值恰好等于阈值时在 p_max 处返回 UNDECIDED。
    """
    threshold = Fraction(threshold)
    p = min(p_start, p_max)
    while True:
        enclosure = stream(p)
        if enclosure.upper < threshold:
            return Verdict.YES
        if enclosure.lower > threshold:
            return Verdict.NO
        if p >= p_max:
            return Verdict.UNDECIDED
        p = min(2 * p, p_max)


# ============================================================
# 整数开方、对数与有理幂
# ============================================================


def iroot(n: int, k: int) -> int:
    """floor(n^(1/k))，n ≥ 0"""
    if n < 0 or k < 1:
        raise ValueError("iroot 需要 n ≥ 0 且 k ≥ 1")
    if n < 2 or k == 1:
        return n
    x = 1 << ((n.bit_length() + k - 1) // k)
    while True:
        y = ((k - 1) * x + n // x ** (k - 1)) // k
        if y >= x:
            return x
        x = y


def iroot_ceil(n: int, k: int) -> int:
    """ceil(n^(1/k))"""
    r = iroot(n, k)
    return r if r**k == n else r + 1


def _log2_fixed_bits(y: int, width: int, bits: int, round_up: bool) -> int:
    two = 2 << width
    s = 0
    for _ in range(bits):
        sq = y * y
        y = -((-sq) >> width) if round_up else sq >> width
        s <<= 1
        if y >= two:
            s |= 1
            y = (y + 1) >> 1 if round_up else y >> 1
    return s


def log2_enclosure(x: RationalLike, bits: int = 64) -> tuple[Fraction, Fraction]:
    """log2(x) 的有证包围 [lo, hi]，宽度约 2^-(bits-1)，x > 0"""
    x = Fraction(x)
    if x <= 0:
        raise ValueError("log2 需要正数")
    e = x.numerator.bit_length() - x.denominator.bit_length()
    m = x / Fraction(2) ** e
    if m < 1:
        e -= 1
        m *= 2
    elif m >= 2:
        e += 1
        m /= 2
    if m == 1:
        return Fraction(e), Fraction(e)
    width = bits + 16
    s_lo = _log2_fixed_bits(_floor_scaled(m, width), width, bits, round_up=False)
    s_hi = _log2_fixed_bits(_ceil_scaled(m, width), width, bits, round_up=True)
    scale = Fraction(1, 1 << bits)
    return e + s_lo * scale, e + (s_hi + 1) * scale


def log_ratio_lower(value: RationalLike, height: int, bits: int = 64) -> Fraction:
    """log(1/value)/log(height) 的有证下界（height ≥ 2, 0 < value），下界截断于 0"""
    if height < 2:
        raise ValueError("高度必须 ≥ 2")
    numerator, _ = log2_enclosure(1 / Fraction(value), bits)
    _, denominator = log2_enclosure(height, bits)
    return max(Fraction(0), numerator / denominator)


def pow_enclosure(v: DyadicInterval, exponent: Fraction, p: int) -> DyadicInterval:
    """{t^exponent : t ∈ v} 的 2^-p 网格包围；要求 v ≥ 0, exponent > 0"""
    if v.lo < 0 or exponent <= 0:
        raise ValueError("pow_enclosure 需要非负区间与正指数")
    a, b = exponent.numerator, exponent.denominator
    low = _floor_scaled(v.lower**a, b * p)
    high = _ceil_scaled(v.upper**a, b * p)
    return DyadicInterval(iroot(low, b), iroot_ceil(high, b), -p)


def nearest_integer(x: Fraction) -> int:
    """最近整数，半整数向上取"""
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def parse_rational(text: str) -> Fraction:
    """解析 "3/5"、"-2"、"0.25" 形式的有理数"""
    return Fraction(text.strip())


def format_rational(x: RationalLike) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"
