# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
测试点构造与采样

- 有理点、由定义多项式与隔离区间给出的代数点
- 截断 Liouville 级数 Σ b^(-j!)
- 多项式零点集上的点（k-代数点）
- Lebesgue 与 Cantor 测度的可复现采样

每种点类型在注册表中登记，CLI 的 `--point kind:args` 通过注册表解析。
"""

import logging
import math
import threading
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np
import sympy

from .exceptions import DimensionMismatchError, PointSpecError, RootIsolationError
from .limits import DEFAULT_LIMITS, ResourceGuard, ResourceLimits
from .monomials import rational_coordinates
from .numerics import AlgebraicData, DyadicInterval, RealOracle, format_rational
from .poly import IntPolynomial, certify_zero, eval_enclosure, eval_exact
from .polyparse import parse_polynomial, parse_univariate
from .registry import PointFamily, get_point_registry, point_kind

logger = logging.getLogger(__name__)

_T = sympy.Symbol("t")


class PointKind(str, Enum):
    RATIONAL = "rational"
    ALGEBRAIC = "algebraic"
    LIOUVILLE = "liouville"
    ZERO_SET = "zero"
    LEBESGUE = "lebesgue"
    CANTOR = "cantor"


@dataclass(frozen=True)
class PointSpec:
    """测试点：规范文本与 d 个坐标预言机

    text 是可重新解析的规范形式（代数点保存定义多项式与隔离区间，从不保存小数近似）。
    """

    kind: PointKind
    text: str
    coordinates: tuple[RealOracle, ...] = field(compare=False)
    params: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def d(self) -> int:
        return len(self.coordinates)

    @property
    def label(self) -> str:
        return self.text

    @property
    def exact(self) -> tuple[Fraction, ...] | None:
        return rational_coordinates(self.coordinates)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind.value, "spec": self.text, "d": self.d, **self.params}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PointSpec":
        try:
            return parse_point(str(data["spec"]), int(data["d"]))
        except KeyError as e:
            raise PointSpecError(str(data), f"点序列化缺少字段: {e}") from e


# ============================================================
# 构造器
# ============================================================


def make_rational(values: Sequence[Fraction | int | str]) -> tuple[RealOracle, ...]:
    exact = [Fraction(v) for v in values]
    return tuple(RealOracle.from_rational(v, label=format_rational(v)) for v in exact)


def make_liouville(base: int, terms: int, limits: ResourceLimits | None = None) -> RealOracle:
    """Σ_{j=1..m} b^(-j!) 的精确有理预言机

    元数据记录截断高度 b^((m-1)!)：超过该高度的估计不再反映无穷级数。

    Raises:
        PointSpecError: b < 2 或 m < 1
        ResourceLimitError: b^(m!) 超过大整数预算
    """
    if base < 2 or terms < 1:
        raise PointSpecError(f"liouville:{base},{terms}", "需要 b ≥ 2 且 m ≥ 1")
    ResourceGuard(limits).check_liouville(math.factorial(terms) * base.bit_length())
    value = sum((Fraction(1, base ** math.factorial(j)) for j in range(1, terms + 1)), Fraction(0))
    truncation = base ** math.factorial(terms - 1)
    tail = Fraction(2, base ** math.factorial(terms + 1))
    return RealOracle.from_rational(
        value,
        tag="liouville",
        label=f"liouville({base},{terms})",
        base=base,
        terms=terms,
        truncation_height=truncation,
        tail_bound=str(tail),
    )


def _sign_at(coefficients: Sequence[int], x: Fraction) -> int:
    """整系数多项式在有理点的符号（齐次化为整数运算）"""
    n, d = x.numerator, x.denominator
    degree = len(coefficients) - 1
    total = sum(c * n**i * d ** (degree - i) for i, c in enumerate(coefficients))
    return (total > 0) - (total < 0)


def _sympy_poly(coefficients: Sequence[int]) -> sympy.Poly:
    return sympy.Poly(list(reversed(list(coefficients))), _T, domain="ZZ")


def _to_sympy(x: Fraction) -> sympy.Rational:
    return sympy.Rational(x.numerator, x.denominator)


def _rational_root(poly: sympy.Poly, lo: Fraction, hi: Fraction) -> Fraction | None:
    _, factors = poly.factor_list()
    for factor, _ in factors:
        if factor.degree() == 1:
            a, b = (int(c) for c in factor.all_coeffs())
            root = Fraction(-b, a)
            if lo <= root <= hi:
                return root
    return None


def make_algebraic(
    coefficients: Sequence[int], interval: tuple[Fraction, Fraction], label: str | None = None
) -> RealOracle:
    """由定义多项式（升幂整数系数）与隔离区间构造代数数预言机

    区间内恰有一个实根（sympy Sturm 计数）；有理根直接给出精确值，
    否则对无平方因子部分做二分，query(p) 的宽度 ≤ 2^-p。

    Raises:
        RootIsolationError: 区间内没有根或有多个根
    """
    coefficients = tuple(int(c) for c in coefficients)
    lo, hi = Fraction(interval[0]), Fraction(interval[1])
    text = label or str(_sympy_poly(coefficients).as_expr())
    if lo > hi or len(coefficients) < 2 or not any(coefficients[1:]):
        raise RootIsolationError(text, (str(lo), str(hi)), 0)
    poly = _sympy_poly(coefficients)
    count = int(poly.count_roots(_to_sympy(lo), _to_sympy(hi)))
    if count != 1:
        raise RootIsolationError(text, (str(lo), str(hi)), count)
    data = AlgebraicData(coefficients, (lo, hi))
    meta = {"label": f"root({text})@{lo}:{hi}"}

    root = _rational_root(poly, lo, hi)
    if root is not None:
        return RealOracle(
            query=lambda p: DyadicInterval.from_fraction(root, p),
            tag="algebraic",
            exact=root,
            algebraic=data,
            meta=meta,
        )

    squarefree = [int(c) for c in reversed(poly.sqf_part().all_coeffs())]
    bracket = [lo, hi]
    sign_lo = _sign_at(squarefree, lo)
    lock = threading.Lock()

    def query(p: int) -> DyadicInterval:
        target = Fraction(1, 1 << (p + 2))
        with lock:
            a, b = bracket
            while b - a > target:
                mid = (a + b) / 2
                s = _sign_at(squarefree, mid)
                if s == sign_lo:
                    a = mid
                else:
                    b = mid
            bracket[0], bracket[1] = a, b
        return DyadicInterval.from_bounds(a, b, p + 2)

    logger.debug("algebraic oracle %s on [%s, %s]", text, lo, hi)
    return RealOracle(query=query, tag="algebraic", algebraic=data, meta=meta)


def _slice_coefficients(p: IntPolynomial, free: Sequence[Fraction]) -> tuple[int, ...]:
    """代入前 d-1 个坐标后，关于最后一个坐标的整系数单变量多项式（升幂）"""
    point = [_to_sympy(v) for v in free] + [_T]
    expr = sympy.Integer(p.a0)
    for coeff, exps in zip(p.q, p.basis.exponents):
        if coeff:
            term = sympy.Integer(coeff)
            for v, e in zip(point, exps):
                term *= v**e
            expr += term
    special = sympy.Poly(sympy.expand(expr), _T, domain="QQ")
    values = [Fraction(int(c.p), int(c.q)) for c in reversed(special.all_coeffs())]
    scale = math.lcm(*(v.denominator for v in values))
    ints = [int(v * scale) for v in values]
    g = math.gcd(*ints)
    return tuple(c // g for c in ints) if g else tuple(ints)


def on_zero_set(
    p: IntPolynomial,
    free: Sequence[Fraction | int],
    interval: tuple[Fraction, Fraction] | None = None,
) -> PointSpec:
    """在 P 的零点集上取点：前 d-1 个坐标给定，最后一个坐标为单变量切片的根

    未给出区间时取切片的最大实根。结果在返回前重新验证 P(point) = 0。

    Raises:
        DimensionMismatchError: free 的长度不是 d-1
        PointSpecError: 切片恒为零或在区间内没有实根
    """
    d = p.basis.d
    if len(free) != d - 1:
        raise DimensionMismatchError(d - 1, len(free))
    free = [Fraction(v) for v in free]
    rendered = p.render()
    coefficients = _slice_coefficients(p, free)
    if not any(coefficients):
        raise PointSpecError(rendered, "代入后切片恒为零，根不唯一")
    if not any(coefficients[1:]):
        raise PointSpecError(rendered, "代入后切片为非零常数，没有根")
    if interval is None:
        roots = _sympy_poly(coefficients).intervals()
        if not roots:
            raise PointSpecError(rendered, "切片没有实根")
        (a, b), _ = roots[-1]
        interval = (Fraction(int(a.p), int(a.q)), Fraction(int(b.p), int(b.q)))
    try:
        root = make_algebraic(coefficients, interval)
    except RootIsolationError as e:
        raise PointSpecError(rendered, f"切片在区间内没有唯一实根: {e.message}") from e

    coordinates = (*make_rational(free), root)
    _verify_zero(p, coordinates)
    text = f"zero:{rendered}"
    if free:
        text += "@" + ",".join(format_rational(v) for v in free)
    text += f"@{format_rational(interval[0])}:{format_rational(interval[1])}"
    params = {"polynomial": p.to_dict(), "free": [str(v) for v in free]}
    return PointSpec(PointKind.ZERO_SET, text, coordinates, params)


def _verify_zero(p: IntPolynomial, coordinates: Sequence[RealOracle]) -> None:
    exact = rational_coordinates(coordinates)
    if exact is not None:
        if eval_exact(p, exact) != 0:
            raise PointSpecError(p.render(), "零点验证失败")
        return
    enclosure = eval_enclosure(p, coordinates, 128)
    if not enclosure.contains_zero() or certify_zero(p, coordinates) is False:
        raise PointSpecError(p.render(), "零点验证失败")


# ============================================================
# 采样
# ============================================================


def _generator(seed: np.random.SeedSequence, limits: ResourceLimits) -> np.random.Generator:
    bit_generator = getattr(np.random, limits.rng_algorithm)
    return np.random.Generator(bit_generator(seed))


def _draw(
    kind: PointKind, seed: np.random.SeedSequence, d: int, resolution: int, limits: ResourceLimits
) -> tuple[Fraction, ...]:
    rng = _generator(seed, limits)
    digits = rng.integers(0, 2, size=(d, resolution))
    values = []
    for row in digits:
        if kind is PointKind.LEBESGUE:
            numerator = int("".join(str(int(b)) for b in row), 2) if resolution else 0
            values.append(Fraction(numerator, 1 << resolution))
        else:
            values.append(
                sum((Fraction(2 * int(a), 3 ** (i + 1)) for i, a in enumerate(row)), Fraction(0))
            )
    return tuple(values)


def _sample_spec(
    kind: PointKind,
    seed: int,
    d: int,
    resolution: int,
    index: int | None,
    limits: ResourceLimits,
    child: np.random.SeedSequence | None = None,
) -> PointSpec:
    if child is None:
        root = np.random.SeedSequence(seed)
        child = root if index is None else root.spawn(index + 1)[index]
    values = _draw(kind, child, d, resolution, limits)
    text = f"{kind.value}:{seed},{resolution}" + ("" if index is None else f",{index}")
    coordinates = tuple(
        RealOracle.from_rational(v, tag=kind.value, label=f"{text}#{i}")
        for i, v in enumerate(values)
    )
    params = {"seed": seed, "resolution": resolution, "index": index}
    return PointSpec(kind, text, coordinates, params)


def sample_point(
    kind: PointKind | str,
    seed: int,
    d: int,
    resolution: int,
    limits: ResourceLimits | None = None,
) -> PointSpec:
    """Lebesgue：[0,1]^d 中分辨率为 resolution 位的均匀二进有理点；
    Cantor：坐标 Σ 2a_i 3^(-i)，a_i ∈ {0,1} 独立同分布。对 (kind, seed, d, resolution) 确定。
    """
    limits = limits or DEFAULT_LIMITS
    kind = _sample_kind(kind)
    ResourceGuard(limits).check_resolution(resolution)
    return _sample_spec(kind, seed, d, resolution, None, limits)


def sample_points(
    kind: PointKind | str,
    seed: int,
    d: int,
    resolution: int,
    count: int,
    limits: ResourceLimits | None = None,
) -> list[PointSpec]:
    """用 SeedSequence.spawn 派生子种子批量采样，结果与生成顺序无关"""
    limits = limits or DEFAULT_LIMITS
    kind = _sample_kind(kind)
    ResourceGuard(limits).check_resolution(resolution)
    children = np.random.SeedSequence(seed).spawn(count)
    return [
        _sample_spec(kind, seed, d, resolution, index, limits, child)
        for index, child in enumerate(children)
    ]


def _sample_kind(kind: PointKind | str) -> PointKind:
    try:
        kind = PointKind(kind)
    except ValueError as e:
        raise PointSpecError(str(kind), f"未知的采样类型: {kind}") from e
    if kind not in (PointKind.LEBESGUE, PointKind.CANTOR):
        raise PointSpecError(kind.value, "采样只支持 lebesgue 与 cantor")
    return kind


# ============================================================
# 点类型注册与解析
# ============================================================


def _ints(args: str, counts: tuple[int, ...], spec: str) -> list[int]:
    try:
        values = [int(part) for part in args.split(",") if part.strip()]
    except ValueError as e:
        raise PointSpecError(spec, f"需要整数参数: {args}") from e
    if len(values) not in counts:
        raise PointSpecError(spec, f"参数个数不正确: {args}")
    return values


def _fractions(args: str, spec: str) -> list[Fraction]:
    try:
        return [Fraction(part.strip()) for part in args.split(",") if part.strip()]
    except (ValueError, ZeroDivisionError) as e:
        raise PointSpecError(spec, f"无法解析有理数: {args}") from e


def _interval(text: str, spec: str) -> tuple[Fraction, Fraction]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise PointSpecError(spec, f"区间格式应为 lo:hi: {text}")
    values = _fractions(f"{lo},{hi}", spec)
    return values[0], values[1]


def _check_dimension(spec: PointSpec, d: int) -> PointSpec:
    if spec.d != d:
        raise DimensionMismatchError(d, spec.d)
    return spec


@point_kind(
    "rational",
    PointFamily.EXACT,
    description="有理点",
    syntax="rational:a1/b1,...,ad/bd",
    examples=["rational:1/2", "rational:3/5,4/5"],
)
def build_rational(args: str, d: int) -> PointSpec:
    values = _fractions(args, f"rational:{args}")
    text = "rational:" + ",".join(format_rational(v) for v in values)
    return _check_dimension(PointSpec(PointKind.RATIONAL, text, make_rational(values)), d)


@point_kind(
    "algebraic",
    PointFamily.EXACT,
    description="代数点：每个坐标为定义多项式在隔离区间内的唯一根，或一个有理数",
    syntax="algebraic:poly@lo:hi;...",
    examples=["algebraic:x**2-2@1:2", "algebraic:x**2-x-1@1:2;1/3"],
)
def build_algebraic(args: str, d: int) -> PointSpec:
    coordinates: list[RealOracle] = []
    parts: list[str] = []
    for item in args.split(";"):
        item = item.strip()
        if "@" not in item:
            value = _fractions(item, f"algebraic:{args}")
            coordinates.extend(make_rational(value))
            parts.append(format_rational(value[0]))
            continue
        expression, _, interval_text = item.partition("@")
        coefficients = parse_univariate(expression)
        interval = _interval(interval_text, f"algebraic:{args}")
        coordinates.append(make_algebraic(coefficients, interval, expression.strip()))
        lo, hi = (format_rational(v) for v in interval)
        parts.append(f"{expression.strip()}@{lo}:{hi}")
    text = "algebraic:" + ";".join(parts)
    return _check_dimension(PointSpec(PointKind.ALGEBRAIC, text, tuple(coordinates)), d)


@point_kind(
    "liouville",
    PointFamily.SERIES,
    description="截断 Liouville 级数 Σ_{j≤m} b^(-j!)",
    syntax="liouville:b,m",
    examples=["liouville:10,5", "liouville:2,3"],
)
def build_liouville(args: str, d: int) -> PointSpec:
    base, terms = _ints(args, (2,), f"liouville:{args}")
    oracle = make_liouville(base, terms)
    truncation = str(oracle.meta["truncation_height"])
    params = {"base": base, "terms": terms, "truncation_height": truncation}
    return _check_dimension(
        PointSpec(PointKind.LIOUVILLE, f"liouville:{base},{terms}", (oracle,), params), d
    )


@point_kind(
    "zero",
    PointFamily.ZERO_SET,
    description="多项式零点集上的点：给定前 d-1 个坐标，最后一个坐标取切片的根",
    syntax="zero:poly[@free1,...][@lo:hi]",
    examples=["zero:x1**2+x2**2-1@3/5", "zero:x1*x2-1@2", "zero:x**2-2"],
    aliases=["zero_set"],
)
def build_zero(args: str, d: int) -> PointSpec:
    spec = f"zero:{args}"
    pieces = args.split("@")
    expression, rest = pieces[0], pieces[1:]
    interval = None
    if rest and ":" in rest[-1]:
        interval = _interval(rest.pop(), spec)
    free = _fractions(rest[0], spec) if rest else []
    if len(rest) > 1:
        raise PointSpecError(spec, "零点集规格格式为 poly@free@lo:hi")
    polynomial = parse_polynomial(expression, d)
    return on_zero_set(polynomial, free, interval)


@point_kind(
    "lebesgue",
    PointFamily.SAMPLE,
    description="[0,1]^d 上的均匀二进有理采样",
    syntax="lebesgue:seed,bits[,index]",
    examples=["lebesgue:7,64", "lebesgue:7,64,3"],
)
def build_lebesgue(args: str, d: int) -> PointSpec:
    return _build_sample(PointKind.LEBESGUE, args, d)


@point_kind(
    "cantor",
    PointFamily.SAMPLE,
    description="三分 Cantor 测度采样，坐标三进制展开只含数字 0 与 2",
    syntax="cantor:seed,digits[,index]",
    examples=["cantor:3,20"],
)
def build_cantor(args: str, d: int) -> PointSpec:
    return _build_sample(PointKind.CANTOR, args, d)


def _build_sample(kind: PointKind, args: str, d: int) -> PointSpec:
    values = _ints(args, (2, 3), f"{kind.value}:{args}")
    seed, resolution = values[0], values[1]
    index = values[2] if len(values) == 3 else None
    ResourceGuard().check_resolution(resolution)
    return _sample_spec(kind, seed, d, resolution, index, DEFAULT_LIMITS)


def parse_point(text: str, d: int) -> PointSpec:
    """解析 `kind:args` 形式的点规格

    Raises:
        PointSpecError: 未知类型或参数错误
        DimensionMismatchError: 坐标个数不等于 d
    """
    kind, sep, args = text.strip().partition(":")
    definition = get_point_registry().get(kind)
    if not sep or definition is None:
        known = ", ".join(get_point_registry().list_all())
        raise PointSpecError(text, f"未知的点类型: {kind}（可用: {known}）")
    spec: PointSpec = definition(args, d)
    return spec
