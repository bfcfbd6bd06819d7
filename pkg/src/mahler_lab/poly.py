# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
整系数多项式

P = a0 + q·f，其中 f 为单项式基，q 为整数系数向量：
- 高度 H(P) 含常数项，H̃(P) = |q|∞ 不含常数项
- 有理点精确求值，预言机点返回有证包围区间
- 至多一个代数坐标时可精确证明 P(x) = 0
"""

from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

import sympy

from .exceptions import ConfigError, DimensionMismatchError
from .monomials import (
    Coordinate,
    MonomialBasis,
    basis,
    rational_coordinates,
    veronese_eval,
    veronese_oracles,
)
from .numerics import DyadicInterval, RealOracle, nearest_integer, refine


@dataclass(frozen=True)
class HeightPair:
    """高度对"""

    full: int  # H(P) = max(|a0|, |q_i|)
    reduced: int  # H̃(P) = max |q_i|

    def to_dict(self) -> dict[str, str]:
        return {"H": str(self.full), "H_tilde": str(self.reduced)}


@dataclass(frozen=True)
class IntPolynomial:
    """P(x) = a0 + Σ q_i f_i(x)"""

    basis: MonomialBasis  # 单项式基
    a0: int  # 常数项
    q: tuple[int, ...]  # 系数向量，长度 = basis.n

    def __post_init__(self) -> None:
        if len(self.q) != self.basis.n:
            raise DimensionMismatchError(self.basis.n, len(self.q))

    @property
    def is_zero(self) -> bool:
        return self.a0 == 0 and not any(self.q)

    def heights(self) -> HeightPair:
        return heights(self)

    def render(self) -> str:
        """可读形式，如 3*x1*x2 - 1"""
        terms: list[str] = []
        for c, label in zip(self.q, self.basis.labels):
            if c:
                coeff = "" if abs(c) == 1 else f"{abs(c)}*"
                terms.append(("-" if c < 0 else "+") + " " + coeff + label.replace("^", "**"))
        if self.a0 or not terms:
            terms.append(("-" if self.a0 < 0 else "+") + " " + str(abs(self.a0)))
        text = " ".join(terms)
        return text[2:] if text.startswith("+ ") else "-" + text[2:]

    def to_dict(self) -> dict[str, Any]:
        return {
            "a0": str(self.a0),
            "q": [str(c) for c in self.q],
            "d": self.basis.d,
            "k": self.basis.k,
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "IntPolynomial":
        try:
            b = basis(int(data["d"]), int(data["k"]))
            return cls(b, int(data["a0"]), tuple(int(c) for c in data["q"]))
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(
                f"无效的多项式序列化: {e}", key="polynomial", value=dict(data)
            ) from e


def heights(p: IntPolynomial) -> HeightPair:
    reduced = max((abs(c) for c in p.q), default=0)
    return HeightPair(full=max(reduced, abs(p.a0)), reduced=reduced)


def canonical_sign(q: Sequence[int]) -> tuple[int, ...]:
    """把首个非零系数变为正"""
    for c in q:
        if c:
            return tuple(q) if c > 0 else tuple(-v for v in q)
    return tuple(q)


# ============================================================
# 求值
# ============================================================


def eval_exact(p: IntPolynomial, x: Sequence[Fraction | int]) -> Fraction:
    """有理点上的精确值"""
    values = veronese_eval(p.basis, [Fraction(c) for c in x])
    return p.a0 + sum((c * v for c, v in zip(p.q, values) if c), Fraction(0))  # type: ignore[misc]


def linear_form_enclosure(
    q: Sequence[int], y: Sequence[RealOracle], p: int
) -> DyadicInterval:
    """q·y 的包围区间，宽度 ≤ 2^-(p+1)"""
    guard = sum(abs(c) for c in q).bit_length() + 1
    total = DyadicInterval.from_int(0)
    for c, oracle in zip(q, y):
        if c:
            total = total + refine(oracle, p + guard) * c
    return total


def eval_enclosure(p: IntPolynomial, x: Sequence[Coordinate], precision: int) -> DyadicInterval:
    """P(x) 的包围区间，宽度 ≤ 2^-precision"""
    y = veronese_oracles(p.basis, x)
    return linear_form_enclosure(p.q, y, precision) + p.a0


def best_constant(q: Sequence[int], y: Sequence[RealOracle], p: int = 64) -> int:
    """a0 = −round(q·y)，使 |a0 + q·y| = ‖q·y‖"""
    values = [o.exact for o in y]
    if all(v is not None for v in values):
        t = sum((c * v for c, v in zip(q, values) if c), Fraction(0))  # type: ignore[operator]
        return -nearest_integer(t)
    return -nearest_integer(linear_form_enclosure(q, y, p).midpoint)


# ============================================================
# 精确零点证明
# ============================================================


def certify_zero(p: IntPolynomial, x: Sequence[Coordinate]) -> bool | None:
    """精确判定 P(x) 是否为 0

    有理点直接求值；恰有一个代数坐标（其余有理）时，用 sympy 求 P 在该坐标上的
    特化多项式与定义多项式的最大公因式，并在隔离区间内数根。其它情形返回 None。
    """
    exact = rational_coordinates(x)
    if exact is not None:
        return eval_exact(p, exact) == 0
    algebraic = [
        i for i, c in enumerate(x) if isinstance(c, RealOracle) and c.algebraic is not None
    ]
    if len(algebraic) != 1:
        return None
    index = algebraic[0]
    for i, c in enumerate(x):
        if i != index and isinstance(c, RealOracle) and c.exact is None:
            return None
    data = x[index].algebraic  # type: ignore[union-attr]
    assert data is not None
    t = sympy.Symbol("t")
    point: list[Any] = []
    for i, c in enumerate(x):
        if i == index:
            point.append(t)
        else:
            value = c.exact if isinstance(c, RealOracle) else Fraction(c)
            assert value is not None
            point.append(sympy.Rational(value.numerator, value.denominator))
    expr = sympy.Integer(p.a0)
    for coeff, exps in zip(p.q, p.basis.exponents):
        if coeff:
            term = sympy.Integer(coeff)
            for v, e in zip(point, exps):
                term *= v**e
            expr += term
    special = sympy.Poly(sympy.expand(expr), t, domain="QQ")
    if special.is_zero:
        return True
    defining = sympy.Poly(list(reversed(data.coefficients)), t, domain="QQ")
    common = sympy.gcd(special, defining)
    if common.degree() < 1:
        return False
    lo, hi = data.interval
    count = common.count_roots(
        sympy.Rational(lo.numerator, lo.denominator), sympy.Rational(hi.numerator, hi.denominator)
    )
    return bool(count >= 1)
