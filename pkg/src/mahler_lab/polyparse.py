# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
多项式表达式解析器

基于 simpleeval 的安全解析，提供：
- "x1**2 + x2**2 - 1" 形式的整系数多项式解析
- 只允许 + - * ** 与整数常量，不允许除法、函数调用和属性访问
- 结果转换为单项式基上的 IntPolynomial 或单变量升幂系数
"""

import ast
import operator
from collections.abc import Callable
from typing import Any, Union

from simpleeval import InvalidExpression, SimpleEval

from .exceptions import PolynomialParseError
from .monomials import basis
from .poly import IntPolynomial

MAX_EXPONENT = 64

Exponents = tuple[int, ...]


# ============================================================
# 稀疏多项式
# ============================================================


class SparsePolynomial:
    """以指数向量为键的稀疏整系数多项式，只在解析期间使用"""

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms: dict[Exponents, int] | None = None):
        self.d = d
        self.terms = {e: c for e, c in (terms or {}).items() if c}

    @classmethod
    def constant(cls, d: int, value: int) -> "SparsePolynomial":
        return cls(d, {(0,) * d: value})

    @classmethod
    def variable(cls, d: int, index: int) -> "SparsePolynomial":
        exps = tuple(1 if i == index else 0 for i in range(d))
        return cls(d, {exps: 1})

    def _coerce(self, other: Any) -> "SparsePolynomial":
        if isinstance(other, SparsePolynomial):
            return other
        if isinstance(other, bool) or not isinstance(other, int):
            raise TypeError(f"只允许整数系数: {other!r}")
        return SparsePolynomial.constant(self.d, other)

    def __add__(self, other: Any) -> "SparsePolynomial":
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, 0) + c
        return SparsePolynomial(self.d, terms)

    __radd__ = __add__

    def __neg__(self) -> "SparsePolynomial":
        return SparsePolynomial(self.d, {e: -c for e, c in self.terms.items()})

    def __pos__(self) -> "SparsePolynomial":
        return self

    def __sub__(self, other: Any) -> "SparsePolynomial":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Any) -> "SparsePolynomial":
        return self._coerce(other) + (-self)

    def __mul__(self, other: Any) -> "SparsePolynomial":
        other = self._coerce(other)
        terms: dict[Exponents, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                terms[e] = terms.get(e, 0) + c1 * c2
        return SparsePolynomial(self.d, terms)

    __rmul__ = __mul__

    def __pow__(self, exponent: Any) -> "SparsePolynomial":
        if isinstance(exponent, SparsePolynomial):
            degree_zero = (0,) * self.d
            if set(exponent.terms) - {degree_zero}:
                raise TypeError("指数必须是整数常量")
            exponent = exponent.terms.get(degree_zero, 0)
        if isinstance(exponent, bool) or not isinstance(exponent, int):
            raise TypeError(f"指数必须是整数: {exponent!r}")
        if not 0 <= exponent <= MAX_EXPONENT:
            raise TypeError(f"指数必须在 0..{MAX_EXPONENT} 内: {exponent}")
        result = SparsePolynomial.constant(self.d, 1)
        for _ in range(exponent):
            result = result * self
        return result

    def __rpow__(self, base: Any) -> "SparsePolynomial":
        return self._coerce(base) ** self

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)


def _power(base: Any, exponent: Any) -> Any:
    if isinstance(base, int) and isinstance(exponent, int):
        if not 0 <= exponent <= MAX_EXPONENT:
            raise TypeError(f"指数必须在 0..{MAX_EXPONENT} 内: {exponent}")
        return base**exponent
    return base**exponent


OPERATORS: dict[type, Callable[..., Any]] = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Pow: _power,
    ast.USub: operator.neg,
    ast.UAdd: operator.pos,
}


def variable_names(d: int) -> dict[str, SparsePolynomial]:
    """x1..xd；d = 1 时也接受 x"""
    names = {f"x{i + 1}": SparsePolynomial.variable(d, i) for i in range(d)}
    if d == 1:
        names["x"] = names["x1"]
    return names


def parse_sparse(expression: str, d: int) -> SparsePolynomial:
    """解析为稀疏多项式

    Raises:
        PolynomialParseError: 语法错误、未知名称、非整数常量或不允许的运算
    """
    evaluator = SimpleEval(operators=OPERATORS, functions={}, names=variable_names(d))
    try:
        value: Union[SparsePolynomial, int] = evaluator.eval(expression.strip())
    except (InvalidExpression, SyntaxError, TypeError, KeyError) as e:
        raise PolynomialParseError(expression, f"无法解析多项式 {expression}: {e}") from e
    if isinstance(value, SparsePolynomial):
        return value
    if isinstance(value, bool) or not isinstance(value, int):
        raise PolynomialParseError(expression, f"多项式必须是整系数: {expression}")
    return SparsePolynomial.constant(d, value)


def parse_polynomial(expression: str, d: int, k: int | None = None) -> IntPolynomial:
    """解析为 basis(d, k) 上的 IntPolynomial；k 缺省为多项式的总次数（至少 1）"""
    sparse = parse_sparse(expression, d)
    degree = sparse.degree
    if k is None:
        k = max(degree, 1)
    if degree > k:
        raise PolynomialParseError(expression, f"多项式次数 {degree} 超过 k={k}")
    b = basis(d, k)
    index = {e: i for i, e in enumerate(b.exponents)}
    q = [0] * b.n
    a0 = 0
    for exps, c in sparse.terms.items():
        if sum(exps) == 0:
            a0 = c
        else:
            q[index[exps]] = c
    return IntPolynomial(b, a0, tuple(q))


def parse_univariate(expression: str) -> tuple[int, ...]:
    """解析单变量多项式，返回升幂系数 (a_0, ..., a_deg)"""
    sparse = parse_sparse(expression, 1)
    degree = sparse.degree
    coefficients = [0] * (degree + 1)
    for (e,), c in sparse.terms.items():
        coefficients[e] = c
    return tuple(coefficients)
