# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
格约化与小线性型候选

- lll_reduce: 精确整数 LLL（Gram-Schmidt 以 Gram 行列式 d_i 与整数 λ_ij 表示）
- enumerate_short_vectors: Fincke-Pohst 球内枚举
- small_form_candidates: 构造线性型格 |q·y + p| 小、|q_i| ≤ B_i，约化后取候选
"""

import itertools
import logging
import math
from collections.abc import Sequence
from fractions import Fraction

from .exceptions import ConfigError, DependentBasisError, LatticePrecisionError, WeightVectorError
from .limits import DEFAULT_LIMITS, ResourceLimits
from .numerics import RealOracle, nearest_integer, refine
from .poly import canonical_sign

logger = logging.getLogger(__name__)

LatticeBasis = tuple[tuple[int, ...], ...]
# (q, p)：线性型 q·y + p 的系数与常数
FormCandidate = tuple[tuple[int, ...], int]

DEFAULT_DELTA = Fraction(99, 100)


def _dot(u: Sequence[int], v: Sequence[int]) -> int:
    return sum(a * b for a, b in zip(u, v))


# ============================================================
# LLL
# ============================================================


def lll_reduce(rows: Sequence[Sequence[int]], delta: Fraction = DEFAULT_DELTA) -> LatticeBasis:
    """精确整数 LLL 约化

    Args:
        rows: 线性无关的整数行向量
        delta: Lovász 参数，1/4 < delta < 1

    Returns:
        满足 |μ_ij| ≤ 1/2 与 Lovász 条件的约化基

    Raises:
        ConfigError: delta 不在 (1/4, 1) 内
        DependentBasisError: 行向量线性相关
    """
    delta = Fraction(delta)
    if not Fraction(1, 4) < delta < 1:
        raise ConfigError(f"delta 必须在 (1/4, 1) 内: {delta}", key="delta", value=str(delta))
    n = len(rows)
    if n == 0:
        return ()
    a, c = delta.numerator, delta.denominator
    # 1 起始下标
    b: list[list[int]] = [[]] + [list(r) for r in rows]
    d = [0] * (n + 1)
    d[0] = 1
    lam = [[0] * (n + 1) for _ in range(n + 1)]
    d[1] = _dot(b[1], b[1])
    if d[1] == 0:
        raise DependentBasisError(0)

    def reduce(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l]:
            q = (2 * lam[k][l] + d[l]) // (2 * d[l])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l]
            for i in range(1, l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int, k_max: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(1, k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        new = (d[k - 2] * d[k] + mu * mu) // d[k - 1]
        for i in range(k + 1, k_max + 1):
            t = lam[i][k]
            lam[i][k] = (d[k] * lam[i][k - 1] - mu * t) // d[k - 1]
            lam[i][k - 1] = (new * t + mu * lam[i][k]) // d[k]
        d[k - 1] = new

    k, k_max = 2, 1
    while k <= n:
        if k > k_max:
            k_max = k
            for j in range(1, k + 1):
                u = _dot(b[k], b[j])
                for i in range(1, j):
                    u = (d[i] * u - lam[k][i] * lam[j][i]) // d[i - 1]
                if j < k:
                    lam[k][j] = u
                else:
                    if u == 0:
                        raise DependentBasisError(k - 1)
                    d[k] = u
        reduce(k, k - 1)
        if c * (d[k] * d[k - 2] + lam[k][k - 1] ** 2) < a * d[k - 1] ** 2:
            swap(k, k_max)
            k = max(2, k - 1)
        else:
            for l in range(k - 2, 0, -1):
                reduce(k, l)
            k += 1
    return tuple(tuple(r) for r in b[1:])


def gram_schmidt(rows: Sequence[Sequence[int]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """有理 Gram-Schmidt：返回 (μ, |b*_i|²)"""
    m = len(rows)
    mu = [[Fraction(0)] * m for _ in range(m)]
    star: list[list[Fraction]] = []
    norms: list[Fraction] = []
    for i, row in enumerate(rows):
        v = [Fraction(x) for x in row]
        for j in range(i):
            mu[i][j] = _dot_fraction(row, star[j]) / norms[j]
            v = [x - mu[i][j] * y for x, y in zip(v, star[j])]
        star.append(v)
        norm = _dot_fraction(v, v)
        if norm == 0:
            raise DependentBasisError(i)
        norms.append(norm)
    return mu, norms


def _dot_fraction(u: Sequence[Fraction | int], v: Sequence[Fraction | int]) -> Fraction:
    return sum((Fraction(a) * b for a, b in zip(u, v)), Fraction(0))


def is_lll_reduced(rows: Sequence[Sequence[int]], delta: Fraction = DEFAULT_DELTA) -> bool:
    """检查尺寸约化与 Lovász 条件"""
    mu, norms = gram_schmidt(rows)
    for i in range(len(rows)):
        for j in range(i):
            if abs(mu[i][j]) > Fraction(1, 2):
                return False
    for k in range(1, len(rows)):
        if norms[k] < (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            return False
    return True


# ============================================================
# 球内枚举
# ============================================================


def enumerate_short_vectors(
    rows: Sequence[Sequence[int]],
    radius_sq: int | Fraction,
    node_limit: int = DEFAULT_LIMITS.max_enumeration_nodes,
) -> list[tuple[int, ...]]:
    """枚举范数平方 ≤ radius_sq 的非零格向量（±v 只取其一）"""
    mu, norms = gram_schmidt(rows)
    m = len(rows)
    radius_sq = Fraction(radius_sq)
    x = [0] * m
    found: list[tuple[int, ...]] = []
    nodes = 0
    truncated = False

    def visit(j: int, partial: Fraction) -> None:
        nonlocal nodes, truncated
        if truncated:
            return
        nodes += 1
        if nodes > node_limit:
            truncated = True
            return
        center = -sum((mu[i][j] * x[i] for i in range(j + 1, m)), Fraction(0))
        room = (radius_sq - partial) / norms[j]
        spread = math.sqrt(float(room)) if room > 0 else 0.0
        lo = math.floor(float(center) - spread) - 1
        hi = math.ceil(float(center) + spread) + 1
        if all(v == 0 for v in x[j + 1 :]):
            lo = max(lo, 0)
        for t in range(lo, hi + 1):
            step = (t - center) ** 2 * norms[j]
            if partial + step > radius_sq:
                continue
            x[j] = t
            if j == 0:
                if any(x):
                    found.append(tuple(x))
            else:
                visit(j - 1, partial + step)
        x[j] = 0

    visit(m - 1, Fraction(0))
    if truncated:
        logger.warning("short vector enumeration stopped at %d nodes", node_limit)
    dim = len(rows[0]) if rows else 0
    return [
        tuple(sum(c * rows[i][col] for i, c in enumerate(coeffs)) for col in range(dim))
        for coeffs in found
    ]


# ============================================================
# 线性型格候选
# ============================================================


def _rounded_form(
    y: Sequence[RealOracle], active: Sequence[int], scale: int, precision: int
) -> list[int] | None:
    values = []
    for i in active:
        exact = y[i].exact
        if exact is not None:
            values.append(nearest_integer(scale * exact))
            continue
        enclosure = refine(y[i], precision)
        low = nearest_integer(scale * enclosure.lower)
        high = nearest_integer(scale * enclosure.upper)
        if low != high:
            return None
        values.append(low)
    return values


def small_form_candidates(
    y: Sequence[RealOracle],
    q_bound: int,
    bounds: Sequence[int] | None = None,
    limits: ResourceLimits | None = None,
) -> list[FormCandidate]:
    """用格约化求 |q·y + p| 小且 |q_i| ≤ B_i 的 (q, p) 候选

    Args:
        y: 线性型系数 y = f(x) 的预言机
        q_bound: 尺度 Q
        bounds: 每个坐标的界 B_i，缺省全为 Q；B_i = 0 表示强制 q_i = 0

    Returns:
        (q, p) 列表：q 首个非零分量为正，p 为 -q·y 的最近整数；
        按 (|q|∞, 字典序) 排序，至少含一个候选

    Raises:
        LatticePrecisionError: 取整在重试后仍不稳定
    """
    limits = limits or DEFAULT_LIMITS
    n = len(y)
    bounds = tuple(bounds) if bounds is not None else (q_bound,) * n
    if len(bounds) != n or any(bd < 0 for bd in bounds):
        raise WeightVectorError(list(bounds), "坐标界必须非负且与维数一致")
    active = [i for i in range(n) if bounds[i] > 0]
    if not active:
        raise WeightVectorError(list(bounds), "至少需要一个正的坐标界")
    m = len(active)
    q_bits = q_bound.bit_length()
    p = 64 + m * q_bits
    for _ in range(limits.lattice_retries + 1):
        scale = q_bound ** (m + 1) << p
        rounded = _rounded_form(y, active, scale, p + (m + 1) * q_bits + 4)
        if rounded is not None:
            break
        logger.debug("lattice rounding unstable at p=%d, doubling", p)
        p *= 2
    else:
        raise LatticePrecisionError(p, limits.lattice_retries)

    target = q_bound << p
    weights = [-(-target // bounds[i]) for i in active]
    rows = [[scale] + [0] * m]
    for j in range(m):
        row = [rounded[j]] + [0] * m
        row[j + 1] = weights[j]
        rows.append(row)
    reduced = lll_reduce(rows)

    vectors: set[tuple[int, ...]] = set(reduced)
    head = reduced[: min(4, len(reduced))]
    for coeffs in itertools.product(range(-2, 3), repeat=len(head)):
        if any(coeffs):
            vectors.add(
                tuple(sum(c * r[col] for c, r in zip(coeffs, head)) for col in range(m + 1))
            )
    box = 1
    for i in active:
        box *= bounds[i]
    first = scale // box + 1 + sum(bounds[i] for i in active)
    radius_sq = first**2 + sum((bounds[i] * w) ** 2 for i, w in zip(active, weights))
    vectors.update(enumerate_short_vectors(reduced, radius_sq, limits.max_enumeration_nodes))

    candidates: set[tuple[int, ...]] = set()
    for v in vectors:
        q = [0] * n
        for j, i in enumerate(active):
            q[i] = v[j + 1] // weights[j]
        if any(q) and all(abs(q[i]) <= bounds[i] for i in range(n)):
            candidates.add(canonical_sign(q))
    if not candidates:
        for i in active:
            candidates.add(tuple(1 if j == i else 0 for j in range(n)))
    logger.debug(
        "lattice Q=%d: %d candidates from %d vectors", q_bound, len(candidates), len(vectors)
    )
    result: list[FormCandidate] = []
    for q in sorted(candidates, key=lambda q: (max(abs(c) for c in q), q)):
        form = sum((q[i] * rounded[j] for j, i in enumerate(active)), 0)
        result.append((q, -nearest_integer(Fraction(form, scale))))
    return result
