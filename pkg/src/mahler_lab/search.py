# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
逼近搜索

在系数空间中搜索使 |P(x)| 小的整系数多项式：
- 两阶段搜索：numpy 定点筛选系数盒，再对幸存候选做精确或区间证明
- 记录表：按搜索高度 H̃ = |q|∞ 递增、|P(x)| 严格递减的逐次最小
- Dirichlet 剖面 ε*(Q) 与奇异性趋势判定
- 加权 ε*、加权 Bad(r) 统计量以及一维倍数扫描
- 系数盒按索引区间分片并行，分片结果以结合的最小运算合并
"""

import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

import numpy as np

from .exceptions import ConfigError, WeightVectorError
from .lattice import small_form_candidates
from .limits import DEFAULT_LIMITS, ResourceGuard, ResourceLimits
from .monomials import Coordinate, MonomialBasis, as_coordinates, veronese_oracles
from .numerics import (
    DyadicInterval,
    RealOracle,
    int_dist,
    iroot,
    log_ratio_lower,
    nearest_integer,
    pow_enclosure,
    refine,
)
from .poly import HeightPair, IntPolynomial, certify_zero, heights, linear_form_enclosure

logger = logging.getLogger(__name__)

_INT64_MAX = np.iinfo(np.int64).max


class Method(str, Enum):
    """搜索方法"""

    BRUTE = "brute"  # 系数盒穷举
    LATTICE = "lattice"  # 格约化候选


# ============================================================
# 有证数值
# ============================================================


@dataclass(frozen=True)
class CertifiedValue:
    """有证数值：包围区间，已知时附带精确有理值"""

    enclosure: DyadicInterval
    exact: Fraction | None = None

    @classmethod
    def of_fraction(cls, value: Fraction, p: int) -> "CertifiedValue":
        return cls(DyadicInterval.from_fraction(value, p), value)

    @property
    def lower(self) -> Fraction:
        return self.exact if self.exact is not None else self.enclosure.lower

    @property
    def upper(self) -> Fraction:
        return self.exact if self.exact is not None else self.enclosure.upper

    @property
    def is_zero(self) -> bool:
        return self.exact == 0 or (self.enclosure.lo == 0 and self.enclosure.hi == 0)

    def below(self, other: "CertifiedValue") -> bool | None:
        """有证的 self < other；无法判定时返回 None"""
        if self.upper < other.lower:
            return True
        if self.lower >= other.upper:
            return False
        return None

    def scaled(self, factor: int) -> "CertifiedValue":
        exact = self.exact * factor if self.exact is not None else None
        return CertifiedValue(self.enclosure * factor, exact)

    def to_dict(self, digits: int = 20) -> dict[str, Any]:
        lo, hi = self.enclosure.to_decimal_pair(digits)
        data: dict[str, Any] = {"interval": [lo, hi], "enclosure": self.enclosure.to_dict()}
        if self.exact is not None:
            data["exact"] = str(self.exact)
        return data


def _maximum(values: Sequence[CertifiedValue], p: int) -> CertifiedValue:
    if all(v.exact is not None for v in values):
        best = max(v.exact for v in values)  # type: ignore[type-var]
        return CertifiedValue.of_fraction(best, p)  # type: ignore[arg-type]
    enclosure = values[0].enclosure
    for v in values[1:]:
        enclosure = enclosure.maximum(v.enclosure)
    return CertifiedValue(enclosure)


def _height(q: Sequence[int]) -> int:
    return max(abs(c) for c in q)


# ============================================================
# 权重
# ============================================================


@dataclass(frozen=True)
class WeightVector:
    """权重向量 r：非负有理分量，和为 1"""

    weights: tuple[Fraction, ...]

    def __post_init__(self) -> None:
        if not self.weights:
            raise WeightVectorError([], "权重向量不能为空")
        if any(r < 0 for r in self.weights):
            raise WeightVectorError([str(r) for r in self.weights], "权重必须非负")
        if sum(self.weights) != 1:
            raise WeightVectorError([str(r) for r in self.weights], "权重之和必须为 1")

    @classmethod
    def uniform(cls, n: int) -> "WeightVector":
        return cls(tuple(Fraction(1, n) for _ in range(n)))

    @classmethod
    def parse(cls, text: str) -> "WeightVector":
        """解析 "1/2,1/4,1/4" """
        try:
            return cls(tuple(Fraction(part.strip()) for part in text.split(",")))
        except (ValueError, ZeroDivisionError) as e:
            raise WeightVectorError(text, f"无法解析权重: {text}") from e

    @property
    def n(self) -> int:
        return len(self.weights)

    @property
    def is_uniform(self) -> bool:
        return all(r == Fraction(1, self.n) for r in self.weights)

    @property
    def is_prefix_form(self) -> bool:
        """前 m 个分量为 1/m，其余为 0"""
        m = sum(1 for r in self.weights if r)
        return all(r == Fraction(1, m) for r in self.weights[:m]) and not any(self.weights[m:])

    def box(self, q_bound: int) -> tuple[int, ...]:
        """可行系数盒 |q_i| ≤ floor(Q^(n·r_i))，r_i = 0 时 q_i = 0"""
        bounds = []
        for r in self.weights:
            e = self.n * r
            bounds.append(iroot(q_bound**e.numerator, e.denominator) if r else 0)
        return tuple(bounds)

    def to_list(self) -> list[str]:
        return [str(r) for r in self.weights]


def prefix_weights(b: MonomialBasis, k: int) -> WeightVector:
    """r_k：在 basis(d, M) 的前 n_k 个坐标上取 1/n_k，其余为 0"""
    n_k = b.prefix_length(k)
    return WeightVector(tuple(Fraction(1, n_k) if i < n_k else Fraction(0) for i in range(b.n)))


def admissible_box(weights: WeightVector, q_bound: int) -> tuple[int, ...]:
    return weights.box(q_bound)


# ============================================================
# 记录与记录表
# ============================================================


@dataclass(frozen=True)
class ApproximationRecord:
    """一条逼近记录"""

    polynomial: IntPolynomial  # 见证多项式，常数项取最近整数
    heights: HeightPair  # (H, H̃)
    value: CertifiedValue  # |P(x)| 的有证值
    exact_zero: bool  # 是否精确为零
    ratio: Fraction | None  # log(1/|P(x)|)/log H 的有证下界，H ≥ 2 且非零时给出

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.heights.to_dict(),
            "polynomial": self.polynomial.to_dict(),
            "expr": self.polynomial.render(),
            "value": self.value.to_dict(),
            "exact_zero": self.exact_zero,
            "ratio": None if self.ratio is None else str(self.ratio),
        }


@dataclass
class RecordTable:
    """逐次最小记录表"""

    label: str
    d: int
    k: int
    method: Method
    q_max: int
    entries: list[ApproximationRecord] = field(default_factory=list)
    # 无法与记录比较的候选
    undecided: list[ApproximationRecord] = field(default_factory=list)

    @property
    def exact_zero(self) -> bool:
        return bool(self.entries) and self.entries[-1].exact_zero

    @property
    def best(self) -> ApproximationRecord | None:
        return self.entries[-1] if self.entries else None

    @property
    def c_min(self) -> Fraction | None:
        """min |P(x)|·H̃^n 的有证上界"""
        n = self.entries[0].polynomial.basis.n if self.entries else 0
        values = [e.value.upper * e.heights.reduced**n for e in self.entries]
        return min(values) if values else None

    def to_dict(self) -> dict[str, Any]:
        c_min = self.c_min
        return {
            "point": self.label,
            "d": self.d,
            "k": self.k,
            "method": self.method.value,
            "Q_max": str(self.q_max),
            "entries": [e.to_dict() for e in self.entries],
            "undecided": [e.to_dict() for e in self.undecided],
            "exact_zero": self.exact_zero,
            "c_min": None if c_min is None else str(c_min),
        }


@dataclass(frozen=True)
class EpsilonSample:
    """ε*(Q) 的一个样本"""

    q_bound: int
    value: CertifiedValue
    witness: IntPolynomial | None

    def to_dict(self) -> dict[str, Any]:
        return {
            "Q": str(self.q_bound),
            "eps": self.value.to_dict(),
            "witness": None if self.witness is None else self.witness.render(),
        }


class ProfileVerdict(str, Enum):
    SINGULAR_TREND = "singular-trend"
    NON_SINGULAR = "non-singular"


@dataclass
class DirichletProfile:
    """Dirichlet 剖面"""

    label: str
    d: int
    k: int
    method: Method
    weights: WeightVector | None
    samples: list[EpsilonSample]

    def _thirds(self) -> tuple[list[EpsilonSample], list[EpsilonSample]]:
        size = max(1, len(self.samples) // 3)
        return self.samples[:size], self.samples[-size:]

    @property
    def verdict(self) -> ProfileVerdict:
        """尾部三分之一的上确界 < 头部三分之一最大值的一半时判为奇异趋势"""
        head, tail = self._thirds()
        head_max = max(s.value.lower for s in head)
        tail_max = max(s.value.upper for s in tail)
        if tail_max < head_max / 2:
            return ProfileVerdict.SINGULAR_TREND
        return ProfileVerdict.NON_SINGULAR

    @property
    def tail_sup(self) -> Fraction:
        """尾部 ε*(Q) 的有证上确界，即观测到的可改进常数"""
        _, tail = self._thirds()
        return max(s.value.upper for s in tail)

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": self.label,
            "d": self.d,
            "k": self.k,
            "method": self.method.value,
            "weights": None if self.weights is None else self.weights.to_list(),
            "samples": [s.to_dict() for s in self.samples],
            "verdict": self.verdict.value,
            "tail_sup": str(self.tail_sup),
        }


def is_dirichlet_improvable(profile: DirichletProfile, eps: Fraction, q0: int) -> bool | None:
    """有限尺度上检查 ε*(Q) ≤ eps 对剖面中所有 Q ≥ Q0 成立"""
    relevant = [s for s in profile.samples if s.q_bound >= q0]
    if not relevant:
        return None
    if any(s.value.lower > eps for s in relevant):
        return False
    if all(s.value.upper <= eps for s in relevant):
        return True
    return None


# ============================================================
# 问题上下文与候选证明
# ============================================================


@dataclass
class _Problem:
    x: tuple[Coordinate, ...]
    basis: MonomialBasis
    y: tuple[RealOracle, ...]
    exact: tuple[Fraction, ...] | None
    limits: ResourceLimits
    algebraic: bool
    _zero_cache: dict[tuple[int, ...], bool | None] = field(default_factory=dict)

    @classmethod
    def build(
        cls, x: Sequence[Coordinate | int], b: MonomialBasis, limits: ResourceLimits
    ) -> "_Problem":
        coords = as_coordinates(x)
        y = veronese_oracles(b, coords)
        values = [o.exact for o in y]
        exact = (
            tuple(values) if all(v is not None for v in values) else None  # type: ignore[arg-type]
        )
        algebraic = any(isinstance(c, RealOracle) and c.algebraic is not None for c in coords)
        return cls(coords, b, y, exact, limits, algebraic)

    def _value_at(self, q: tuple[int, ...], p: int) -> tuple[int, CertifiedValue]:
        if self.exact is not None:
            t = sum((c * v for c, v in zip(q, self.exact) if c), Fraction(0))
            a0 = -nearest_integer(t)
            return a0, CertifiedValue.of_fraction(abs(t + a0), p)
        enclosure = linear_form_enclosure(q, self.y, p)
        a0 = -nearest_integer(enclosure.midpoint)
        value = abs(enclosure + a0)
        if value.contains_zero() and self.algebraic:
            if q not in self._zero_cache:
                self._zero_cache[q] = certify_zero(IntPolynomial(self.basis, a0, q), self.x)
            if self._zero_cache[q]:
                return a0, CertifiedValue(DyadicInterval.from_int(0), Fraction(0))
        return a0, CertifiedValue(value)

    def certify(self, q: tuple[int, ...], p: int) -> tuple[int, CertifiedValue]:
        """|P(x)| 的有证值，精度加倍直到相对宽度 ≤ 1 或达到 p_max"""
        p = min(p, self.limits.p_max)
        a0, value = self._value_at(q, p)
        while value.exact is None and value.upper > 2 * value.lower and p < self.limits.p_max:
            p = min(2 * p, self.limits.p_max)
            a0, value = self._value_at(q, p)
        return a0, value

    def record(self, q: tuple[int, ...], a0: int, value: CertifiedValue) -> ApproximationRecord:
        polynomial = IntPolynomial(self.basis, a0, q)
        pair = heights(polynomial)
        ratio = None
        if pair.full >= 2 and not value.is_zero and value.upper > 0:
            ratio = log_ratio_lower(value.upper, pair.full)
        return ApproximationRecord(polynomial, pair, value, value.exact == 0, ratio)


# (a0, |P(x)|)
_Certified = tuple[int, CertifiedValue]


def _resolve_shell(
    problem: _Problem, candidates: Sequence[tuple[int, ...]], p: int
) -> tuple[tuple[int, ...], _Certified, list[tuple[tuple[int, ...], _Certified]]]:
    """候选中的有证最小值；返回 (最优, 值, 无法分离的对手)"""
    values = {q: problem.certify(q, p) for q in candidates}

    def key(q: tuple[int, ...]) -> tuple[Fraction, int, tuple[int, ...]]:
        return values[q][1].upper, _height(q), q

    while True:
        order = sorted(candidates, key=key)
        best = order[0]
        best_value = values[best][1]
        rivals = [q for q in order[1:] if values[q][1].lower < best_value.upper]
        if not rivals or p >= problem.limits.p_max:
            return best, values[best], [(q, values[q]) for q in rivals]
        p = min(2 * p, problem.limits.p_max)
        for q in [best, *rivals]:
            values[q] = problem.certify(q, p)


def _records_from_shells(
    problem: _Problem, shells: dict[int, list[tuple[int, ...]]], p: int
) -> tuple[list[ApproximationRecord], list[ApproximationRecord]]:
    entries: list[ApproximationRecord] = []
    undecided: list[ApproximationRecord] = []
    current: CertifiedValue | None = None
    for h in sorted(shells):
        if not shells[h]:
            continue
        best, (a0, value), rivals = _resolve_shell(problem, shells[h], p)
        undecided.extend(problem.record(q, c, v) for q, (c, v) in rivals)
        verdict = True if current is None else value.below(current)
        if verdict is None and entries:
            previous = entries[-1].polynomial.q
            a0, value = problem.certify(best, problem.limits.p_max)
            _, current = problem.certify(previous, problem.limits.p_max)
            verdict = value.below(current)
        if verdict is None:
            undecided.append(problem.record(best, a0, value))
        elif verdict:
            entries.append(problem.record(best, a0, value))
            current = value
            if value.exact == 0:
                break
    return entries, undecided


# ============================================================
# numpy 筛选
# ============================================================


@dataclass(frozen=True)
class _Representation:
    """y mod 1 的整数表示：值以 1/modulus 为单位，widths 为误差上界"""

    modulus: int
    values: np.ndarray
    widths: np.ndarray

    @property
    def exact(self) -> bool:
        return not bool(self.widths.any())


def _representation(y: Sequence[RealOracle], total_bound: int) -> _Representation:
    exact = [o.exact for o in y]
    if all(v is not None for v in exact):
        modulus = math.lcm(*(v.denominator for v in exact))  # type: ignore[union-attr]
        if modulus * total_bound < 1 << 61:
            values = [
                v.numerator * (modulus // v.denominator) % modulus  # type: ignore[union-attr]
                for v in exact
            ]
            return _Representation(
                modulus, np.array(values, dtype=np.int64), np.zeros(len(y), dtype=np.int64)
            )
    bits = max(61 - total_bound.bit_length(), 8)
    modulus = 1 << bits
    values, widths = [], []
    for o in y:
        enclosure = refine(o, bits + 1)
        lo = (enclosure.lower.numerator << bits) // enclosure.lower.denominator
        hi = -((-enclosure.upper.numerator << bits) // enclosure.upper.denominator)
        values.append(lo % modulus)
        widths.append(hi - lo)
    return _Representation(
        modulus, np.array(values, dtype=np.int64), np.array(widths, dtype=np.int64)
    )


def _decode(bounds: np.ndarray, index: np.ndarray) -> np.ndarray:
    """混合进制索引 → 系数向量（首坐标为最高位，索引序即字典序）"""
    n = len(bounds)
    rows = np.empty((len(index), n), dtype=np.int64)
    rest = index.copy()
    for j in range(n - 1, -1, -1):
        rest, digit = np.divmod(rest, 2 * bounds[j] + 1)
        rows[:, j] = digit - bounds[j]
    return rows


def _leading_positive(rows: np.ndarray) -> np.ndarray:
    first = (rows != 0).argmax(axis=1)
    return rows[np.arange(rows.shape[0]), first] > 0


def _distances(rows: np.ndarray, rep: _Representation) -> tuple[np.ndarray, np.ndarray]:
    s = rows @ rep.values
    r = np.mod(s, rep.modulus)
    return np.minimum(r, rep.modulus - r), np.abs(rows) @ rep.widths


@dataclass
class _ShellPartial:
    """一个分片的筛选结果"""

    min_upper: np.ndarray  # 每个高度的最小上界
    best_index: np.ndarray  # 精确模式：每个高度的最优索引
    heights: list[np.ndarray] = field(default_factory=list)
    lowers: list[np.ndarray] = field(default_factory=list)
    indices: list[np.ndarray] = field(default_factory=list)


def _screen_shells(
    bounds: np.ndarray,
    rep: _Representation,
    q_max: int,
    start: int,
    stop: int,
    chunk: int,
) -> _ShellPartial:
    partial = _ShellPartial(
        min_upper=np.full(q_max + 1, _INT64_MAX, dtype=np.int64),
        best_index=np.full(q_max + 1, _INT64_MAX, dtype=np.int64),
    )
    for s in range(start, stop, chunk):
        index = np.arange(s, min(s + chunk, stop), dtype=np.int64)
        rows = _decode(bounds, index)
        mask = _leading_positive(rows)
        if not mask.any():
            continue
        rows, index = rows[mask], index[mask]
        dist, err = _distances(rows, rep)
        h = np.abs(rows).max(axis=1)
        if rep.exact:
            order = np.lexsort((index, dist, h))
            hs = h[order]
            first = np.ones(len(hs), dtype=bool)
            first[1:] = hs[1:] != hs[:-1]
            pick = order[first]
            hh, vv, ii = h[pick], dist[pick], index[pick]
            current_v = partial.min_upper[hh]
            better = (vv < current_v) | ((vv == current_v) & (ii < partial.best_index[hh]))
            partial.min_upper[hh[better]] = vv[better]
            partial.best_index[hh[better]] = ii[better]
        else:
            lower, upper = dist - err, dist + err
            np.minimum.at(partial.min_upper, h, upper)
            prefix = np.minimum.accumulate(partial.min_upper)
            keep = lower <= prefix[h]
            partial.heights.append(h[keep])
            partial.lowers.append(lower[keep])
            partial.indices.append(index[keep])
    return partial


def _merge_shells(
    partials: Sequence[_ShellPartial], bounds: np.ndarray, rep: _Representation, cap: int
) -> dict[int, list[tuple[int, ...]]]:
    """按结合的 (值, 索引) 最小合并分片，结果与分片数无关"""
    min_upper = partials[0].min_upper.copy()
    best_index = partials[0].best_index.copy()
    for other in partials[1:]:
        better = (other.min_upper < min_upper) | (
            (other.min_upper == min_upper) & (other.best_index < best_index)
        )
        min_upper = np.where(better, other.min_upper, min_upper)
        best_index = np.where(better, other.best_index, best_index)
    shells: dict[int, list[tuple[int, ...]]] = {}
    if rep.exact:
        seen = np.flatnonzero(min_upper[1:] < _INT64_MAX) + 1
        running = _INT64_MAX
        for h in seen:
            if min_upper[h] < running:
                running = int(min_upper[h])
                row = _decode(bounds, np.array([best_index[h]], dtype=np.int64))[0]
                shells[int(h)] = [tuple(int(c) for c in row)]
                if running == 0:
                    break
        return shells
    prefix = np.minimum.accumulate(min_upper)
    h = np.concatenate([h for p in partials for h in p.heights] or [np.empty(0, np.int64)])
    lower = np.concatenate([v for p in partials for v in p.lowers] or [np.empty(0, np.int64)])
    index = np.concatenate([i for p in partials for i in p.indices] or [np.empty(0, np.int64)])
    keep = lower <= prefix[h]
    h, lower, index = h[keep], lower[keep], index[keep]
    order = np.lexsort((index, lower, h))
    h, index = h[order], index[order]
    if len(h) == 0:
        return shells
    boundary = np.ones(len(h), dtype=bool)
    boundary[1:] = h[1:] != h[:-1]
    group = np.cumsum(boundary) - 1
    starts = np.flatnonzero(boundary)
    rank = np.arange(len(h)) - starts[group]
    crowded = np.unique(h[rank >= cap])
    if len(crowded):
        logger.warning("%d heights exceeded the candidate cap %d", len(crowded), cap)
    keep = rank < cap
    rows = _decode(bounds, index[keep])
    for hh, row in zip(h[keep], rows):
        shells.setdefault(int(hh), []).append(tuple(int(c) for c in row))
    return shells


def _shards(total: int, count: int, chunk: int) -> list[tuple[int, int]]:
    count = max(1, min(count, -(-total // chunk)))
    step = -(-total // count)
    step = -(-step // chunk) * chunk
    return [(s, min(s + step, total)) for s in range(0, total, step)]


def _brute_shells(
    problem: _Problem, q_max: int, shards: int | None
) -> dict[int, list[tuple[int, ...]]]:
    n = problem.basis.n
    bounds_t = (q_max,) * n
    total = ResourceGuard(problem.limits).check_box(bounds_t)
    bounds = np.array(bounds_t, dtype=np.int64)
    rep = _representation(problem.y, n * q_max)
    chunk = problem.limits.chunk_size
    ranges = _shards(total, shards or problem.limits.threads, chunk)
    logger.debug(
        "brute screening: n=%d Q=%d box=%d shards=%d exact=%s",
        n,
        q_max,
        total,
        len(ranges),
        rep.exact,
    )
    if len(ranges) == 1:
        partials = [_screen_shells(bounds, rep, q_max, *ranges[0], chunk)]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            partials = list(
                pool.map(lambda r: _screen_shells(bounds, rep, q_max, r[0], r[1], chunk), ranges)
            )
    return _merge_shells(partials, bounds, rep, problem.limits.max_shell_candidates)


def _lattice_schedule(q_max: int) -> list[int]:
    schedule = []
    q = 2
    while q < q_max:
        schedule.append(q)
        q *= 2
    schedule.append(q_max)
    return schedule


def _lattice_shells(problem: _Problem, q_max: int) -> dict[int, list[tuple[int, ...]]]:
    candidates: set[tuple[int, ...]] = set()
    for scale in _lattice_schedule(q_max):
        pairs = small_form_candidates(problem.y, scale, limits=problem.limits)
        candidates.update(q for q, _ in pairs)
    shells: dict[int, list[tuple[int, ...]]] = {}
    for q in sorted(candidates):
        shells.setdefault(_height(q), []).append(q)
    return shells



def _screen_small_values(
    bounds: np.ndarray,
    rep: _Representation,
    exponent: float,
    start: int,
    stop: int,
    chunk: int,
) -> tuple[np.ndarray, np.ndarray]:
    """保留浮点下界不超过 H̃^(-exponent) 的索引；返回 (H̃, 索引)"""
    kept_h: list[np.ndarray] = []
    kept_index: list[np.ndarray] = []
    for s in range(start, stop, chunk):
        index = np.arange(s, min(s + chunk, stop), dtype=np.int64)
        rows = _decode(bounds, index)
        mask = _leading_positive(rows)
        if not mask.any():
            continue
        rows, index = rows[mask], index[mask]
        dist, err = _distances(rows, rep)
        h = np.abs(rows).max(axis=1)
        lower = np.maximum(dist - err, 0) / rep.modulus
        keep = lower <= h.astype(float) ** -exponent * (1 + 1e-9)
        kept_h.append(h[keep])
        kept_index.append(index[keep])
    if not kept_h:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(kept_h), np.concatenate(kept_index)


def _brute_small_values(
    problem: _Problem, h_max: int, exponent: Fraction, shards: int | None
) -> list[tuple[int, ...]]:
    n = problem.basis.n
    bounds_t = (h_max,) * n
    total = ResourceGuard(problem.limits).check_box(bounds_t)
    bounds = np.array(bounds_t, dtype=np.int64)
    rep = _representation(problem.y, n * h_max)
    chunk = problem.limits.chunk_size
    ranges = _shards(total, shards or problem.limits.threads, chunk)
    e = float(exponent)
    if len(ranges) == 1:
        parts = [_screen_small_values(bounds, rep, e, *ranges[0], chunk)]
    else:
        with ThreadPoolExecutor(max_workers=len(ranges)) as pool:
            parts = list(
                pool.map(
                    lambda r: _screen_small_values(bounds, rep, e, r[0], r[1], chunk), ranges
                )
            )
    h = np.concatenate([p[0] for p in parts])
    index = np.concatenate([p[1] for p in parts])
    order = np.lexsort((index, h))
    rows = _decode(bounds, index[order])
    return [tuple(int(c) for c in row) for row in rows]


def _lattice_small_values(
    problem: _Problem, h_max: int, exponent: Fraction
) -> list[tuple[int, ...]]:
    candidates: set[tuple[int, ...]] = set()
    for scale in _lattice_schedule(h_max):
        pairs = small_form_candidates(problem.y, scale, limits=problem.limits)
        candidates.update(q for q, _ in pairs)
    e = float(exponent)
    found = []
    for q in candidates:
        _, value = problem.certify(q, problem.limits.p_start)
        if float(value.lower) <= _height(q) ** -e * (1 + 1e-9):
            found.append(q)
    return sorted(found, key=lambda q: (_height(q), q))


# ============================================================
# 公共操作
# ============================================================


def _point_label(x: Sequence[Any]) -> str:
    parts = []
    for c in x:
        if isinstance(c, RealOracle):
            parts.append(str(c.meta.get("label", c.exact if c.exact is not None else c.tag)))
        else:
            parts.append(str(Fraction(c)))
    return "(" + ", ".join(parts) + ")"


def _clamp_to_truncation(x: Sequence[Any], q_max: int) -> int:
    ceilings = [
        int(c.meta["truncation_height"])
        for c in x
        if isinstance(c, RealOracle) and "truncation_height" in c.meta
    ]
    if ceilings and q_max > min(ceilings):
        logger.warning("Q_max %d clamped to truncation height %d", q_max, min(ceilings))
        return min(ceilings)
    return q_max


def record_scan(
    x: Sequence[Coordinate | int],
    b: MonomialBasis,
    q_max: int,
    method: Method | str = Method.BRUTE,
    limits: ResourceLimits | None = None,
    shards: int | None = None,
) -> RecordTable:
    """搜索高度 H̃ ≤ Q_max 内的逐次最小记录表

    Raises:
        ResourceLimitError: 暴力搜索的系数盒超过上限
    """
    limits = limits or DEFAULT_LIMITS
    method = Method(method)
    if q_max < 1:
        raise ConfigError("Q_max 必须 ≥ 1", key="Q_max", value=q_max)
    problem = _Problem.build(x, b, limits)
    q_max = _clamp_to_truncation(problem.x, q_max)
    if method is Method.BRUTE:
        shells = _brute_shells(problem, q_max, shards)
    else:
        shells = _lattice_shells(problem, q_max)
    entries, undecided = _records_from_shells(problem, shells, limits.p_start)
    logger.debug(
        "record scan Q_max=%d: %d records, %d undecided", q_max, len(entries), len(undecided)
    )
    return RecordTable(
        label=_point_label(problem.x),
        d=b.d,
        k=b.k,
        method=method,
        q_max=q_max,
        entries=entries,
        undecided=undecided,
    )


def brute_force_best(
    x: Sequence[Coordinate | int],
    b: MonomialBasis,
    q_bound: int,
    limits: ResourceLimits | None = None,
    shards: int | None = None,
) -> ApproximationRecord:
    """0 < |q|∞ ≤ Q 上 ‖q·f(x)‖ 的精确最小者（平局取高度较小、字典序最小）"""
    table = record_scan(x, b, q_bound, Method.BRUTE, limits, shards)
    assert table.best is not None
    return table.best


@dataclass
class SmallValueScan:
    """|P(x)| ≤ H̃^(-(n+eps)) 的全部筛选候选（含精确零），按 (H̃, q) 排序"""

    h_max: int
    exponent: Fraction  # n + eps
    records: list[ApproximationRecord] = field(default_factory=list)
    truncated: bool = False


def small_value_scan(
    x: Sequence[Coordinate | int],
    b: MonomialBasis,
    eps: Fraction,
    h_max: int,
    method: Method | str = Method.BRUTE,
    limits: ResourceLimits | None = None,
    shards: int | None = None,
) -> SmallValueScan:
    """筛选 H̃ ≤ h_max 内可能满足 |P(x)| ≤ H̃^(-(n+eps)) 的全部 q，并逐个给出有证值

    H ≥ H̃，所以以 H̃ 为界的候选集包含所有以 H 为界的见证。
    暴力方法覆盖整个系数盒；格方法只覆盖格约化给出的候选。
    """
    limits = limits or DEFAULT_LIMITS
    method = Method(method)
    if h_max < 1:
        raise ConfigError("H 上界必须 ≥ 1", key="h_range", value=h_max)
    problem = _Problem.build(x, b, limits)
    h_max = _clamp_to_truncation(problem.x, h_max)
    exponent = b.n + Fraction(eps)
    if method is Method.BRUTE:
        candidates = _brute_small_values(problem, h_max, exponent, shards)
    else:
        candidates = _lattice_small_values(problem, h_max, exponent)
    cap = limits.max_shell_candidates
    truncated = len(candidates) > cap
    if truncated:
        logger.warning(
            "small value screening kept %d candidates up to H=%d, truncated to cap %d",
            len(candidates),
            h_max,
            cap,
        )
        candidates = candidates[:cap]
    records = []
    for q in candidates:
        a0, value = problem.certify(q, limits.p_start)
        records.append(problem.record(q, a0, value))
    logger.debug("small value scan H<=%d: %d candidates", h_max, len(records))
    return SmallValueScan(h_max, exponent, records, truncated)


def _epsilon_from_records(
    records: Iterable[ApproximationRecord], q_bound: int, n: int, p: int
) -> EpsilonSample:
    best: tuple[CertifiedValue, IntPolynomial] | None = None
    lower: Fraction | None = None
    scale = q_bound**n
    for record in records:
        h = record.heights.reduced
        if h > q_bound:
            continue
        value = _maximum(
            [CertifiedValue.of_fraction(Fraction(h, q_bound), p), record.value.scaled(scale)], p
        )
        lower = value.lower if lower is None else min(lower, value.lower)
        if best is None or (value.upper, h) < (best[0].upper, best[1].heights().reduced):
            best = (value, record.polynomial)
    if best is None:
        raise ConfigError(f"Q={q_bound} 以内没有候选", key="Q", value=q_bound)
    value, witness = best
    if value.exact is None or lower != value.exact:
        enclosure = DyadicInterval.from_bounds(lower, value.upper, p)  # type: ignore[arg-type]
        value = CertifiedValue(enclosure)
    return EpsilonSample(q_bound, value, witness)


def _weighted_objective(
    problem: _Problem,
    q: tuple[int, ...],
    weights: WeightVector | None,
    q_bound: int,
    p: int,
) -> tuple[int, CertifiedValue]:
    n = problem.basis.n
    a0, value = problem.certify(q, p)
    terms = [value.scaled(q_bound**n)]
    if weights is None:
        terms.append(CertifiedValue.of_fraction(Fraction(_height(q), q_bound), p))
    else:
        for c, r in zip(q, weights.weights):
            if not c:
                continue
            e = n * r
            power = q_bound**e.numerator
            root = iroot(power, e.denominator)
            if root**e.denominator == power:
                terms.append(CertifiedValue.of_fraction(Fraction(abs(c), root), p))
            else:
                scale = pow_enclosure(DyadicInterval.from_int(q_bound), e, p)
                terms.append(
                    CertifiedValue(
                        DyadicInterval.from_bounds(
                            Fraction(abs(c)) / scale.upper, Fraction(abs(c)) / scale.lower, p
                        )
                    )
                )
    return a0, _maximum(terms, p)


def _epsilon_from_candidates(
    problem: _Problem,
    candidates: Iterable[tuple[int, ...]],
    weights: WeightVector | None,
    q_bound: int,
) -> EpsilonSample:
    p = problem.limits.p_start
    best: tuple[CertifiedValue, tuple[int, ...], int] | None = None
    lower: Fraction | None = None
    for q in candidates:
        a0, value = _weighted_objective(problem, q, weights, q_bound, p)
        lower = value.lower if lower is None else min(lower, value.lower)
        key = (value.upper, _height(q), q)
        if best is None or key < (best[0].upper, _height(best[1]), best[1]):
            best = (value, q, a0)
    if best is None:
        raise ConfigError(f"Q={q_bound} 以内没有候选", key="Q", value=q_bound)
    value, q, a0 = best
    if value.exact is None or lower != value.exact:
        enclosure = DyadicInterval.from_bounds(lower, value.upper, p)  # type: ignore[arg-type]
        value = CertifiedValue(enclosure)
    return EpsilonSample(q_bound, value, IntPolynomial(problem.basis, a0, q))


def _weighted_brute_candidates(
    problem: _Problem, weights: WeightVector, q_bound: int
) -> list[tuple[int, ...]]:
    """加权目标的浮点筛选，保留下界不超过当前最优上界的候选"""
    box = weights.box(q_bound)
    total = ResourceGuard(problem.limits).check_box(box)
    bounds = np.array(box, dtype=np.int64)
    rep = _representation(problem.y, max(sum(box), 1))
    n = problem.basis.n
    scales = np.array(
        [float(q_bound) ** float(n * r) if r else np.inf for r in weights.weights], dtype=float
    )
    qn = float(q_bound) ** n
    slack = 1e-9
    best_upper = np.inf
    kept_lower: list[np.ndarray] = []
    kept_index: list[np.ndarray] = []
    for s in range(0, total, problem.limits.chunk_size):
        index = np.arange(s, min(s + problem.limits.chunk_size, total), dtype=np.int64)
        rows = _decode(bounds, index)
        mask = _leading_positive(rows)
        if not mask.any():
            continue
        rows, index = rows[mask], index[mask]
        dist, err = _distances(rows, rep)
        box_term = (np.abs(rows) / scales).max(axis=1)
        form_lo = np.maximum(dist - err, 0) / rep.modulus * qn
        form_hi = (dist + err) / rep.modulus * qn
        lower = np.maximum(box_term, form_lo) * (1 - slack)
        upper = np.maximum(box_term, form_hi) * (1 + slack)
        best_upper = min(best_upper, float(upper.min()))
        keep = lower <= best_upper
        kept_lower.append(lower[keep])
        kept_index.append(index[keep])
    if not kept_index:
        return []
    lower = np.concatenate(kept_lower)
    index = np.concatenate(kept_index)
    keep = lower <= best_upper
    cap = problem.limits.max_shell_candidates
    survivors = int(keep.sum())
    if survivors > cap:
        logger.warning(
            "weighted screening kept %d candidates at Q=%d, truncated to cap %d",
            survivors,
            q_bound,
            cap,
        )
    order = np.lexsort((index[keep], lower[keep]))[:cap]
    rows = _decode(bounds, index[keep][order])
    return [tuple(int(c) for c in row) for row in rows]


def epsilon_star(
    x: Sequence[Coordinate | int],
    b: MonomialBasis,
    q_bound: int,
    weights: WeightVector | None = None,
    method: Method | str = Method.BRUTE,
    limits: ResourceLimits | None = None,
) -> EpsilonSample:
    """ε*(Q) = min_q max(|q|∞/Q, ‖q·f(x)‖·Q^n)；加权时盒项换成 max_i |q_i|/Q^(n·r_i)"""
    limits = limits or DEFAULT_LIMITS
    method = Method(method)
    if weights is not None and weights.n != b.n:
        raise WeightVectorError(weights.to_list(), f"权重长度必须为 n={b.n}")
    if weights is not None and weights.is_uniform:
        weights = None
    problem = _Problem.build(x, b, limits)
    if method is Method.LATTICE:
        bounds = None if weights is None else weights.box(q_bound)
        candidates = [q for q, _ in small_form_candidates(problem.y, q_bound, bounds, limits)]
        return _epsilon_from_candidates(problem, candidates, weights, q_bound)
    if weights is None:
        table = record_scan(x, b, q_bound, Method.BRUTE, limits)
        return _epsilon_from_records(
            [*table.entries, *table.undecided], q_bound, b.n, limits.p_start
        )
    candidates = _weighted_brute_candidates(problem, weights, q_bound)
    return _epsilon_from_candidates(problem, candidates, weights, q_bound)


def dirichlet_profile(
    x: Sequence[Coordinate | int],
    b: MonomialBasis,
    schedule: Sequence[int],
    method: Method | str = Method.BRUTE,
    weights: WeightVector | None = None,
    limits: ResourceLimits | None = None,
) -> DirichletProfile:
    """在 Q 序列上计算 ε*(Q) 并给出奇异性趋势判定"""
    limits = limits or DEFAULT_LIMITS
    method = Method(method)
    schedule = sorted(set(schedule))
    if not schedule or schedule[0] < 1:
        raise ConfigError("Q 序列必须非空且为正整数", key="Q", value=list(schedule))
    if weights is not None and weights.is_uniform:
        weights = None
    if method is Method.BRUTE and weights is None:
        table = record_scan(x, b, schedule[-1], Method.BRUTE, limits)
        pool = [*table.entries, *table.undecided]
        samples = [_epsilon_from_records(pool, q, b.n, limits.p_start) for q in schedule]
        label = table.label
    else:
        samples = [epsilon_star(x, b, q, weights, method, limits) for q in schedule]
        label = _point_label(as_coordinates(x))
    return DirichletProfile(label, b.d, b.k, method, weights, samples)


# ============================================================
# 一维倍数扫描：Bad(r)、联立逼近、乘性统计
# ============================================================


class Statistic(str, Enum):
    """倍数扫描的目标"""

    BAD = "bad"  # q·max_i ‖q y_i‖^(1/r_i)
    SIMULTANEOUS = "simultaneous"  # max_i ‖q y_i‖
    MULTIPLICATIVE = "multiplicative"  # q·Π ‖q y_i‖


@dataclass(frozen=True)
class ScalarRecord:
    q: int
    value: CertifiedValue

    def to_dict(self) -> dict[str, Any]:
        return {"q": str(self.q), "value": self.value.to_dict()}


@dataclass
class ScalarScan:
    """倍数扫描的前缀最小记录"""

    statistic: Statistic
    q_max: int
    records: list[ScalarRecord]
    undecided: list[ScalarRecord]

    @property
    def best(self) -> ScalarRecord:
        return self.records[-1]

    @property
    def minimum(self) -> CertifiedValue:
        """全局最小的包围（计入无法判定的候选）"""
        best = self.best.value
        lowers = [best.lower, *(r.value.lower for r in self.undecided)]
        low = min(lowers)
        if best.exact is not None and low == best.exact:
            return best
        precision = max(-best.enclosure.exponent, 64)
        return CertifiedValue(DyadicInterval.from_bounds(low, best.upper, precision))

    def to_dict(self) -> dict[str, Any]:
        return {
            "statistic": self.statistic.value,
            "Q_max": str(self.q_max),
            "records": [r.to_dict() for r in self.records],
            "undecided": [r.to_dict() for r in self.undecided],
            "minimum": self.minimum.to_dict(),
            "argmin": str(self.best.q),
        }


def _scalar_value(
    y: Sequence[RealOracle],
    q: int,
    statistic: Statistic,
    exponents: Sequence[Fraction],
    p: int,
) -> CertifiedValue:
    distances: list[CertifiedValue] = []
    for oracle in y:
        if oracle.exact is not None:
            t = q * oracle.exact
            distances.append(CertifiedValue.of_fraction(abs(t - nearest_integer(t)), p))
        else:
            enclosure = refine(oracle, p + q.bit_length() + 1) * q
            distances.append(CertifiedValue(int_dist(enclosure)))
    if statistic is Statistic.SIMULTANEOUS:
        return _maximum(distances, p)
    if statistic is Statistic.MULTIPLICATIVE:
        if all(z.exact is not None for z in distances):
            product = Fraction(q)
            for z in distances:
                product *= z.exact  # type: ignore[operator]
            return CertifiedValue.of_fraction(product, p)
        enclosure = DyadicInterval.from_int(q)
        for z in distances:
            enclosure = enclosure * z.enclosure
        return CertifiedValue(enclosure)
    powered: list[CertifiedValue] = []
    for z, e in zip(distances, exponents):
        if z.exact is not None and e.denominator == 1:
            powered.append(CertifiedValue.of_fraction(z.exact ** e.numerator * q, p))
        else:
            source = (
                z.enclosure if z.exact is None else DyadicInterval.from_fraction(z.exact, p + 2)
            )
            powered.append(CertifiedValue(pow_enclosure(source, e, p) * q))
    return _maximum(powered, p)


def _certify_scalar(
    y: Sequence[RealOracle],
    q: int,
    statistic: Statistic,
    exponents: Sequence[Fraction],
    p: int,
    p_max: int,
) -> CertifiedValue:
    value = _scalar_value(y, q, statistic, exponents, p)
    while value.exact is None and value.upper > 2 * value.lower and p < p_max:
        p = min(2 * p, p_max)
        value = _scalar_value(y, q, statistic, exponents, p)
    return value


def _scalar_candidates(
    y: Sequence[RealOracle],
    q_max: int,
    statistic: Statistic,
    exponents: Sequence[Fraction],
    chunk: int,
) -> list[int]:
    """对数域浮点筛选：保留下界不超过前缀最小上界的 q，遇到精确零后停止"""
    rep = _representation(y, q_max)
    exps = np.array([float(e) for e in exponents], dtype=float)
    carry = np.inf
    kept: list[np.ndarray] = []
    slack = 1e-9
    for s in range(1, q_max + 1, chunk):
        q = np.arange(s, min(s + chunk, q_max + 1), dtype=np.int64)
        s_mat = q[:, None] * rep.values[None, :]
        r = np.mod(s_mat, rep.modulus)
        dist = np.minimum(r, rep.modulus - r)
        err = q[:, None] * rep.widths[None, :]
        with np.errstate(divide="ignore"):
            log_lo = np.log(np.maximum(dist - err, 0) / rep.modulus)
            log_hi = np.log((dist + err) / rep.modulus)
        log_q = np.log(q.astype(float))
        if statistic is Statistic.SIMULTANEOUS:
            lo, hi = log_lo.max(axis=1), log_hi.max(axis=1)
        elif statistic is Statistic.MULTIPLICATIVE:
            lo, hi = log_q + log_lo.sum(axis=1), log_q + log_hi.sum(axis=1)
        else:
            lo = log_q + (log_lo * exps[None, :]).max(axis=1)
            hi = log_q + (log_hi * exps[None, :]).max(axis=1)
        lo, hi = lo - slack, hi + slack
        prefix = np.minimum.accumulate(np.concatenate([[carry], hi]))[1:]
        keep = lo <= prefix
        if np.isneginf(prefix[-1]):
            stop = int(np.argmax(np.isneginf(prefix)))
            keep[stop + 1 :] = False
            kept.append(q[keep])
            break
        kept.append(q[keep])
        carry = float(prefix[-1])
    return [int(v) for v in np.concatenate(kept or [np.empty(0, np.int64)])]


def scan_multiples(
    y: Sequence[RealOracle | int | Fraction],
    q_max: int,
    statistic: Statistic | str,
    weights: WeightVector | None = None,
    limits: ResourceLimits | None = None,
) -> ScalarScan:
    """1 ≤ q ≤ Q_max 上统计量的前缀最小记录"""
    limits = limits or DEFAULT_LIMITS
    statistic = Statistic(statistic)
    if q_max < 1:
        raise ConfigError("Q_max 必须 ≥ 1", key="Q_max", value=q_max)
    ResourceGuard(limits).check_scan(q_max)
    oracles = [v if isinstance(v, RealOracle) else RealOracle.from_rational(v) for v in y]
    if statistic is Statistic.BAD:
        weights = weights or WeightVector.uniform(len(oracles))
        if weights.n != len(oracles):
            raise WeightVectorError(weights.to_list(), f"权重长度必须为 {len(oracles)}")
        pairs = [(o, r) for o, r in zip(oracles, weights.weights) if r]
        oracles = [o for o, _ in pairs]
        exponents = [1 / r for _, r in pairs]
    else:
        exponents = [Fraction(1)] * len(oracles)
    candidates = _scalar_candidates(oracles, q_max, statistic, exponents, limits.chunk_size)
    logger.debug("%s scan Q_max=%d: %d candidates", statistic.value, q_max, len(candidates))
    records: list[ScalarRecord] = []
    undecided: list[ScalarRecord] = []
    for q in candidates:
        value = _certify_scalar(oracles, q, statistic, exponents, limits.p_start, limits.p_max)
        if not records:
            records.append(ScalarRecord(q, value))
            continue
        current = records[-1]
        verdict = value.below(current.value)
        if verdict is None:
            value = _certify_scalar(oracles, q, statistic, exponents, limits.p_max, limits.p_max)
            verdict = value.below(current.value)
        if verdict is None:
            undecided.append(ScalarRecord(q, value))
        elif verdict:
            records.append(ScalarRecord(q, value))
            if value.exact == 0:
                break
    return ScalarScan(statistic, q_max, records, undecided)


def weighted_bad_statistic(
    y: Sequence[RealOracle | int | Fraction],
    weights: WeightVector,
    q_max: int,
    limits: ResourceLimits | None = None,
) -> ScalarScan:
    """min_{1≤q≤Q_max} q·max_i ‖q y_i‖^(1/r_i)，r_i = 0 的坐标不参与（约定 z^(1/0) = 0）"""
    return scan_multiples(y, q_max, Statistic.BAD, weights, limits)


def choose_method(n: int, q_max: int, limits: ResourceLimits | None = None) -> Method:
    """系数盒在暴力上限之内时用穷举，否则用格方法"""
    limits = limits or DEFAULT_LIMITS
    if (2 * q_max + 1) ** n <= limits.max_brute_evaluations:
        return Method.BRUTE
    return Method.LATTICE
