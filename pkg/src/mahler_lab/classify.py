# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
指数估计与分类

把搜索结果转换为：
- 线性型指数 ω̂_k 与联立逼近指数 λ̂ 的有证下界
- k-VWA 见证与独立复核
- 启发式分类标签（A-like / S-like / U-like / inconclusive）
- 转移不等式一致性诊断
- 总次数大于 k 的代数点的见证计数稳定性（有限性代理）

所有估计都是有限尺度上的下界，标签只是启发式判断。
"""

import logging
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

from .exceptions import ConfigError
from .limits import DEFAULT_LIMITS, ResourceLimits
from .monomials import Coordinate, as_coordinates, basis, rational_coordinates, veronese_oracles
from .numerics import RealOracle, Verdict, log_ratio_lower
from .poly import IntPolynomial, eval_enclosure, eval_exact
from .search import (
    ApproximationRecord,
    CertifiedValue,
    Method,
    RecordTable,
    ScalarScan,
    Statistic,
    choose_method,
    record_scan,
    scan_multiples,
    small_value_scan,
)

logger = logging.getLogger(__name__)

# U-like 阈值：某个 ω̂_k/n_k 超过该值
DEFAULT_U_THRESHOLD = Fraction(3)
# S-like 下限为 1 - slack
DEFAULT_SLACK = Fraction(1, 2)
# 转移诊断的容差
DEFAULT_TRANSFERENCE_SLACK = Fraction(3, 10)


class EstimateKind(str, Enum):
    LINEAR_FORM = "linear_form"
    SIMULTANEOUS = "simultaneous"


@dataclass(frozen=True)
class ExponentEstimate:
    """指数的有证下界（infinite 表示找到精确零）"""

    value: Fraction
    kind: EstimateKind
    q_max: int
    witnesses: int  # 参与上确界的见证个数
    infinite: bool = False
    witness: str | None = None  # 达到上确界的见证
    undecided: int = 0  # 在 p_max 下仍无法与记录比较的候选个数

    def to_dict(self) -> dict[str, Any]:
        return {
            "value": "+inf" if self.infinite else str(self.value),
            "kind": self.kind.value,
            "Q_max": str(self.q_max),
            "witnesses": self.witnesses,
            "witness": self.witness,
            "undecided": self.undecided,
            "semantics": "certified lower bound on the true exponent",
        }


def _select_method(
    n: int, q_max: int, method: Method | str | None, limits: ResourceLimits
) -> Method:
    return choose_method(n, q_max, limits) if method is None else Method(method)


def _estimate_from_table(table: RecordTable, kind: EstimateKind) -> ExponentEstimate:
    undecided = len(table.undecided)
    if table.exact_zero:
        zero = table.entries[-1].polynomial.render()
        return ExponentEstimate(
            Fraction(0), kind, table.q_max, len(table.entries), True, zero, undecided
        )
    rated = [e for e in table.entries if e.ratio is not None]
    if not rated:
        return ExponentEstimate(Fraction(0), kind, table.q_max, 0, undecided=undecided)
    best = max(rated, key=lambda e: e.ratio)  # type: ignore[arg-type,return-value]
    assert best.ratio is not None
    witness = best.polynomial.render()
    return ExponentEstimate(best.ratio, kind, table.q_max, len(rated), False, witness, undecided)


def estimate_omega_k(
    x: Sequence[Coordinate | int],
    d: int,
    k: int,
    q_max: int,
    method: Method | str | None = None,
    limits: ResourceLimits | None = None,
) -> ExponentEstimate:
    """ω̂_k：记录中 log(1/|P(x)|)/log H 的上确界（有证下界）；精确零给出 +inf

    method 缺省时按暴力上限自动选择。
    """
    limits = limits or DEFAULT_LIMITS
    b = basis(d, k, limits)
    table = record_scan(x, b, q_max, _select_method(b.n, q_max, method, limits), limits)
    estimate = _estimate_from_table(table, EstimateKind.LINEAR_FORM)
    logger.debug("omega_%d estimate at Q_max=%d: %s", k, table.q_max, estimate.value)
    return estimate


# ============================================================
# VWA 见证
# ============================================================


def _within_height_power(value: Fraction, height: int, exponent: Fraction) -> bool:
    """value ≤ height^(-exponent)，以整数幂精确比较"""
    a, b = exponent.numerator, exponent.denominator
    return value**b * Fraction(height) ** a <= 1


def verify_witness(
    p: IntPolynomial,
    x: Sequence[Coordinate | int],
    eps: Fraction,
    precision: int = 256,
) -> Verdict:
    """独立复核 |P(x)| ≤ H(P)^(-(n+eps))"""
    coords = as_coordinates(x)
    exponent = p.basis.n + Fraction(eps)
    height = p.heights().full
    exact = rational_coordinates(coords)
    if exact is not None:
        value = abs(eval_exact(p, exact))
        return Verdict.YES if _within_height_power(value, height, exponent) else Verdict.NO
    enclosure = abs(eval_enclosure(p, coords, precision))
    if _within_height_power(enclosure.upper, height, exponent):
        return Verdict.YES
    if not _within_height_power(enclosure.lower, height, exponent):
        return Verdict.NO
    return Verdict.UNDECIDED


@dataclass
class VWAResult:
    """VWA 检测结果：空见证表示区间内没有找到，从不表示 "非 VWA" """

    eps: Fraction
    h_range: tuple[int, int]
    witnesses: list[ApproximationRecord] = field(default_factory=list)
    exact_zeros: list[ApproximationRecord] = field(default_factory=list)
    undecided: list[ApproximationRecord] = field(default_factory=list)
    truncated: bool = False  # 筛选候选超过上限

    def to_dict(self) -> dict[str, Any]:
        return {
            "eps": str(self.eps),
            "H_range": [str(self.h_range[0]), str(self.h_range[1])],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "exact_zeros": [w.to_dict() for w in self.exact_zeros],
            "undecided": [w.to_dict() for w in self.undecided],
            "truncated": self.truncated,
        }


def _height_key(record: ApproximationRecord) -> tuple[int, int, tuple[int, ...]]:
    return record.heights.full, record.heights.reduced, record.polynomial.q


def _classify_witnesses(
    records: Sequence[ApproximationRecord],
    x: Sequence[Coordinate],
    eps: Fraction,
    h_range: tuple[int, int],
    p_verify: int,
) -> VWAResult:
    result = VWAResult(eps, h_range)
    for record in sorted(records, key=_height_key):
        height = record.heights.full
        if not h_range[0] <= height <= h_range[1]:
            continue
        if record.exact_zero:
            result.exact_zeros.append(record)
            continue
        exponent = record.polynomial.basis.n + eps
        if _within_height_power(record.value.upper, height, exponent):
            verdict = verify_witness(record.polynomial, x, eps, p_verify)
            if verdict is Verdict.YES:
                result.witnesses.append(record)
            else:
                logger.warning("witness %s failed re-verification", record.polynomial.render())
                result.undecided.append(record)
        elif _within_height_power(record.value.lower, height, exponent):
            verdict = verify_witness(record.polynomial, x, eps, p_verify)
            if verdict is Verdict.YES:
                result.witnesses.append(record)
            elif verdict is Verdict.UNDECIDED:
                result.undecided.append(record)
    return result


def detect_k_vwa(
    x: Sequence[Coordinate | int],
    d: int,
    k: int,
    eps: Fraction,
    h_range: tuple[int, int],
    method: Method | str | None = None,
    limits: ResourceLimits | None = None,
) -> VWAResult:
    """在 H ∈ h_range 内寻找 |P(x)| ≤ H^(-(n+eps)) 的全部见证

    候选来自整个系数盒的筛选而不只是逐次最小记录；
    每个见证都在加倍精度下独立复核；精确零单独列出。
    """
    limits = limits or DEFAULT_LIMITS
    eps = Fraction(eps)
    if eps <= 0:
        raise ConfigError("eps 必须为正", key="eps", value=str(eps))
    h_lo, h_hi = h_range
    if not 1 <= h_lo <= h_hi:
        raise ConfigError("H 区间必须满足 1 ≤ lo ≤ hi", key="h_range", value=f"{h_lo}:{h_hi}")
    b = basis(d, k, limits)
    scan = small_value_scan(x, b, eps, h_hi, _select_method(b.n, h_hi, method, limits), limits)
    result = _classify_witnesses(
        scan.records,
        as_coordinates(x),
        eps,
        (h_lo, scan.h_max),
        4 * limits.p_start,
    )
    result.truncated = scan.truncated
    logger.debug(
        "vwa H in [%d, %d]: %d witnesses, %d exact zeros, %d undecided",
        h_lo,
        scan.h_max,
        len(result.witnesses),
        len(result.exact_zeros),
        len(result.undecided),
    )
    return result


# ============================================================
# 分类
# ============================================================


class YuLabel(str, Enum):
    A_LIKE = "A-like"
    S_LIKE = "S-like"
    U_LIKE = "U-like"
    INCONCLUSIVE = "inconclusive"


@dataclass
class YuReport:
    """逐 k 的指数估计与启发式标签（标签仅供参考）"""

    label_point: str
    estimates: list[ExponentEstimate]
    sizes: list[int]  # n_k
    label: YuLabel
    threshold: Fraction = DEFAULT_U_THRESHOLD
    slack: Fraction = DEFAULT_SLACK

    @property
    def normalized(self) -> list[Fraction | None]:
        """ω̂_k / n_k；精确零为 None（即 +inf）"""
        return [None if e.infinite else e.value / n for e, n in zip(self.estimates, self.sizes)]

    @property
    def undecided(self) -> int:
        return sum(e.undecided for e in self.estimates)

    def to_dict(self) -> dict[str, Any]:
        return {
            "point": self.label_point,
            "k": list(range(1, len(self.estimates) + 1)),
            "n_k": self.sizes,
            "omega": [e.to_dict()["value"] for e in self.estimates],
            "normalized": ["+inf" if v is None else str(v) for v in self.normalized],
            "label": self.label.value,
            "threshold": str(self.threshold),
            "s_like_range": [str(1 - self.slack), str(self.threshold)],
            "undecided": self.undecided,
            "advisory": True,
        }


def _label(
    estimates: Sequence[ExponentEstimate],
    sizes: Sequence[int],
    threshold: Fraction,
    slack: Fraction,
) -> YuLabel:
    if any(e.infinite for e in estimates):
        return YuLabel.A_LIKE
    normalized = [e.value / n for e, n in zip(estimates, sizes)]
    if any(v > threshold for v in normalized):
        return YuLabel.U_LIKE
    if all(1 - slack <= v <= threshold for v in normalized):
        return YuLabel.S_LIKE
    return YuLabel.INCONCLUSIVE


def yu_class_heuristic(
    x: Sequence[Coordinate | int],
    d: int,
    k_max: int,
    q_max: int,
    method: Method | str | None = None,
    threshold: Fraction = DEFAULT_U_THRESHOLD,
    slack: Fraction = DEFAULT_SLACK,
    limits: ResourceLimits | None = None,
) -> YuReport:
    """对 k = 1..k_max 估计 ω̂_k 并给出启发式标签

    A-like 当且仅当某个 k 找到精确零；某个 ω̂_k/n_k 超过阈值为 U-like；
    全部落在 [1 - slack, 阈值] 为 S-like；其它为 inconclusive。
    """
    limits = limits or DEFAULT_LIMITS
    threshold, slack = Fraction(threshold), Fraction(slack)
    estimates: list[ExponentEstimate] = []
    sizes: list[int] = []
    for k in range(1, k_max + 1):
        estimate = estimate_omega_k(x, d, k, q_max, method, limits)
        estimates.append(estimate)
        sizes.append(basis(d, k, limits).n)
        if estimate.infinite:
            break
    label = _label(estimates, sizes, threshold, slack)
    coords = as_coordinates(x)
    name = ", ".join(
        str(c.meta.get("label", c.tag)) if isinstance(c, RealOracle) else str(c) for c in coords
    )
    return YuReport(f"({name})", estimates, sizes, label, threshold, slack)


# ============================================================
# 联立逼近与乘性统计
# ============================================================


@dataclass
class SimultaneousResult:
    q: int
    value: CertifiedValue  # max_i ‖q y_i‖
    estimate: ExponentEstimate
    scan: ScalarScan

    def to_dict(self) -> dict[str, Any]:
        return {
            "q": str(self.q),
            "value": self.value.to_dict(),
            "exponent": self.estimate.to_dict(),
            "undecided": [r.to_dict() for r in self.scan.undecided],
        }


def _oracles(y: Sequence[RealOracle | int | Fraction]) -> list[RealOracle]:
    return [v if isinstance(v, RealOracle) else RealOracle.from_rational(v) for v in y]


def simultaneous_best(
    y: Sequence[RealOracle | int | Fraction],
    q_max: int,
    limits: ResourceLimits | None = None,
) -> SimultaneousResult:
    """1 ≤ q ≤ q_max 上 max_i ‖q y_i‖ 的精确最小者与联立指数的有证下界"""
    scan = scan_multiples(_oracles(y), q_max, Statistic.SIMULTANEOUS, limits=limits)
    best = scan.best
    kind = EstimateKind.SIMULTANEOUS
    if best.value.exact == 0:
        estimate = ExponentEstimate(Fraction(0), kind, q_max, len(scan.records), True, str(best.q))
    else:
        rated = [
            (log_ratio_lower(r.value.upper, r.q), r.q)
            for r in scan.records
            if r.q >= 2 and r.value.upper > 0
        ]
        if rated:
            value, q = max(rated)
            estimate = ExponentEstimate(value, kind, q_max, len(rated), False, str(q))
        else:
            estimate = ExponentEstimate(Fraction(0), kind, q_max, 0)
    return SimultaneousResult(best.q, best.value, estimate, scan)


def multiplicative_best(
    y: Sequence[RealOracle | int | Fraction],
    q_max: int,
    limits: ResourceLimits | None = None,
) -> ScalarScan:
    """min_q q·Π‖q y_i‖ 的前缀最小记录"""
    return scan_multiples(_oracles(y), q_max, Statistic.MULTIPLICATIVE, limits=limits)


def linear_form_estimate(
    y: Sequence[RealOracle | int | Fraction],
    q_max: int,
    method: Method | str | None = None,
    limits: ResourceLimits | None = None,
) -> ExponentEstimate:
    """线性型 q·y + p 的指数估计，即 k = 1、d = len(y) 时的 ω̂_1"""
    return estimate_omega_k(list(y), len(y), 1, q_max, method, limits)


# ============================================================
# 转移不等式
# ============================================================


class TransferenceVerdict(str, Enum):
    CONSISTENT = "consistent"
    CONSISTENT_AT_DIRICHLET = "consistent-at-Dirichlet"
    PENDING = "inconsistent-pending-more-search"


@dataclass(frozen=True)
class TransferenceReport:
    """转移不等式诊断：ω ≥ nλ + n - 1 与 λ ≥ ω/((n-1)ω + n)"""

    n: int
    omega: str
    lam: str
    first_holds: bool
    second_holds: bool
    verdict: TransferenceVerdict

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "omega": self.omega,
            "lambda": self.lam,
            "omega_ge_n_lambda_plus_n_minus_1": self.first_holds,
            "lambda_ge_omega_over_n_minus_1_omega_plus_n": self.second_holds,
            "verdict": self.verdict.value,
            "diagnostic_only": True,
        }


def _transference_sides(omega: Fraction, lam: Fraction, n: int) -> tuple[Fraction, Fraction]:
    """返回两个不等式的右端"""
    return n * lam + n - 1, omega / ((n - 1) * omega + n)


def transference_equality_holds(n: int) -> bool:
    """ω = n、λ = 1/n 时两个不等式都取等号"""
    omega, lam = Fraction(n), Fraction(1, n)
    first, second = _transference_sides(omega, lam, n)
    return omega == first and lam == second


def transference_check(
    lin: ExponentEstimate,
    sim: ExponentEstimate,
    n: int,
    slack: Fraction = DEFAULT_TRANSFERENCE_SLACK,
) -> TransferenceReport:
    """在两个估计上检查转移不等式；有限尺度估计只是下界，结果仅作诊断"""
    omega_text = "+inf" if lin.infinite else str(lin.value)
    lam_text = "+inf" if sim.infinite else str(sim.value)
    if lin.infinite or sim.infinite:
        first = lin.infinite or not sim.infinite
        if n == 1:
            second = sim.infinite or not lin.infinite
        else:
            second = sim.infinite or sim.value + slack >= Fraction(1, n - 1)
        verdict = (
            TransferenceVerdict.CONSISTENT if first and second else TransferenceVerdict.PENDING
        )
        return TransferenceReport(n, omega_text, lam_text, first, second, verdict)
    omega, lam = lin.value, sim.value
    rhs_first, rhs_second = _transference_sides(omega, lam, n)
    if omega == n and lam == Fraction(1, n):
        verdict = TransferenceVerdict.CONSISTENT_AT_DIRICHLET
        return TransferenceReport(n, omega_text, lam_text, True, True, verdict)
    first = omega + slack >= rhs_first
    second = lam + slack >= rhs_second
    verdict = TransferenceVerdict.CONSISTENT if first and second else TransferenceVerdict.PENDING
    return TransferenceReport(n, omega_text, lam_text, first, second, verdict)


# ============================================================
# 有限性代理
# ============================================================


@dataclass
class FinitenessReport:
    """两个高度上界下的见证计数；计数相等视为稳定"""

    eps: Fraction
    h_small: int
    h_large: int
    count_small: int
    count_large: int
    witnesses: list[ApproximationRecord]
    undecided: int = 0

    @property
    def stabilized(self) -> bool:
        return self.count_small == self.count_large

    def to_dict(self) -> dict[str, Any]:
        return {
            "eps": str(self.eps),
            "H_small": str(self.h_small),
            "H_large": str(self.h_large),
            "count_small": self.count_small,
            "count_large": self.count_large,
            "stabilized": self.stabilized,
            "undecided": self.undecided,
            "witnesses": [w.to_dict() for w in self.witnesses],
        }


def finiteness_check(
    x: Sequence[Coordinate | int],
    d: int,
    k: int,
    eps: Fraction,
    h_small: int,
    h_large: int,
    method: Method | str | None = None,
    limits: ResourceLimits | None = None,
) -> FinitenessReport:
    """比较 H ≤ h_small 与 H ≤ h_large 内的见证个数"""
    result = detect_k_vwa(x, d, k, eps, (1, h_large), method, limits)
    witnesses = result.witnesses
    count_small = sum(1 for w in witnesses if w.heights.full <= h_small)
    return FinitenessReport(
        Fraction(eps),
        h_small,
        h_large,
        count_small,
        len(witnesses),
        witnesses,
        len(result.undecided),
    )


def point_vector(x: Sequence[Coordinate | int], d: int, k: int) -> tuple[RealOracle, ...]:
    """f(x) 的预言机向量，供联立逼近与 Bad(r) 扫描使用"""
    return veronese_oracles(basis(d, k), as_coordinates(x))
