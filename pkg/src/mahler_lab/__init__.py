# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
mahler-lab - 多维 Mahler 分类的精确丢番图逼近实验工具

在桌面尺度上计算并验证 Yu 分类背后的逼近量，提供：
- 有证区间算术与实数预言机
- 单项式基与整系数多项式的高度
- 暴力搜索与格约化搜索的记录表、Dirichlet 剖面 ε*(Q)
- 指数估计、k-VWA 见证、Yu 分类启发式与转移不等式诊断
- 加权 Bad(r) 统计量与可复现的随机点采样

使用示例:
    >>> from fractions import Fraction
    >>> from mahler_lab import basis, dirichlet_profile, make_rational
    >>>
    >>> profile = dirichlet_profile(make_rational([Fraction(1, 2)]), basis(1, 1), [2, 4, 8])
    >>> [str(s.value.exact) for s in profile.samples]
    ['1', '1/2', '1/4']
    >>> profile.verdict.value
    'singular-trend'

作者: 广东轻亿云软件科技有限公司
官网: https://www.qeasy.cloud
"""

from ._version import __version__, __version_info__

# 缓存
from .cache import RefinementCache

# 分类与指数
from .classify import (
    EstimateKind,
    ExponentEstimate,
    FinitenessReport,
    SimultaneousResult,
    TransferenceReport,
    TransferenceVerdict,
    VWAResult,
    YuLabel,
    YuReport,
    detect_k_vwa,
    estimate_omega_k,
    finiteness_check,
    linear_form_estimate,
    multiplicative_best,
    point_vector,
    simultaneous_best,
    transference_check,
    transference_equality_holds,
    verify_witness,
    yu_class_heuristic,
)

# 运行配置
from .config import RunConfig, load_config_file, merge_config, parse_schedule

# 核心异常
from .exceptions import (
    ConfigError,
    DependentBasisError,
    DimensionMismatchError,
    LatticeError,
    LatticePrecisionError,
    MahlerLabError,
    OracleConvergenceError,
    PointSpecError,
    PolynomialParseError,
    ReportError,
    ResourceLimitError,
    RootIsolationError,
    WeightVectorError,
)

# 测试点
from .gallery import (
    PointKind,
    PointSpec,
    make_algebraic,
    make_liouville,
    make_rational,
    on_zero_set,
    parse_point,
    sample_point,
    sample_points,
)

# 格约化
from .lattice import enumerate_short_vectors, is_lll_reduced, lll_reduce, small_form_candidates

# 资源上限
from .limits import DEFAULT_LIMITS, ResourceGuard, ResourceLimits, get_default_limits

# 单项式基
from .monomials import MonomialBasis, basis, basis_size, veronese_eval, veronese_oracles

# 有证数值
from .numerics import (
    DyadicInterval,
    RealOracle,
    Verdict,
    decide_below,
    int_dist,
    iroot,
    log2_enclosure,
    refine,
)

# 多项式
from .poly import HeightPair, IntPolynomial, certify_zero, eval_enclosure, eval_exact, heights
from .polyparse import parse_polynomial, parse_univariate

# 点类型注册
from .registry import PointFamily, PointKindRegistry, get_point_registry, point_kind

# 报告输出
from .report import ReportLine, ReportWriter, TextRenderer

# 搜索
from .search import (
    ApproximationRecord,
    CertifiedValue,
    DirichletProfile,
    EpsilonSample,
    Method,
    ProfileVerdict,
    RecordTable,
    ScalarScan,
    SmallValueScan,
    Statistic,
    WeightVector,
    admissible_box,
    brute_force_best,
    choose_method,
    dirichlet_profile,
    epsilon_star,
    is_dirichlet_improvable,
    prefix_weights,
    record_scan,
    scan_multiples,
    small_value_scan,
    weighted_bad_statistic,
)

__all__ = [
    # 版本信息
    "__version__",
    "__version_info__",
    # 核心异常
    "MahlerLabError",
    "ConfigError",
    "PointSpecError",
    "RootIsolationError",
    "PolynomialParseError",
    "WeightVectorError",
    "DimensionMismatchError",
    "ResourceLimitError",
    "OracleConvergenceError",
    "LatticeError",
    "DependentBasisError",
    "LatticePrecisionError",
    "ReportError",
    # 资源上限与缓存
    "ResourceLimits",
    "ResourceGuard",
    "DEFAULT_LIMITS",
    "get_default_limits",
    "RefinementCache",
    # 有证数值
    "DyadicInterval",
    "RealOracle",
    "Verdict",
    "refine",
    "int_dist",
    "decide_below",
    "log2_enclosure",
    "iroot",
    # 单项式基与多项式
    "MonomialBasis",
    "basis",
    "basis_size",
    "veronese_eval",
    "veronese_oracles",
    "IntPolynomial",
    "HeightPair",
    "heights",
    "eval_exact",
    "eval_enclosure",
    "certify_zero",
    "parse_polynomial",
    "parse_univariate",
    # 格约化
    "lll_reduce",
    "is_lll_reduced",
    "enumerate_short_vectors",
    "small_form_candidates",
    # 搜索
    "Method",
    "CertifiedValue",
    "WeightVector",
    "ApproximationRecord",
    "RecordTable",
    "EpsilonSample",
    "DirichletProfile",
    "ProfileVerdict",
    "Statistic",
    "ScalarScan",
    "SmallValueScan",
    "prefix_weights",
    "admissible_box",
    "record_scan",
    "brute_force_best",
    "epsilon_star",
    "dirichlet_profile",
    "is_dirichlet_improvable",
    "scan_multiples",
    "small_value_scan",
    "weighted_bad_statistic",
    "choose_method",
    # 分类与指数
    "EstimateKind",
    "ExponentEstimate",
    "VWAResult",
    "YuLabel",
    "YuReport",
    "SimultaneousResult",
    "TransferenceVerdict",
    "TransferenceReport",
    "FinitenessReport",
    "estimate_omega_k",
    "verify_witness",
    "detect_k_vwa",
    "yu_class_heuristic",
    "simultaneous_best",
    "multiplicative_best",
    "linear_form_estimate",
    "transference_check",
    "transference_equality_holds",
    "finiteness_check",
    "point_vector",
    # 测试点
    "PointKind",
    "PointSpec",
    "make_rational",
    "make_algebraic",
    "make_liouville",
    "on_zero_set",
    "sample_point",
    "sample_points",
    "parse_point",
    "PointFamily",
    "PointKindRegistry",
    "get_point_registry",
    "point_kind",
    # 配置与报告
    "RunConfig",
    "load_config_file",
    "merge_config",
    "parse_schedule",
    "ReportLine",
    "ReportWriter",
    "TextRenderer",
]
