# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
命令行接口

提供 mahler-lab 命令行工具。数据写到标准输出或 --out 文件（追加），
诊断信息一律写到标准错误。

使用示例:
    # 单项式基
    mahler-lab basis -d 2 -k 2

    # Dirichlet 剖面
    mahler-lab dirichlet --point rational:1/2 -d 1 -k 1 --Q 2,4,8

    # 记录表与 c_min
    mahler-lab records --point "algebraic:x**2-x-1@1:2" --Q 10^4

    # Yu 分类启发式
    mahler-lab classify --point liouville:10,4 --k-max 2 --Q 1000 --format text

    # 采样
    mahler-lab gallery --kind cantor --seed 7 -d 2 --count 3

退出码: 0 成功，1 其他错误，2 配置无效，3 超出资源上限，4 存在精度上限内无法判定的结果
"""

import argparse
import logging
import sys
from collections.abc import Callable, Sequence
from contextlib import ExitStack
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ._version import __version__
from .classify import (
    detect_k_vwa,
    estimate_omega_k,
    finiteness_check,
    linear_form_estimate,
    multiplicative_best,
    point_vector,
    simultaneous_best,
    transference_check,
    yu_class_heuristic,
)
from .config import RunConfig, merge_config, parse_h_range
from .exceptions import (
    ConfigError,
    DimensionMismatchError,
    MahlerLabError,
    ResourceLimitError,
)
from .gallery import PointSpec, parse_point, sample_points
from .monomials import basis
from .numerics import refine
from .registry import get_point_registry
from .report import ReportLine, ReportWriter
from .search import (
    Method,
    WeightVector,
    choose_method,
    dirichlet_profile,
    is_dirichlet_improvable,
    record_scan,
    weighted_bad_statistic,
)
from .selftest import run_selftest

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_RESOURCE = 3
EXIT_UNDECIDED = 4


@dataclass
class CommandResult:
    """子命令的输出载荷"""

    payloads: list[dict[str, Any]] = field(default_factory=list)
    undecided: bool = False  # 存在精度上限内无法判定的结果
    failed: bool = False  # 自检失败


# ============================================================
# 公共辅助
# ============================================================


def _point(config: RunConfig) -> PointSpec:
    if not config.point:
        raise ConfigError("需要 --point", key="point")
    return parse_point(config.point, config.d)


def _method(config: RunConfig, n: int, q_max: int) -> Method:
    if config.method is not None:
        return Method(config.method)
    return choose_method(n, q_max, config.limits())


def _header(spec: PointSpec, config: RunConfig) -> dict[str, Any]:
    return {"point": spec.to_dict(), "d": config.d, "k": config.k}


# ============================================================
# 子命令
# ============================================================


def cmd_basis(config: RunConfig) -> CommandResult:
    """打印单项式基"""
    b = basis(config.d, config.k, config.limits())
    payload = {
        "d": b.d,
        "k": b.k,
        "n": b.n,
        "monomials": list(b.labels),
        "exponents": b.to_list(),
    }
    return CommandResult([payload])


def cmd_dirichlet(config: RunConfig) -> CommandResult:
    """Q 序列上的 ε*(Q) 剖面"""
    spec = _point(config)
    b = basis(config.d, config.k, config.limits())
    schedule = config.schedule()
    method = _method(config, b.n, schedule[-1])
    profile = dirichlet_profile(
        spec.coordinates, b, schedule, method, config.weight_vector(), config.limits()
    )
    payload = profile.to_dict()
    undecided = False
    if config.eps is not None:
        tail_start = profile.samples[len(profile.samples) - max(1, len(profile.samples) // 3)]
        improvable = is_dirichlet_improvable(profile, config.eps_value(), tail_start.q_bound)
        payload["improvable"] = {
            "eps": str(config.eps_value()),
            "Q0": tail_start.q_bound,
            "holds": improvable,
            "heuristic": True,
        }
        undecided = improvable is None
    return CommandResult([payload], undecided)


def cmd_records(config: RunConfig) -> CommandResult:
    """逐次最小记录表与 c_min"""
    spec = _point(config)
    b = basis(config.d, config.k, config.limits())
    q_max = config.q_max()
    table = record_scan(spec.coordinates, b, q_max, _method(config, b.n, q_max), config.limits())
    return CommandResult([table.to_dict()], bool(table.undecided))


def cmd_exponent(config: RunConfig) -> CommandResult:
    """ω̂_k 的有证下界"""
    spec = _point(config)
    estimate = estimate_omega_k(
        spec.coordinates, config.d, config.k, config.q_max(), config.method, config.limits()
    )
    return CommandResult(
        [{**_header(spec, config), "omega": estimate.to_dict()}], estimate.undecided > 0
    )


def cmd_classify(config: RunConfig) -> CommandResult:
    """Yu 分类启发式标签"""
    spec = _point(config)
    report = yu_class_heuristic(
        spec.coordinates,
        config.d,
        config.k_max or config.k,
        config.q_max(),
        config.method,
        limits=config.limits(),
    )
    return CommandResult([report.to_dict()], report.undecided > 0)


def cmd_vwa(config: RunConfig) -> CommandResult:
    """k-VWA 见证"""
    spec = _point(config)
    h_range = parse_h_range(config.h_range or str(config.q_max()))
    result = detect_k_vwa(
        spec.coordinates,
        config.d,
        config.k,
        config.eps_value(),
        h_range,
        config.method,
        config.limits(),
    )
    return CommandResult([{**_header(spec, config), **result.to_dict()}], bool(result.undecided))


def cmd_bad(config: RunConfig) -> CommandResult:
    """加权 Bad(r) 统计量"""
    spec = _point(config)
    y = point_vector(spec.coordinates, config.d, config.k)
    weights = config.weight_vector() or WeightVector.uniform(len(y))
    scan = weighted_bad_statistic(y, weights, config.q_max(), config.limits())
    payload = {**_header(spec, config), "weights": weights.to_list(), **scan.to_dict()}
    return CommandResult([payload], bool(scan.undecided))


def cmd_simul(config: RunConfig) -> CommandResult:
    """联立逼近最优、乘性统计与转移不等式诊断"""
    spec = _point(config)
    y = point_vector(spec.coordinates, config.d, config.k)
    q_max = config.q_max()
    limits = config.limits()
    simultaneous = simultaneous_best(y, q_max, limits)
    multiplicative = multiplicative_best(y, q_max, limits)
    linear = linear_form_estimate(y, q_max, config.method, limits)
    transference = transference_check(linear, simultaneous.estimate, len(y))
    payload = {
        **_header(spec, config),
        "n": len(y),
        "simultaneous": simultaneous.to_dict(),
        "multiplicative": multiplicative.to_dict(),
        "linear": linear.to_dict(),
        "transference": transference.to_dict(),
    }
    undecided = bool(simultaneous.scan.undecided or multiplicative.undecided)
    return CommandResult([payload], undecided)


def cmd_finite(config: RunConfig) -> CommandResult:
    """Roth 型有限性代理：小高度与大高度内见证个数是否稳定"""
    spec = _point(config)
    q_max = config.q_max()
    h_small, h_large = parse_h_range(config.h_range or f"{max(1, q_max // 10)}:{q_max}")
    report = finiteness_check(
        spec.coordinates,
        config.d,
        config.k,
        config.eps_value(),
        h_small,
        h_large,
        config.method,
        config.limits(),
    )
    return CommandResult([{**_header(spec, config), **report.to_dict()}], report.undecided > 0)


def _describe(spec: PointSpec, precision: int) -> dict[str, Any]:
    coordinates = []
    for oracle in spec.coordinates:
        lo, hi = refine(oracle, precision).to_decimal_pair()
        coordinates.append([lo, hi])
    return {"point": spec.to_dict(), "precision": precision, "coordinates": coordinates}


def cmd_gallery(config: RunConfig) -> CommandResult:
    """构造或采样测试点"""
    if config.point:
        specs = [_point(config)]
    else:
        specs = sample_points(
            config.kind, config.seed, config.d, config.resolution, config.count, config.limits()
        )
    return CommandResult([_describe(spec, config.p_start) for spec in specs])


def cmd_points(config: RunConfig) -> CommandResult:
    """列出可用的点类型"""
    return CommandResult([{"kinds": get_point_registry().to_documentation()}])


def cmd_selftest(config: RunConfig) -> CommandResult:
    """运行快速不变量检查"""
    results = run_selftest()
    failed = [r.name for r in results if not r.passed]
    for name in failed:
        print(f"错误: 自检 {name} 失败", file=sys.stderr)
    return CommandResult([r.to_dict() for r in results], failed=bool(failed))


COMMANDS: dict[str, tuple[Callable[[RunConfig], CommandResult], str]] = {
    "basis": (cmd_basis, "打印单项式基"),
    "dirichlet": (cmd_dirichlet, "Dirichlet 剖面 ε*(Q)"),
    "records": (cmd_records, "逐次最小记录表与 c_min"),
    "exponent": (cmd_exponent, "ω̂_k 的有证下界"),
    "classify": (cmd_classify, "Yu 分类启发式"),
    "vwa": (cmd_vwa, "k-VWA 见证"),
    "bad": (cmd_bad, "加权 Bad(r) 统计量"),
    "simul": (cmd_simul, "联立逼近与转移不等式诊断"),
    "finite": (cmd_finite, "Roth 型有限性代理"),
    "gallery": (cmd_gallery, "构造或采样测试点"),
    "points": (cmd_points, "列出点类型"),
    "selftest": (cmd_selftest, "运行自检"),
}


# ============================================================
# 解析器
# ============================================================


def _common_options() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--point", default=None, help="点规格 kind:args，见 points 子命令")
    parent.add_argument("-d", type=int, default=None, help="变量个数（默认: 1）")
    parent.add_argument("-k", type=int, default=None, help="总次数（默认: 1）")
    parent.add_argument(
        "--k-max", dest="k_max", type=int, default=None, help="分类的最大次数"
    )
    parent.add_argument(
        "--Q",
        dest="q",
        default=None,
        help="Q 序列: 逗号列表、a:b:xn 或 a:b:+s；取最后一项为 Q_max",
    )
    parent.add_argument(
        "--method",
        choices=[m.value for m in Method],
        default=None,
        help="搜索方法（默认自动）",
    )
    parent.add_argument("--weights", default=None, help="权重向量，如 1/2,1/2")
    parent.add_argument("--eps", default=None, help="有理数 eps，如 1/2")
    parent.add_argument("--h-range", dest="h_range", default=None, help="高度区间 lo:hi")
    parent.add_argument("--seed", type=int, default=None, help="采样种子")
    parent.add_argument("--count", type=int, default=None, help="采样个数")
    parent.add_argument("--resolution", type=int, default=None, help="采样分辨率")
    parent.add_argument("--kind", choices=["lebesgue", "cantor"], default=None, help="采样类型")
    parent.add_argument(
        "--pmax", dest="p_max", type=int, default=None, help="精度上限（位）"
    )
    parent.add_argument("--out", default=None, help="输出文件（追加写入）")
    parent.add_argument(
        "--format",
        choices=["jsonl", "csv", "text"],
        default=None,
        help="输出格式（默认: jsonl）",
    )
    parent.add_argument("--config", default=None, help="key=value 配置文件")
    parent.add_argument("-v", "--verbose", action="store_true", default=None, help="调试日志")
    return parent


def create_parser() -> argparse.ArgumentParser:
    """创建命令行解析器"""
    parser = argparse.ArgumentParser(
        prog="mahler-lab",
        description="mahler-lab - 多维 Mahler 分类的精确丢番图逼近实验工具",
    )
    subparsers = parser.add_subparsers(dest="command", help="可用命令")
    parent = _common_options()
    for name, (_, help_text) in COMMANDS.items():
        subparsers.add_parser(name, parents=[parent], help=help_text)
    subparsers.add_parser("version", help="显示版本信息")
    return parser


# ============================================================
# 入口
# ============================================================


def _configure_logging(verbose: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("mahler_lab")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    root.propagate = False


def _emit(config: RunConfig, result: CommandResult) -> None:
    with ExitStack() as stack:
        stream = (
            stack.enter_context(Path(config.out).open("a", encoding="utf-8"))
            if config.out
            else sys.stdout
        )
        writer = ReportWriter(stream, config.format)
        for payload in result.payloads:
            writer.write(ReportLine(config.config_hash, config.command, payload))


def _execute(args: argparse.Namespace) -> int:
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    config = merge_config(flags, args.command)
    _configure_logging(config.verbose)
    logger.debug("config %s: %s", config.config_hash[:12], config.canonical())
    handler, _ = COMMANDS[args.command]
    result = handler(config)
    _emit(config, result)
    if result.failed:
        return EXIT_FAILURE
    return EXIT_UNDECIDED if result.undecided else EXIT_OK


def run(argv: Sequence[str] | None = None) -> int:
    """运行命令行，返回退出码"""
    parser = create_parser()
    args = parser.parse_args(argv)

    if args.command is None:
        parser.print_help(sys.stderr)
        return EXIT_OK
    if args.command == "version":
        print(f"mahler-lab {__version__}")
        return EXIT_OK

    try:
        return _execute(args)
    except (ConfigError, DimensionMismatchError) as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceLimitError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except MahlerLabError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_FAILURE
    except OSError as e:
        print(f"错误: {e}", file=sys.stderr)
        return EXIT_FAILURE


def main() -> int:
    """主入口函数"""
    return run()


if __name__ == "__main__":
    sys.exit(main())
