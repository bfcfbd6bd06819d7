# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
运行配置

- RunConfig：一次运行的完整配置（点规格、d、k、Q 序列、方法、精度策略、输出）
- 配置文件：纯 key=value，# 开头为注释
- 优先级：命令行参数 > 配置文件 > 默认值
- 配置哈希：规范 JSON（不含输出路径）的 sha256，写入每条输出记录
"""

import hashlib
import json
import re
from dataclasses import asdict, dataclass, fields, replace
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Any

from .exceptions import ConfigError
from .limits import ResourceLimits, get_default_limits
from .search import Method, WeightVector

# 不参与哈希的字段
_UNHASHED = frozenset({"out", "config", "verbose"})

_INT_PATTERN = re.compile(r"^\s*(\d+)\s*\^\s*(\d+)\s*$")


# ============================================================
# 数值解析
# ============================================================


def parse_int(text: str) -> int:
    """解析 "1000"、"10^6"、"1e4" 形式的正整数

    Raises:
        ConfigError: 不是整数
    """
    text = text.strip()
    match = _INT_PATTERN.match(text)
    if match:
        return int(match.group(1)) ** int(match.group(2))
    try:
        value = Decimal(text)
    except InvalidOperation as e:
        raise ConfigError(f"无法解析整数: {text}", value=text) from e
    if value != value.to_integral_value():
        raise ConfigError(f"不是整数: {text}", value=text)
    return int(value)


def parse_schedule(text: str) -> list[int]:
    """解析 Q 序列

    支持：
    - 逗号列表: 2,4,8
    - 几何序列: a:b:xn（从 a 起每次乘 n，不超过 b）
    - 算术序列: a:b:+s

    Raises:
        ConfigError: 格式错误或序列为空
    """
    text = text.strip()
    if ":" not in text:
        values = [parse_int(part) for part in text.split(",") if part.strip()]
    else:
        parts = text.split(":")
        if len(parts) != 3 or len(parts[2]) < 2 or parts[2][0] not in "x+":
            raise ConfigError(f"序列格式应为 a:b:xn 或 a:b:+s: {text}", key="Q", value=text)
        start, stop, step = parse_int(parts[0]), parse_int(parts[1]), parse_int(parts[2][1:])
        geometric = parts[2][0] == "x"
        if start < 1 or (geometric and step < 2) or (not geometric and step < 1):
            raise ConfigError(f"序列参数无效: {text}", key="Q", value=text)
        values = []
        q = start
        while q <= stop:
            values.append(q)
            q = q * step if geometric else q + step
    if not values or any(v < 1 for v in values):
        raise ConfigError(f"Q 序列必须非空且为正整数: {text}", key="Q", value=text)
    return sorted(set(values))


def parse_h_range(text: str) -> tuple[int, int]:
    """解析 "lo:hi" 或单个上界 "hi"（下界为 1）"""
    lo, sep, hi = text.partition(":")
    low, high = (parse_int(lo), parse_int(hi)) if sep else (1, parse_int(lo))
    if not 1 <= low <= high:
        raise ConfigError(f"高度区间无效: {text}", key="h_range", value=text)
    return low, high


# ============================================================
# 运行配置
# ============================================================


@dataclass(frozen=True)
class RunConfig:
    """一次运行的完整配置"""

    command: str = ""  # 子命令
    point: str | None = None  # 点规格 kind:args
    d: int = 1  # 变量个数
    k: int = 1  # 总次数
    k_max: int | None = None  # 分类时的最大 k
    q: str | None = None  # Q 序列或 Q_max
    method: str | None = None  # brute / lattice，None 表示自动选择
    weights: str | None = None  # 权重向量 "1/2,1/2"
    eps: str | None = None  # 有理数 eps
    h_range: str | None = None  # 高度区间 lo:hi
    seed: int = 0  # 采样种子
    count: int = 1  # 采样个数
    resolution: int = 64  # 采样分辨率（位或三进制位数）
    kind: str = "lebesgue"  # 采样类型
    p_start: int = 64  # 起始精度
    p_max: int = 2048  # 精度上限
    format: str = "jsonl"  # 输出格式 jsonl / csv / text
    out: str | None = None  # 输出文件
    config: str | None = None  # 配置文件路径
    verbose: bool = False  # 调试日志

    def __post_init__(self) -> None:
        if self.d < 1 or self.k < 1:
            raise ConfigError(f"需要 d ≥ 1 且 k ≥ 1 (d={self.d}, k={self.k})")
        if self.method is not None and self.method not in {m.value for m in Method}:
            raise ConfigError(f"未知的方法: {self.method}", key="method", value=self.method)
        if self.format not in ("jsonl", "csv", "text"):
            raise ConfigError(
                f"未知的输出格式: {self.format}", key="format", value=self.format
            )
        if not 8 <= self.p_start <= self.p_max:
            raise ConfigError("需要 8 ≤ p_start ≤ p_max", key="p_max", value=self.p_max)

    # ---------- 派生值 ----------

    def canonical(self) -> dict[str, Any]:
        """参与哈希的规范字典"""
        return {k: v for k, v in sorted(asdict(self).items()) if k not in _UNHASHED}

    @property
    def config_hash(self) -> str:
        payload = json.dumps(
            self.canonical(), sort_keys=True, separators=(",", ":"), ensure_ascii=False
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def schedule(self, default: str = "2:64:x2") -> list[int]:
        return parse_schedule(self.q or default)

    def q_max(self, default: str = "1000") -> int:
        return self.schedule(default)[-1]

    def weight_vector(self) -> WeightVector | None:
        return WeightVector.parse(self.weights) if self.weights else None

    def eps_value(self, default: str = "1/2") -> Fraction:
        try:
            value = Fraction(self.eps or default)
        except (ValueError, ZeroDivisionError) as e:
            raise ConfigError(f"无法解析 eps: {self.eps}", key="eps", value=self.eps) from e
        if value <= 0:
            raise ConfigError("eps 必须为正", key="eps", value=self.eps)
        return value

    def limits(self, base: ResourceLimits | None = None) -> ResourceLimits:
        """把精度策略合并进资源上限（线程数来自环境变量）"""
        base = base or get_default_limits()
        return base.with_overrides(p_start=self.p_start, p_max=self.p_max)


# ============================================================
# 加载与合并
# ============================================================


_INT_FIELDS = frozenset({"d", "k", "k_max", "seed", "count", "resolution", "p_start", "p_max"})

# 配置文件中与命令行参数同名的写法
_KEY_ALIASES = {"Q": "q", "pmax": "p_max", "pstart": "p_start"}


def _field_names() -> set[str]:
    return {f.name for f in fields(RunConfig)}


def _convert(key: str, raw: Any) -> Any:
    if raw is None or not isinstance(raw, str):
        return raw
    if key in _INT_FIELDS:
        return parse_int(raw)
    if key == "verbose":
        return raw.strip().lower() in ("1", "true", "yes", "on")
    return raw.strip()


def load_config_file(path: str | Path) -> dict[str, Any]:
    """读取 key=value 配置文件

    Raises:
        ConfigError: 文件不存在、行格式错误或未知键
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"无法读取配置文件: {path}", key="config", value=str(path)) from e
    known = _field_names()
    values: dict[str, Any] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("-", "_")
        key = _KEY_ALIASES.get(key, key)
        if not sep:
            raise ConfigError(f"第 {number} 行缺少 '=': {line}", key="config", value=str(path))
        if key not in known or key in ("config", "command"):
            raise ConfigError(f"未知的配置键: {key}", key=key)
        values[key] = _convert(key, value)
    return values


def merge_config(flags: dict[str, Any], command: str) -> RunConfig:
    """按 命令行 > 配置文件 > 默认值 合并

    flags 中值为 None 的键视为未指定。
    """
    known = _field_names()
    values: dict[str, Any] = {}
    config_path = flags.get("config")
    if config_path:
        values.update(load_config_file(config_path))
    for key, value in flags.items():
        if key in known and value is not None:
            values[key] = _convert(key, value)
    values["command"] = command
    return replace(RunConfig(), **values)
