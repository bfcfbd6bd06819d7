# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
资源上限

集中定义所有会随输入规模爆炸的计算的上限，并在超限时拒绝执行：
1. 单项式基大小
2. 暴力搜索的系数盒大小
3. 预言机迭代次数与工作精度
4. Liouville 数的大整数预算
5. 格枚举节点数
"""

import os
from dataclasses import dataclass, replace

from .exceptions import ConfigError, ResourceLimitError

THREADS_ENV = "MAHLER_LAB_THREADS"

# ============================================================
# 上限配置
# ============================================================


@dataclass(frozen=True)
class ResourceLimits:
    """资源上限配置"""

    # 单项式基大小 n 的上限
    max_basis_size: int = 1_000_000

    # 暴力搜索系数盒 (2Q+1)^n 的上限
    max_brute_evaluations: int = 1_000_000_000

    # 预言机单次精化的迭代上限
    oracle_iteration_cap: int = 64

    # 精度策略（二进制位）
    p_start: int = 64
    p_max: int = 2048

    # Liouville 数截断分母 b^(m!) 的位数上限
    max_liouville_bits: int = 1 << 16

    # 采样点的二进制分辨率上限
    max_resolution: int = 4096

    # 每个高度保留的候选上限
    max_shell_candidates: int = 4096

    # Fincke-Pohst 枚举节点上限
    max_enumeration_nodes: int = 200_000

    # 格构造精度重试次数
    lattice_retries: int = 3

    # 筛选时每块的系数向量个数
    chunk_size: int = 1 << 16

    # 工作线程数
    threads: int = 1

    # 采样器使用的位生成器（固定以保证可复现）
    rng_algorithm: str = "PCG64"

    def with_overrides(self, **changes: int | str) -> "ResourceLimits":
        """返回覆盖部分字段后的新配置"""
        return replace(self, **changes)  # type: ignore[arg-type]


DEFAULT_LIMITS = ResourceLimits()


def threads_from_env(default: int = 1) -> int:
    """读取 MAHLER_LAB_THREADS 环境变量

    Raises:
        ConfigError: 值不是正整数时抛出
    """
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV} 必须是正整数", key=THREADS_ENV, value=raw) from None
    if value < 1:
        raise ConfigError(f"{THREADS_ENV} 必须是正整数", key=THREADS_ENV, value=raw)
    return value


def get_default_limits() -> ResourceLimits:
    """默认上限，线程数受环境变量约束"""
    return DEFAULT_LIMITS.with_overrides(threads=threads_from_env(DEFAULT_LIMITS.threads))


# ============================================================
# 上限检查
# ============================================================


class ResourceGuard:
    """资源检查器

    使用示例：
        guard = ResourceGuard(limits)
        guard.check_box((40,) * 5)   # 超限时抛出 ResourceLimitError
    """

    def __init__(self, limits: ResourceLimits | None = None):
        self.limits = limits or DEFAULT_LIMITS

    def check_basis(self, n: int) -> None:
        """检查单项式基大小"""
        if n > self.limits.max_basis_size:
            raise ResourceLimitError("basis_size", self.limits.max_basis_size, n)

    def check_box(self, bounds: tuple[int, ...]) -> int:
        """检查系数盒大小，返回盒内向量个数"""
        count = 1
        for b in bounds:
            count *= 2 * b + 1
        if count > self.limits.max_brute_evaluations:
            raise ResourceLimitError("brute_evaluations", self.limits.max_brute_evaluations, count)
        return count

    def check_scan(self, q_max: int) -> None:
        """检查一维扫描长度（Bad(r) 与联立逼近）"""
        if q_max > self.limits.max_brute_evaluations:
            raise ResourceLimitError("brute_evaluations", self.limits.max_brute_evaluations, q_max)

    def check_liouville(self, bits: int) -> None:
        """检查 Liouville 截断分母位数"""
        if bits > self.limits.max_liouville_bits:
            raise ResourceLimitError("liouville_bits", self.limits.max_liouville_bits, bits)

    def check_resolution(self, resolution: int) -> None:
        """检查采样分辨率"""
        if resolution > self.limits.max_resolution:
            raise ResourceLimitError("resolution", self.limits.max_resolution, resolution)

    def check_precision(self, p: int) -> None:
        """检查请求精度不超过 p_max"""
        if p > self.limits.p_max:
            raise ResourceLimitError("precision", self.limits.p_max, p)
