# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
mahler-lab 异常定义

定义点构造、精度提升、格约化、搜索与命令行过程中可能出现的异常。
命令行按异常族映射退出码：配置错误 2，资源上限 3。
"""

from typing import Any


class MahlerLabError(Exception):
    """mahler-lab 基础异常类"""

    def __init__(self, message: str, details: dict[str, Any] | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self) -> str:
        if self.details:
            return f"{self.message} - {self.details}"
        return self.message


# ============================================================
# 配置与输入错误（退出码 2）
# ============================================================


class ConfigError(MahlerLabError):
    """运行配置无效"""

    def __init__(self, message: str, key: str | None = None, value: Any = None):
        self.key = key
        self.value = value
        details: dict[str, Any] = {}
        if key is not None:
            details["key"] = key
            details["value"] = value
        super().__init__(message, details=details)


class PointSpecError(ConfigError):
    """点描述无效

    当 --point 字符串无法解析或参数不合法时抛出。
    """

    def __init__(self, spec: str, message: str | None = None):
        self.spec = spec
        super().__init__(message or f"无效的点描述: {spec}", key="point", value=spec)


class RootIsolationError(PointSpecError):
    """隔离区间内根不唯一或多项式不变号"""

    def __init__(self, polynomial: str, interval: tuple[Any, Any], roots: int | None = None):
        self.polynomial = polynomial
        self.interval = interval
        self.roots = roots
        msg = f"区间 [{interval[0]}, {interval[1]}] 不能隔离 {polynomial} 的唯一实根"
        if roots is not None:
            msg += f" (根数: {roots})"
        super().__init__(f"{polynomial}@{interval[0]}:{interval[1]}", msg)


class PolynomialParseError(ConfigError):
    """多项式表达式解析错误"""

    def __init__(self, expression: str, message: str | None = None):
        self.expression = expression
        super().__init__(
            message or f"无法解析多项式: {expression}", key="polynomial", value=expression
        )


class WeightVectorError(ConfigError):
    """权重向量无效（负分量、和不为 1 或长度不符）"""

    def __init__(self, weights: Any, message: str | None = None):
        self.weights = weights
        message = message or f"无效的权重向量: {weights}"
        super().__init__(message, key="weights", value=weights)


class DimensionMismatchError(MahlerLabError):
    """点的坐标个数与维数 d 不一致"""

    def __init__(self, expected: int, actual: int):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f"坐标个数不符: 期望 {expected}, 实际 {actual}",
            details={"expected": expected, "actual": actual},
        )


# ============================================================
# 资源上限（退出码 3）
# ============================================================


class ResourceLimitError(MahlerLabError):
    """请求超出资源上限，拒绝执行"""

    def __init__(self, resource: str, limit: int, requested: int):
        self.resource = resource
        self.limit = limit
        self.requested = requested
        super().__init__(
            f"超出资源上限: {resource} (上限 {limit}, 请求 {requested})",
            details={"resource": resource, "limit": limit, "requested": requested},
        )


# ============================================================
# 数值与格错误
# ============================================================


class OracleConvergenceError(MahlerLabError):
    """实数预言机在迭代上限内未达到所需精度"""

    def __init__(self, tag: str, precision: int, iterations: int):
        self.tag = tag
        self.precision = precision
        self.iterations = iterations
        super().__init__(
            f"预言机 {tag} 在 {iterations} 次迭代内未收敛到 2^-{precision}",
            details={"tag": tag, "precision": precision, "iterations": iterations},
        )


class LatticeError(MahlerLabError):
    """格约化基础异常"""


class DependentBasisError(LatticeError):
    """格基行向量线性相关"""

    def __init__(self, row: int):
        self.row = row
        super().__init__(f"格基线性相关 (第 {row} 行)", details={"row": row})


class LatticePrecisionError(LatticeError):
    """线性型格的取整在重试后仍不稳定"""

    def __init__(self, precision: int, retries: int):
        self.precision = precision
        self.retries = retries
        super().__init__(
            f"格构造精度耗尽 (p={precision}, 重试 {retries} 次)",
            details={"precision": precision, "retries": retries},
        )


# ============================================================
# 报告输出错误
# ============================================================


class ReportError(MahlerLabError):
    """报告渲染或写出失败"""

    def __init__(self, command: str, message: str, cause: Exception | None = None):
        self.command = command
        self.cause = cause
        details: dict[str, Any] = {"command": command}
        if cause is not None:
            details["cause"] = type(cause).__name__
        super().__init__(message, details=details)
