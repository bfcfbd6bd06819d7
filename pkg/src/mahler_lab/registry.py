# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
点类型注册表

管理 `--point kind:args` 中可用的点类型。
"""

from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class PointFamily(str, Enum):
    """点类型分类"""

    EXACT = "exact"  # 有理点与代数点
    SERIES = "series"  # 级数构造
    ZERO_SET = "zero_set"  # 多项式零点集上的点
    SAMPLE = "sample"  # 随机采样


@dataclass
class PointKindDefinition:
    """点类型定义

    builder 接收 kind 之后的参数串与维数 d，返回 PointSpec。
    """

    name: str  # 类型名
    builder: Callable[[str, int], Any]  # (参数串, d) -> PointSpec
    family: PointFamily  # 分类
    description: str = ""  # 描述
    syntax: str = ""  # 语法（用于文档）
    examples: list[str] = field(default_factory=list)  # 使用示例

    def __call__(self, args: str, d: int) -> Any:
        return self.builder(args, d)


class PointKindRegistry:
    """点类型注册表

    使用示例：
        registry = PointKindRegistry()
        registry.register("rational", build_rational, PointFamily.EXACT)
        spec = registry.get("rational")("1/2,1/3", 2)
    """

    def __init__(self) -> None:
        self._kinds: dict[str, PointKindDefinition] = {}
        self._aliases: dict[str, str] = {}  # 别名 -> 原名

    def register(
        self,
        name: str,
        builder: Callable[[str, int], Any],
        family: PointFamily,
        description: str = "",
        syntax: str = "",
        examples: list[str] | None = None,
        aliases: list[str] | None = None,
    ) -> None:
        self._kinds[name] = PointKindDefinition(
            name=name,
            builder=builder,
            family=family,
            description=description,
            syntax=syntax,
            examples=examples or [],
        )
        for alias in aliases or []:
            self._aliases[alias] = name

    def get(self, name: str) -> PointKindDefinition | None:
        """按名称或别名获取定义，未找到返回 None"""
        return self._kinds.get(self._aliases.get(name, name))

    def has(self, name: str) -> bool:
        return self.get(name) is not None

    def list_all(self) -> list[str]:
        return list(self._kinds)

    def list_by_family(self, family: PointFamily) -> list[str]:
        return [name for name, d in self._kinds.items() if d.family == family]

    def to_documentation(self) -> dict[str, list[dict[str, Any]]]:
        """按分类组织的点类型文档"""
        docs: dict[str, list[dict[str, Any]]] = {}
        for definition in self._kinds.values():
            docs.setdefault(definition.family.value, []).append(
                {
                    "name": definition.name,
                    "description": definition.description,
                    "syntax": definition.syntax,
                    "examples": definition.examples,
                }
            )
        return docs


# ============================================================
# 全局注册表
# ============================================================


_POINT_REGISTRY = PointKindRegistry()


def point_kind(
    name: str,
    family: PointFamily,
    description: str = "",
    syntax: str = "",
    examples: list[str] | None = None,
    aliases: list[str] | None = None,
) -> Callable[[Callable[[str, int], Any]], Callable[[str, int], Any]]:
    """点类型装饰器

    使用示例：
        @point_kind("rational", PointFamily.EXACT, syntax="rational:a/b,...")
        def build_rational(args: str, d: int) -> PointSpec:
            ...
    """

    def decorator(builder: Callable[[str, int], Any]) -> Callable[[str, int], Any]:
        _POINT_REGISTRY.register(
            name,
            builder,
            family,
            description=description,
            syntax=syntax,
            examples=examples,
            aliases=aliases,
        )
        return builder

    return decorator


def get_point_registry() -> PointKindRegistry:
    """获取全局点类型注册表"""
    return _POINT_REGISTRY
