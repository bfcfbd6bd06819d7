# Copyright (c) 2024-2026 广东轻亿云软件科技有限公司
# AGPL-3.0 License - 商业用途需购买许可
# 详见 LICENSE 和 COMMERCIAL-LICENSE.txt

"""
报告输出

- ReportLine：一条输出记录（配置哈希、子命令、时间戳、载荷）
- JSON-lines：主输出格式，每行一个对象，整数一律写成十进制字符串
- CSV：剖面与记录表导出，列为 Q, eps_lo, eps_hi, witness
- 文本：基于 Jinja2 的可读报告
"""

import csv
import io
import json
import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Any, TextIO

from jinja2 import BaseLoader, Environment, StrictUndefined, TemplateError

from .exceptions import ConfigError, ReportError

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("Q", "eps_lo", "eps_hi", "witness")


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def stringify_integers(value: Any) -> Any:
    """递归地把整数转成十进制字符串（布尔值保持不变）"""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, int):
        return str(value)
    if isinstance(value, Mapping):
        return {k: stringify_integers(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [stringify_integers(v) for v in value]
    return value


# ============================================================
# 输出记录
# ============================================================


@dataclass(frozen=True)
class ReportLine:
    """一条输出记录

    载荷由配置唯一确定；时间戳只出现在外层，不参与比较。
    """

    config_hash: str
    command: str
    payload: dict[str, Any]
    timestamp: str = field(default_factory=_timestamp)

    def payload_json(self) -> str:
        """载荷的规范 JSON（用于确定性比较）"""
        return json.dumps(
            stringify_integers(self.payload), ensure_ascii=False, separators=(",", ":"), default=str
        )

    def to_json(self) -> str:
        data = {
            "config_hash": self.config_hash,
            "command": self.command,
            "timestamp": self.timestamp,
            "payload": stringify_integers(self.payload),
        }
        return json.dumps(data, ensure_ascii=False, separators=(",", ":"), default=str)


# ============================================================
# CSV 导出
# ============================================================


def _interval(value: Mapping[str, Any]) -> tuple[str, str]:
    lo, hi = value["interval"]
    return str(lo), str(hi)


def csv_rows(command: str, payload: Mapping[str, Any]) -> list[tuple[str, str, str, str]]:
    """剖面或记录表的 CSV 行

    Raises:
        ConfigError: 子命令不产生表格
    """
    rows: list[tuple[str, str, str, str]] = []
    if "samples" in payload:
        for sample in payload["samples"]:
            lo, hi = _interval(sample["eps"])
            rows.append((str(sample["Q"]), lo, hi, sample["witness"] or ""))
    elif "entries" in payload:
        for entry in payload["entries"]:
            lo, hi = _interval(entry["value"])
            rows.append((str(entry["H_tilde"]), lo, hi, entry["expr"]))
    else:
        raise ConfigError(f"{command} 不支持 csv 输出", key="format", value="csv")
    return rows


# ============================================================
# 文本报告
# ============================================================


_HEADER = "# {{ command }}  config={{ config_hash[:12] }}  {{ timestamp }}\n"

_TEMPLATES: dict[str, str] = {
    "basis": _HEADER
    + "d={{ payload.d }} k={{ payload.k }} n={{ payload.n }}\n"
    + "{% for m in payload.monomials %}{{ loop.index }}. {{ m }}\n{% endfor %}",
    "dirichlet": _HEADER
    + "point: {{ payload.point }}  d={{ payload.d }} k={{ payload.k }}"
    + "  method={{ payload.method }}\n"
    + "{% for s in payload.samples %}"
    + "Q={{ s.Q }}  eps* in [{{ s.eps.interval[0] }}, {{ s.eps.interval[1] }}]"
    + "  witness: {{ s.witness | default('-', true) }}\n{% endfor %}"
    + "verdict: {{ payload.verdict }} (finite-scale heuristic)\n"
    + "tail sup: {{ payload.tail_sup }}\n",
    "records": _HEADER
    + "point: {{ payload.point }}  d={{ payload.d }} k={{ payload.k }}"
    + "  Q_max={{ payload.Q_max }}\n"
    + "{% for e in payload.entries %}"
    + "H~={{ e.H_tilde }}  |P(x)| in [{{ e.value.interval[0] }}, {{ e.value.interval[1] }}]"
    + "  P = {{ e.expr }}\n{% endfor %}"
    + "c_min: {{ payload.c_min | default('-', true) }}"
    + "{% if payload.exact_zero %}  (exact zero){% endif %}\n"
    + "{% if payload.undecided %}undecided: {{ payload.undecided | length }}\n{% endif %}",
    "classify": _HEADER
    + "point: {{ payload.point }}\n"
    + "{% for k in payload.k %}"
    + "k={{ k }}  n_k={{ payload.n_k[loop.index0] }}  omega={{ payload.omega[loop.index0] }}"
    + "  omega/n_k={{ payload.normalized[loop.index0] }}\n{% endfor %}"
    + "label: {{ payload.label }} (advisory)\n",
}

_GENERIC = (
    _HEADER
    + "{% for key, value in payload.items() %}"
    + "{{ key }}: {% if value is mapping or (value is sequence and value is not string) %}"
    + "{{ value | json }}{% else %}{{ value }}{% endif %}\n{% endfor %}"
)


class TextRenderer:
    """Jinja2 文本渲染器

    使用示例：
        renderer = TextRenderer()
        text = renderer.render(line)
    """

    def __init__(self) -> None:
        self._env = Environment(loader=BaseLoader(), autoescape=False, undefined=StrictUndefined)
        self._env.filters.update(
            {
                "json": lambda v: json.dumps(v, ensure_ascii=False, default=str),
            }
        )

    def register_filter(self, name: str, func: Callable[..., Any]) -> None:
        self._env.filters[name] = func

    def render(self, line: ReportLine) -> str:
        """渲染一条记录

        Raises:
            ReportError: 模板渲染失败
        """
        source = _TEMPLATES.get(line.command, _GENERIC)
        try:
            return self._env.from_string(source).render(
                command=line.command,
                config_hash=line.config_hash,
                timestamp=line.timestamp,
                payload=stringify_integers(line.payload),
            )
        except TemplateError as e:
            raise ReportError(line.command, f"文本报告渲染失败: {e}", e) from e


# ============================================================
# 写出器
# ============================================================


class ReportWriter:
    """按格式把记录写到流

    jsonl 每条记录一行；csv 每次写出一个带表头的表；text 逐条渲染。
    """

    def __init__(self, stream: TextIO, fmt: str = "jsonl"):
        if fmt not in ("jsonl", "csv", "text"):
            raise ConfigError(f"未知的输出格式: {fmt}", key="format", value=fmt)
        self.stream = stream
        self.format = fmt
        self._renderer = TextRenderer() if fmt == "text" else None
        self.written = 0

    def write(self, line: ReportLine) -> None:
        if self.format == "jsonl":
            self.stream.write(line.to_json() + "\n")
        elif self.format == "csv":
            buffer = io.StringIO()
            writer = csv.writer(buffer, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            writer.writerows(csv_rows(line.command, stringify_integers(line.payload)))
            self.stream.write(buffer.getvalue())
        else:
            assert self._renderer is not None
            self.stream.write(self._renderer.render(line))
        self.written += 1
        logger.debug("wrote %s record for %s", self.format, line.command)
