"""
逐区间指标记录与 CSV 序列化

列顺序固定，说明见 docs/trace_schema.md；每个 CSV 第一行为 `# schema_version=...`。
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray

SCHEMA_VERSION = "1.0"

TRACE_COLUMNS: List[str] = [
    "interval",
    "time_s",
    "rate_mbps",
    "action",
    "window",
    "a_hat",
    "m_hat",
    "a_true",
    "m_true",
    "a_max",
    "target_condition",
    "oracle_rate_mbps",
    "delivered_bits",
    "goodput_bits",
    "control_bits",
    "n_active",
    "fb_count",
    "volunteers",
    "reporting_threshold",
    "delta_pdr",
    "interference_on",
]


@dataclass
class MetricsFrame:
    """一个报告区间的记录；a_hat / m_hat / window 对不使用对应机制的控制器为 None"""

    interval: int
    time_s: float
    rate_mbps: float
    action: str
    window: Optional[int]
    a_hat: Optional[int]
    m_hat: Optional[int]
    a_true: int
    m_true: int
    a_max: int
    target_condition: Optional[bool]
    oracle_rate_mbps: float
    delivered_bits: float
    goodput_bits: float
    control_bits: float
    n_active: int
    fb_count: int
    volunteers: int
    reporting_threshold: Optional[float]
    delta_pdr: float
    interference_on: bool
    node_pdr: NDArray[np.float64] = field(repr=False, default_factory=lambda: np.zeros(0))


@dataclass
class Trace:
    """一次运行的完整记录"""

    scenario: str
    controller: str
    seed: int
    interval_s: float
    frames: List[MetricsFrame] = field(default_factory=list)
    oracle_satisfiable: List[bool] = field(default_factory=list)
    fb_stints: List[int] = field(default_factory=list)
    oracle_rows: List[Dict[str, Any]] = field(default_factory=list)
    base_snr: NDArray[np.float64] = field(repr=False, default_factory=lambda: np.zeros(0))

    def __len__(self) -> int:
        return len(self.frames)

    @property
    def n_nodes(self) -> int:
        return int(self.frames[0].node_pdr.size) if self.frames else 0

    def column(self, name: str) -> List[Any]:
        return [getattr(f, name) for f in self.frames]

    def node_pdr_matrix(self) -> NDArray[np.float64]:
        """形状 (区间数, 节点数)，离线节点为 NaN"""
        if not self.frames:
            return np.zeros((0, 0))
        return np.vstack([f.node_pdr for f in self.frames])


def format_value(value: Any, digits: int = 6) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return f"{float(value):.{digits}f}".rstrip("0").rstrip(".") or "0"
    return str(value)


def _write_rows(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as f:
        f.write(f"# schema_version={SCHEMA_VERSION}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def write_trace_csv(trace: Trace, path: Path, digits: int = 6) -> None:
    rows = (
        [format_value(getattr(frame, col), digits) for col in TRACE_COLUMNS]
        for frame in trace.frames
    )
    _write_rows(path, TRACE_COLUMNS, rows)


def write_node_pdr_csv(trace: Trace, path: Path, digits: int = 6) -> None:
    """宽表：每行一个区间，每列一个节点"""
    header = ["interval"] + [f"node_{i}" for i in range(trace.n_nodes)]
    rows = (
        [str(frame.interval)] + [format_value(v, digits) for v in frame.node_pdr]
        for frame in trace.frames
    )
    _write_rows(path, header, rows)


def write_table_csv(
    records: Sequence[Dict[str, Any]], path: Path, digits: int = 6
) -> None:
    """通用表格：列取第一条记录的键顺序"""
    if not records:
        _write_rows(path, [], [])
        return
    header = list(records[0].keys())
    rows = ([format_value(r.get(col), digits) for col in header] for r in records)
    _write_rows(path, header, rows)


def read_csv(path: Path) -> List[Dict[str, str]]:
    """读取本模块写出的 CSV（跳过 schema 注释行）"""
    with path.open("r", encoding="utf-8", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))
