"""
运行结果汇总

summarize() 把一条 Trace 归纳为 RunSummary（写入 summary.json），
aggregate() 把同一 (场景, 控制器) 的多个 seed 汇总为对比表的一行。
"""

from typing import Dict, List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, Field

from mcast_ra.core.thresholds import Thresholds
from mcast_ra.data_format.metrics import Trace
from mcast_ra.feedback.protocol import estimate_cap


class RunSummary(BaseModel):
    """单次运行的汇总指标"""

    scenario: str
    controller: str
    seed: int
    intervals: int
    mean_throughput_mbps: float = Field(..., description="AP 端平均吞吐")
    mean_goodput_mbps: float = Field(..., description="扣除 FEC 冗余后的平均 goodput")
    rate_airtime: Dict[str, float] = Field(..., description="各速率占用的区间比例")
    node_mean_pdr: List[float] = Field(..., description="各节点平均 PDR（升序，即 CDF 横坐标）")
    frac_nodes_below_low: float
    frac_nodes_below_095: float
    sla_violation_fraction: float
    control_overhead_kbps: float
    rate_changes: int
    convergence_time_s: Optional[float]
    above_oracle_fraction: float
    target_condition_fraction: Optional[float]
    estimator_error: Optional[float]
    fb_tenure_mean_intervals: Optional[float]
    fb_tenure_median_intervals: Optional[float]


def node_mean_pdr(matrix: NDArray[np.float64]) -> NDArray[np.float64]:
    """各节点在其在线区间上的平均 PDR；从未在线的节点不计入"""
    seen = ~np.isnan(matrix)
    counts = seen.sum(axis=0)
    sums = np.where(seen, matrix, 0.0).sum(axis=0)
    online = counts > 0
    return sums[online] / counts[online]


def rate_airtime(rates: Sequence[float], ladder_values: Sequence[float]) -> Dict[str, float]:
    total = len(rates)
    return {
        f"{value:g}": (sum(1 for r in rates if r == value) / total if total else 0.0)
        for value in ladder_values
    }


def convergence_interval(
    rates: Sequence[float], oracle: Sequence[float], hold: int
) -> Optional[int]:
    """第一个满足“此后连续 hold 个区间速率等于 oracle 速率”的区间"""
    run = 0
    for i, (rate, target) in enumerate(zip(rates, oracle)):
        run = run + 1 if rate == target else 0
        if run >= hold:
            return i - hold + 1
    return None


def summarize(
    trace: Trace,
    th: Thresholds = Thresholds(),
    ladder_values: Optional[Sequence[float]] = None,
    convergence_hold: int = 10,
) -> RunSummary:
    """
    Raises:
        ValueError: trace 为空
    """
    if not trace.frames:
        raise ValueError("Cannot summarize an empty trace")

    T = trace.interval_s
    frames = trace.frames
    rates = trace.column("rate_mbps")
    oracle = trace.column("oracle_rate_mbps")
    values = ladder_values if ladder_values is not None else sorted(set(rates))

    per_node = node_mean_pdr(trace.node_pdr_matrix())
    n_nodes = max(1, per_node.size)

    first = convergence_interval(rates, oracle, convergence_hold)

    estimated = [f for f in frames if f.a_hat is not None]
    estimator_error: Optional[float] = None
    target_fraction: Optional[float] = None
    if estimated:
        estimator_error = float(
            np.mean(
                [
                    abs(f.a_hat - min(f.a_true, estimate_cap(f.a_max, th)))
                    for f in estimated
                    if f.a_hat is not None
                ]
            )
        )
        target_fraction = sum(1 for f in estimated if f.target_condition) / len(estimated)

    stints = trace.fb_stints
    return RunSummary(
        scenario=trace.scenario,
        controller=trace.controller,
        seed=trace.seed,
        intervals=len(frames),
        mean_throughput_mbps=float(np.mean(trace.column("delivered_bits"))) / T / 1e6,
        mean_goodput_mbps=float(np.mean(trace.column("goodput_bits"))) / T / 1e6,
        rate_airtime=rate_airtime(rates, values),
        node_mean_pdr=sorted(float(v) for v in per_node),
        frac_nodes_below_low=float(np.count_nonzero(per_node < th.low)) / n_nodes,
        frac_nodes_below_095=float(np.count_nonzero(per_node < 0.95)) / n_nodes,
        sla_violation_fraction=sum(1 for f in frames if f.a_true > f.a_max) / len(frames),
        control_overhead_kbps=float(np.mean(trace.column("control_bits"))) / T / 1e3,
        rate_changes=sum(1 for f in frames if f.action != "hold"),
        convergence_time_s=None if first is None else first * T,
        above_oracle_fraction=sum(1 for r, o in zip(rates, oracle) if r > o) / len(frames),
        target_condition_fraction=target_fraction,
        estimator_error=estimator_error,
        fb_tenure_mean_intervals=float(np.mean(stints)) if stints else None,
        fb_tenure_median_intervals=float(np.median(stints)) if stints else None,
    )


AGGREGATE_FIELDS = (
    "mean_throughput_mbps",
    "mean_goodput_mbps",
    "frac_nodes_below_low",
    "frac_nodes_below_095",
    "sla_violation_fraction",
    "control_overhead_kbps",
    "rate_changes",
    "convergence_time_s",
)


def aggregate(summaries: Sequence[RunSummary]) -> Dict[str, object]:
    """多个 seed 的均值与标准差；某个 seed 未收敛时 convergence_time_s 只对收敛的 seed 取平均"""
    if not summaries:
        raise ValueError("Cannot aggregate zero runs")
    row: Dict[str, object] = {
        "scenario": summaries[0].scenario,
        "controller": summaries[0].controller,
        "seeds": len(summaries),
    }
    for name in AGGREGATE_FIELDS:
        values = [getattr(s, name) for s in summaries if getattr(s, name) is not None]
        row[f"{name}_mean"] = float(np.mean(values)) if values else None
        row[f"{name}_std"] = float(np.std(values)) if values else None
    return row
