"""
汇总指标与 AIMD 窗口轨迹校验测试
"""

import os
import sys
from typing import List, Optional

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from mcast_ra.core import Thresholds  # noqa: E402
from mcast_ra.data_format import MetricsFrame, Trace  # noqa: E402
from mcast_ra.feedback import FeedbackConfig  # noqa: E402
from mcast_ra.services import aggregate, summarize, validate_trace  # noqa: E402
from mcast_ra.services.summary_service import convergence_interval  # noqa: E402


def _frame(
    i: int,
    rate: float = 36.0,
    action: str = "hold",
    window: Optional[int] = 8,
    a_hat: Optional[int] = 3,
    a_true: int = 3,
    control_bits: float = 0.0,
    oracle: float = 36.0,
    node_pdr: Optional[np.ndarray] = None,
) -> MetricsFrame:
    delivered = rate * 1e6 * 0.5 * 0.7
    return MetricsFrame(
        interval=i,
        time_s=i * 0.5,
        rate_mbps=rate,
        action=action,
        window=window,
        a_hat=a_hat,
        m_hat=0 if a_hat is not None else None,
        a_true=a_true,
        m_true=0,
        a_max=8,
        target_condition=False if a_hat is not None else None,
        oracle_rate_mbps=oracle,
        delivered_bits=delivered,
        goodput_bits=delivered * 0.85,
        control_bits=control_bits,
        n_active=4,
        fb_count=0,
        volunteers=0,
        reporting_threshold=None,
        delta_pdr=0.0,
        interference_on=False,
        node_pdr=node_pdr if node_pdr is not None else np.array([1.0, 0.99, 0.9, 0.5]),
    )


def _trace(frames: List[MetricsFrame]) -> Trace:
    return Trace(scenario="unit", controller="mudra", seed=1, interval_s=0.5, frames=frames)


class TestSummarize:
    """summarize()"""

    def test_constant_rate(self) -> None:
        summary = summarize(_trace([_frame(i) for i in range(20)]), ladder_values=[24.0, 36.0, 48.0])
        assert summary.rate_airtime == {"24": 0.0, "36": 1.0, "48": 0.0}
        assert summary.rate_changes == 0
        assert summary.mean_throughput_mbps == pytest.approx(36.0 * 0.7)
        assert summary.mean_goodput_mbps == pytest.approx(36.0 * 0.7 * 0.85)
        assert summary.convergence_time_s == 0.0

    def test_node_pdr_distribution(self) -> None:
        summary = summarize(_trace([_frame(i) for i in range(4)]))
        assert summary.node_mean_pdr == pytest.approx([0.5, 0.9, 0.99, 1.0])
        assert summary.frac_nodes_below_low == pytest.approx(0.25)
        assert summary.frac_nodes_below_095 == pytest.approx(0.5)

    def test_nodes_never_online_ignored(self) -> None:
        pdr = np.array([1.0, np.nan, 0.8, np.nan])
        summary = summarize(_trace([_frame(i, node_pdr=pdr) for i in range(4)]))
        assert summary.node_mean_pdr == pytest.approx([0.8, 1.0])

    def test_feedback_overhead_k30(self) -> None:
        """K=30、T=0.5 s、64 字节报文的控制开销约 30-45 kbps"""
        cfg = FeedbackConfig()
        bits = (cfg.list_message_bytes + cfg.k * cfg.report_bytes) * 8
        summary = summarize(_trace([_frame(i, control_bits=bits) for i in range(10)]))
        assert 30.0 <= summary.control_overhead_kbps <= 45.0

    def test_sla_and_estimator(self) -> None:
        frames = [_frame(i, a_true=3 if i % 2 else 12, a_hat=3 if i % 2 else 10) for i in range(10)]
        summary = summarize(_trace(frames), Thresholds())
        assert summary.sla_violation_fraction == pytest.approx(0.5)
        # Â 饱和于 A_max+ε=10，与截断后的真值一致
        assert summary.estimator_error == 0.0

    def test_above_oracle(self) -> None:
        frames = [_frame(i, rate=48.0 if i < 3 else 36.0) for i in range(10)]
        assert summarize(_trace(frames)).above_oracle_fraction == pytest.approx(0.3)

    def test_no_feedback_fields(self) -> None:
        frames = [_frame(i, window=None, a_hat=None) for i in range(5)]
        summary = summarize(_trace(frames))
        assert summary.target_condition_fraction is None
        assert summary.estimator_error is None
        assert summary.fb_tenure_mean_intervals is None

    def test_fb_tenure(self) -> None:
        trace = _trace([_frame(i) for i in range(5)])
        trace.fb_stints = [2, 9, 4, 1]
        summary = summarize(trace)
        assert summary.fb_tenure_mean_intervals == pytest.approx(4.0)
        assert summary.fb_tenure_median_intervals == pytest.approx(3.0)

    def test_empty_trace(self) -> None:
        with pytest.raises(ValueError):
            summarize(_trace([]))


class TestConvergence:
    def test_first_stable_interval(self) -> None:
        rates = [6, 9, 12, 36, 36, 24, 36, 36, 36, 36]
        assert convergence_interval(rates, [36] * 10, 4) == 6

    def test_never_converges(self) -> None:
        assert convergence_interval([6, 9, 12], [36, 36, 36], 2) is None


class TestAggregate:
    def test_mean_and_std(self) -> None:
        a = summarize(_trace([_frame(i, rate=24.0, oracle=24.0) for i in range(4)]))
        b = summarize(_trace([_frame(i, rate=36.0) for i in range(4)]))
        row = aggregate([a, b])
        assert row["seeds"] == 2
        assert row["mean_throughput_mbps_mean"] == pytest.approx(30.0 * 0.7)
        assert row["mean_throughput_mbps_std"] == pytest.approx(6.0 * 0.7)

    def test_empty(self) -> None:
        with pytest.raises(ValueError):
            aggregate([])


class TestValidateTrace:
    """AIMD 窗口规则"""

    def test_clean_trace(self) -> None:
        frames = [_frame(i) for i in range(9)]
        frames.append(_frame(9, action="decrease", window=16))
        frames.extend(_frame(i, window=16) for i in range(10, 20))
        frames.append(_frame(20, window=15))
        assert validate_trace(_trace(frames)) == []

    def test_window_out_of_bounds(self) -> None:
        frames = [_frame(0, window=4)]
        rules = {v.rule for v in validate_trace(_trace(frames))}
        assert "window_bounds" in rules

    def test_decrease_without_doubling(self) -> None:
        frames = [_frame(i) for i in range(9)] + [_frame(9, action="decrease", window=8)]
        rules = [v.rule for v in validate_trace(_trace(frames))]
        assert rules == ["decrease_doubles"]

    def test_change_inside_window(self) -> None:
        frames = [_frame(0), _frame(1, action="increase")]
        rules = [v.rule for v in validate_trace(_trace(frames))]
        assert rules == ["change_inside_window"]

    def test_skips_windowless_traces(self) -> None:
        frames = [_frame(i, window=None) for i in range(5)]
        assert validate_trace(_trace(frames)) == []
