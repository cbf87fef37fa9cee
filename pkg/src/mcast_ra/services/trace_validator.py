"""
AIMD 窗口轨迹校验

对带窗口的 Trace 检查：
- window 始终在 [W_min, W_max]
- 每次降速后窗口翻倍（封顶 W_max）
- 窗口只在保持 thresholdTime 个区间后减 1
- 两次改速之间间隔大于当时的窗口
"""

from dataclasses import dataclass
from typing import List, Optional

from mcast_ra.controllers.mudra import MudraParams
from mcast_ra.data_format.metrics import Trace


@dataclass(frozen=True)
class Violation:
    interval: int
    rule: str
    detail: str

    def __str__(self) -> str:
        return f"[t={self.interval}] {self.rule}: {self.detail}"


def validate_trace(trace: Trace, params: Optional[MudraParams] = None) -> List[Violation]:
    params = params or MudraParams()
    violations: List[Violation] = []
    frames = [f for f in trace.frames if f.window is not None]
    if not frames:
        return violations

    window = params.w_min
    ref_time = 0
    change_time = 0
    for frame in frames:
        t = frame.interval
        assert frame.window is not None

        if not params.w_min <= frame.window <= params.w_max:
            violations.append(
                Violation(t, "window_bounds", f"window={frame.window} outside [{params.w_min}, {params.w_max}]")
            )

        if frame.action == "decrease":
            expected = min(params.w_max, 2 * window)
            ref_time = t
        elif frame.action == "increase":
            expected = window
            ref_time = t
        elif t - ref_time > params.threshold_time:
            expected = max(params.w_min, window - 1)
            ref_time = t
        else:
            expected = window

        if frame.window != expected:
            rule = "decrease_doubles" if frame.action == "decrease" else "window_decay"
            violations.append(
                Violation(t, rule, f"window {window} -> {frame.window}, expected {expected}")
            )

        if frame.action != "hold":
            if t - change_time <= window:
                violations.append(
                    Violation(
                        t,
                        "change_inside_window",
                        f"rate changed {t - change_time} intervals after the previous "
                        f"change with window={window}",
                    )
                )
            change_time = t
        window = frame.window

    return violations
