"""
视频分段码率规划

关键帧以最低速率可靠发送，非关键帧以当前组播速率发送。一个分段（1 s）内：
    t_k  = V_R · f_k  / D̂_min
    t_nk = V_R · f_nk / D̂_R
令 t_k + t_nk = 1，得
    V_R = D̂_min · D̂_R / (D̂_min · f_nk + D̂_R · f_k)
"""

from dataclasses import dataclass


class InfeasiblePlanError(ValueError):
    """吞吐量为 0，无法安排任何视频数据"""

    def __init__(self, d_min: float, d_rate: float):
        super().__init__(
            f"Segment plan needs positive throughput, got D_min={d_min}, D_R={d_rate}"
        )


@dataclass(frozen=True)
class SegmentPlan:
    """一个分段的码率规划

    Attributes:
        duration_s (float): 分段时长
        key_fraction (float): f_k，关键帧数据占比
        d_min (float): D̂_min，最低速率下的期望吞吐 (bps)
        d_rate (float): D̂_R，当前速率下的期望吞吐 (bps)
        video_rate (float): V_R，规划的视频码率 (bps)
    """

    duration_s: float
    key_fraction: float
    d_min: float
    d_rate: float
    video_rate: float

    @property
    def non_key_fraction(self) -> float:
        return 1.0 - self.key_fraction

    def time_budget(self) -> float:
        return time_budget(self.video_rate, self.d_min, self.d_rate, self.key_fraction)


def plan_rate(d_min: float, d_rate: float, key_fraction: float) -> float:
    """
    Raises:
        InfeasiblePlanError: 任一吞吐量不为正
        ValueError: key_fraction 不在 [0, 1]
    """
    if d_min <= 0 or d_rate <= 0:
        raise InfeasiblePlanError(d_min, d_rate)
    if not 0.0 <= key_fraction <= 1.0:
        raise ValueError(f"Key-frame fraction must be within [0, 1], got {key_fraction}")
    if key_fraction == 0.0:
        return d_rate
    if key_fraction == 1.0:
        return d_min
    non_key = 1.0 - key_fraction
    return d_min * d_rate / (d_min * non_key + d_rate * key_fraction)


def time_budget(video_rate: float, d_min: float, d_rate: float, key_fraction: float) -> float:
    """t_k + t_nk"""
    return video_rate * key_fraction / d_min + video_rate * (1.0 - key_fraction) / d_rate


def plan_segment(
    d_min: float, d_rate: float, key_fraction: float, duration_s: float = 1.0
) -> SegmentPlan:
    return SegmentPlan(
        duration_s=duration_s,
        key_fraction=key_fraction,
        d_min=d_min,
        d_rate=d_rate,
        video_rate=plan_rate(d_min, d_rate, key_fraction),
    )
