"""
反馈报文与组播帧碰撞造成的 PDR 损失

ΔPDR(T) = (2 / CW_min)^2 · K · D / (T − d · K)

AP 持续发送组播（饱和），每个报告区间内 K 条反馈报文各占 d 秒空口，
两者退避计数器同时归零的概率约为 (2 / CW_min)^2。
"""

from pydantic import BaseModel, ConfigDict, Field, model_validator


class InfeasibleIntervalError(ValueError):
    """报告区间太短，仅反馈报文就占满空口（T <= d·K）"""

    def __init__(self, interval_s: float, d: float, k: int):
        super().__init__(
            f"Reporting interval T={interval_s}s is infeasible: "
            f"T must exceed d*K = {d}*{k} = {d * k:.6g}s"
        )
        self.interval_s = interval_s
        self.k = k


class CollisionParams(BaseModel):
    """碰撞模型参数

    Attributes:
        D (float): 组播帧发送时长 (s)
        d (float): 反馈报文发送时长 (s)
        cw_min (int): 最小竞争窗口
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    D: float = Field(0.003, gt=0.0)
    d: float = Field(0.001, gt=0.0)
    cw_min: int = Field(16, ge=2)

    @model_validator(mode="after")
    def _durations(self) -> "CollisionParams":
        if not self.D > self.d:
            raise ValueError(
                f"Collision model requires D > d, got D={self.D}, d={self.d}"
            )
        return self


def check_interval(interval_s: float, cfg: CollisionParams, k: int) -> None:
    if k > 0 and interval_s <= cfg.d * k:
        raise InfeasibleIntervalError(interval_s, cfg.d, k)


def delta_pdr(interval_s: float, cfg: CollisionParams, k: int) -> float:
    """
    反馈碰撞带来的 PDR 下降比例

    Raises:
        InfeasibleIntervalError: T <= d·K
    """
    if k < 0:
        raise ValueError(f"Feedback node count must be non-negative, got {k}")
    if k == 0:
        return 0.0
    check_interval(interval_s, cfg, k)
    return (2.0 / cfg.cw_min) ** 2 * k * cfg.D / (interval_s - cfg.d * k)
