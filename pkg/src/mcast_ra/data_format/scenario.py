"""
场景定义

一个 Scenario 描述一次完整实验：节点群体、信道、成员变化、干扰、控制器与各模块参数。
所有子模型都拒绝未知字段；省略的字段取默认实验参数（n=160, L=0.85, H=0.97,
X=0.95, K=30, W_min=8, W_max=32, T=0.5 s）。
"""

from enum import Enum
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mcast_ra.channel.churn import ChurnModel
from mcast_ra.channel.interference import InterferenceConfig
from mcast_ra.channel.model import RateSnrRequirement
from mcast_ra.channel.population import PopulationParams
from mcast_ra.controllers import ControllerConfig, ControllerKind
from mcast_ra.core.rates import DOT11A_RATES_MBPS, RateLadder
from mcast_ra.core.thresholds import Thresholds
from mcast_ra.feedback.collision import CollisionParams
from mcast_ra.feedback.protocol import FeedbackConfig
from mcast_ra.video.quality import GradeThresholds, PsnrMap


class ChannelConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    rates_mbps: List[float] = Field(default_factory=lambda: list(DOT11A_RATES_MBPS))
    requirement: RateSnrRequirement = Field(default_factory=RateSnrRequirement)
    population: PopulationParams = Field(default_factory=PopulationParams)


class SimulationParams(BaseModel):
    """吞吐统计参数

    Attributes:
        efficiency (float): WiFi 协议开销之后的有效比例
        fec_overhead (float): FEC 冗余比例，goodput = throughput × (1 − fec)
        packet_bytes (int): 组播数据包大小，用于换算每区间包数
        convergence_hold (int): 判定收敛所需连续命中 oracle 速率的区间数
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    efficiency: float = Field(0.70, gt=0.0, le=1.0)
    fec_overhead: float = Field(0.15, ge=0.0, lt=1.0)
    packet_bytes: int = Field(1400, ge=1)
    convergence_hold: int = Field(10, ge=1)


class ScheduledAction(str, Enum):
    DEACTIVATE_WORST = "deactivate_worst"
    DEACTIVATE_FB = "deactivate_fb"


class ScheduledEvent(BaseModel):
    """运行中的一次性成员操作，例如 150 s 时关闭最差的 30 个节点"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    at_s: float = Field(..., ge=0.0)
    action: ScheduledAction
    count: int = Field(30, ge=0)


class VideoConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    segment_s: float = Field(1.0, gt=0.0)
    key_fraction: float = Field(0.175, ge=0.0, le=1.0)
    grades: GradeThresholds = Field(default_factory=GradeThresholds)
    psnr: PsnrMap = Field(default_factory=PsnrMap)


class CompareConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    controllers: List[ControllerKind] = Field(
        default_factory=lambda: [
            ControllerKind.MUDRA,
            ControllerKind.PSEUDO_MULTICAST,
            ControllerKind.FIXED,
            ControllerKind.SRA,
        ],
        min_length=1,
    )


class SweepConfig(BaseModel):
    """单参数扫描：parameter 为点分路径，例如 feedback.k 或 reporting_interval_s"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    parameter: str = Field(..., min_length=1)
    values: List[Any] = Field(..., min_length=1)


class Scenario(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    name: str = "default"
    nodes: int = Field(160, ge=1)
    seed: int = Field(1, ge=0)
    duration_s: float = Field(300.0, ge=0.0)
    reporting_interval_s: float = Field(0.5, gt=0.0)
    channel: ChannelConfig = Field(default_factory=ChannelConfig)
    churn: Optional[ChurnModel] = None
    interference: InterferenceConfig = Field(default_factory=InterferenceConfig)
    controller: ControllerConfig = Field(default_factory=ControllerConfig)
    thresholds: Thresholds = Field(default_factory=Thresholds)
    feedback: FeedbackConfig = Field(default_factory=FeedbackConfig)
    collision: CollisionParams = Field(default_factory=CollisionParams)
    simulation: SimulationParams = Field(default_factory=SimulationParams)
    events: List[ScheduledEvent] = Field(default_factory=list)
    video: Optional[VideoConfig] = None
    compare: Optional[CompareConfig] = None
    sweep: Optional[SweepConfig] = None

    @model_validator(mode="before")
    @classmethod
    def _sync_interval(cls, data: Any) -> Any:
        """T 既可写在顶层 reporting_interval_s，也可写在 feedback.interval_s"""
        if not isinstance(data, dict):
            return data
        feedback = data.get("feedback") or {}
        if not isinstance(feedback, dict):
            return data
        top = data.get("reporting_interval_s")
        nested = feedback.get("interval_s")
        if top is not None and nested is not None and top != nested:
            raise ValueError(
                f"reporting_interval_s={top} conflicts with feedback.interval_s={nested}"
            )
        value = top if top is not None else nested
        if value is None:
            return data
        data = dict(data)
        data["reporting_interval_s"] = value
        data["feedback"] = {**feedback, "interval_s": value}
        return data

    @model_validator(mode="after")
    def _feasibility(self) -> "Scenario":
        ratio = self.duration_s / self.reporting_interval_s
        if abs(ratio - round(ratio)) > 1e-9:
            raise ValueError(
                f"duration_s={self.duration_s} must be a multiple of "
                f"reporting_interval_s={self.reporting_interval_s}"
            )
        d_k = self.collision.d * self.feedback.k
        if self.reporting_interval_s <= d_k:
            raise ValueError(
                f"T <= d*K is infeasible: T={self.reporting_interval_s}s, "
                f"d*K={self.collision.d}*{self.feedback.k}={d_k:.6g}s"
            )
        RateLadder(self.channel.rates_mbps)
        if self.controller.kind is ControllerKind.FIXED or self.compare is not None:
            if self.controller.fixed_rate_mbps not in self.channel.rates_mbps:
                raise ValueError(
                    f"fixed_rate_mbps={self.controller.fixed_rate_mbps} "
                    f"is not on the rate ladder"
                )
        return self

    @property
    def n_intervals(self) -> int:
        return int(round(self.duration_s / self.reporting_interval_s))

    @property
    def ladder(self) -> RateLadder:
        return RateLadder(self.channel.rates_mbps)

    def with_override(self, path: str, value: Any) -> "Scenario":
        """
        按点分路径修改一个字段，返回重新校验过的副本

        Raises:
            pydantic.ValidationError: 路径不存在或取值不合法
        """
        data = self.model_dump(mode="json")
        if path in ("reporting_interval_s", "feedback.interval_s"):
            data["reporting_interval_s"] = value
            data["feedback"]["interval_s"] = value
            return Scenario.model_validate(data)

        keys = path.split(".")
        node = data
        for key in keys[:-1]:
            if not isinstance(node.get(key), dict):
                node[key] = {}
            node = node[key]
        node[keys[-1]] = value
        return Scenario.model_validate(data)
