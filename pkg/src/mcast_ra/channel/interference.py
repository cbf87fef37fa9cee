"""
干扰事件与干扰日程

两类干扰：
- SporadicSpike：突发干扰，持续 1-3 s，每次随机影响 15%-25% 的在线节点，PDR 被封顶到约 50%
- PeriodicOnOff：周期性开关的干扰源（20 s 开 / 20 s 关），与组播帧碰撞；
  慢速率帧占用空口时间更长，碰撞概率按 (reference / rate)^exponent 放大
  每个区间的干扰强度服从均值为 intensity_mean、形状为 intensity_shape 的 Gamma 分布
  （形状为 1 时即指数分布，形状越大强度越平稳）
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mcast_ra.core.rates import Rate
from mcast_ra.logging.logger import logger
from mcast_ra.utils.rng import SeededRNG


class InterferenceKind(str, Enum):
    SPORADIC_SPIKE = "sporadic_spike"
    PERIODIC_ON_OFF = "periodic_on_off"


class _Range(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    low: float
    high: float

    @model_validator(mode="after")
    def _ordered(self) -> "_Range":
        if self.high < self.low:
            raise ValueError(f"Range requires low <= high, got [{self.low}, {self.high}]")
        return self


class SpikeConfig(BaseModel):
    """突发干扰参数"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    start_after_s: float = Field(30.0, ge=0.0)
    mean_interarrival_s: float = Field(20.0, gt=0.0)
    min_gap_s: float = Field(6.0, ge=0.0)
    duration_s: _Range = Field(default_factory=lambda: _Range(low=1.0, high=3.0))
    affected_fraction: _Range = Field(
        default_factory=lambda: _Range(low=0.15, high=0.25)
    )
    pdr_cap: float = Field(0.5, ge=0.0, le=1.0)

    @model_validator(mode="after")
    def _bounds(self) -> "SpikeConfig":
        if self.duration_s.low <= 0:
            raise ValueError("spike duration must be positive")
        if not 0.0 <= self.affected_fraction.low <= self.affected_fraction.high <= 1.0:
            raise ValueError("spike affected_fraction must lie within [0, 1]")
        return self


class OnOffConfig(BaseModel):
    """周期性开关干扰源参数"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    start_s: float = Field(30.0, ge=0.0)
    on_s: float = Field(20.0, gt=0.0)
    off_s: float = Field(20.0, gt=0.0)
    exposed_fraction: float = Field(0.25, ge=0.0, le=1.0)
    exposure: _Range = Field(default_factory=lambda: _Range(low=0.5, high=1.0))
    collision_loss: float = Field(0.08, ge=0.0, le=1.0)
    reference_rate_mbps: float = Field(24.0, gt=0.0)
    airtime_exponent: float = Field(2.0, ge=0.0)
    intensity_mean: float = Field(1.0, gt=0.0)
    intensity_shape: float = Field(1.0, gt=0.0)
    snr_penalty_db: float = Field(0.0, ge=0.0)
    pdr_cap: float = Field(1.0, ge=0.0, le=1.0)


class ManualEventConfig(BaseModel):
    """场景文件中显式给出的单次干扰事件"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: InterferenceKind = InterferenceKind.SPORADIC_SPIKE
    start_s: float = Field(..., ge=0.0)
    duration_s: float = Field(..., gt=0.0)
    affected_fraction: float = Field(0.2, ge=0.0, le=1.0)
    pdr_cap: float = Field(0.5, ge=0.0, le=1.0)
    snr_penalty_db: float = Field(0.0, ge=0.0)


class InterferenceConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    spikes: Optional[SpikeConfig] = None
    on_off: Optional[OnOffConfig] = None
    events: List[ManualEventConfig] = Field(default_factory=list)


@dataclass
class InterferenceEvent:
    """一次干扰事件

    affected 为受影响节点掩码：突发干扰在开始时从在线节点中抽取，
    开关干扰在整次运行中固定。exposure 为每个节点的暴露系数（0 表示不受影响）。
    """

    kind: InterferenceKind
    start: float
    duration: float
    affected_fraction: float
    pdr_cap: float = 1.0
    snr_penalty_db: float = 0.0
    collision_loss: float = 0.0
    affected: Optional[NDArray[np.bool_]] = None
    exposure: Optional[NDArray[np.float64]] = None

    @property
    def end(self) -> float:
        return self.start + self.duration

    def covers(self, t: float) -> bool:
        return self.start <= t + 1e-9 and t + 1e-9 < self.end


@dataclass
class ChannelEffects:
    """某个报告区间内干扰对每个节点的作用"""

    snr_penalty: NDArray[np.float64]
    pdr_cap: NDArray[np.float64]
    collision_scale: NDArray[np.float64]
    reference_rate_mbps: float = 24.0
    airtime_exponent: float = 2.0
    kinds: Tuple[InterferenceKind, ...] = field(default_factory=tuple)

    @classmethod
    def neutral(cls, n: int) -> "ChannelEffects":
        return cls(
            snr_penalty=np.zeros(n),
            pdr_cap=np.ones(n),
            collision_scale=np.zeros(n),
        )

    @property
    def interference_on(self) -> bool:
        return len(self.kinds) > 0

    def collision_loss(self, rate: Rate) -> NDArray[np.float64]:
        factor = (self.reference_rate_mbps / rate.value) ** self.airtime_exponent
        return np.clip(self.collision_scale * factor, 0.0, 1.0)

    def apply(self, pdr: NDArray[np.float64], rate: Rate) -> NDArray[np.float64]:
        return np.minimum(pdr, self.pdr_cap) * (1.0 - self.collision_loss(rate))

    def apply_one(self, pdr: float, index: int, rate: Rate) -> float:
        factor = (self.reference_rate_mbps / rate.value) ** self.airtime_exponent
        loss = min(1.0, max(0.0, float(self.collision_scale[index]) * factor))
        return min(pdr, float(self.pdr_cap[index])) * (1.0 - loss)


class InterferenceSchedule:
    """
    一次运行的干扰日程

    仿真引擎每个区间先调用 activate()（为刚开始的突发干扰抽取受影响节点），
    再通过 effects_for() 取得该区间的干扰作用。
    """

    def __init__(
        self,
        events: List[InterferenceEvent],
        n_nodes: int,
        interval_s: float,
        rng: SeededRNG,
        intensity: Optional[NDArray[np.float64]] = None,
        reference_rate_mbps: float = 24.0,
        airtime_exponent: float = 2.0,
    ):
        self.events = sorted(events, key=lambda e: (e.start, e.kind.value))
        self.n_nodes = n_nodes
        self.interval_s = interval_s
        self.rng = rng
        self.intensity = intensity
        self.reference_rate_mbps = reference_rate_mbps
        self.airtime_exponent = airtime_exponent

    @classmethod
    def build(
        cls,
        config: InterferenceConfig,
        n_nodes: int,
        duration_s: float,
        interval_s: float,
        rng: SeededRNG,
    ) -> "InterferenceSchedule":
        events: List[InterferenceEvent] = []
        intensity = None
        reference_rate, exponent = 24.0, 2.0

        if config.spikes is not None:
            events.extend(
                spike_events(config.spikes, duration_s, rng.stream("spikes"))
            )
        if config.on_off is not None:
            onoff_rng = rng.stream("onoff")
            events.extend(on_off_events(config.on_off, n_nodes, duration_s, onoff_rng))
            horizon = int(math.ceil(duration_s / interval_s)) + 1
            shape = config.on_off.intensity_shape
            intensity = onoff_rng.generator.gamma(
                shape, config.on_off.intensity_mean / shape, size=horizon
            )
            reference_rate = config.on_off.reference_rate_mbps
            exponent = config.on_off.airtime_exponent
        for manual in config.events:
            events.append(
                InterferenceEvent(
                    kind=manual.kind,
                    start=manual.start_s,
                    duration=manual.duration_s,
                    affected_fraction=manual.affected_fraction,
                    pdr_cap=manual.pdr_cap,
                    snr_penalty_db=manual.snr_penalty_db,
                )
            )

        logger.info(
            f"Interference schedule built: {len(events)} events over {duration_s}s"
        )
        return cls(
            events,
            n_nodes,
            interval_s,
            rng.stream("affected"),
            intensity=intensity,
            reference_rate_mbps=reference_rate,
            airtime_exponent=exponent,
        )

    def activate(self, interval: int, active_mask: NDArray[np.bool_]) -> None:
        """为当前区间内开始、尚未确定受影响节点的事件抽取节点集合"""
        t = interval * self.interval_s
        for event in self.events:
            if event.affected is None and event.covers(t):
                event.affected = self._sample_affected(event, active_mask)
                logger.debug(
                    f"{event.kind.value} at t={t:.1f}s affects "
                    f"{int(event.affected.sum())} nodes"
                )

    def _sample_affected(
        self, event: InterferenceEvent, active_mask: NDArray[np.bool_]
    ) -> NDArray[np.bool_]:
        candidates = np.flatnonzero(active_mask)
        count = int(round(event.affected_fraction * candidates.size))
        mask = np.zeros(self.n_nodes, dtype=bool)
        if count > 0:
            chosen = self.rng.generator.choice(candidates, size=count, replace=False)
            mask[chosen] = True
        return mask

    def active_events(self, interval: int) -> List[InterferenceEvent]:
        t = interval * self.interval_s
        return [e for e in self.events if e.covers(t)]

    def effects_for(self, interval: int) -> ChannelEffects:
        fx = ChannelEffects.neutral(self.n_nodes)
        fx.reference_rate_mbps = self.reference_rate_mbps
        fx.airtime_exponent = self.airtime_exponent

        kinds: List[InterferenceKind] = []
        for event in self.active_events(interval):
            if event.exposure is not None:
                weight = event.exposure
            else:
                if event.affected is None:
                    # 未经 activate 的直接查询：按全体节点抽样
                    event.affected = self._sample_affected(
                        event, np.ones(self.n_nodes, dtype=bool)
                    )
                weight = event.affected.astype(float)
            hit = weight > 0

            fx.pdr_cap = np.where(hit, np.minimum(fx.pdr_cap, event.pdr_cap), fx.pdr_cap)
            fx.snr_penalty = fx.snr_penalty + weight * event.snr_penalty_db
            if event.collision_loss > 0:
                g = 1.0
                if self.intensity is not None and interval < self.intensity.size:
                    g = float(self.intensity[interval])
                fx.collision_scale = fx.collision_scale + weight * event.collision_loss * g
            if event.kind not in kinds:
                kinds.append(event.kind)

        fx.kinds = tuple(kinds)
        return fx


def spike_events(
    config: SpikeConfig, duration_s: float, rng: SeededRNG
) -> List[InterferenceEvent]:
    """按泊松到达生成突发干扰；相邻两次之间至少间隔 min_gap_s"""
    events: List[InterferenceEvent] = []
    start = config.start_after_s + rng.exponential(config.mean_interarrival_s)
    while start < duration_s:
        length = rng.uniform(config.duration_s.low, config.duration_s.high)
        fraction = rng.uniform(
            config.affected_fraction.low, config.affected_fraction.high
        )
        events.append(
            InterferenceEvent(
                kind=InterferenceKind.SPORADIC_SPIKE,
                start=start,
                duration=length,
                affected_fraction=fraction,
                pdr_cap=config.pdr_cap,
            )
        )
        start = start + length + config.min_gap_s + rng.exponential(
            config.mean_interarrival_s
        )
    return events


def on_off_events(
    config: OnOffConfig, n_nodes: int, duration_s: float, rng: SeededRNG
) -> List[InterferenceEvent]:
    """开关干扰：暴露节点集合与暴露系数每次运行固定"""
    exposed_count = int(round(config.exposed_fraction * n_nodes))
    exposure = np.zeros(n_nodes)
    if exposed_count > 0:
        chosen = rng.generator.choice(n_nodes, size=exposed_count, replace=False)
        exposure[chosen] = rng.generator.uniform(
            config.exposure.low, config.exposure.high, size=exposed_count
        )

    events: List[InterferenceEvent] = []
    start = config.start_s
    while start < duration_s:
        events.append(
            InterferenceEvent(
                kind=InterferenceKind.PERIODIC_ON_OFF,
                start=start,
                duration=config.on_s,
                affected_fraction=config.exposed_fraction,
                pdr_cap=config.pdr_cap,
                snr_penalty_db=config.snr_penalty_db,
                collision_loss=config.collision_loss,
                affected=exposure > 0,
                exposure=exposure,
            )
        )
        start += config.on_s + config.off_s
    return events
