"""
节点群体生成

base SNR 在 [snr.low, snr.high] 上做抖动分层抽样（每个等宽分层抽一个值，再打乱到各节点），
使每个 seed 下阈值附近的节点数量稳定；可选的低 SNR 尾部模拟少数位置很差的接收端。
"""

from typing import List, Optional

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from mcast_ra.channel.model import NodeChannel
from mcast_ra.utils.rng import SeededRNG


class SnrRange(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    low: float
    high: float

    @model_validator(mode="after")
    def _ordered(self) -> "SnrRange":
        if self.high < self.low:
            raise ValueError(
                f"SNR range requires low <= high, got [{self.low}, {self.high}]"
            )
        return self


class SnrTail(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    count: int = Field(2, ge=0)
    low: float = 15.8
    high: float = 16.0


class PopulationParams(BaseModel):
    """信道群体参数，默认值使 160 个节点的目标速率为 36 Mbps"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    snr: SnrRange = Field(default_factory=lambda: SnrRange(low=18.1, high=25.1))
    tail: Optional[SnrTail] = Field(default_factory=SnrTail)
    sensitivity_spread_db: float = Field(0.25, ge=0.0)
    band_width: SnrRange = Field(default_factory=lambda: SnrRange(low=2.75, high=3.25))

    @model_validator(mode="after")
    def _band_bounds(self) -> "PopulationParams":
        if self.band_width.low < 2.0 or self.band_width.high > 5.0:
            raise ValueError("band_width range must lie within [2, 5] dB")
        return self


def stratified(low: float, high: float, count: int, rng: SeededRNG) -> NDArray[np.float64]:
    """[low, high] 等分为 count 层，每层均匀抽一个，再随机打乱"""
    if count <= 0:
        return np.zeros(0)
    edges = np.linspace(low, high, count + 1)
    values = edges[:-1] + rng.generator.random(count) * np.diff(edges)
    rng.generator.shuffle(values)
    return values


def build_population(params: PopulationParams, n: int, rng: SeededRNG) -> List[NodeChannel]:
    if n < 1:
        raise ValueError(f"Population needs at least one node, got {n}")
    tail_count = min(params.tail.count, n) if params.tail is not None else 0
    bulk = stratified(params.snr.low, params.snr.high, n - tail_count, rng)
    if params.tail is not None and tail_count > 0:
        tail = rng.generator.uniform(params.tail.low, params.tail.high, size=tail_count)
        base = np.concatenate([bulk, tail])
        rng.generator.shuffle(base)
    else:
        base = bulk

    spread = params.sensitivity_spread_db
    offsets = rng.generator.uniform(-spread, spread, size=n)
    bands = rng.generator.uniform(params.band_width.low, params.band_width.high, size=n)

    return [
        NodeChannel(
            node_id=i,
            base_snr=float(base[i]),
            sensitivity_offset=float(offsets[i]),
            band_width=float(bands[i]),
        )
        for i in range(n)
    ]


def deactivate_worst(
    effective_snr: NDArray[np.float64], active: NDArray[np.bool_], count: int
) -> NDArray[np.bool_]:
    """关闭 count 个有效 SNR 最低的在线节点，返回新的成员掩码"""
    result = active.copy()
    online = np.flatnonzero(active)
    if count <= 0 or online.size == 0:
        return result
    # 稳定排序：SNR 相同时按节点编号
    order = online[np.argsort(effective_snr[online], kind="stable")]
    result[order[:count]] = False
    return result
