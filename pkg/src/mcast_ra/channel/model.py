"""
合成无线信道模型

每个接收节点的 PDR 是 (有效 SNR − 速率所需 SNR) 的 logistic 函数，
band_width 决定 PDR 从约 99% 跌到约 1% 所跨越的 SNR 区间（2-5 dB）。
干扰事件在此之上压低 SNR、封顶 PDR 或叠加碰撞丢包；
反馈碰撞带来的 ΔPDR 不在这里扣除，由仿真引擎在下游处理。
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field
from scipy.special import expit

from mcast_ra.channel.interference import ChannelEffects, InterferenceSchedule
from mcast_ra.core.rates import Rate, RateLadder
from mcast_ra.utils.rng import SeededRNG

# logistic 在 ±ln(99) 处分别取 0.99 / 0.01
_BAND_EDGE = math.log(99.0)


class MembershipError(ValueError):
    """对未激活（已离开组播组）的节点求 PDR"""

    def __init__(self, node_id: int):
        super().__init__(f"Node {node_id} is not an active multicast member")
        self.node_id = node_id


class RateSnrRequirement(BaseModel):
    """各速率所需 SNR：base_db + index * step_db"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    base_db: float = Field(5.0, description="最低速率所需 SNR")
    step_db: float = Field(2.5, ge=2.0, le=3.0, description="相邻速率 SNR 增量")

    def required_snr(self, rate: Rate) -> float:
        return self.base_db + rate.index * self.step_db


@dataclass
class NodeChannel:
    """单个接收节点的信道参数

    Attributes:
        node_id (int): 节点编号
        base_snr (float): 基础 SNR (dB)
        sensitivity_offset (float): 接收灵敏度偏移 (dB)，每个 seed 抽一次后固定
        band_width (float): 过渡带宽度 (dB)
        active (bool): 是否在组播组内
    """

    node_id: int
    base_snr: float
    sensitivity_offset: float
    band_width: float
    active: bool = True

    def __post_init__(self) -> None:
        if not 2.0 <= self.band_width <= 5.0:
            raise ValueError(
                f"band_width must be within [2, 5] dB, got {self.band_width}"
            )

    @property
    def effective_snr(self) -> float:
        return self.base_snr + self.sensitivity_offset


def sigmoid_pdr(margin_db: NDArray[np.float64] | float, band_width: NDArray[np.float64] | float) -> NDArray[np.float64]:
    """SNR 裕量 -> PDR；裕量为 0 时恰为 0.5"""
    slope = 2.0 * _BAND_EDGE / np.asarray(band_width, dtype=float)
    return np.asarray(expit(slope * np.asarray(margin_db, dtype=float)), dtype=float)


class ChannelModel:
    """
    一次仿真运行独占的信道状态

    节点参数以 numpy 数组保存以便整组向量化计算；
    NodeChannel 视图通过 node() 获取。
    """

    def __init__(
        self,
        nodes: Sequence[NodeChannel],
        requirement: RateSnrRequirement,
        ladder: RateLadder,
        schedule: Optional[InterferenceSchedule] = None,
        interval_s: float = 0.5,
    ):
        self.requirement = requirement
        self.ladder = ladder
        self.schedule = schedule
        self.interval_s = interval_s

        self.node_ids = np.array([n.node_id for n in nodes], dtype=int)
        self.base_snr = np.array([n.base_snr for n in nodes], dtype=float)
        self.sensitivity_offset = np.array(
            [n.sensitivity_offset for n in nodes], dtype=float
        )
        self.band_width = np.array([n.band_width for n in nodes], dtype=float)
        self.active = np.array([n.active for n in nodes], dtype=bool)

    @property
    def size(self) -> int:
        return int(self.node_ids.size)

    @property
    def effective_snr(self) -> NDArray[np.float64]:
        return self.base_snr + self.sensitivity_offset

    def node(self, index: int) -> NodeChannel:
        return NodeChannel(
            node_id=int(self.node_ids[index]),
            base_snr=float(self.base_snr[index]),
            sensitivity_offset=float(self.sensitivity_offset[index]),
            band_width=float(self.band_width[index]),
            active=bool(self.active[index]),
        )

    def nodes(self) -> List[NodeChannel]:
        return [self.node(i) for i in range(self.size)]

    def set_active(self, mask: NDArray[np.bool_]) -> None:
        self.active = np.asarray(mask, dtype=bool).copy()

    def effects_at(self, t: float) -> ChannelEffects:
        if self.schedule is None:
            return ChannelEffects.neutral(self.size)
        interval = int(math.floor(t / self.interval_s + 1e-9))
        return self.schedule.effects_for(interval)

    def pdr_vector(
        self, rate: Rate, t: float, effects: Optional[ChannelEffects] = None
    ) -> NDArray[np.float64]:
        """所有节点在 rate 下的期望 PDR；未激活节点为 NaN"""
        fx = effects if effects is not None else self.effects_at(t)
        margin = (
            self.effective_snr - fx.snr_penalty - self.requirement.required_snr(rate)
        )
        pdr = fx.apply(sigmoid_pdr(margin, self.band_width), rate)
        pdr[~self.active] = np.nan
        return pdr

    def pdr_of(self, node: NodeChannel, rate: Rate, t: float) -> float:
        """单节点在时刻 t、速率 rate 下的期望 PDR

        Raises:
            MembershipError: 节点未激活
        """
        if not node.active:
            raise MembershipError(node.node_id)
        fx = self.effects_at(t)
        index = int(np.searchsorted(self.node_ids, node.node_id))
        if index >= self.size or self.node_ids[index] != node.node_id:
            # 不在本模型内的独立节点：不受干扰影响
            fx = ChannelEffects.neutral(1)
            index = 0
        margin = (
            node.effective_snr
            - float(fx.snr_penalty[index])
            - self.requirement.required_snr(rate)
        )
        value = sigmoid_pdr(np.array([margin]), np.array([node.band_width]))
        return float(fx.apply_one(float(value[0]), index, rate))

    def sample_vector(
        self,
        rate: Rate,
        t: float,
        packets: int,
        rng: SeededRNG,
        effects: Optional[ChannelEffects] = None,
        penalty: float = 0.0,
    ) -> NDArray[np.float64]:
        """整组节点的区间测量 PDR（二项分布噪声），penalty 为乘性 ΔPDR"""
        expected = self.pdr_vector(rate, t, effects) * (1.0 - penalty)
        return sample_binomial(expected, packets, rng)


def sample_binomial(
    expected: NDArray[np.float64], packets: int, rng: SeededRNG
) -> NDArray[np.float64]:
    if packets < 1:
        raise ValueError(f"packets must be >= 1, got {packets}")
    mask = ~np.isnan(expected)
    out = np.full(expected.shape, np.nan)
    probs = np.clip(expected[mask], 0.0, 1.0)
    out[mask] = rng.generator.binomial(packets, probs) / packets
    return out


def sample_interval_pdr(
    model: ChannelModel,
    node: NodeChannel,
    rate: Rate,
    t: float,
    packets: int,
    rng: SeededRNG,
) -> float:
    """单节点区间测量 PDR = binomial(packets, pdr_of) / packets"""
    if packets < 1:
        raise ValueError(f"packets must be >= 1, got {packets}")
    expected = model.pdr_of(node, rate, t)
    return float(rng.generator.binomial(packets, expected)) / packets


def packets_per_interval(
    rate: Rate, interval_s: float, efficiency: float, packet_bytes: int
) -> int:
    """一个报告区间内组播可发送的数据包数"""
    return max(1, int(rate.bps * interval_s * efficiency // (packet_bytes * 8)))
