"""
伪组播（pseudo-multicast）

AP 以单播方式发给 SNR 最低的在线节点（leader），其余节点混杂模式监听。
leader 的速率由简化的 Minstrel 规则决定：
- 每个速率维护 ACK 成功率的 EWMA
- 约 10% 的数据包用随机的非当前速率做探测
- 每个区间选 成功率 × 速率 最大的速率，一次移动一档
"""

import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from mcast_ra.controllers.base import BaseController, ControlInputs, RateAction
from mcast_ra.core.rates import Rate, RateLadder
from mcast_ra.logging.logger import logger
from mcast_ra.utils.rng import SeededRNG


class PseudoMulticastParams(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    ewma_weight: float = Field(0.25, gt=0.0, le=1.0)
    probe_ratio: float = Field(0.1, ge=0.0, lt=1.0)
    ack_overhead: float = Field(0.15, ge=0.0, lt=1.0)


class PseudoMulticastController(BaseController):
    name = "pseudo_multicast"
    uses_feedback = False
    unicast = True

    def __init__(
        self,
        ladder: RateLadder,
        rng: SeededRNG,
        params: Optional[PseudoMulticastParams] = None,
    ):
        super().__init__(ladder)
        self.params = params or PseudoMulticastParams()
        self.rng = rng
        self.leader: Optional[int] = None
        self._success: Dict[int, float] = {}
        self._probe: Optional[Rate] = None
        self._draw_probe()

    def observe_membership(
        self, active: NDArray[np.bool_], base_snr: NDArray[np.float64]
    ) -> None:
        online = np.flatnonzero(active)
        if online.size == 0:
            leader = None
        else:
            leader = int(online[np.argmin(base_snr[online])])
        if leader != self.leader:
            logger.debug(f"Pseudo-multicast leader {self.leader} -> {leader}")
            self.leader = leader
            # 新 leader 的信道不同，统计重新开始
            self._success.clear()

    @property
    def idle(self) -> bool:
        return self.leader is None

    def _draw_probe(self) -> None:
        others = [r for r in self.ladder if r.index != self._rate.index]
        if not others or self.params.probe_ratio == 0:
            self._probe = None
            return
        self._probe = others[self.rng.integers(0, len(others))]

    def transmission_plan(self) -> List[Tuple[Rate, float]]:
        if self._probe is None:
            return [(self._rate, 1.0)]
        share = self.params.probe_ratio
        return [(self._rate, 1.0 - share), (self._probe, share)]

    def delivery_factor(self, inputs: ControlInputs) -> float:
        if self.idle:
            return 0.0
        success = inputs.leader_outcomes.get(self._rate.index, 1.0)
        return (1.0 - self.params.ack_overhead) * success

    def expected_throughput(self, rate: Rate) -> float:
        success = self._success.get(rate.index)
        return -math.inf if success is None else success * rate.value

    def tick(self, inputs: ControlInputs) -> RateAction:
        if self.idle:
            self._draw_probe()
            return RateAction.HOLD

        w = self.params.ewma_weight
        for index, observed in inputs.leader_outcomes.items():
            previous = self._success.get(index)
            self._success[index] = (
                observed if previous is None else (1.0 - w) * previous + w * observed
            )

        best = max(
            self.ladder, key=lambda r: (self.expected_throughput(r), -r.index)
        )
        if best.index > self._rate.index:
            action = RateAction.INCREASE
        elif best.index < self._rate.index:
            action = RateAction.DECREASE
        else:
            action = RateAction.HOLD
        self.step(action)
        self._draw_probe()
        return action
