from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np
from numpy.typing import NDArray

from mcast_ra.core.rates import Rate, RateLadder


class RateAction(str, Enum):
    HOLD = "hold"
    INCREASE = "increase"
    DECREASE = "decrease"


@dataclass(frozen=True)
class ControlInputs:
    """一个报告区间结束时控制器可见的信息

    Attributes:
        interval (int): 区间序号 t
        a_hat (Optional[int]): Â_t，不使用反馈的控制器为 None
        m_hat (Optional[int]): M̂_t
        a_max (int): 本区间 A_max
        epsilon (int): ε
        leader_outcomes (Dict[int, float]): 伪组播 leader 在各速率（按阶梯下标）上的 ACK 成功率
    """

    interval: int
    a_hat: Optional[int] = None
    m_hat: Optional[int] = None
    a_max: int = 0
    epsilon: int = 2
    leader_outcomes: Dict[int, float] = field(default_factory=dict)


class BaseController(ABC):
    """
    速率控制器基础类

    Attributes:
        name (str): 控制器名称，用于输出目录与对比表
        uses_feedback (bool): 是否运行 K-worst 反馈协议
        unicast (bool): 是否以单播方式发送（需付出 ACK 开销）
    """

    name: str = "base"
    uses_feedback: bool = True
    unicast: bool = False

    def __init__(self, ladder: RateLadder):
        self.ladder = ladder
        self._rate = ladder.lowest

    @property
    def rate(self) -> Rate:
        return self._rate

    @property
    def window(self) -> Optional[int]:
        return None

    def observe_membership(
        self, active: NDArray[np.bool_], base_snr: NDArray[np.float64]
    ) -> None:
        """成员变化通知，默认忽略"""
        return None

    def transmission_plan(self) -> List[Tuple[Rate, float]]:
        """本区间的发送计划：[(速率, 数据包占比)]"""
        return [(self._rate, 1.0)]

    def delivery_factor(self, inputs: ControlInputs) -> float:
        """组播以外的额外开销系数，单播控制器用它扣除 ACK 与重传"""
        return 1.0

    def step(self, action: RateAction) -> Rate:
        if action is RateAction.INCREASE:
            self._rate = self.ladder.next_higher(self._rate)
        elif action is RateAction.DECREASE:
            self._rate = self.ladder.next_lower(self._rate)
        return self._rate

    @abstractmethod
    def tick(self, inputs: ControlInputs) -> RateAction:
        """根据本区间的输入决定速率动作，并更新自身速率"""
        raise NotImplementedError
