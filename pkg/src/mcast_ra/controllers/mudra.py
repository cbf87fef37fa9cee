"""
MuDRA 控制环

每个报告区间：
1. 由 FB 上报得到 (Â_t, M̂_t) 并记入历史
2. GetRate：距上次改速超过 window 个区间后，检查最近 window 个区间
   - 全部 Â ≥ A_max 且至少一次 Â > A_max -> 降速
   - 全部 Â + M̂ ≤ A_max − ε -> 升速
3. GetWinSize：降速时窗口翻倍（不超过 W_max）；保持超过 thresholdTime 后窗口减 1（不低于 W_min）
"""

from collections import deque
from dataclasses import dataclass, field, replace
from typing import Deque, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from mcast_ra.controllers.base import BaseController, ControlInputs, RateAction
from mcast_ra.core.rates import Rate, RateLadder
from mcast_ra.logging.logger import logger


class MudraParams(BaseModel):
    """AIMD 窗口参数，时间单位均为报告区间"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    w_min: int = Field(8, ge=1)
    w_max: int = Field(32, ge=1)
    threshold_time: int = Field(10, ge=1)

    @model_validator(mode="after")
    def _window_order(self) -> "MudraParams":
        if self.w_max < self.w_min:
            raise ValueError(
                f"MuDRA requires W_min <= W_max, got {self.w_min} > {self.w_max}"
            )
        return self


@dataclass(frozen=True)
class ControllerState:
    """
    Attributes:
        rate (Rate): 当前速率
        window (int): 当前窗口（报告区间数）
        change_time (int): 最近一次改速的区间
        ref_time (int): 窗口调整的参考时间
        history (Deque[Tuple[int, int]]): 最近 W_max 个区间的 (Â, M̂)
    """

    rate: Rate
    window: int
    change_time: int = 0
    ref_time: int = 0
    history: Deque[Tuple[int, int]] = field(default_factory=deque)

    @classmethod
    def initial(cls, ladder: RateLadder, params: MudraParams) -> "ControllerState":
        return cls(
            rate=ladder.lowest,
            window=params.w_min,
            history=deque(maxlen=params.w_max),
        )


def target_condition(a_hat: int, m_hat: int, a_max: int) -> bool:
    """Â ≤ A_max 且 Â + M̂ > A_max 时，AP 处于目标速率"""
    return a_hat <= a_max and a_hat + m_hat > a_max


def get_rate(
    state: ControllerState, a_max: int, epsilon: int, t: int, ladder: RateLadder
) -> RateAction:
    if t - state.change_time <= state.window:
        return RateAction.HOLD
    recent = list(state.history)[-state.window :]
    if len(recent) < state.window:
        return RateAction.HOLD

    can_decrease = all(a >= a_max for a, _ in recent) and any(
        a > a_max for a, _ in recent
    )
    can_increase = all(a + m <= a_max - epsilon for a, m in recent)

    if can_decrease and not ladder.is_lowest(state.rate):
        return RateAction.DECREASE
    if can_increase and not ladder.is_highest(state.rate):
        return RateAction.INCREASE
    return RateAction.HOLD


def get_win_size(
    action: RateAction,
    window: int,
    ref_time: int,
    t: int,
    threshold_time: int,
    params: Optional[MudraParams] = None,
) -> Tuple[int, int]:
    params = params or MudraParams()
    if action is RateAction.DECREASE:
        return min(params.w_max, 2 * window), t
    if action is RateAction.INCREASE:
        return window, t
    if t - ref_time > threshold_time:
        return max(params.w_min, window - 1), t
    return window, ref_time


def mudra_tick(
    state: ControllerState,
    a_hat: int,
    m_hat: int,
    a_max: int,
    epsilon: int,
    t: int,
    ladder: RateLadder,
    params: Optional[MudraParams] = None,
) -> Tuple[ControllerState, RateAction]:
    """一个区间的 MuDRA 决策，返回新状态与动作；不修改传入的 state"""
    params = params or MudraParams()
    history = deque(state.history, maxlen=params.w_max)
    history.append((a_hat, m_hat))
    state = replace(state, history=history)

    action = get_rate(state, a_max, epsilon, t, ladder)
    rate = state.rate
    change_time = state.change_time
    if action is RateAction.DECREASE:
        rate = ladder.next_lower(rate)
        change_time = t
    elif action is RateAction.INCREASE:
        rate = ladder.next_higher(rate)
        change_time = t

    window, ref_time = get_win_size(
        action, state.window, state.ref_time, t, params.threshold_time, params
    )
    return (
        replace(
            state,
            rate=rate,
            window=window,
            change_time=change_time,
            ref_time=ref_time,
        ),
        action,
    )


class MudraController(BaseController):
    name = "mudra"

    def __init__(self, ladder: RateLadder, params: Optional[MudraParams] = None):
        super().__init__(ladder)
        self.params = params or MudraParams()
        self.state = ControllerState.initial(ladder, self.params)

    @property
    def window(self) -> Optional[int]:
        return self.state.window

    def tick(self, inputs: ControlInputs) -> RateAction:
        if inputs.a_hat is None or inputs.m_hat is None:
            raise ValueError("MuDRA requires feedback estimates every interval")
        self.state, action = mudra_tick(
            self.state,
            inputs.a_hat,
            inputs.m_hat,
            inputs.a_max,
            inputs.epsilon,
            inputs.interval,
            self.ladder,
            self.params,
        )
        if action is not RateAction.HOLD:
            logger.debug(
                f"t={inputs.interval} {action.value} -> {self.state.rate}, "
                f"window={self.state.window}"
            )
        self._rate = self.state.rate
        return action
