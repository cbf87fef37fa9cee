from mcast_ra.controllers.base import BaseController, ControlInputs, RateAction
from mcast_ra.core.rates import RateLadder


def sra_tick(a_hat: int, a_max: int) -> RateAction:
    """Â > A_max 立即降速，Â = 0 立即升速，否则保持；无窗口、不看 mid-PDR"""
    if a_hat > a_max:
        return RateAction.DECREASE
    if a_hat == 0:
        return RateAction.INCREASE
    return RateAction.HOLD


class SraController(BaseController):
    name = "sra"

    def __init__(self, ladder: RateLadder):
        super().__init__(ladder)

    def tick(self, inputs: ControlInputs) -> RateAction:
        if inputs.a_hat is None:
            raise ValueError("SRA requires feedback estimates every interval")
        action = sra_tick(inputs.a_hat, inputs.a_max)
        if action is RateAction.DECREASE and self.ladder.is_lowest(self._rate):
            action = RateAction.HOLD
        if action is RateAction.INCREASE and self.ladder.is_highest(self._rate):
            action = RateAction.HOLD
        self.step(action)
        return action
