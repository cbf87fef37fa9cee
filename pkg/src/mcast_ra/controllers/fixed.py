from mcast_ra.controllers.base import BaseController, ControlInputs, RateAction
from mcast_ra.core.rates import RateLadder


class FixedRateController(BaseController):
    """固定速率组播，从不改速"""

    name = "fixed"
    uses_feedback = False

    def __init__(self, ladder: RateLadder, rate_mbps: float = 36.0):
        super().__init__(ladder)
        self._rate = ladder.from_value(rate_mbps)

    def tick(self, inputs: ControlInputs) -> RateAction:
        return RateAction.HOLD
