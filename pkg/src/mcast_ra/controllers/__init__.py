from enum import Enum

from pydantic import BaseModel, ConfigDict, Field

from mcast_ra.controllers.base import BaseController, ControlInputs, RateAction
from mcast_ra.controllers.fixed import FixedRateController
from mcast_ra.controllers.mudra import MudraController, MudraParams
from mcast_ra.controllers.pseudo_multicast import (
    PseudoMulticastController,
    PseudoMulticastParams,
)
from mcast_ra.controllers.sra import SraController
from mcast_ra.core.rates import RateLadder
from mcast_ra.utils.rng import SeededRNG


class ControllerKind(str, Enum):
    MUDRA = "mudra"
    FIXED = "fixed"
    PSEUDO_MULTICAST = "pseudo_multicast"
    SRA = "sra"


class ControllerConfig(BaseModel):
    """控制器选择与各控制器参数"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: ControllerKind = ControllerKind.MUDRA
    mudra: MudraParams = Field(default_factory=MudraParams)
    fixed_rate_mbps: float = 36.0
    pseudo_multicast: PseudoMulticastParams = Field(
        default_factory=PseudoMulticastParams
    )


def build_controller(
    kind: ControllerKind, cfg: ControllerConfig, ladder: RateLadder, rng: SeededRNG
) -> BaseController:
    if kind is ControllerKind.MUDRA:
        return MudraController(ladder, cfg.mudra)
    if kind is ControllerKind.FIXED:
        return FixedRateController(ladder, cfg.fixed_rate_mbps)
    if kind is ControllerKind.PSEUDO_MULTICAST:
        return PseudoMulticastController(ladder, rng.stream("probe"), cfg.pseudo_multicast)
    if kind is ControllerKind.SRA:
        return SraController(ladder)
    raise ValueError(f"Unknown controller kind: {kind}")


__all__ = [
    "BaseController",
    "ControlInputs",
    "ControllerConfig",
    "ControllerKind",
    "FixedRateController",
    "MudraController",
    "MudraParams",
    "PseudoMulticastController",
    "PseudoMulticastParams",
    "RateAction",
    "SraController",
    "build_controller",
]
