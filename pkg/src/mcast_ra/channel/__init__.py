from mcast_ra.channel.churn import ChurnModel, apply_churn, initial_membership
from mcast_ra.channel.interference import (
    ChannelEffects,
    InterferenceConfig,
    InterferenceEvent,
    InterferenceKind,
    InterferenceSchedule,
    ManualEventConfig,
    OnOffConfig,
    SpikeConfig,
)
from mcast_ra.channel.model import (
    ChannelModel,
    MembershipError,
    NodeChannel,
    RateSnrRequirement,
    sample_interval_pdr,
    sigmoid_pdr,
)
from mcast_ra.channel.population import (
    PopulationParams,
    build_population,
    deactivate_worst,
)

__all__ = [
    "ChannelEffects",
    "ChannelModel",
    "ChurnModel",
    "InterferenceConfig",
    "InterferenceEvent",
    "InterferenceKind",
    "InterferenceSchedule",
    "ManualEventConfig",
    "MembershipError",
    "NodeChannel",
    "OnOffConfig",
    "PopulationParams",
    "RateSnrRequirement",
    "SpikeConfig",
    "apply_churn",
    "build_population",
    "deactivate_worst",
    "initial_membership",
    "sample_interval_pdr",
    "sigmoid_pdr",
]
