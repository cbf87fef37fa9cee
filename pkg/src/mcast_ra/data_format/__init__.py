from mcast_ra.data_format.metrics import SCHEMA_VERSION, TRACE_COLUMNS, MetricsFrame, Trace
from mcast_ra.data_format.scenario import (
    ChannelConfig,
    CompareConfig,
    Scenario,
    ScheduledAction,
    ScheduledEvent,
    SimulationParams,
    SweepConfig,
    VideoConfig,
)

__all__ = [
    "SCHEMA_VERSION",
    "TRACE_COLUMNS",
    "ChannelConfig",
    "CompareConfig",
    "MetricsFrame",
    "Scenario",
    "ScheduledAction",
    "ScheduledEvent",
    "SimulationParams",
    "SweepConfig",
    "Trace",
    "VideoConfig",
]
