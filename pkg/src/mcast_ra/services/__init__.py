"""
Services module for mcast_ra

包含仿真、oracle、汇总、轨迹校验、视频评估、实验编排与绘图服务。
"""

from .experiment_service import ExperimentService, RunConfig, run_experiments
from .oracle_service import OracleResult, oracle_sweep, oracle_target_rate
from .simulation_service import SimulationService
from .summary_service import RunSummary, aggregate, summarize
from .trace_validator import Violation, validate_trace
from .video_service import VideoReport, VideoService

__all__ = [
    "ExperimentService",
    "OracleResult",
    "RunConfig",
    "RunSummary",
    "SimulationService",
    "VideoReport",
    "VideoService",
    "Violation",
    "aggregate",
    "oracle_sweep",
    "oracle_target_rate",
    "run_experiments",
    "summarize",
    "validate_trace",
]
