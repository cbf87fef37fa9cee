"""
反馈模块：K-worst 反馈协议与反馈碰撞模型
"""

from .collision import CollisionParams, InfeasibleIntervalError, check_interval, delta_pdr
from .protocol import (
    FeedbackConfig,
    FeedbackProtocol,
    FeedbackRound,
    FeedbackState,
    MessageKind,
    NodeMessage,
    ap_select,
    estimate_cap,
    estimates,
    node_tick,
)

__all__ = [
    # 碰撞
    "CollisionParams",
    "InfeasibleIntervalError",
    "check_interval",
    "delta_pdr",
    # 协议
    "FeedbackConfig",
    "FeedbackProtocol",
    "FeedbackRound",
    "FeedbackState",
    "MessageKind",
    "NodeMessage",
    "ap_select",
    "estimate_cap",
    "estimates",
    "node_tick",
]
