"""
核心模块：速率阶梯、分类阈值、SLA 计算
"""

from .rates import DOT11A, DOT11A_RATES_MBPS, Rate, RateLadder
from .thresholds import (
    NodeClass,
    PdrDomainError,
    Thresholds,
    a_max,
    classify,
    classify_many,
)

__all__ = [
    # 速率
    "DOT11A",
    "DOT11A_RATES_MBPS",
    "Rate",
    "RateLadder",
    # 阈值
    "NodeClass",
    "PdrDomainError",
    "Thresholds",
    "a_max",
    "classify",
    "classify_many",
]
