"""
PDR 分类阈值与 SLA 计算

- Abnormal：pdr < L
- MidPDR：L <= pdr < H（边界 L 归为 MidPDR，边界 H 归为 Normal）
- Normal：pdr >= H
"""

import math
from enum import IntEnum
from typing import Tuple

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator


class PdrDomainError(ValueError):
    """PDR 取值不在 [0, 1] 内"""

    def __init__(self, pdr: float):
        super().__init__(f"PDR must be within [0, 1], got {pdr}")
        self.pdr = pdr


class NodeClass(IntEnum):
    """节点类别，按 Abnormal < MidPDR < Normal 排序"""

    ABNORMAL = 0
    MID_PDR = 1
    NORMAL = 2


class Thresholds(BaseModel):
    """分类阈值

    Attributes:
        low (float): L，PDR 门限
        high (float): H，mid-PDR 上界
        population (float): X，需满足 PDR >= L 的节点比例
        epsilon (int): ε，速率规则中的计数裕量
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    low: float = Field(0.85, gt=0.0, description="L")
    high: float = Field(0.97, le=1.0, description="H")
    population: float = Field(0.95, gt=0.0, le=1.0, description="X")
    epsilon: int = Field(2, ge=0, description="ε")

    @model_validator(mode="after")
    def _order_checks(self) -> "Thresholds":
        if not self.low < self.high:
            raise ValueError(
                f"Thresholds require L < H, got L={self.low}, H={self.high}"
            )
        return self


def classify(pdr: float, th: Thresholds) -> NodeClass:
    """
    单个节点分类

    Raises:
        PdrDomainError: pdr 不在 [0, 1]
    """
    if not 0.0 <= pdr <= 1.0 or math.isnan(pdr):
        raise PdrDomainError(pdr)
    if pdr < th.low:
        return NodeClass.ABNORMAL
    if pdr < th.high:
        return NodeClass.MID_PDR
    return NodeClass.NORMAL


def classify_many(pdrs: ArrayLike, th: Thresholds) -> Tuple[int, int]:
    """向量化统计 (abnormal 数, mid-PDR 数)，忽略 NaN（未激活节点）"""
    values = np.asarray(pdrs, dtype=float)
    values = values[~np.isnan(values)]
    abnormal = int(np.count_nonzero(values < th.low))
    mid = int(np.count_nonzero((values >= th.low) & (values < th.high)))
    return abnormal, mid


def a_max(n: int, population: float) -> int:
    """A_max = ⌈n·(1−X)⌉"""
    if n < 0:
        raise ValueError(f"Node count must be non-negative, got {n}")
    if not 0.0 < population <= 1.0:
        raise ValueError(f"Population fraction X must be in (0, 1], got {population}")
    # 浮点误差保护：160 * 0.05 = 8.000000000000002
    return int(math.ceil(n * (1.0 - population) - 1e-9))
