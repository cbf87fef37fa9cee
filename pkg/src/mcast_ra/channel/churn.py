"""
组播成员变化（移动性）

每个 epoch 边界上，每个节点以概率 p 独立地加入/离开组播组。
"""

import math

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from mcast_ra.utils.rng import SeededRNG


class ChurnModel(BaseModel):
    """成员变化模型

    Attributes:
        p (float): 每个 epoch 的切换概率
        epoch_s (float): epoch 长度 (s)
        initial_active_fraction (float): 初始在线节点比例
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    p: float = Field(0.0, ge=0.0, le=1.0)
    epoch_s: float = Field(6.0, gt=0.0)
    initial_active_fraction: float = Field(0.5, ge=0.0, le=1.0)


def is_epoch_boundary(t: float, epoch_s: float) -> bool:
    ratio = t / epoch_s
    return abs(ratio - round(ratio)) < 1e-9


def initial_membership(n: int, model: ChurnModel, rng: SeededRNG) -> NDArray[np.bool_]:
    """随机挑选 round(n * initial_active_fraction) 个节点初始在线"""
    count = int(round(n * model.initial_active_fraction))
    mask = np.zeros(n, dtype=bool)
    if count > 0:
        mask[rng.generator.choice(n, size=count, replace=False)] = True
    return mask


def apply_churn(
    active: NDArray[np.bool_], t: float, model: ChurnModel, rng: SeededRNG
) -> NDArray[np.bool_]:
    """
    在 epoch 边界 t 上对每个节点独立地以概率 p 切换成员状态

    Raises:
        ValueError: t 不在 epoch 边界上
    """
    if t < 0 or not math.isfinite(t) or not is_epoch_boundary(t, model.epoch_s):
        raise ValueError(
            f"Churn time {t}s is not aligned to the {model.epoch_s}s epoch"
        )
    # 即使 p=0 也消耗同样数量的随机数，保证各 p 值下其他抽样序列一致
    toggles = rng.generator.random(active.size) < model.p
    return np.logical_xor(active, toggles)
