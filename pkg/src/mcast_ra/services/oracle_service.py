"""
Oracle 目标速率

仅仿真器可用的真值：对阶梯上每个速率，用全部在线节点的期望 PDR（不含测量噪声与 ΔPDR）
统计真实 abnormal / mid-PDR 数量，目标速率为 abnormal ≤ A_max 的最高速率。
"""

from dataclasses import dataclass
from typing import List, Optional

from mcast_ra.channel.interference import ChannelEffects
from mcast_ra.channel.model import ChannelModel
from mcast_ra.core.rates import Rate
from mcast_ra.core.thresholds import Thresholds, a_max, classify_many


@dataclass(frozen=True)
class OracleResult:
    rate: Rate
    satisfiable: bool


@dataclass(frozen=True)
class OracleRow:
    rate_mbps: float
    abnormal: int
    mid: int
    a_max: int
    satisfies_sla: bool


def oracle_sweep(
    channel: ChannelModel,
    th: Thresholds,
    t: float,
    effects: Optional[ChannelEffects] = None,
) -> List[OracleRow]:
    """各速率下的真实 (abnormal, mid) 数量"""
    limit = a_max(int(channel.active.sum()), th.population)
    rows: List[OracleRow] = []
    for rate in channel.ladder:
        abnormal, mid = classify_many(channel.pdr_vector(rate, t, effects), th)
        rows.append(
            OracleRow(
                rate_mbps=rate.value,
                abnormal=abnormal,
                mid=mid,
                a_max=limit,
                satisfies_sla=abnormal <= limit,
            )
        )
    return rows


def oracle_target_rate(
    channel: ChannelModel,
    th: Thresholds,
    t: float,
    effects: Optional[ChannelEffects] = None,
) -> OracleResult:
    """满足 SLA 的最高速率；没有任何速率满足时返回最低速率且 satisfiable=False"""
    rows = oracle_sweep(channel, th, t, effects)
    for rate, row in zip(reversed(list(channel.ladder)), reversed(rows)):
        if row.satisfies_sla:
            return OracleResult(rate=rate, satisfiable=True)
    return OracleResult(rate=channel.ladder.lowest, satisfiable=False)
