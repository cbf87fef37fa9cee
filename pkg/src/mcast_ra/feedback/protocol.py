"""
K-worst 反馈协议

AP 端维护 FB 列表与上报门限 R，并在每个报告区间广播给所有节点；
FB 节点每个区间都上报自己测得的 PDR，非 FB 节点连续 volunteer_streak 个区间
低于 R 后主动申请成为 FB 节点。AP 从上报者与申请者中选出 PDR 最低的 K 个。
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from mcast_ra.core.thresholds import NodeClass, Thresholds, classify
from mcast_ra.logging.logger import logger
from mcast_ra.utils.rng import SeededRNG


class FeedbackConfig(BaseModel):
    """反馈协议参数

    Attributes:
        k (int): FB 节点数 K
        interval_s (float): 报告区间 T (s)
        below_margin (float): 列表已满时 R 相对最大 PDR 的下移量
        above_margin (float): 列表未满时 R 相对最大 PDR 的上移量
        volunteer_streak (int): 申请前需连续低于 R 的区间数
        report_bytes (int): 单条上报 / 申请报文字节数
        list_header_bytes (int): AP FB 列表报文固定开销
        list_entry_bytes (int): AP FB 列表报文每个条目字节数
        track_mid_pdr (bool): 列表未满或为空时 R 至少为 H，使 mid-PDR 节点也能申请
    """

    model_config = ConfigDict(extra="forbid", frozen=True)

    k: int = Field(30, ge=1)
    interval_s: float = Field(0.5, gt=0.0)
    below_margin: float = Field(0.01, gt=0.0)
    above_margin: float = Field(0.005, gt=0.0)
    volunteer_streak: int = Field(3, ge=1)
    report_bytes: int = Field(64, ge=0)
    list_header_bytes: int = Field(16, ge=0)
    list_entry_bytes: int = Field(8, ge=0)
    track_mid_pdr: bool = True

    @property
    def list_message_bytes(self) -> int:
        return self.list_header_bytes + self.list_entry_bytes * self.k


class MessageKind(str, Enum):
    REPORT = "report"
    VOLUNTEER = "volunteer"
    SILENT = "silent"


@dataclass(frozen=True)
class NodeMessage:
    kind: MessageKind
    pdr: Optional[float] = None

    @classmethod
    def silent(cls) -> "NodeMessage":
        return cls(MessageKind.SILENT)


@dataclass
class FeedbackState:
    """AP 端与节点端的反馈状态

    Attributes:
        fb_list (Tuple[int, ...]): 当前 FB 节点，按节点编号升序
        threshold (float): 上报门限 R
        reports (Dict[int, float]): 本区间收到的上报与申请
        streaks (Dict[int, int]): 非 FB 节点连续低于 R 的区间数
    """

    fb_list: Tuple[int, ...]
    threshold: float
    reports: Dict[int, float] = field(default_factory=dict)
    streaks: Dict[int, int] = field(default_factory=dict)

    @classmethod
    def initial(cls, cfg: FeedbackConfig, th: Thresholds) -> "FeedbackState":
        # 启动时列表为空；跟踪 mid-PDR 时空列表的门限下限为 H
        return cls(fb_list=(), threshold=empty_threshold(cfg, th))


def empty_threshold(cfg: FeedbackConfig, th: Thresholds) -> float:
    return th.high if cfg.track_mid_pdr else th.low


def node_tick(
    pdr: float, threshold: float, is_fb: bool, streak: int, cfg: FeedbackConfig
) -> Tuple[NodeMessage, int]:
    """节点端一个区间的行为，返回 (报文, 新的连续计数)"""
    if is_fb:
        return NodeMessage(MessageKind.REPORT, pdr), 0
    if pdr >= threshold:
        return NodeMessage.silent(), 0
    streak += 1
    if streak >= cfg.volunteer_streak:
        return NodeMessage(MessageKind.VOLUNTEER, pdr), streak
    return NodeMessage.silent(), streak


def ap_select(
    candidates: Mapping[int, float], cfg: FeedbackConfig, th: Thresholds
) -> Tuple[Tuple[int, ...], float]:
    """
    从上报者与申请者中选出 PDR 最低的 K 个节点，并更新门限 R

    PDR 相同时节点编号小者优先。
    """
    if not candidates:
        return (), empty_threshold(cfg, th)

    ranked = sorted(candidates.items(), key=lambda item: (item[1], item[0]))
    selected = ranked[: cfg.k]
    worst_of_best = max(pdr for _, pdr in selected)

    if len(selected) == cfg.k:
        threshold = worst_of_best - cfg.below_margin
    else:
        threshold = worst_of_best + cfg.above_margin
        if cfg.track_mid_pdr:
            threshold = max(threshold, th.high)

    fb_list = tuple(sorted(node_id for node_id, _ in selected))
    return fb_list, threshold


def estimate_cap(a_max: int, th: Thresholds) -> int:
    """估计值饱和上限 A_max + ε（ε=0 时取 A_max + 1，保证仍能观察到 Â > A_max）"""
    return a_max + max(th.epsilon, 1)


def estimates(
    reports: Mapping[int, float], th: Thresholds, a_max: int
) -> Tuple[int, int]:
    """由 FB 节点上报计算 (Â, M̂)，两者之和饱和于 A_max + ε"""
    abnormal = 0
    mid = 0
    for pdr in reports.values():
        node_class = classify(pdr, th)
        if node_class is NodeClass.ABNORMAL:
            abnormal += 1
        elif node_class is NodeClass.MID_PDR:
            mid += 1
    cap = estimate_cap(a_max, th)
    a_hat = min(abnormal, cap)
    m_hat = min(abnormal + mid, cap) - a_hat
    return a_hat, m_hat


@dataclass
class FeedbackRound:
    """一个报告区间的反馈结果"""

    fb_list: Tuple[int, ...]
    threshold: float
    a_hat: int
    m_hat: int
    reports: int
    volunteers: int
    control_bytes: int
    burst_span_s: float


class FeedbackProtocol:
    """
    反馈协议服务

    串联节点端 node_tick、AP 端 ap_select 与 estimates，负责报文字节统计、
    成员离开时的 FB 列表清理以及 FB 节点任期统计。
    """

    def __init__(
        self,
        cfg: FeedbackConfig,
        th: Thresholds,
        rng: SeededRNG,
    ):
        self.cfg = cfg
        self.th = th
        self.rng = rng
        self.state = FeedbackState.initial(cfg, th)

        self._stint_start: Dict[int, int] = {}
        self.completed_stints: List[int] = []
        self._interval = 0
        logger.debug(
            f"FeedbackProtocol initialized: K={cfg.k}, T={cfg.interval_s}s, "
            f"track_mid_pdr={cfg.track_mid_pdr}"
        )

    def prune(self, active: NDArray[np.bool_]) -> None:
        """移除已离开组播组的 FB 节点，并清空离线节点的连续计数

        列表变短后按剩余成员上一区间的上报重新计算 R（列表未满的规则）。
        """
        kept = tuple(i for i in self.state.fb_list if active[i])
        if len(kept) != len(self.state.fb_list):
            logger.debug(
                f"Pruned {len(self.state.fb_list) - len(kept)} inactive FB nodes"
            )
            self._update_tenure(kept)
            self.state.fb_list = kept
            remaining = {i: self.state.reports[i] for i in kept if i in self.state.reports}
            _, self.state.threshold = ap_select(remaining, self.cfg, self.th)
        for node_id in list(self.state.streaks):
            if not active[node_id]:
                del self.state.streaks[node_id]

    def step(
        self, measured: NDArray[np.float64], active: NDArray[np.bool_], a_max: int
    ) -> FeedbackRound:
        """
        执行一个报告区间的反馈

        Args:
            measured: 各节点本区间测得的 PDR，离线节点为 NaN
            active: 在线节点掩码
            a_max: 本区间的 A_max
        """
        self.prune(active)
        fb_members = set(self.state.fb_list)
        threshold = self.state.threshold

        candidates: Dict[int, float] = {}
        n_reports = 0
        n_volunteers = 0
        for node_id in np.flatnonzero(active):
            node_id = int(node_id)
            message, streak = node_tick(
                float(measured[node_id]),
                threshold,
                node_id in fb_members,
                self.state.streaks.get(node_id, 0),
                self.cfg,
            )
            if streak:
                self.state.streaks[node_id] = streak
            else:
                self.state.streaks.pop(node_id, None)
            if message.kind is MessageKind.REPORT:
                n_reports += 1
            elif message.kind is MessageKind.VOLUNTEER:
                n_volunteers += 1
            else:
                continue
            assert message.pdr is not None
            candidates[node_id] = message.pdr

        fb_list, new_threshold = ap_select(candidates, self.cfg, self.th)
        selected = {node_id: candidates[node_id] for node_id in fb_list}
        a_hat, m_hat = estimates(selected, self.th, a_max)

        # 节点上报前随机等待 U(0, T/10)，只影响突发持续时间的统计
        messages = n_reports + n_volunteers
        jitter = self.rng.generator.uniform(0.0, self.cfg.interval_s / 10.0, size=messages)
        burst_span = float(jitter.max()) if messages else 0.0

        self._update_tenure(fb_list)
        self.state.fb_list = fb_list
        self.state.threshold = new_threshold
        self.state.reports = candidates
        self._interval += 1

        return FeedbackRound(
            fb_list=fb_list,
            threshold=new_threshold,
            a_hat=a_hat,
            m_hat=m_hat,
            reports=n_reports,
            volunteers=n_volunteers,
            control_bytes=self.cfg.list_message_bytes + messages * self.cfg.report_bytes,
            burst_span_s=burst_span,
        )

    def _update_tenure(self, new_list: Tuple[int, ...]) -> None:
        new_members = set(new_list)
        for node_id in list(self._stint_start):
            if node_id not in new_members:
                self.completed_stints.append(self._interval - self._stint_start.pop(node_id))
        for node_id in new_members:
            self._stint_start.setdefault(node_id, self._interval)

    def tenure_stints(self) -> List[int]:
        """已结束与进行中的 FB 任期长度（单位：报告区间）"""
        ongoing = [self._interval - start for start in self._stint_start.values()]
        return self.completed_stints + ongoing
