"""
视频质量评估

以仿真 Trace 为输入，按 1 s 分段：
- 关键帧以最低速率可靠发送，视为无损
- 非关键帧丢包率 = 1 − 该分段内节点平均 PDR
- 每个节点对各分段 PSNR 取平均后分级
同时按分段给出规划的视频码率 V_R。
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from mcast_ra.data_format.metrics import Trace
from mcast_ra.data_format.scenario import Scenario, VideoConfig
from mcast_ra.logging.logger import logger
from mcast_ra.video.planner import InfeasiblePlanError, plan_segment
from mcast_ra.video.quality import (
    QualityGrade,
    grade,
    grade_distribution,
    psnr_from_loss,
)


@dataclass
class NodeVideoQuality:
    node_id: int
    mean_psnr: float
    grade: QualityGrade


@dataclass
class VideoReport:
    nodes: List[NodeVideoQuality] = field(default_factory=list)
    segments: List[Dict[str, Optional[float]]] = field(default_factory=list)

    def distribution(self) -> Dict[QualityGrade, float]:
        return grade_distribution([n.grade for n in self.nodes])

    def fraction(self, *grades: QualityGrade) -> float:
        dist = self.distribution()
        return sum(dist[g] for g in grades)

    def grade_rows(self) -> List[Dict[str, object]]:
        return [
            {"node_id": n.node_id, "mean_psnr": n.mean_psnr, "grade": n.grade.value}
            for n in self.nodes
        ]

    def distribution_rows(self) -> List[Dict[str, object]]:
        return [{"grade": g.value, "fraction": f} for g, f in self.distribution().items()]


class VideoService:
    """视频分段规划与画质分级"""

    def evaluate(self, trace: Trace, scenario: Scenario) -> VideoReport:
        config = scenario.video or VideoConfig()
        sim = scenario.simulation
        per_segment = max(1, int(round(config.segment_s / trace.interval_s)))
        matrix = trace.node_pdr_matrix()
        lowest = scenario.ladder.lowest

        report = VideoReport()
        n_segments = len(trace.frames) // per_segment
        psnr_sum = np.zeros(trace.n_nodes)
        psnr_count = np.zeros(trace.n_nodes, dtype=int)

        for s in range(n_segments):
            block = matrix[s * per_segment : (s + 1) * per_segment]
            seen = ~np.isnan(block)
            counts = seen.sum(axis=0)
            online = counts > 0
            mean_pdr = np.where(seen, block, 0.0).sum(axis=0)[online] / counts[online]
            for node_id, pdr in zip(np.flatnonzero(online), mean_pdr):
                loss = float(np.clip(1.0 - pdr, 0.0, 1.0))
                psnr_sum[node_id] += psnr_from_loss(loss, sim.fec_overhead, config.psnr)
                psnr_count[node_id] += 1

            frames = trace.frames[s * per_segment : (s + 1) * per_segment]
            rate_bps = float(np.mean([f.rate_mbps for f in frames])) * 1e6
            group_pdr = float(mean_pdr.mean()) if mean_pdr.size else 0.0
            d_min = lowest.bps * sim.efficiency
            d_rate = rate_bps * sim.efficiency * (1.0 - sim.fec_overhead) * group_pdr
            try:
                plan = plan_segment(d_min, d_rate, config.key_fraction, config.segment_s)
                video_rate: Optional[float] = plan.video_rate / 1e6
            except InfeasiblePlanError:
                video_rate = None
            report.segments.append(
                {
                    "segment": float(s),
                    "rate_mbps": rate_bps / 1e6,
                    "d_min_mbps": d_min / 1e6,
                    "d_rate_mbps": d_rate / 1e6,
                    "video_rate_mbps": video_rate,
                }
            )

        for node_id in np.flatnonzero(psnr_count):
            mean_psnr = float(psnr_sum[node_id] / psnr_count[node_id])
            report.nodes.append(
                NodeVideoQuality(int(node_id), mean_psnr, grade(mean_psnr, config.grades))
            )

        good = report.fraction(QualityGrade.EXCELLENT, QualityGrade.GOOD)
        logger.info(
            f"Video evaluation [{trace.controller}]: {len(report.nodes)} nodes, "
            f"excellent+good={good:.1%}"
        )
        return report
