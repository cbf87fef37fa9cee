"""
静态图片输出（matplotlib 面向对象接口，不经过 pyplot，可在线程池中使用）

- rate_throughput.png：速率 / oracle 速率 / 吞吐随时间变化
- abnormal_mid.png：真实与估计的 abnormal、mid-PDR 节点数随时间变化
- pdr_cdf.png：节点平均 PDR 的 CDF
"""

from pathlib import Path
from typing import List

import numpy as np
from matplotlib.figure import Figure

from mcast_ra.data_format.metrics import Trace
from mcast_ra.logging.logger import logger
from mcast_ra.services.summary_service import node_mean_pdr


class PlotService:
    def __init__(self, dpi: int = 120):
        self.dpi = dpi

    def render(self, trace: Trace, out_dir: Path) -> List[Path]:
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = [
            self._rate_throughput(trace, out_dir / "rate_throughput.png"),
            self._abnormal_mid(trace, out_dir / "abnormal_mid.png"),
            self._pdr_cdf(trace, out_dir / "pdr_cdf.png"),
        ]
        logger.debug(f"Wrote {len(paths)} plots to {out_dir}")
        return paths

    def _save(self, fig: Figure, path: Path) -> Path:
        fig.tight_layout()
        fig.savefig(path, dpi=self.dpi)
        return path

    def _rate_throughput(self, trace: Trace, path: Path) -> Path:
        t = np.array(trace.column("time_s"))
        fig = Figure(figsize=(8, 4))
        ax = fig.subplots()
        ax.step(t, trace.column("rate_mbps"), where="post", label="rate")
        ax.step(t, trace.column("oracle_rate_mbps"), where="post", linestyle="--", label="oracle")
        throughput = np.array(trace.column("delivered_bits")) / trace.interval_s / 1e6
        ax.plot(t, throughput, linewidth=0.8, alpha=0.7, label="throughput")
        ax.set_xlabel("Time (s)")
        ax.set_ylabel("Mbps")
        ax.set_title(f"{trace.scenario} / {trace.controller} / seed {trace.seed}")
        ax.grid(True)
        ax.legend(loc="lower right")
        return self._save(fig, path)

    def _abnormal_mid(self, trace: Trace, path: Path) -> Path:
        t = np.array(trace.column("time_s"))
        fig = Figure(figsize=(8, 4))
        ax = fig.subplots()
        ax.plot(t, trace.column("a_true"), label="abnormal (true)")
        ax.plot(
            t,
            np.array(trace.column("a_true")) + np.array(trace.column("m_true")),
            label="abnormal + mid-PDR (true)",
        )
        a_hat = [np.nan if v is None else v for v in trace.column("a_hat")]
        if not np.all(np.isnan(a_hat)):
            ax.plot(t, a_hat, linestyle=":", label="abnormal (estimated)")
        ax.plot(t, trace.column("a_max"), linestyle="--", color="grey", label="A_max")
        ax.set_xlabel("Time (s)")
        ax.set_ylabel("Nodes")
        ax.grid(True)
        ax.legend(loc="upper right")
        return self._save(fig, path)

    def _pdr_cdf(self, trace: Trace, path: Path) -> Path:
        pdr = np.sort(node_mean_pdr(trace.node_pdr_matrix()))
        fig = Figure(figsize=(5, 4))
        ax = fig.subplots()
        if pdr.size:
            ax.step(pdr, np.arange(1, pdr.size + 1) / pdr.size, where="post")
        ax.set_xlabel("PDR")
        ax.set_ylabel("CDF")
        ax.set_xlim(0.0, 1.0)
        ax.grid(True)
        return self._save(fig, path)
