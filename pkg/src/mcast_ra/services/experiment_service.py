"""
实验编排

对每个 (场景, 扫描取值, 控制器, seed) 组合运行一次仿真，输出目录结构：

    <out>/<scenario>/[<parameter>=<value>/]<controller>/seed_<seed>/
        trace.csv  node_pdr.csv  summary.json  run.log  [oracle.csv]  [video_*.csv]  [*.png]
    <out>/comparison.csv   每个 (场景, 扫描取值, 控制器) 一行，跨 seed 汇总
    <out>/sweep.csv        仅在有参数扫描时输出

某次运行失败时在其目录下留下 FAILED 文件并继续其余运行。
时长为 0 的场景只写出空的 trace.csv 与 node_pdr.csv，不计入汇总。
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt, ValidationError

from mcast_ra.config.loader import SettingLoader
from mcast_ra.config.scenario_loader import ScenarioError, load_scenario
from mcast_ra.controllers import ControllerKind
from mcast_ra.data_format.metrics import (
    write_node_pdr_csv,
    write_table_csv,
    write_trace_csv,
)
from mcast_ra.data_format.scenario import Scenario
from mcast_ra.logging.logger import logger, run_log
from mcast_ra.services.plot_service import PlotService
from mcast_ra.services.simulation_service import SimulationService
from mcast_ra.services.summary_service import RunSummary, aggregate, summarize
from mcast_ra.services.video_service import VideoService

EXIT_OK = 0
EXIT_RUN_FAILURE = 1
EXIT_CONFIG_ERROR = 2


class RunConfig(BaseModel):
    """一次命令行调用的运行参数"""

    model_config = ConfigDict(extra="forbid")

    scenarios: List[Path] = Field(..., min_length=1)
    out: Path = Field(default_factory=lambda: Path(SettingLoader.get_runtime_setting().output_dir))
    seeds: List[NonNegativeInt] = Field(default_factory=lambda: [1], min_length=1)
    controller: Optional[ControllerKind] = None
    plots: bool = False
    oracle: bool = False
    workers: int = Field(1, ge=1)


@dataclass(frozen=True)
class RunJob:
    scenario: Scenario
    controller: ControllerKind
    seed: int
    sweep_label: Optional[str]
    sweep_value: Optional[object]
    run_dir: Path


@dataclass(frozen=True)
class RunResult:
    """单次运行结果；ok 为真但 summary 为空表示 trace 没有区间"""

    ok: bool
    summary: Optional[RunSummary] = None


class ExperimentService:
    """批量运行与结果导出"""

    def __init__(self, config: RunConfig):
        self.config = config
        runtime = SettingLoader.get_runtime_setting()
        self.digits = runtime.csv_float_digits
        self.plotter = PlotService(dpi=runtime.plot_dpi) if config.plots else None
        self.video = VideoService()
        logger.info(
            f"ExperimentService initialized: {len(config.scenarios)} scenario(s), "
            f"seeds={config.seeds}, workers={config.workers}, out={config.out}"
        )

    def plan_jobs(self, scenarios: List[Scenario]) -> List[RunJob]:
        """
        展开全部运行

        Raises:
            ScenarioError: 扫描取值不合法
        """
        jobs: List[RunJob] = []
        for scenario in scenarios:
            variants: List[Tuple[Scenario, Optional[str], Optional[object]]] = [(scenario, None, None)]
            if scenario.sweep is not None:
                variants = []
                for value in scenario.sweep.values:
                    label = f"{scenario.sweep.parameter}={value}"
                    try:
                        variant = scenario.with_override(scenario.sweep.parameter, value)
                    except ValidationError as e:
                        raise ScenarioError(
                            f"Sweep value {label} is invalid: {e.errors()[0]['msg']}",
                            field=scenario.sweep.parameter,
                        ) from e
                    variants.append((variant, label, value))

            if self.config.controller is not None:
                kinds = [self.config.controller]
            elif scenario.compare is not None:
                kinds = list(scenario.compare.controllers)
            else:
                kinds = [scenario.controller.kind]

            for variant, label, value in variants:
                base = self.config.out / scenario.name
                if label is not None:
                    base = base / label
                for kind in kinds:
                    for seed in self.config.seeds:
                        jobs.append(
                            RunJob(
                                scenario=variant.model_copy(update={"seed": seed}),
                                controller=kind,
                                seed=seed,
                                sweep_label=label,
                                sweep_value=value,
                                run_dir=base / kind.value / f"seed_{seed}",
                            )
                        )
        return jobs

    def run_one(self, job: RunJob) -> RunResult:
        job.run_dir.mkdir(parents=True, exist_ok=True)
        label = job.run_dir.relative_to(self.config.out).as_posix()
        with run_log(label, job.run_dir / "run.log"):
            return self._run_job(job)

    def _run_job(self, job: RunJob) -> RunResult:
        marker = job.run_dir / "FAILED"
        if marker.exists():
            marker.unlink()
        try:
            trace = SimulationService(record_oracle_sweep=self.config.oracle).run(
                job.scenario, job.controller
            )
            write_trace_csv(trace, job.run_dir / "trace.csv", self.digits)
            write_node_pdr_csv(trace, job.run_dir / "node_pdr.csv", self.digits)
            if self.config.oracle:
                write_table_csv(trace.oracle_rows, job.run_dir / "oracle.csv", self.digits)
            if not trace.frames:
                logger.warning(f"Empty trace: {job.scenario.name} has no reporting intervals")
                return RunResult(ok=True)

            summary = summarize(
                trace,
                job.scenario.thresholds,
                job.scenario.ladder.values(),
                job.scenario.simulation.convergence_hold,
            )
            payload: Dict[str, object] = summary.model_dump(mode="json")

            if job.scenario.video is not None:
                report = self.video.evaluate(trace, job.scenario)
                write_table_csv(report.grade_rows(), job.run_dir / "video_grades.csv", self.digits)
                write_table_csv(
                    report.distribution_rows(), job.run_dir / "video_distribution.csv", self.digits
                )
                write_table_csv(report.segments, job.run_dir / "video_segments.csv", self.digits)
                payload["video_distribution"] = {
                    g.value: f for g, f in report.distribution().items()
                }

            (job.run_dir / "summary.json").write_text(
                json.dumps(payload, indent=2, ensure_ascii=False) + "\n", encoding="utf-8"
            )
            if self.plotter is not None:
                self.plotter.render(trace, job.run_dir)
            return RunResult(ok=True, summary=summary)
        except Exception as e:
            logger.exception(
                f"Run failed: {job.scenario.name} {job.controller.value} seed={job.seed}"
            )
            marker.write_text(f"{type(e).__name__}: {e}\n", encoding="utf-8")
            return RunResult(ok=False)

    def run(self, jobs: List[RunJob]) -> int:
        if self.config.workers > 1:
            with ThreadPoolExecutor(max_workers=self.config.workers) as pool:
                results = list(pool.map(self.run_one, jobs))
        else:
            results = [self.run_one(job) for job in jobs]

        self._write_aggregates(jobs, results)
        failures = sum(1 for r in results if not r.ok)
        if failures:
            logger.error(f"{failures} of {len(jobs)} runs failed")
            return EXIT_RUN_FAILURE
        logger.info(f"All {len(jobs)} runs finished, results in {self.config.out}")
        return EXIT_OK

    def _write_aggregates(self, jobs: List[RunJob], results: List[RunResult]) -> None:
        groups: Dict[Tuple[str, Optional[str], str], List[RunSummary]] = {}
        sweep_keys: Dict[Tuple[str, Optional[str], str], RunJob] = {}
        for job, result in zip(jobs, results):
            key = (job.scenario.name, job.sweep_label, job.controller.value)
            groups.setdefault(key, [])
            sweep_keys.setdefault(key, job)
            if result.summary is not None:
                groups[key].append(result.summary)

        comparison: List[Dict[str, object]] = []
        sweep: List[Dict[str, object]] = []
        for key, summaries in groups.items():
            if not summaries:
                continue
            row = aggregate(summaries)
            job = sweep_keys[key]
            comparison.append({"sweep": job.sweep_label or "", **row})
            if job.sweep_label is not None and job.scenario.sweep is not None:
                sweep.append(
                    {
                        "scenario": job.scenario.name,
                        "parameter": job.scenario.sweep.parameter,
                        "value": job.sweep_value,
                        **{k: v for k, v in row.items() if k != "scenario"},
                    }
                )

        self.config.out.mkdir(parents=True, exist_ok=True)
        write_table_csv(comparison, self.config.out / "comparison.csv", self.digits)
        if sweep:
            write_table_csv(sweep, self.config.out / "sweep.csv", self.digits)


def run_experiments(config: RunConfig) -> int:
    """加载场景并运行全部实验，返回进程退出码（0 成功 / 1 运行失败 / 2 配置错误）"""
    try:
        scenarios = [load_scenario(path) for path in config.scenarios]
        service = ExperimentService(config)
        jobs = service.plan_jobs(scenarios)
    except ScenarioError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG_ERROR
    return service.run(jobs)
