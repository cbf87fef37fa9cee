"""
端到端验收：在仓库自带的场景上运行完整仿真，检查收敛、稳定性、方案对比、移动性与视频画质

运行时间约一到两分钟，可用 `pytest -m "not acceptance"` 跳过。
"""

import os
import sys
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from mcast_ra.config.scenario_loader import load_scenario  # noqa: E402
from mcast_ra.controllers import ControllerKind  # noqa: E402
from mcast_ra.data_format import Scenario, Trace  # noqa: E402
from mcast_ra.services import (  # noqa: E402
    RunSummary,
    SimulationService,
    VideoReport,
    VideoService,
    summarize,
    validate_trace,
)
from mcast_ra.video import QualityGrade  # noqa: E402

pytestmark = pytest.mark.acceptance

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"
SEEDS = list(range(1, 11))

Runs = Dict[Tuple[ControllerKind, int], Tuple[Trace, RunSummary]]


def _scenario(name: str, seed: int = 1) -> Scenario:
    return load_scenario(SCENARIO_DIR / f"{name}.yaml").model_copy(update={"seed": seed})


def _run(scenario: Scenario, kind: ControllerKind) -> Tuple[Trace, RunSummary]:
    trace = SimulationService().run(scenario, kind)
    summary = summarize(
        trace,
        scenario.thresholds,
        scenario.ladder.values(),
        scenario.simulation.convergence_hold,
    )
    return trace, summary


def _runs(name: str, kinds: List[ControllerKind], seeds: List[int]) -> Runs:
    return {(kind, seed): _run(_scenario(name, seed), kind) for kind in kinds for seed in seeds}


def _first_at(rates: List[float], value: float) -> int:
    return next(i for i, r in enumerate(rates) if r == value)


@pytest.fixture(scope="module")
def steady_runs() -> Dict[int, Trace]:
    return {seed: _run(_scenario("steady", seed), ControllerKind.MUDRA)[0] for seed in (1, 2, 3)}


@pytest.fixture(scope="module")
def comparison_runs() -> Runs:
    return _runs("comparison", list(ControllerKind), SEEDS)


@pytest.fixture(scope="module")
def onoff_runs() -> Runs:
    return _runs("onoff-interferer", list(ControllerKind), SEEDS)


class TestSteadyConvergence:
    """静态信道：收敛到 36 Mbps 并保持"""

    def test_converges_and_holds(self, steady_runs: Dict[int, Trace]) -> None:
        for trace in steady_runs.values():
            assert set(trace.column("oracle_rate_mbps")) == {36.0}
            rates = trace.column("rate_mbps")
            first = _first_at(rates, 36.0)
            assert first * trace.interval_s <= 60.0
            remaining = rates[first:]
            assert remaining.count(36.0) / len(remaining) >= 0.9

    def test_target_condition_and_sla(self, steady_runs: Dict[int, Trace]) -> None:
        for trace in steady_runs.values():
            first = _first_at(trace.column("rate_mbps"), 36.0)
            steady = trace.frames[first:]
            assert sum(1 for f in steady if f.target_condition) / len(steady) >= 0.8
            assert sum(1 for f in steady if f.a_true <= f.a_max) / len(steady) >= 0.95

    def test_window_rules(self, steady_runs: Dict[int, Trace]) -> None:
        for trace in steady_runs.values():
            assert validate_trace(trace) == []


class TestSpikeImmunity:
    """短于 W_min 的突发干扰不引起改速"""

    @pytest.mark.parametrize("seed", SEEDS)
    def test_no_rate_change_after_convergence(self, seed: int) -> None:
        scenario = _scenario("spikes", seed)
        trace, _ = _run(scenario, ControllerKind.MUDRA)
        flags = trace.column("interference_on")
        first_spike = flags.index(True)
        rates = trace.column("rate_mbps")
        assert _first_at(rates, 36.0) < first_spike
        assert set(rates[first_spike:]) == {36.0}
        assert validate_trace(trace) == []


def _count(predicate: Callable[[int], bool]) -> int:
    return sum(1 for seed in SEEDS if predicate(seed))


def _throughput(runs: Runs, kind: ControllerKind, seed: int) -> float:
    return runs[(kind, seed)][1].mean_throughput_mbps


class TestComparison:
    """无干扰时的方案对比与节点 PDR 分布"""

    def test_mudra_beats_pseudo_multicast(self, comparison_runs: Runs) -> None:
        wins = _count(
            lambda s: _throughput(comparison_runs, ControllerKind.MUDRA, s)
            >= 1.5 * _throughput(comparison_runs, ControllerKind.PSEUDO_MULTICAST, s),
        )
        assert wins >= 8

    @pytest.mark.parametrize("kind", [ControllerKind.FIXED, ControllerKind.SRA])
    def test_close_to_mudra(self, comparison_runs: Runs, kind: ControllerKind) -> None:
        close = _count(
            lambda s: abs(
                _throughput(comparison_runs, kind, s)
                / _throughput(comparison_runs, ControllerKind.MUDRA, s)
                - 1.0
            )
            <= 0.2,
        )
        assert close >= 8

    def test_mudra_pdr_cdf(self, comparison_runs: Runs) -> None:
        good = _count(
            lambda s: comparison_runs[(ControllerKind.MUDRA, s)][1].frac_nodes_below_low <= 0.05,
        )
        assert good >= 8

    def test_pseudo_multicast_pdr_cdf(self, comparison_runs: Runs) -> None:
        good = _count(
            lambda s: comparison_runs[(ControllerKind.PSEUDO_MULTICAST, s)][1].frac_nodes_below_095
            <= 0.05,
        )
        assert good >= 8

    def test_mudra_window_rules(self, comparison_runs: Runs) -> None:
        for seed in SEEDS:
            assert validate_trace(comparison_runs[(ControllerKind.MUDRA, seed)][0]) == []


class TestOnOffInterferer:
    """周期性干扰源下的方案对比"""

    def test_mudra_beats_pseudo_multicast(self, onoff_runs: Runs) -> None:
        wins = _count(
            lambda s: _throughput(onoff_runs, ControllerKind.MUDRA, s)
            >= 1.5 * _throughput(onoff_runs, ControllerKind.PSEUDO_MULTICAST, s),
        )
        assert wins >= 8

    def test_mudra_beats_sra(self, onoff_runs: Runs) -> None:
        wins = _count(
            lambda s: _throughput(onoff_runs, ControllerKind.MUDRA, s)
            >= 2.0 * _throughput(onoff_runs, ControllerKind.SRA, s),
        )
        assert wins >= 8

    def test_sra_violates_sla_more(self, onoff_runs: Runs) -> None:
        def worse(seed: int) -> bool:
            mudra = onoff_runs[(ControllerKind.MUDRA, seed)][1].sla_violation_fraction
            sra = onoff_runs[(ControllerKind.SRA, seed)][1].sla_violation_fraction
            return sra >= 3.0 * mudra and sra > 0

        assert _count(worse) >= 8

    def test_rates_during_interference(self, onoff_runs: Runs) -> None:
        """干扰期间 SRA 退到最低速率，MuDRA 保持 24 Mbps"""
        for seed in SEEDS:
            for kind, rate, share in (
                (ControllerKind.SRA, 6.0, 0.8),
                (ControllerKind.MUDRA, 24.0, 0.9),
            ):
                trace = onoff_runs[(kind, seed)][0]
                during = [f.rate_mbps for f in trace.frames if f.interference_on]
                assert during.count(rate) / len(during) >= share, f"{kind.value} seed={seed}"

    @pytest.mark.parametrize("kind", [ControllerKind.FIXED, ControllerKind.SRA])
    def test_leaves_nodes_behind(self, onoff_runs: Runs, kind: ControllerKind) -> None:
        for seed in SEEDS:
            summary = onoff_runs[(kind, seed)][1]
            assert summary.frac_nodes_below_low >= 0.3

    def test_mudra_window_rules(self, onoff_runs: Runs) -> None:
        for seed in SEEDS:
            assert validate_trace(onoff_runs[(ControllerKind.MUDRA, seed)][0]) == []


class TestMobility:
    """成员变化程度不影响速率分布与控制开销"""

    PROBABILITIES = ("p0", "p0.2", "p0.9")
    MOBILITY_SEEDS = (1, 2, 3, 4, 5)

    @pytest.fixture(scope="class")
    def summaries(self) -> Dict[str, List[RunSummary]]:
        result: Dict[str, List[RunSummary]] = {}
        for label in self.PROBABILITIES:
            result[label] = []
            for seed in self.MOBILITY_SEEDS:
                trace, summary = _run(_scenario(f"mobility-{label}", seed), ControllerKind.MUDRA)
                assert validate_trace(trace) == []
                result[label].append(summary)
        return result

    @staticmethod
    def _airtime(runs: List[RunSummary]) -> Dict[str, float]:
        keys = runs[0].rate_airtime.keys()
        return {k: sum(r.rate_airtime[k] for r in runs) / len(runs) for k in keys}

    def test_rate_distribution_similar(self, summaries: Dict[str, List[RunSummary]]) -> None:
        airtime = {label: self._airtime(runs) for label, runs in summaries.items()}
        labels = list(airtime)
        for i, a in enumerate(labels):
            for b in labels[i + 1 :]:
                tv = 0.5 * sum(abs(airtime[a][k] - airtime[b][k]) for k in airtime[a])
                assert tv <= 0.15, f"{a} vs {b}: total variation {tv:.3f}"

    def test_overhead_stable(self, summaries: Dict[str, List[RunSummary]]) -> None:
        mean = {
            label: sum(r.control_overhead_kbps for r in runs) / len(runs)
            for label, runs in summaries.items()
        }
        for label in ("p0.2", "p0.9"):
            assert abs(mean[label] / mean["p0"] - 1.0) <= 0.25


class TestBlacklist:
    """150 s 时关闭 30 个 FB 节点"""

    def test_target_rate_rises(self) -> None:
        trace, _ = _run(_scenario("blacklist-30"), ControllerKind.MUDRA)
        times = trace.column("time_s")
        oracle = trace.column("oracle_rate_mbps")
        removal = next(i for i, t in enumerate(times) if t >= 150.0)
        assert set(oracle[:removal]) == {36.0}
        assert set(oracle[removal:]) == {54.0}
        assert trace.frames[removal].n_active == 130

        rates = trace.column("rate_mbps")
        assert max(rates[:removal]) <= 48.0
        reached = _first_at(rates[removal:], 54.0)
        assert reached * trace.interval_s <= 60.0
        assert rates[-1] == 54.0
        assert validate_trace(trace) == []


class TestVideo:
    """视频组播画质分级"""

    @pytest.fixture(scope="class")
    def reports(self) -> Dict[ControllerKind, VideoReport]:
        scenario = _scenario("video")
        service = VideoService()
        return {
            kind: service.evaluate(_run(scenario, kind)[0], scenario)
            for kind in (ControllerKind.MUDRA, ControllerKind.FIXED, ControllerKind.SRA)
        }

    def test_mudra_mostly_good(self, reports: Dict[ControllerKind, VideoReport]) -> None:
        report = reports[ControllerKind.MUDRA]
        assert report.fraction(QualityGrade.EXCELLENT, QualityGrade.GOOD) >= 0.85

    @pytest.mark.parametrize("kind", [ControllerKind.FIXED, ControllerKind.SRA])
    def test_degrades(
        self, reports: Dict[ControllerKind, VideoReport], kind: ControllerKind
    ) -> None:
        report = reports[kind]
        assert report.fraction(QualityGrade.POOR, QualityGrade.BAD) >= 0.4

    def test_planned_rate_positive(self, reports: Dict[ControllerKind, VideoReport]) -> None:
        rates = [s["video_rate_mbps"] for s in reports[ControllerKind.MUDRA].segments]
        assert all(r is not None and r > 0 for r in rates)
