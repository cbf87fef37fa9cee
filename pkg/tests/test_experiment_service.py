"""
实验编排与命令行测试
"""

import argparse
import json
import os
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from mcast_ra.data_format import SCHEMA_VERSION, TRACE_COLUMNS  # noqa: E402
from mcast_ra.data_format.metrics import read_csv  # noqa: E402
from mcast_ra.interface.cli import main, parse_seeds  # noqa: E402
from mcast_ra.services import RunConfig, run_experiments  # noqa: E402
from mcast_ra.services.experiment_service import (  # noqa: E402
    EXIT_CONFIG_ERROR,
    EXIT_OK,
    EXIT_RUN_FAILURE,
    ExperimentService,
)

SMALL = "name: tiny\nnodes: 30\nduration_s: 10\n"


def _write(tmp_path: Path, text: str, name: str = "tiny.yaml") -> Path:
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestExperimentService:
    """批量运行与输出目录"""

    def test_three_seeds(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL)
        out = tmp_path / "out"
        code = run_experiments(RunConfig(scenarios=[scenario], out=out, seeds=[1, 2, 3]))
        assert code == EXIT_OK
        for seed in (1, 2, 3):
            run_dir = out / "tiny" / "mudra" / f"seed_{seed}"
            assert (run_dir / "trace.csv").is_file()
            assert (run_dir / "node_pdr.csv").is_file()
            summary = json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))
            assert summary["seed"] == seed
            assert summary["intervals"] == 20
            assert not list(run_dir.glob("*.png"))
            assert not (run_dir / "oracle.csv").exists()
            run_log = (run_dir / "run.log").read_text(encoding="utf-8")
            assert f"tiny/mudra/seed_{seed}" in run_log
            assert f"seed={seed}" in run_log
        rows = read_csv(out / "comparison.csv")
        assert len(rows) == 1
        assert rows[0]["controller"] == "mudra"
        assert rows[0]["seeds"] == "3"

    def test_trace_csv_layout(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL)
        out = tmp_path / "out"
        run_experiments(RunConfig(scenarios=[scenario], out=out))
        path = out / "tiny" / "mudra" / "seed_1" / "trace.csv"
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[0] == f"# schema_version={SCHEMA_VERSION}"
        assert lines[1].split(",") == TRACE_COLUMNS
        assert len(read_csv(path)) == 20

    def test_plots_and_oracle(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL)
        out = tmp_path / "out"
        code = run_experiments(
            RunConfig(scenarios=[scenario], out=out, plots=True, oracle=True, controller="fixed")
        )
        assert code == EXIT_OK
        run_dir = out / "tiny" / "fixed" / "seed_1"
        assert {p.name for p in run_dir.glob("*.png")} == {
            "rate_throughput.png",
            "abnormal_mid.png",
            "pdr_cdf.png",
        }
        assert len(read_csv(run_dir / "oracle.csv")) == 20 * 8

    def test_compare_runs_every_controller(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "compare:\n  controllers: [mudra, sra]\n")
        out = tmp_path / "out"
        assert run_experiments(RunConfig(scenarios=[scenario], out=out)) == EXIT_OK
        controllers = {row["controller"] for row in read_csv(out / "comparison.csv")}
        assert controllers == {"mudra", "sra"}

    def test_sweep(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "sweep:\n  parameter: feedback.k\n  values: [10, 20]\n")
        out = tmp_path / "out"
        assert run_experiments(RunConfig(scenarios=[scenario], out=out)) == EXIT_OK
        assert (out / "tiny" / "feedback.k=10" / "mudra" / "seed_1" / "trace.csv").is_file()
        rows = read_csv(out / "sweep.csv")
        assert [row["value"] for row in rows] == ["10", "20"]
        assert all(row["parameter"] == "feedback.k" for row in rows)

    def test_video_outputs(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "video:\n  key_fraction: 0.2\n")
        out = tmp_path / "out"
        assert run_experiments(RunConfig(scenarios=[scenario], out=out)) == EXIT_OK
        run_dir = out / "tiny" / "mudra" / "seed_1"
        grades = read_csv(run_dir / "video_grades.csv")
        assert len(grades) == 30
        assert len(read_csv(run_dir / "video_segments.csv")) == 10
        summary = json.loads((run_dir / "summary.json").read_text(encoding="utf-8"))
        assert sum(summary["video_distribution"].values()) == pytest.approx(1.0)

    def test_config_error(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "bogus: 1\n")
        out = tmp_path / "out"
        assert run_experiments(RunConfig(scenarios=[scenario], out=out)) == EXIT_CONFIG_ERROR
        assert not out.exists()

    def test_invalid_sweep_value(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "sweep:\n  parameter: feedback.k\n  values: [0]\n")
        assert run_experiments(RunConfig(scenarios=[scenario], out=tmp_path / "o")) == EXIT_CONFIG_ERROR

    def test_failed_run_leaves_marker(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL)
        out = tmp_path / "out"
        with patch(
            "mcast_ra.services.experiment_service.SimulationService.run",
            side_effect=RuntimeError("boom"),
        ):
            code = run_experiments(RunConfig(scenarios=[scenario], out=out, seeds=[1, 2]))
        assert code == EXIT_RUN_FAILURE
        marker = out / "tiny" / "mudra" / "seed_1" / "FAILED"
        assert "RuntimeError: boom" in marker.read_text(encoding="utf-8")
        assert "Run failed" in (marker.parent / "run.log").read_text(encoding="utf-8")

    def test_zero_duration_run(self, tmp_path: Path) -> None:
        """时长为 0：只写空 trace，不算失败，也不产出汇总和视频结果"""
        scenario = _write(
            tmp_path, "name: tiny\nnodes: 30\nduration_s: 0\nvideo:\n  key_fraction: 0.2\n"
        )
        out = tmp_path / "out"
        code = run_experiments(RunConfig(scenarios=[scenario], out=out, plots=True))
        assert code == EXIT_OK
        run_dir = out / "tiny" / "mudra" / "seed_1"
        assert read_csv(run_dir / "trace.csv") == []
        assert not (run_dir / "FAILED").exists()
        assert not (run_dir / "summary.json").exists()
        assert not (run_dir / "video_grades.csv").exists()
        assert not list(run_dir.glob("*.png"))
        assert (out / "comparison.csv").exists()

    def test_jobs_planned_once(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "compare:\n  controllers: [mudra, sra]\n")
        with patch.object(
            ExperimentService,
            "plan_jobs",
            autospec=True,
            side_effect=ExperimentService.plan_jobs,
        ) as plan:
            code = run_experiments(RunConfig(scenarios=[scenario], out=tmp_path / "out"))
        assert code == EXIT_OK
        assert plan.call_count == 1

    def test_parallel_matches_serial(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL + "compare:\n  controllers: [mudra, pseudo_multicast]\n")
        serial, parallel = tmp_path / "serial", tmp_path / "parallel"
        run_experiments(RunConfig(scenarios=[scenario], out=serial, seeds=[1, 2, 3]))
        run_experiments(RunConfig(scenarios=[scenario], out=parallel, seeds=[1, 2, 3], workers=4))
        traces = sorted(p.relative_to(serial) for p in serial.rglob("trace.csv"))
        assert len(traces) == 6
        for rel in traces:
            assert (serial / rel).read_bytes() == (parallel / rel).read_bytes()


class TestCli:
    """命令行"""

    @pytest.mark.parametrize(
        "text, expected",
        [("1", [1]), ("1,2,5", [1, 2, 5]), ("1-3", [1, 2, 3]), ("1-3,7", [1, 2, 3, 7])],
    )
    def test_parse_seeds(self, text: str, expected: list) -> None:
        assert parse_seeds(text) == expected

    def test_parse_seeds_rejects_reversed_range(self) -> None:
        with pytest.raises(argparse.ArgumentTypeError):
            parse_seeds("5-1")

    def test_main_runs(self, tmp_path: Path) -> None:
        scenario = _write(tmp_path, SMALL)
        out = tmp_path / "cli"
        code = main([str(scenario), "--seeds", "1-2", "--out", str(out), "--controller", "sra"])
        assert code == EXIT_OK
        assert (out / "tiny" / "sra" / "seed_2" / "trace.csv").is_file()

    def test_main_missing_file(self, tmp_path: Path) -> None:
        assert main([str(tmp_path / "missing.yaml"), "--out", str(tmp_path / "x")]) == EXIT_CONFIG_ERROR
