"""
命令行入口

    mcast-ra scenarios/steady.yaml --seeds 1-10 --out results --plots
    mcast-ra scenarios/comparison.yaml --controller sra --oracle --workers 4

退出码：0 成功，1 有运行失败，2 配置错误。
"""

import argparse
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import ValidationError

from mcast_ra.config.loader import SettingLoader
from mcast_ra.controllers import ControllerKind
from mcast_ra.logging.logger import logger
from mcast_ra.services.experiment_service import EXIT_CONFIG_ERROR, RunConfig, run_experiments


def parse_seeds(text: str) -> List[int]:
    """解析 "1,2,5" 或 "1-10" 或两者混合"""
    seeds: List[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            start, end = (int(x) for x in part.split("-", 1))
            if end < start:
                raise argparse.ArgumentTypeError(f"Invalid seed range '{part}'")
            seeds.extend(range(start, end + 1))
        else:
            seeds.append(int(part))
    if not seeds:
        raise argparse.ArgumentTypeError("At least one seed is required")
    return seeds


def _seed_arg(text: str) -> List[int]:
    try:
        return parse_seeds(text)
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def build_parser() -> argparse.ArgumentParser:
    runtime = SettingLoader.get_runtime_setting()
    parser = argparse.ArgumentParser(
        prog="mcast-ra",
        description="WiFi multicast rate adaptation simulator",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("scenarios", nargs="+", type=Path, help="scenario YAML file(s)")
    parser.add_argument("--seeds", type=_seed_arg, default=[1], help="seed list, e.g. 1,2,3 or 1-10")
    parser.add_argument("--out", type=Path, default=Path(runtime.output_dir), help="output directory")
    parser.add_argument(
        "--controller",
        choices=[k.value for k in ControllerKind],
        default=None,
        help="override the scenario's controller selection",
    )
    parser.add_argument("--plots", action="store_true", help="write static PNG plots per run")
    parser.add_argument("--oracle", action="store_true", help="also write the per-rate oracle sweep")
    parser.add_argument("--workers", type=int, default=runtime.workers, help="parallel runs")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        SettingLoader.set_runtime_setting({"output_dir": str(args.out), "workers": args.workers})
        config = RunConfig(
            scenarios=args.scenarios,
            out=args.out,
            seeds=args.seeds,
            controller=ControllerKind(args.controller) if args.controller else None,
            plots=args.plots,
            oracle=args.oracle,
            workers=args.workers,
        )
    except ValidationError as e:
        logger.error(f"Invalid command line: {e.errors()[0]['msg']}")
        return EXIT_CONFIG_ERROR
    return run_experiments(config)
