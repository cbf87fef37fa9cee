"""
loguru 日志初始化

sink 布局：
    控制台 (stderr)         每行带运行标签，stdout 留给结果输出
    logs/all.log            全部日志
    logs/<子包>.log          按 mcast_ra 子包拆分，如 logs/services.log、logs/channel.log
    <run_dir>/run.log       单次运行期间的日志，见 Logger.run_log()

其它模块统一通过 `from mcast_ra.logging.logger import logger` 使用。
"""

import sys
from contextlib import contextmanager
from pathlib import Path
from threading import Lock
from typing import Any, Dict, Iterator, List

from loguru import logger as _logger

from mcast_ra.config.loader import LogSetting, SettingLoader

PACKAGE = "mcast_ra"
NO_RUN = "-"

_FMT_CONSOLE = (
    "<green>{time:HH:mm:ss}</green> | "
    "<level>{level: <8}</level> | "
    "<magenta>{extra[run]}</magenta> | "
    "<cyan>{name}</cyan>:<cyan>{line}</cyan> - "
    "<level>{message}</level>"
)
_FMT_FILE = (
    "{time:YYYY-MM-DD HH:mm:ss.SSS} | {level: <8} | {extra[run]} | "
    "{name}:{function}:{line} - {message}"
)


class SingletonMeta(type):
    _instances: Dict[type, Any] = {}
    _lock: Lock = Lock()

    def __call__(cls, *args: Any, **kwargs: Any) -> Any:
        with cls._lock:
            if cls not in cls._instances:
                cls._instances[cls] = super().__call__(*args, **kwargs)
        return cls._instances[cls]


def subpackage_of(module_name: str) -> str:
    """mcast_ra.services.simulation_service -> services；包外的模块归入 other"""
    parts = module_name.split(".")
    if len(parts) >= 2 and parts[0] == PACKAGE:
        return parts[1]
    return "other"


def _subpackages() -> List[str]:
    root = Path(__file__).resolve().parent.parent
    names = [p.name for p in root.iterdir() if p.is_dir() and (p / "__init__.py").exists()]
    return sorted(names) + ["other"]


class Logger(metaclass=SingletonMeta):
    """进程内唯一的日志配置"""

    def __init__(self, setting: LogSetting, rotation: str = "10 MB", retention: str = "7 days"):
        self.setting = setting
        self.root_dir = Path(setting.root_dir).resolve()
        self.root_dir.mkdir(parents=True, exist_ok=True)
        self.rotation = rotation
        self.retention = retention
        self._subpackage_sinks: Dict[str, int] = {}

        _logger.remove()
        _logger.configure(extra={"run": NO_RUN})

        if setting.enable_console:
            _logger.add(sys.stderr, level=setting.level, format=_FMT_CONSOLE)

        _logger.add(
            self.root_dir / "all.log",
            level=setting.level,
            rotation=rotation,
            retention=retention,
            enqueue=True,
            encoding="utf-8",
            format=_FMT_FILE,
        )

        if setting.enable_per_module:
            for name in _subpackages():
                self._subpackage_sinks[name] = _logger.add(
                    self.root_dir / f"{name}.log",
                    level=setting.level,
                    rotation=rotation,
                    retention=retention,
                    enqueue=True,
                    encoding="utf-8",
                    format=_FMT_FILE,
                    filter=lambda r, n=name: subpackage_of(r["name"] or "") == n,
                )

        self._logger = _logger

    @property
    def instance(self) -> Any:
        return self._logger

    @contextmanager
    def run_log(self, label: str, path: Path) -> Iterator[None]:
        """
        在 with 块内给日志打上运行标签 label，并把带该标签的日志另写一份到 path

        标签通过 contextvars 传递，线程池中并行的运行互不串写。
        """
        path.parent.mkdir(parents=True, exist_ok=True)
        sink_id = _logger.add(
            path,
            level=self.setting.level,
            encoding="utf-8",
            format=_FMT_FILE,
            filter=lambda r, lb=label: r["extra"].get("run") == lb,
        )
        try:
            with _logger.contextualize(run=label):
                yield
        finally:
            _logger.remove(sink_id)


_instance = Logger(SettingLoader.get_log_setting())

logger = _instance.instance
run_log = _instance.run_log
