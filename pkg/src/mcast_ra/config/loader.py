import os
from typing import Any, Dict, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, model_validator

load_dotenv()


def _parse_bool(val: Optional[str], default: bool = True) -> bool:
    if val is None:
        return default
    return val.strip().lower() in {"1", "true", "yes", "on", "y"}


class LogSetting(BaseModel):
    """
    日志配置
    对应 logging/logger.py 中 Logger 构造函数所需参数
    """

    root_dir: str = Field(
        default_factory=lambda: os.getenv("MCAST_LOG_DIR", "logs"),
        description="日志根目录",
    )
    level: str = Field(
        default_factory=lambda: os.getenv("MCAST_LOG_LEVEL", "INFO").upper(),
        description="日志级别",
    )
    enable_console: bool = Field(
        default_factory=lambda: _parse_bool(os.getenv("MCAST_LOG_CONSOLE"), True),
        description="是否输出到控制台",
    )
    enable_per_module: bool = Field(
        default_factory=lambda: _parse_bool(os.getenv("MCAST_LOG_PER_MODULE"), True),
        description="是否按模块拆分日志文件",
    )

    @model_validator(mode="after")
    def _level_checks(self) -> "LogSetting":
        allowed = {"TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR", "CRITICAL"}
        if self.level not in allowed:
            raise ValueError(f"Invalid log level: {self.level}")
        return self


class RuntimeSetting(BaseModel):
    """
    运行期配置：输出目录、并行度、绘图参数
    场景参数不在此处，见 config/scenario_loader.py
    """

    output_dir: str = Field(
        default_factory=lambda: os.getenv("MCAST_OUTPUT_DIR", "results"),
        description="实验结果输出目录",
    )
    workers: int = Field(
        default_factory=lambda: int(os.getenv("MCAST_WORKERS", "1")),
        ge=1,
        description="并行运行的线程数",
    )
    plot_dpi: int = Field(
        default_factory=lambda: int(os.getenv("MCAST_PLOT_DPI", "120")),
        ge=50,
        le=600,
        description="静态图片分辨率",
    )
    csv_float_digits: int = Field(
        default_factory=lambda: int(os.getenv("MCAST_CSV_DIGITS", "6")),
        ge=1,
        le=12,
        description="CSV 浮点数保留位数",
    )


class SettingLoader:
    """统一的配置加载器（简单缓存）"""

    _log_setting: Optional[LogSetting] = None
    _runtime_setting: Optional[RuntimeSetting] = None

    @classmethod
    def get_log_setting(cls) -> LogSetting:
        if cls._log_setting is None:
            cls._log_setting = LogSetting()
        return cls._log_setting

    @classmethod
    def get_runtime_setting(cls) -> RuntimeSetting:
        if cls._runtime_setting is None:
            cls._runtime_setting = RuntimeSetting()
        return cls._runtime_setting

    @classmethod
    def set_runtime_setting(cls, data: Dict[str, Any]) -> RuntimeSetting:
        """更新全局运行期配置（命令行参数覆盖环境变量）"""
        merged = cls.get_runtime_setting().model_dump()
        merged.update({k: v for k, v in data.items() if v is not None})
        cls._runtime_setting = RuntimeSetting(**merged)
        return cls._runtime_setting
