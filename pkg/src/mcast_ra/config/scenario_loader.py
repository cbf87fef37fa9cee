"""
场景文件加载

场景文件为 YAML，经 pydantic 严格校验为 Scenario：
- 空文件得到全部默认参数
- 未知字段以点分路径报错
- YAML 语法错误与校验错误都尽量给出行号
"""

from pathlib import Path
from typing import Any, Optional, Sequence, Union

import yaml
from pydantic import ValidationError

from mcast_ra.data_format.scenario import Scenario
from mcast_ra.logging.logger import logger


class ScenarioError(ValueError):
    """场景文件不可用

    Attributes:
        field (Optional[str]): 出错字段的点分路径
        line (Optional[int]): 出错位置的行号（从 1 开始）
    """

    def __init__(
        self,
        message: str,
        path: Optional[Path] = None,
        field: Optional[str] = None,
        line: Optional[int] = None,
        column: Optional[int] = None,
    ):
        location = str(path) if path else "<scenario>"
        if line is not None:
            location += f":{line}"
            if column is not None:
                location += f":{column}"
        super().__init__(f"{location}: {message}")
        self.path = path
        self.field = field
        self.line = line
        self.column = column


def _locate(root: Optional[yaml.Node], keys: Sequence[Union[str, int]]) -> Optional[int]:
    """在 YAML 节点树中找到点分路径对应的行号，找不到时返回最近的上层节点行号"""
    node = root
    line = node.start_mark.line + 1 if node is not None else None
    for key in keys:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(key)), None)
            key_node = next((k for k, _ in node.value if k.value == str(key)), None)
            if match is None or key_node is None:
                return line
            line = key_node.start_mark.line + 1
            node = match
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int):
            if key >= len(node.value):
                return line
            node = node.value[key]
            line = node.start_mark.line + 1
        else:
            return line
    return line


def parse_scenario(text: str, path: Optional[Path] = None) -> Scenario:
    """
    解析 YAML 文本

    Raises:
        ScenarioError: 语法错误、顶层不是映射、字段校验失败
    """
    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text) if text.strip() else None
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        raise ScenarioError(
            f"YAML parse error: {getattr(e, 'problem', None) or e}",
            path=path,
            line=mark.line + 1 if mark else None,
            column=mark.column + 1 if mark else None,
        ) from e

    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ScenarioError("Scenario file must contain a mapping at the top level", path=path, line=1)
    if "name" not in data and path is not None:
        data["name"] = path.stem

    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        error = e.errors()[0]
        loc = [part for part in error["loc"] if isinstance(part, (str, int))]
        dotted = ".".join(str(part) for part in loc) or None
        if error["type"] == "extra_forbidden":
            message = f"Unknown field '{dotted}'"
        elif dotted:
            message = f"Invalid value for '{dotted}': {error['msg']}"
        else:
            message = f"Invalid scenario: {error['msg']}"
        raise ScenarioError(message, path=path, field=dotted, line=_locate(root, loc)) from e


def load_scenario(path: Union[str, Path]) -> Scenario:
    """
    Raises:
        ScenarioError: 文件不存在或内容不合法
    """
    path = Path(path)
    if not path.is_file():
        raise ScenarioError("Scenario file not found", path=path)
    scenario = parse_scenario(path.read_text(encoding="utf-8"), path)
    logger.info(f"Loaded scenario '{scenario.name}' from {path}")
    return scenario
