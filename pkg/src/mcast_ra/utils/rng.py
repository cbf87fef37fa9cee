"""
可复现随机数

基于 numpy SeedSequence 派生命名子流：同一 seed 下各关注点（节点分布、
成员变化、干扰、测量噪声……）各用独立的 Generator，
某一处多抽一个随机数不会改变其他流的序列。
"""

from __future__ import annotations

import zlib
from typing import Dict, Optional

import numpy as np


class SeededRNG:
    """numpy Generator 的确定性包装"""

    def __init__(self, seed: int, _sequence: Optional[np.random.SeedSequence] = None):
        self._seed = seed
        self._sequence = (
            _sequence if _sequence is not None else np.random.SeedSequence(seed)
        )
        self._generator = np.random.Generator(np.random.PCG64(self._sequence))
        self._streams: Dict[str, SeededRNG] = {}

    @property
    def seed(self) -> int:
        return self._seed

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def stream(self, name: str) -> SeededRNG:
        """按名字取子流；名字经 crc32 映射为 spawn key，与调用顺序无关"""
        if name not in self._streams:
            key = zlib.crc32(name.encode("utf-8"))
            child = np.random.SeedSequence(
                entropy=self._sequence.entropy,
                spawn_key=tuple(self._sequence.spawn_key) + (key,),
            )
            self._streams[name] = SeededRNG(self._seed, child)
        return self._streams[name]

    def uniform(self, a: float, b: float) -> float:
        return float(self._generator.uniform(a, b))

    def exponential(self, mean: float) -> float:
        return float(self._generator.exponential(mean))

    def integers(self, low: int, high: int) -> int:
        return int(self._generator.integers(low, high))
