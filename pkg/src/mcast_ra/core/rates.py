"""
组播速率阶梯

802.11a 组播可用速率集合及相邻速率关系（NextLower / NextHigher）。
所有实验默认使用 802.11a 阶梯；其他阶梯可通过传入速率列表构造。
"""

from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

DOT11A_RATES_MBPS: Tuple[float, ...] = (6.0, 9.0, 12.0, 18.0, 24.0, 36.0, 48.0, 54.0)


@dataclass(frozen=True, order=True)
class Rate:
    """阶梯中的一个速率

    Attributes:
        index (int): 在阶梯中的位置，随 value 严格递增
        value (float): 速率，单位 Mbps
    """

    index: int
    value: float

    @property
    def bps(self) -> float:
        return self.value * 1e6

    def __str__(self) -> str:
        return f"{self.value:g}Mbps"


class RateLadder:
    """有序速率阶梯，相邻操作只移动一个位置，两端饱和"""

    def __init__(self, values: Sequence[float] = DOT11A_RATES_MBPS):
        if len(values) == 0:
            raise ValueError("Rate ladder cannot be empty")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise ValueError(f"Rate ladder must be strictly increasing: {list(values)}")
        self._rates: List[Rate] = [Rate(i, float(v)) for i, v in enumerate(values)]

    def __len__(self) -> int:
        return len(self._rates)

    def __iter__(self) -> Iterator[Rate]:
        return iter(self._rates)

    def __getitem__(self, index: int) -> Rate:
        return self._rates[index]

    @property
    def lowest(self) -> Rate:
        return self._rates[0]

    @property
    def highest(self) -> Rate:
        return self._rates[-1]

    def is_lowest(self, rate: Rate) -> bool:
        return rate.index == 0

    def is_highest(self, rate: Rate) -> bool:
        return rate.index == len(self._rates) - 1

    def next_lower(self, rate: Rate) -> Rate:
        return self._rates[max(0, rate.index - 1)]

    def next_higher(self, rate: Rate) -> Rate:
        return self._rates[min(len(self._rates) - 1, rate.index + 1)]

    def from_value(self, value: float) -> Rate:
        for rate in self._rates:
            if abs(rate.value - value) < 1e-9:
                return rate
        raise ValueError(
            f"Rate {value} Mbps is not on the ladder {[r.value for r in self._rates]}"
        )

    def values(self) -> List[float]:
        return [r.value for r in self._rates]


DOT11A = RateLadder(DOT11A_RATES_MBPS)
