"""
core 模块测试：速率阶梯、PDR 分类与 A_max
"""

import os
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

sys.path.append(os.path.join(os.path.dirname(__file__), "..", "src"))

from mcast_ra.core import (  # noqa: E402
    DOT11A,
    NodeClass,
    PdrDomainError,
    RateLadder,
    Thresholds,
    a_max,
    classify,
    classify_many,
)


class TestRateLadder:
    """802.11a 速率阶梯"""

    def test_dot11a_values(self) -> None:
        """默认阶梯为 802.11a 的 8 个速率"""
        assert DOT11A.values() == [6.0, 9.0, 12.0, 18.0, 24.0, 36.0, 48.0, 54.0]
        assert [r.index for r in DOT11A] == list(range(8))

    def test_neighbours_saturate(self) -> None:
        """两端饱和"""
        assert DOT11A.next_lower(DOT11A.lowest) == DOT11A.lowest
        assert DOT11A.next_higher(DOT11A.highest) == DOT11A.highest
        assert DOT11A.next_higher(DOT11A.from_value(24)).value == 36.0
        assert DOT11A.next_lower(DOT11A.from_value(24)).value == 18.0

    def test_round_trip_for_inner_rates(self) -> None:
        """非端点速率 NextHigher(NextLower(r)) = r"""
        for rate in list(DOT11A)[1:-1]:
            assert DOT11A.next_higher(DOT11A.next_lower(rate)) == rate
            assert DOT11A.next_lower(DOT11A.next_higher(rate)) == rate

    def test_unknown_value_rejected(self) -> None:
        with pytest.raises(ValueError):
            DOT11A.from_value(11.0)

    def test_custom_ladder_must_increase(self) -> None:
        """自定义阶梯必须严格递增"""
        assert RateLadder([1.0, 2.0, 5.5, 11.0]).highest.value == 11.0
        with pytest.raises(ValueError):
            RateLadder([6.0, 6.0, 9.0])
        with pytest.raises(ValueError):
            RateLadder([])


class TestThresholds:
    """分类阈值与边界语义"""

    def setup_method(self) -> None:
        self.th = Thresholds()

    def test_defaults(self) -> None:
        assert (self.th.low, self.th.high, self.th.population, self.th.epsilon) == (
            0.85,
            0.97,
            0.95,
            2,
        )

    @pytest.mark.parametrize(
        "pdr, expected",
        [
            (1.00, NodeClass.NORMAL),
            (0.50, NodeClass.ABNORMAL),
            (0.90, NodeClass.MID_PDR),
            (0.85, NodeClass.MID_PDR),
            (0.97, NodeClass.NORMAL),
            (0.0, NodeClass.ABNORMAL),
        ],
    )
    def test_classify(self, pdr: float, expected: NodeClass) -> None:
        """L 归为 MidPDR，H 归为 Normal"""
        assert classify(pdr, self.th) is expected

    @pytest.mark.parametrize("pdr", [-0.01, 1.01, float("nan")])
    def test_classify_rejects_out_of_range(self, pdr: float) -> None:
        with pytest.raises(PdrDomainError):
            classify(pdr, self.th)

    def test_invalid_thresholds(self) -> None:
        """L < H，X ∈ (0, 1]，ε ≥ 0，未知字段拒绝"""
        with pytest.raises(ValidationError):
            Thresholds(low=0.97, high=0.85)
        with pytest.raises(ValidationError):
            Thresholds(population=0.0)
        with pytest.raises(ValidationError):
            Thresholds(epsilon=-1)
        with pytest.raises(ValidationError):
            Thresholds(delta=1)  # type: ignore[call-arg]

    def test_classify_many_matches_scalar(self) -> None:
        """向量化统计与逐个分类一致，NaN 被忽略"""
        rng = np.random.default_rng(7)
        pdrs = rng.random(500)
        pdrs[::17] = np.nan
        abnormal, mid = classify_many(pdrs, self.th)
        classes = [classify(p, self.th) for p in pdrs if not np.isnan(p)]
        assert abnormal == classes.count(NodeClass.ABNORMAL)
        assert mid == classes.count(NodeClass.MID_PDR)

    @given(
        st.floats(min_value=0.0, max_value=1.0),
        st.floats(min_value=0.0, max_value=1.0),
    )
    def test_classify_monotone(self, p1: float, p2: float) -> None:
        lo, hi = sorted((p1, p2))
        assert classify(lo, self.th) <= classify(hi, self.th)


class TestAMax:
    """A_max = ⌈n·(1−X)⌉"""

    @pytest.mark.parametrize(
        "n, x, expected",
        [(160, 0.95, 8), (100, 1.0, 0), (162, 0.95, 9), (155, 0.95, 8), (130, 0.95, 7)],
    )
    def test_examples(self, n: int, x: float, expected: int) -> None:
        assert a_max(n, x) == expected

    def test_invalid_arguments(self) -> None:
        with pytest.raises(ValueError):
            a_max(-1, 0.95)
        with pytest.raises(ValueError):
            a_max(10, 0.0)

    @given(
        st.integers(min_value=1, max_value=1000),
        st.floats(min_value=0.01, max_value=1.0),
        st.floats(min_value=0.01, max_value=1.0),
    )
    def test_monotone(self, n: int, x1: float, x2: float) -> None:
        """对 X 非增，对 n 非减"""
        lo, hi = sorted((x1, x2))
        assert a_max(n, hi) <= a_max(n, lo)
        assert a_max(n, lo) <= a_max(n + 1, lo)
