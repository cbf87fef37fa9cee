"""
丢包率 -> PSNR 近似映射与五档画质分级

- 残余丢包 = max(0, loss − fec)，FEC 能恢复的轻度丢包不影响画质
- psnr = max(floor, psnr_max − slope · 残余丢包)
- 分级区间左开右闭：Excellent > 37，Good (31, 37]，Fair (25, 31]，Poor (20, 25]，Bad ≤ 20
"""

from enum import Enum
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class QualityGrade(str, Enum):
    EXCELLENT = "excellent"
    GOOD = "good"
    FAIR = "fair"
    POOR = "poor"
    BAD = "bad"


GRADE_ORDER: Tuple[QualityGrade, ...] = (
    QualityGrade.BAD,
    QualityGrade.POOR,
    QualityGrade.FAIR,
    QualityGrade.GOOD,
    QualityGrade.EXCELLENT,
)


class GradeThresholds(BaseModel):
    """各档下界（不含），单位 dB"""

    model_config = ConfigDict(extra="forbid", frozen=True)

    excellent: float = 37.0
    good: float = 31.0
    fair: float = 25.0
    poor: float = 20.0

    @model_validator(mode="after")
    def _descending(self) -> "GradeThresholds":
        if not self.excellent > self.good > self.fair > self.poor:
            raise ValueError("Grade thresholds must be strictly descending")
        return self


class PsnrMap(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    psnr_max: float = Field(42.0, description="无损时的 PSNR")
    slope: float = Field(80.0, gt=0.0, description="每单位残余丢包的 PSNR 下降")
    floor: float = Field(8.0, description="PSNR 下限")


def grade(psnr: float, thresholds: GradeThresholds = GradeThresholds()) -> QualityGrade:
    if psnr != psnr or psnr in (float("inf"), float("-inf")):
        raise ValueError(f"PSNR must be finite, got {psnr}")
    if psnr > thresholds.excellent:
        return QualityGrade.EXCELLENT
    if psnr > thresholds.good:
        return QualityGrade.GOOD
    if psnr > thresholds.fair:
        return QualityGrade.FAIR
    if psnr > thresholds.poor:
        return QualityGrade.POOR
    return QualityGrade.BAD


def psnr_from_loss(loss: float, fec: float, mapping: PsnrMap = PsnrMap()) -> float:
    if not 0.0 <= loss <= 1.0:
        raise ValueError(f"Loss fraction must be within [0, 1], got {loss}")
    residual = max(0.0, loss - fec)
    return max(mapping.floor, mapping.psnr_max - mapping.slope * residual)


def grade_distribution(grades: List[QualityGrade]) -> dict[QualityGrade, float]:
    """各档占比，按 Excellent -> Bad 排列"""
    total = len(grades)
    return {
        g: (sum(1 for x in grades if x is g) / total if total else 0.0)
        for g in reversed(GRADE_ORDER)
    }
