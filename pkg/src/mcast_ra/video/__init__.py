from mcast_ra.video.planner import (
    InfeasiblePlanError,
    SegmentPlan,
    plan_rate,
    plan_segment,
    time_budget,
)
from mcast_ra.video.quality import (
    GradeThresholds,
    PsnrMap,
    QualityGrade,
    grade,
    grade_distribution,
    psnr_from_loss,
)

__all__ = [
    "GradeThresholds",
    "InfeasiblePlanError",
    "PsnrMap",
    "QualityGrade",
    "SegmentPlan",
    "grade",
    "grade_distribution",
    "plan_rate",
    "plan_segment",
    "psnr_from_loss",
    "time_budget",
]
