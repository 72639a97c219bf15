from .gradcheck import GradCheckResult, central_difference, run_all
from .losses import (
    LossConfig,
    LossResult,
    SpecialMark,
    TokenSequence,
    TotalLossResult,
    bce_loss,
    dice_loss,
    per_position_ce,
    total_loss,
    weighted_ce,
)

__all__ = [
    "GradCheckResult",
    "central_difference",
    "run_all",
    "LossConfig",
    "LossResult",
    "SpecialMark",
    "TokenSequence",
    "TotalLossResult",
    "bce_loss",
    "dice_loss",
    "per_position_ce",
    "total_loss",
    "weighted_ce",
]
