from .engine import (
    QUERY_TEMPLATES,
    CheckReport,
    CheckRequest,
    CheckSummary,
    check,
    check_batch,
)

__all__ = [
    "QUERY_TEMPLATES",
    "CheckReport",
    "CheckRequest",
    "CheckSummary",
    "check",
    "check_batch",
]
