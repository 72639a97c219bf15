from .app import create_app
from .journal import Journal, atomic_write_json
from .store import (
    QUORUM,
    AnnotationStore,
    DuplicateSubmission,
    Progress,
    UnknownSample,
)

__all__ = [
    "create_app",
    "Journal",
    "atomic_write_json",
    "QUORUM",
    "AnnotationStore",
    "DuplicateSubmission",
    "Progress",
    "UnknownSample",
]
