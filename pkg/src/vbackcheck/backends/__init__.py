from .base import (
    GenerationBackend,
    GenerationRequest,
    GroundingBackend,
    GroundingRequest,
    GroundingResponse,
    ScorerBackend,
    ScorerRequest,
    SimilarityBackend,
    SimilarityRequest,
    clamp_score,
)
from .http import RemoteGenerator, RemoteGrounder, RemoteScorer, RemoteSimilarity
from .stub import StubGenerator, StubGrounder, StubScorer, StubSimilarity

__all__ = [
    "GenerationBackend",
    "GenerationRequest",
    "GroundingBackend",
    "GroundingRequest",
    "GroundingResponse",
    "ScorerBackend",
    "ScorerRequest",
    "SimilarityBackend",
    "SimilarityRequest",
    "clamp_score",
    "RemoteGenerator",
    "RemoteGrounder",
    "RemoteScorer",
    "RemoteSimilarity",
    "StubGenerator",
    "StubGrounder",
    "StubScorer",
    "StubSimilarity",
]
