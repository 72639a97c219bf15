"""vbackcheck: reference-free hallucination verification for multimodal LLM outputs."""

__version__ = "0.1.0"
