from .config import PipelineConfig
from .pipeline import (
    PipelineReport,
    PipelineResult,
    directory_image_loader,
    load_proposal_file,
    run_pipeline,
    synthetic_image_loader,
    write_outputs,
)
from .samples import (
    NEGATIVE_RESPONSE_PREFIX,
    POSITIVE_RESPONSE,
    InstructSample,
    SampleLabel,
    read_samples,
    write_samples,
)
from .stages import (
    Dropped,
    FgBgImages,
    NegativeRecord,
    build_fgbg,
    caption_proposal,
    consistency_filter,
    fgbg_check,
    ingest_proposals,
    inject_hallucination,
    semantic_nms,
)

__all__ = [
    "PipelineConfig",
    "PipelineReport",
    "PipelineResult",
    "directory_image_loader",
    "load_proposal_file",
    "run_pipeline",
    "synthetic_image_loader",
    "write_outputs",
    "NEGATIVE_RESPONSE_PREFIX",
    "POSITIVE_RESPONSE",
    "InstructSample",
    "SampleLabel",
    "read_samples",
    "write_samples",
    "Dropped",
    "FgBgImages",
    "NegativeRecord",
    "build_fgbg",
    "caption_proposal",
    "consistency_filter",
    "fgbg_check",
    "ingest_proposals",
    "inject_hallucination",
    "semantic_nms",
]
