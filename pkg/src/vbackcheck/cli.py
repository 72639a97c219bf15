"""Command-line shell.

Exit codes: 0 success, 2 configuration error, 3 backend unreachable.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .checker.engine import CheckRequest, check
from .config import build_backends, load_config
from .errors import ConfigurationError, FormatError, TransportError, VBackCheckError
from .evalkit.bench import load_bench, slice_report
from .evalkit.metrics import DetectionEvalItem, detection_metrics
from .rinstruct.pipeline import (
    directory_image_loader,
    load_proposal_file,
    run_pipeline,
    write_outputs,
)
from .tuneloss.gradcheck import run_all

EXIT_CONFIG = 2
EXIT_BACKEND = 3


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, ensure_ascii=False, indent=2)
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        click.echo(text)


@click.group()
def main():
    """Hallucination verification toolkit."""


@main.group()
def pipeline():
    """Instruction-data generation."""


@pipeline.command("run")
@click.option("--config", "config_path", required=True, type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path())
def pipeline_run(config_path: str, out_dir: str):
    """Run the generation pipeline and write both datasets plus a report."""
    try:
        cfg = load_config(config_path)
        backends = build_backends(cfg)
        proposals_path = cfg.data.get("proposals")
        if not proposals_path:
            raise ConfigurationError("config data.proposals is required")
        proposals = load_proposal_file(proposals_path)
        image_dir = cfg.data.get("image_dir")
        loader = directory_image_loader(image_dir) if image_dir else None
    except (ConfigurationError, FormatError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        result = run_pipeline(
            proposals, cfg.pipeline,
            scorer=backends.scorer,
            similarity=backends.similarity,
            generator=backends.generator,
            image_loader=loader,
        )
    except TransportError as exc:
        click.echo(f"backend unreachable: {exc}", err=True)
        sys.exit(EXIT_BACKEND)
    except ConfigurationError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    paths = write_outputs(result, out_dir)
    click.echo(f"wrote {paths['rinstruct_a']}, {paths['rinstruct_b']}, {paths['report']}")


@main.command("check")
@click.option("--image", "image_ref", required=True)
@click.option("--response", "response", required=True,
              help="Response text, or @path to read it from a file.")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--template", "template_id", default="default")
@click.option("--out", default=None, type=click.Path())
def check_cmd(image_ref: str, response: str, config_path: str | None,
              template_id: str, out: str | None):
    """Verify a response against an image via the grounding backend."""
    if response.startswith("@"):
        response = Path(response[1:]).read_text(encoding="utf-8")
    try:
        cfg = load_config(config_path)
        backends = build_backends(cfg)
    except ConfigurationError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    try:
        report = check(
            CheckRequest(image_ref=image_ref, response_text=response,
                         template_id=template_id),
            backends.grounder,
        )
    except TransportError as exc:
        click.echo(f"backend unreachable: {exc}", err=True)
        sys.exit(EXIT_BACKEND)
    _emit(report.to_json(), out)


@main.command("eval")
@click.option("--bench", "bench_path", required=True, type=click.Path())
@click.option("--pred", "pred_path", required=True, type=click.Path())
@click.option("--out", default=None, type=click.Path())
def eval_cmd(bench_path: str, pred_path: str, out: str | None):
    """Detection metrics plus per-model and per-length slices."""
    try:
        samples = load_bench(bench_path)
        predictions = {}
        with open(pred_path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    predictions[rec["id"]] = bool(rec["hallucinated"])
                except (json.JSONDecodeError, KeyError) as exc:
                    raise FormatError(f"{pred_path}:{lineno}: {exc}") from exc
    except (FormatError, OSError) as exc:
        click.echo(f"schema error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    items = [
        DetectionEvalItem(
            gt_hallucinated=s.final.hallucinated,
            pred_hallucinated=predictions[s.id],
            gt_category=s.final.category,
        )
        for s in samples
        if s.final is not None and s.id in predictions
    ]
    _emit(
        {
            "overall": detection_metrics(items).to_json(),
            "by_source_model": {
                k: v.to_json()
                for k, v in slice_report(samples, predictions, "source_model").items()
            },
            "by_length_bucket": {
                k: v.to_json()
                for k, v in slice_report(samples, predictions, "length_bucket").items()
            },
        },
        out,
    )


@main.command("loss-check")
@click.option("--instances", default=100, show_default=True)
@click.option("--seed", default=0, show_default=True)
def loss_check(instances: int, seed: int):
    """Verify analytic loss gradients against finite differences."""
    results = run_all(instances=instances, seed=seed)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "pass" if r.passed else "FAIL"
        click.echo(
            f"{r.name:<{width}}  instances={r.instances}  "
            f"max_rel_err={r.max_rel_error:.3e}  tol={r.tolerance:.0e}  {status}"
        )
    if not all(r.passed for r in results):
        sys.exit(1)


@main.command("serve")
@click.option("--config", "config_path", default=None, type=click.Path())
@click.option("--host", default=None)
@click.option("--port", default=None, type=int)
def serve(config_path: str | None, host: str | None, port: int | None):
    """Run the annotation / check HTTP service."""
    import uvicorn

    from .service.app import create_app
    from .service.store import AnnotationStore

    try:
        cfg = load_config(config_path)
        backends = build_backends(cfg)
        bench_path = cfg.data.get("bench")
        journal_path = cfg.data.get("journal")
        if not bench_path or not journal_path:
            raise ConfigurationError("config data.bench and data.journal are required")
        samples = load_bench(bench_path)
    except (ConfigurationError, FormatError) as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    store = AnnotationStore(
        samples, journal_path, finals_path=cfg.data.get("finals")
    )
    app = create_app(
        store,
        grounder=backends.grounder,
        static_dir=cfg.service.get("static_dir"),
    )
    uvicorn.run(
        app,
        host=host or cfg.service.get("host", "127.0.0.1"),
        port=port or cfg.service.get("port", 8000),
    )


if __name__ == "__main__":
    try:
        main()
    except VBackCheckError as exc:
        click.echo(str(exc), err=True)
        sys.exit(EXIT_CONFIG)
