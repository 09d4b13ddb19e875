"""Command-line entry points for the augmentation pipeline.

Exit code 0 on success; failures print a machine-readable JSON error to
stderr and exit nonzero. Seed and output directory can also come from
the DEFECTAUG_SEED / DEFECTAUG_OUT environment variables.
"""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from . import pipeline
from .manifest import ManifestError

logging.basicConfig(level=logging.INFO, format="%(levelname)s %(name)s: %(message)s")


def _load_config(path):
    if path is None:
        return {}
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _fail(exc: Exception, code: int = 1):
    sys.stderr.write(json.dumps(
        {"error": type(exc).__name__, "detail": str(exc)}) + "\n")
    sys.exit(code)


def _common(f):
    f = click.option("--config", "config_path", type=click.Path(exists=True),
                     default=None, help="JSON config document for the run.")(f)
    f = click.option("--manifest", "manifest_path", type=click.Path(exists=True),
                     default=None, help="Input dataset manifest.")(f)
    f = click.option("--seed", type=int, default=0, envvar="DEFECTAUG_SEED",
                     show_default=True, help="Run seed (u64).")(f)
    f = click.option("--out", "out_dir", type=click.Path(), required=True,
                     envvar="DEFECTAUG_OUT", help="Run output directory.")(f)
    return f


@click.group()
def main():
    """Human-guided defect image augmentation pipeline."""


def _run(stage, config_path, manifest_path, out_dir, seed):
    try:
        config = _load_config(config_path)
        report = pipeline.run_stage(stage, config,
                                    Path(manifest_path) if manifest_path else None,
                                    Path(out_dir), seed)
        click.echo(json.dumps(report, sort_keys=True))
    except (pipeline.PipelineError, ManifestError, ValueError, OSError) as exc:
        _fail(exc)


@main.command()
@_common
def compose(config_path, manifest_path, seed, out_dir):
    """Generate composites from sketches and backgrounds."""
    _run("compose", config_path, manifest_path, out_dir, seed)


@main.command()
@_common
def embed(config_path, manifest_path, seed, out_dir):
    """Embed real and generated images with exact t-SNE."""
    _run("embed", config_path, manifest_path, out_dir, seed)


@main.command(name="filter")
@_common
def filter_cmd(config_path, manifest_path, seed, out_dir):
    """Partition generated images by nearest-real distance + decisions."""
    _run("filter", config_path, manifest_path, out_dir, seed)


@main.command()
@_common
def metrics(config_path, manifest_path, seed, out_dir):
    """Score a classifier prediction CSV."""
    _run("metrics", config_path, manifest_path, out_dir, seed)


@main.command(name="verify-stage")
@click.option("--input-dir", required=True, type=click.Path(exists=True))
@click.option("--output-dir", required=True, type=click.Path(exists=True))
@click.option("--out", "out_dir", type=click.Path(), default=None,
              envvar="DEFECTAUG_OUT", help="Run directory; if given, the "
              "manifest is updated to point at verified styled outputs.")
def verify_stage(input_dir, output_dir, out_dir):
    """Check an external stage's outputs against the exchange contract."""
    try:
        contract = pipeline.StageContract(input_dir=Path(input_dir),
                                          output_dir=Path(output_dir))
        report = pipeline.verify_external_stage(contract)
        if report.ok and out_dir is not None:
            pipeline.ingest_styled(Path(out_dir), Path(output_dir))
        click.echo(json.dumps(report.to_dict(), sort_keys=True))
        if not report.ok:
            sys.exit(1)
    except (pipeline.PipelineError, ManifestError, OSError) as exc:
        _fail(exc)


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True), default=None)
@click.option("--out", "out_dir", type=click.Path(exists=True), required=True,
              envvar="DEFECTAUG_OUT", help="Run directory with embedding + manifest.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8417, show_default=True, type=int)
def serve(config_path, out_dir, host, port):
    """Serve the review gallery for a finished embed/filter run."""
    try:
        import uvicorn

        from .gallery import SessionState, create_app

        config = _load_config(config_path)
        session = SessionState.from_run_dir(Path(out_dir), config)
        uvicorn.run(create_app(session), host=host, port=port, log_level="info")
    except (pipeline.PipelineError, ManifestError, OSError) as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
