"""Command line interface: ingest logs, generate synthetic data, serve the API."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from .api import DATA_DIR_ENV, create_app
from .datagen import GenConfig, generate, load_config
from .errors import FlowboatError
from .store import RECORD_KINDS, TelemetryStore


@click.group()
def main() -> None:
    """Touchscreen-telemetry flow analytics."""


@main.command()
@click.option("--kind", type=click.Choice(RECORD_KINDS), required=True)
@click.option("--file", "file_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option(
    "--data-dir",
    envvar=DATA_DIR_ENV,
    default="flowboat_data",
    show_default=True,
    help=f"Store directory (falls back to ${DATA_DIR_ENV}).",
)
@click.option("--publish/--no-publish", default=True, show_default=True, help="Publish a snapshot afterwards.")
def ingest(kind: str, file_path: str, data_dir: str, publish: bool) -> None:
    """Ingest one line-delimited log file into the store."""
    try:
        store = TelemetryStore(data_dir)
        report = store.ingest_file(file_path, kind)
    except FlowboatError as exc:
        raise click.ClickException(exc.message) from exc
    click.echo(f"accepted={report.accepted} rejected={report.rejected}")
    for rejection in report.reject_reasons:
        click.echo(f"  line {rejection.line_no}: {rejection.reason} ({rejection.detail})", err=True)
    if publish:
        snapshot_id = store.publish_snapshot()
        click.echo(f"snapshot={snapshot_id}")


@main.command()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def datagen(config_path: str | None, out_dir: str) -> None:
    """Generate a synthetic fleet dataset with a ground-truth manifest."""
    try:
        config = load_config(config_path) if config_path else GenConfig()
        dataset = generate(config, out_dir)
    except (FlowboatError, json.JSONDecodeError) as exc:
        message = exc.message if isinstance(exc, FlowboatError) else str(exc)
        raise click.ClickException(message) from exc
    click.echo(f"planted={len(dataset.manifest.planted)}")
    for path in (
        dataset.interactions_path,
        dataset.glances_path,
        dataset.signals_path,
        dataset.catalog_path,
        dataset.manifest_path,
    ):
        click.echo(str(path))


@main.command()
@click.option("--data-dir", envvar=DATA_DIR_ENV, default="flowboat_data", show_default=True)
@click.option("--catalog", "catalog_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--ui-dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Serve a built web UI from this directory at /.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8600, show_default=True)
def serve(data_dir: str, catalog_path: str | None, ui_dir: str | None, host: str, port: int) -> None:
    """Run the HTTP API server."""
    import uvicorn

    if not Path(data_dir).exists():
        click.echo(f"note: data dir {data_dir} does not exist yet, starting empty", err=True)
    try:
        app = create_app(data_dir, catalog_path, ui_dir)
    except FlowboatError as exc:
        raise click.ClickException(exc.message) from exc
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    sys.exit(main())
