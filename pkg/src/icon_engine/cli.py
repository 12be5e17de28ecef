"""Command-line interface: serve, validate, replay, task."""

from __future__ import annotations

import json
import sys

import click

from .errors import IconError
from .metrics import compute_metrics, read_log, replay, write_log
from .notebook import load_notebook
from .tasks import run_task


@click.group()
def main():
    """Immersive-notebook engine utilities."""


@main.command()
@click.option("--port", default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--notebook", "notebook_file", required=True,
              type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["unified", "separated"]),
              default="unified", show_default=True)
def serve(port, host, notebook_file, mode):
    """Host a live session over the websocket message API."""
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(notebook_file, mode), host=host, port=port)


@main.command()
@click.argument("notebook_file", type=click.Path(exists=True))
def validate(notebook_file):
    """Check a notebook file against the schema and report its shape."""
    try:
        nb = load_notebook(notebook_file)
    except IconError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    cells = nb.cells()
    click.echo(f"ok: {len(nb.windows)} windows, {len(cells)} cells")
    for cell in cells:
        click.echo(f"  {cell.id}: {cell.kind.value}")


@main.command("replay")
@click.argument("log_file", type=click.Path(exists=True))
@click.option("--notebook", "notebook_file", required=True,
              type=click.Path(exists=True))
@click.option("--mode", type=click.Choice(["unified", "separated"]),
              default="unified", show_default=True)
@click.option("--metrics", "metrics_out", type=click.Path(), default=None,
              help="Write the metrics report as JSON to this path.")
def replay_cmd(log_file, notebook_file, mode, metrics_out):
    """Replay an event log against a notebook and report the metrics."""
    events = read_log(log_file)
    try:
        replay(events, load_notebook(notebook_file), mode=mode)
        report = compute_metrics(events)
    except IconError as exc:
        click.echo(f"replay failed: {exc}", err=True)
        sys.exit(1)
    click.echo(report.to_table())
    if metrics_out:
        with open(metrics_out, "w", encoding="utf-8") as f:
            json.dump(report.to_dict(), f, indent=2)
            f.write("\n")


@main.group()
def task():
    """Scripted study tasks."""


@task.command("run")
@click.argument("script", type=click.Choice(["instructed", "exploratory"]))
@click.option("--mode", type=click.Choice(["unified", "separated"]),
              default="unified", show_default=True)
@click.option("--out", "log_out", type=click.Path(), default=None,
              help="Write the event log (JSON-lines) to this path.")
def task_run(script, mode, log_out):
    """Run a scripted task headlessly and print its metrics."""
    try:
        run = run_task(script, mode=mode)
    except IconError as exc:
        click.echo(f"task failed: {exc}", err=True)
        sys.exit(1)
    click.echo(run.report.to_table())
    if log_out:
        write_log(run.session.events, log_out)


if __name__ == "__main__":
    main()
