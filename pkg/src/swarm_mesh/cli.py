"""Command line entry point.

The CLI is a thin client over the HTTP service: by default it mounts the
app in-process, and with ``--server`` it talks to a remote instance over
HTTP, so both paths exercise the same endpoints.

Exit codes: 0 success, 2 invalid input (validation errors), 3 I/O or
transport failure.
"""

from __future__ import annotations

import json
import os
import sys

import click

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3

SEED_ENV_VAR = "SWARM_MESH_SEED"


class _Client:
    """Uniform POST/GET facade over in-process or remote service."""

    def __init__(self, server: str | None):
        if server is None:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")  # starlette httpx deprecation
                from starlette.testclient import TestClient

            from .service.app import create_app

            self._client = TestClient(create_app(), raise_server_exceptions=False)
            self._base = ""
        else:
            import httpx

            self._client = httpx.Client(timeout=None)
            self._base = server.rstrip("/")

    def request(self, method: str, path: str, payload=None) -> dict:
        try:
            resp = self._client.request(method, self._base + path, json=payload)
        except Exception as exc:  # connection refused, DNS, ...
            click.echo(f"error: cannot reach server: {exc}", err=True)
            sys.exit(EXIT_IO)
        if resp.status_code >= 400:
            try:
                detail = resp.json().get("detail", resp.text)
            except ValueError:
                detail = resp.text
            click.echo(f"error: {detail}", err=True)
            sys.exit(EXIT_INVALID if resp.status_code in (400, 422) else EXIT_IO)
        return resp.json()


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as exc:
        click.echo(f"error: cannot read config: {exc}", err=True)
        sys.exit(EXIT_IO)
    except json.JSONDecodeError as exc:
        click.echo(f"error: bad config file: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    if not isinstance(cfg, dict):
        click.echo("error: config file must hold a JSON object", err=True)
        sys.exit(EXIT_INVALID)
    return cfg


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return None
    try:
        return int(raw)
    except ValueError:
        click.echo(f"error: {SEED_ENV_VAR} must be an integer, got {raw!r}", err=True)
        sys.exit(EXIT_INVALID)


@click.group()
@click.option("--server", default=None, metavar="URL",
              help="Talk to a running service instead of running in-process.")
@click.option("--config", "config_path", default=None, type=click.Path(),
              help="JSON file with default option values.")
@click.pass_context
def main(ctx, server, config_path):
    """Swarm policy execution over emulated and real datagram networks."""
    ctx.ensure_object(dict)
    ctx.obj["config"] = _load_config(config_path)
    ctx.obj["server"] = server or ctx.obj["config"].get("server")


def _client(ctx) -> _Client:
    return _Client(ctx.obj["server"])


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


@main.command()
@click.argument("plan_path", type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for trace files.")
@click.option("--seed", type=int, default=None,
              help=f"Override the plan seed (also settable via {SEED_ENV_VAR}).")
@click.pass_context
def run(ctx, plan_path, out_dir, seed):
    """Execute an experiment plan and write episode traces."""
    if seed is None:
        seed = _env_seed()
    if seed is None:
        seed = ctx.obj["config"].get("seed")
    # Inline the plan so the same command works against a remote server.
    try:
        with open(plan_path) as fh:
            plan = json.load(fh)
    except OSError as exc:
        click.echo(f"error: cannot read plan: {exc}", err=True)
        sys.exit(EXIT_IO)
    except json.JSONDecodeError as exc:
        click.echo(f"error: bad plan file: {exc}", err=True)
        sys.exit(EXIT_INVALID)
    result = _client(ctx).request("POST", "/run", {
        "plan": plan,
        "out_dir": out_dir,
        "seed_override": seed,
    })
    summary = result["summary"]
    click.echo(f"episodes: {result['episodes']}")
    click.echo(f"success_rate: {summary['success_rate']}")
    span = summary["median_makespan"]
    click.echo(f"median_makespan: {'n/a' if span is None else span}")
    click.echo(f"traces: {result['out_dir']}")


@main.command()
@click.option("--nodes", default=5, show_default=True)
@click.option("--rate", "rates", multiple=True, type=float,
              help="Aggregate publish rate in msg/s (repeatable).")
@click.option("--preset", "presets", multiple=True,
              help="Network preset name (repeatable).")
@click.option("--backend", default="emu", show_default=True,
              type=click.Choice(["emu", "real"]))
@click.option("--duration", default=10.0, show_default=True,
              help="Benchmark duration in seconds per cell.")
@click.option("--seed", type=int, default=None)
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for CDF csv files.")
@click.pass_context
def netbench(ctx, nodes, rates, presets, backend, duration, seed, out_dir):
    """Benchmark one-way delivery delay over a preset or the real backend."""
    cfg = ctx.obj["config"]
    if seed is None:
        seed = _env_seed()
    if seed is None:
        seed = cfg.get("seed", 0)
    result = _client(ctx).request("POST", "/netbench", {
        "nodes": nodes,
        "rates": list(rates) or cfg.get("rates", [60.0]),
        "presets": list(presets) or cfg.get("presets", ["adhoc-multicast-r1"]),
        "backend": backend,
        "duration": duration,
        "seed": seed,
        "out_dir": out_dir,
    })
    for ds in result["datasets"]:
        note = " (saturated)" if ds["saturated"] else ""
        click.echo(
            f"{ds['preset']} @ {ds['rate']:g} msg/s: "
            f"delivered {ds['delivered_fraction']:.3f} "
            f"of {ds['total_records']}{note} -> {ds['file']}"
        )


@main.command()
@click.argument("traces_dir", type=click.Path())
@click.option("--out", "out_dir", required=True, type=click.Path(),
              help="Directory for summary.json and csv files.")
@click.option("--compare", "compare_dir", default=None, type=click.Path(),
              help="Second trace directory to report as baseline.")
@click.option("--label", default=None, help="Label for the primary dataset.")
@click.pass_context
def report(ctx, traces_dir, out_dir, compare_dir, label):
    """Summarize trace files into summary.json and plot-ready csv files."""
    result = _client(ctx).request("POST", "/report", {
        "traces_dir": traces_dir,
        "out_dir": out_dir,
        "compare_dir": compare_dir,
        "label": label,
    })
    click.echo(json.dumps(result["summary"], indent=2, sort_keys=True))


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--latent-dim", type=int, default=16, show_default=True)
@click.option("--out", "path", required=True, type=click.Path(),
              help="Weight file to write.")
@click.pass_context
def weights(ctx, seed, latent_dim, path):
    """Generate a random weight file."""
    result = _client(ctx).request("POST", "/weights/random", {
        "seed": seed,
        "latent_dim": latent_dim,
        "path": path,
    })
    click.echo(f"wrote latent_dim={result['latent_dim']} weights to {path}")


if __name__ == "__main__":
    main()
