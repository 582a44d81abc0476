"""Command-line client for the analysis service.

By default commands run against an in-process instance of the service, so
no server needs to be running; ``--server URL`` targets a remote one.
File output happens client-side.

Exit codes: 0 success, 1 validation error, 2 soundness violation or
failed verification, 3 I/O or connection error.
"""

from __future__ import annotations

import json
import sys
from dataclasses import replace
from pathlib import Path

import click

from .harness import ExperimentConfig, ExperimentRecord
from .serialize import dumps_json, emit_records

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOUNDNESS = 2
EXIT_IO = 3

# bad flags and arguments are validation errors, not click's default 2
click.UsageError.exit_code = EXIT_VALIDATION


def _fail(message: str, code: int):
    click.echo(f"error: {message}", err=True)
    sys.exit(code)


class ServiceClient:
    """POSTs either to an in-process app or to a remote server."""

    def __init__(self, server: str | None):
        if server:
            import httpx

            self._client = httpx.Client(base_url=server, timeout=None)
            self._wrap = self._post_remote
        else:
            import warnings

            with warnings.catch_warnings():
                # the in-process client import warns about its own httpx
                # backend; that is noise on our stderr, not actionable here
                warnings.filterwarnings(
                    "ignore", message="Using `httpx` with `starlette.testclient`"
                )
                from fastapi.testclient import TestClient

            from .service import app

            self._client = TestClient(app)
            self._wrap = self._post_local

    def _post_remote(self, path: str, payload: dict):
        import httpx

        try:
            return self._client.post(path, json=payload)
        except httpx.HTTPError as exc:
            _fail(f"cannot reach server: {exc}", EXIT_IO)

    def _post_local(self, path: str, payload: dict):
        return self._client.post(path, json=payload)

    def post(self, path: str, payload: dict) -> dict:
        response = self._wrap(path, payload)
        body = response.json()
        if response.status_code == 200:
            return body
        if isinstance(body, dict) and body.get("kind") == "soundness_violation":
            _fail(str(body.get("detail")), EXIT_SOUNDNESS)
        detail = body.get("detail") if isinstance(body, dict) else body
        _fail(json.dumps(detail) if not isinstance(detail, str) else detail, EXIT_VALIDATION)


def _parse_weights_arg(text: str):
    """Accept inline JSON (array or {"n":..,"weights":..}) or a file path."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        path = Path(text)
        try:
            raw = path.read_text()
        except OSError as exc:
            _fail(f"cannot read weights file {text!r}: {exc}", EXIT_IO)
        try:
            data = json.loads(raw)
        except json.JSONDecodeError as exc:
            _fail(f"invalid JSON in weights file {text!r}: {exc}", EXIT_VALIDATION)
    if isinstance(data, list):
        return {"weights": data}
    if isinstance(data, dict):
        return {"ltf": data}
    _fail("weights must be a JSON array or an object with n and weights", EXIT_VALIDATION)


def _emit(records: list[ExperimentRecord], out: str, fmt: str) -> None:
    try:
        emit_records(records, out, fmt)
    except OSError as exc:
        _fail(f"cannot write {out!r}: {exc}", EXIT_IO)
    click.echo(f"wrote {len(records)} record(s) to {out}", err=True)


@click.group()
@click.option("--server", default=None, envvar="LTF_FOURIER_SERVER", metavar="URL",
              help="Remote service URL; default runs the service in-process.")
@click.pass_context
def main(ctx: click.Context, server: str | None) -> None:
    """Fourier analysis of linear threshold functions."""
    ctx.obj = ServiceClient(server)


@main.command()
@click.option("--weights", required=True, metavar="JSON|PATH",
              help='Weight vector [w0, w1, ...] or {"n": ..., "weights": [...]}, inline or a file.')
@click.option("--exact-limit", type=int, default=20, show_default=True,
              help="Largest arity analyzed by exact enumeration.")
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--mc-samples", type=int, default=100_000, show_default=True,
              help="Monte Carlo samples above the exact limit.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default="jsonl",
              show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Write the record to a file instead of stdout.")
@click.pass_obj
def analyze(client: ServiceClient, weights: str, exact_limit: int, delta: float,
            mc_samples: int, seed: int, fmt: str, out: str | None) -> None:
    """Spectrum, influence and bound evaluation for one weight vector."""
    payload = _parse_weights_arg(weights)
    payload.update(exact_limit=exact_limit, delta=delta, mc_samples=mc_samples, seed=seed)
    body = client.post("/analyze", payload)
    for warning in body["warnings"]:
        click.echo(f"warning: {warning}", err=True)
    if out:
        _emit([ExperimentRecord.from_dict(body["record"])], out, fmt)
    else:
        click.echo(dumps_json(body["record"]))


@main.command()
@click.option("--config", "config_path", required=True, metavar="PATH",
              help="Experiment config, TOML or JSON.")
@click.option("--seed", type=int, default=None, help="Override the config master seed.")
@click.option("--threads", type=int, default=1, show_default=True)
@click.option("--format", "fmt", type=click.Choice(["csv", "jsonl"]), default=None,
              help="Override the config output format.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Override the config output path.")
@click.pass_obj
def experiment(client: ServiceClient, config_path: str, seed: int | None, threads: int,
               fmt: str | None, out: str | None) -> None:
    """Run randomized trials from a config; writes records, prints the summary."""
    try:
        config = ExperimentConfig.from_file(config_path)
    except OSError as exc:
        _fail(f"cannot read config {config_path!r}: {exc}", EXIT_IO)
    except ValueError as exc:
        _fail(str(exc), EXIT_VALIDATION)
    if seed is not None:
        if seed < 0:
            _fail(f"seed must be non-negative, got {seed}", EXIT_VALIDATION)
        config = replace(config, master_seed=seed)
    payload = {
        "distribution": config.distribution.to_dict(),
        "n_values": list(config.n_values),
        "trials_per_n": config.trials_per_n,
        "master_seed": config.master_seed,
        "exact_limit": config.exact_limit,
        "delta": config.delta,
        "alpha_policy": config.alpha_policy,
        "alpha_value": config.alpha_value,
        "mc_samples": config.mc_samples,
        "threads": threads,
    }
    body = client.post("/experiment", payload)
    records = [ExperimentRecord.from_dict(r) for r in body["records"]]
    out_path = out or config.output_path
    out_fmt = fmt or config.output_format
    if out_path:
        _emit(records, out_path, out_fmt)
        click.echo(dumps_json(body["summary"]))
    else:
        for record in body["records"]:
            click.echo(dumps_json(record))
        click.echo(dumps_json(body["summary"]), err=True)


@main.command()
@click.option("--weights", required=True, metavar="JSON|PATH")
@click.option("--alpha", type=float, default=None,
              help="Interval half-width for the interval and certificate bounds.")
@click.option("--delta", type=float, default=0.1, show_default=True)
@click.option("--distribution", "dist_kind",
              type=click.Choice(["uniform", "normal", "truncated_normal"]), default=None,
              help="Attach a weight distribution to evaluate certificate bounds.")
@click.option("--param", type=float, default=None,
              help="Distribution parameter (half-width or truncation).")
@click.option("--entropy-c", type=float, default=None,
              help="Also report the entropy ceiling c*sqrt(n).")
@click.pass_obj
def bounds(client: ServiceClient, weights: str, alpha: float | None, delta: float,
           dist_kind: str | None, param: float | None, entropy_c: float | None) -> None:
    """Evaluate the bound suite for one weight vector."""
    parsed = _parse_weights_arg(weights)
    if "ltf" in parsed:
        weight_list = parsed["ltf"].get("weights")
    else:
        weight_list = parsed["weights"]
    payload: dict = {"weights": weight_list, "alpha": alpha, "delta": delta,
                     "entropy_c": entropy_c}
    if dist_kind is not None:
        payload["distribution"] = {"kind": dist_kind, "param": param}
    body = client.post("/bounds", payload)
    click.echo(dumps_json(body))


@main.command()
@click.option("--trials", type=int, default=200, show_default=True,
              help="Randomized instances per check.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--n-max", type=int, default=12, show_default=True,
              help="Largest arity enumerated exactly.")
@click.pass_obj
def verify(client: ServiceClient, trials: int, seed: int, n_max: int) -> None:
    """Run the soundness suite; exits 2 if any check fails."""
    body = client.post("/verify", {"n_max_exact": n_max, "trials": trials, "seed": seed})
    for check in body["checks"]:
        if check["passed"]:
            click.echo(f"{check['name']}: pass")
        else:
            click.echo(f"{check['name']}: FAIL ({check['violation_count']} violation(s))")
            if check["violations"]:
                click.echo(f"  first counterexample: {dumps_json(check['violations'][0])}")
    if body["passed"]:
        click.echo("verification passed")
    else:
        click.echo("verification FAILED", err=True)
        sys.exit(EXIT_SOUNDNESS)


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
def serve(host: str, port: int) -> None:
    """Run the HTTP service."""
    import uvicorn

    uvicorn.run("ltf_fourier.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
