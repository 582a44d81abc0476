"""HTTP service exposing analysis, bounds, experiments and verification.

The CLI talks to this app in-process by default; computation lives in the
core modules and every endpoint is a thin adapter.  Validation failures
surface as 400 responses, soundness violations as 500 with a dedicated
kind so clients can distinguish them.
"""

from __future__ import annotations

from importlib import metadata

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import bounds as bnd
from .distributions import parse_distribution
from .harness import ExperimentConfig, SoundnessError, analyze_weights, run_experiment
from .schemas import (
    AnalyzeRequest,
    AnalyzeResponse,
    BernsteinModel,
    BoundReportModel,
    BoundsRequest,
    BoundsResponse,
    CheckResultModel,
    ExperimentRequest,
    ExperimentResponse,
    HealthResponse,
    RecordModel,
    VerifyRequest,
    VerifyResponse,
)
from .verification import verify_bounds

try:
    VERSION = metadata.version("ltf-fourier")
except metadata.PackageNotFoundError:  # running from a source tree
    VERSION = "0.0.0"

app = FastAPI(title="ltf-fourier", version=VERSION)


@app.exception_handler(ValueError)
async def _value_error(request: Request, exc: ValueError) -> JSONResponse:
    return JSONResponse(status_code=400, content={"detail": str(exc), "kind": "validation"})


@app.exception_handler(SoundnessError)
async def _soundness_error(request: Request, exc: SoundnessError) -> JSONResponse:
    return JSONResponse(
        status_code=500, content={"detail": str(exc), "kind": "soundness_violation"}
    )


@app.get("/health", response_model=HealthResponse)
def health() -> HealthResponse:
    return HealthResponse(status="ok", version=VERSION)


@app.post("/analyze", response_model=AnalyzeResponse)
def analyze(req: AnalyzeRequest) -> AnalyzeResponse:
    weights = req.weights if req.weights is not None else req.ltf.model_dump()
    record, warnings = analyze_weights(
        weights,
        exact_limit=req.exact_limit,
        delta=req.delta,
        mc_samples=req.mc_samples,
        seed=req.seed,
    )
    return AnalyzeResponse(record=RecordModel(**record.to_dict()), warnings=warnings)


def _report_model(report: bnd.BoundReport) -> BoundReportModel:
    return BoundReportModel(**report.to_dict())


@app.post("/bounds", response_model=BoundsResponse)
def bounds(req: BoundsRequest) -> BoundsResponse:
    w = np.asarray(req.weights, dtype=np.float64)
    if w.ndim != 1 or w.size < 2:
        raise ValueError("weights must be a vector (w_0, w_1, ..., w_n) with n >= 1")
    n = w.size - 1
    reports = [_report_model(bnd.khintchine_lower_bound(w))]
    coords = w[1:]
    if np.any(coords != 0.0):
        reports.append(_report_model(bnd.shevtsova_error(coords)))
        if req.alpha is not None:
            reports.append(_report_model(bnd.interval_probability_lb(coords, req.alpha)))
    for i in range(1, n + 1):
        for convention in bnd.PER_COORDINATE_CONVENTIONS:
            try:
                reports.append(_report_model(bnd.per_coordinate_lb(w, i, convention)))
            except ValueError:
                continue  # degenerate moment sums for this coordinate
    if req.entropy_c is not None:
        ceiling = bnd.entropy_upper_bound(n, req.entropy_c)
        reports.append(
            BoundReportModel(
                name="entropy_upper_bound",
                value=ceiling,
                clamped=ceiling,
                side_conditions=[],
                parameters={"constant": req.entropy_c, "n": float(n)},
            )
        )
    bernstein = None
    if req.distribution is not None:
        d = parse_distribution(req.distribution.model_dump())
        mom = d.moments()
        alpha = (
            req.alpha
            if req.alpha is not None
            else mom.mu3 * (2.0 + 2.0 * req.delta / (1.0 - req.delta))
        )
        if n >= 2:
            reports.append(_report_model(bnd.lb_random_certificate(d, n, alpha, req.delta)))
        if np.any(coords != 0.0):
            events = bnd.bernstein_event_check(coords, req.delta, mom.mu3)
            bernstein = BernsteinModel(
                squares_ok=events.squares_ok,
                cubes_ok=events.cubes_ok,
                ratio_ok=events.ratio_ok,
            )
    return BoundsResponse(reports=reports, bernstein=bernstein)


@app.post("/experiment", response_model=ExperimentResponse)
def experiment(req: ExperimentRequest) -> ExperimentResponse:
    config = ExperimentConfig(
        distribution=parse_distribution(req.distribution.model_dump()),
        n_values=tuple(req.n_values),
        trials_per_n=req.trials_per_n,
        master_seed=req.master_seed,
        exact_limit=req.exact_limit,
        delta=req.delta,
        alpha_policy=req.alpha_policy,
        alpha_value=req.alpha_value,
        mc_samples=req.mc_samples,
    )
    records, summary = run_experiment(config, threads=req.threads)
    return ExperimentResponse(
        records=[RecordModel(**r.to_dict()) for r in records], summary=summary
    )


@app.post("/verify", response_model=VerifyResponse)
def verify(req: VerifyRequest) -> VerifyResponse:
    report = verify_bounds(n_max_exact=req.n_max_exact, trials=req.trials, seed=req.seed)
    data = report.to_dict()
    return VerifyResponse(
        passed=data["passed"],
        n_max_exact=data["n_max_exact"],
        trials=data["trials"],
        seed=data["seed"],
        checks=[CheckResultModel(**c) for c in data["checks"]],
    )
