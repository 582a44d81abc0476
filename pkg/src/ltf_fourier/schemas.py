"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, model_validator


class DistributionModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["uniform", "normal", "truncated_normal"]
    param: float | None = None


class LtfModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    weights: list[float]

    @model_validator(mode="after")
    def _lengths_agree(self):
        if self.n != len(self.weights) - 1:
            raise ValueError(f'"n" = {self.n} does not match {len(self.weights)} weights')
        return self


class AnalyzeRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weights: list[float] | None = None
    ltf: LtfModel | None = None
    exact_limit: int = 20
    delta: float = 0.1
    mc_samples: int = 100_000
    seed: int = 0

    @model_validator(mode="after")
    def _exactly_one_form(self):
        if (self.weights is None) == (self.ltf is None):
            raise ValueError('provide exactly one of "weights" or "ltf"')
        return self


class RecordModel(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    trial_id: int
    seed: str
    weights_digest: str
    mode: str
    alpha: float | None
    delta: float | None
    entropy_bits: float | None
    min_entropy_bits: float | None
    influence_exact: float | None
    influence_estimate: float | None
    influence_ci_half_width: float | None
    per_coordinate_influences: list[float] | None
    khintchine_bound: float
    khintchine_bound_clamped: float
    sum_per_coordinate_lb_thm3: float | None
    sum_per_coordinate_lb_homogeneous: float | None
    certificate_bound: float | None
    certificate_success_prob: float | None
    certificate_vacuous: bool | None
    n_alpha: int | None
    large_coord_influence_estimate: float | None
    large_coord_ci_half_width: float | None
    fei_ratio: float | None
    fmei_ratio: float | None
    inf_over_sqrt_n: float
    tau_regular: bool


class AnalyzeResponse(BaseModel):
    record: RecordModel
    warnings: list[str]


class SideConditionModel(BaseModel):
    condition: str
    satisfied: bool


class BoundReportModel(BaseModel):
    name: str
    value: float
    clamped: float
    side_conditions: list[SideConditionModel]
    parameters: dict[str, float]


class BernsteinModel(BaseModel):
    squares_ok: bool
    cubes_ok: bool
    ratio_ok: bool


class BoundsRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    weights: list[float]
    alpha: float | None = None
    delta: float = 0.1
    distribution: DistributionModel | None = None
    entropy_c: float | None = None


class BoundsResponse(BaseModel):
    reports: list[BoundReportModel]
    bernstein: BernsteinModel | None = None


class ExperimentRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    distribution: DistributionModel
    n_values: list[int]
    trials_per_n: int
    master_seed: int
    exact_limit: int = 20
    delta: float = 0.1
    alpha_policy: str = "paper_normal"
    alpha_value: float | None = None
    mc_samples: int = 100_000
    threads: int = 1


class ExperimentResponse(BaseModel):
    records: list[RecordModel]
    summary: dict[str, Any]


class VerifyRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_max_exact: int = 12
    trials: int = 200
    seed: int = 0


class CheckResultModel(BaseModel):
    name: str
    trials: int
    passed: bool
    violation_count: int
    violations: list[dict[str, Any]]


class VerifyResponse(BaseModel):
    passed: bool
    n_max_exact: int
    trials: int
    seed: int
    checks: list[CheckResultModel]


class HealthResponse(BaseModel):
    status: str
    version: str
