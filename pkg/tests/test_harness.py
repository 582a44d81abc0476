import dataclasses
import math

import numpy as np
import pytest

import ltf_fourier.bounds as bounds
from ltf_fourier.distributions import standard_normal, uniform_symmetric
from ltf_fourier.harness import (
    ExperimentConfig,
    ExperimentRecord,
    SoundnessError,
    analyze_weights,
    run_experiment,
    summarize,
)
from ltf_fourier.ltf import Ltf
from ltf_fourier.serialize import records_to_csv
from ltf_fourier.verification import verify_bounds


class TestConfig:
    def test_defaults(self):
        cfg = ExperimentConfig(distribution=standard_normal(), n_values=(16,),
                               trials_per_n=10, master_seed=1)
        assert cfg.exact_limit == 20
        assert cfg.delta == 0.1
        assert cfg.alpha_policy == "paper_normal"
        assert cfg.entropy_log_base == 2

    def test_alpha_policies(self):
        base = dict(distribution=standard_normal(), n_values=(8,),
                    trials_per_n=1, master_seed=0)
        cfg = ExperimentConfig(**base)
        mu3 = standard_normal().moments().mu3
        assert abs(cfg.alpha() - mu3 * (2.0 + 0.2 / 0.9)) < 1e-15
        fixed = ExperimentConfig(**base, alpha_policy="fixed", alpha_value=1.25)
        assert fixed.alpha() == 1.25

    def test_validation(self):
        base = dict(distribution=standard_normal(), n_values=(8,),
                    trials_per_n=1, master_seed=0)
        with pytest.raises(ValueError):
            ExperimentConfig(**{**base, "trials_per_n": 0})
        with pytest.raises(ValueError):
            ExperimentConfig(**{**base, "n_values": ()})
        with pytest.raises(ValueError):
            ExperimentConfig(**{**base, "delta": 1.0})
        with pytest.raises(ValueError):
            ExperimentConfig(**base, alpha_policy="fixed")    # missing value
        with pytest.raises(ValueError, match="rescal"):
            ExperimentConfig(**base, entropy_log_base=math.e)

    def test_toml_round_trip(self, tmp_path):
        path = tmp_path / "cfg.toml"
        path.write_text(
            'n_values = [4, 8]\n'
            'trials_per_n = 3\n'
            'master_seed = 77\n'
            'delta = 0.2\n'
            '[distribution]\n'
            'kind = "truncated_normal"\n'
            'param = 2.0\n')
        cfg = ExperimentConfig.from_file(path)
        assert cfg.n_values == (4, 8)
        assert cfg.distribution.kind == "truncated_normal"
        assert cfg.delta == 0.2
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_json_config(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text('{"distribution": {"kind": "normal"}, "n_values": [6],'
                        ' "trials_per_n": 2, "master_seed": 5}')
        cfg = ExperimentConfig.from_file(path)
        assert cfg.distribution == standard_normal()

    def test_unknown_field_rejected(self):
        with pytest.raises(ValueError, match="unknown"):
            ExperimentConfig.from_dict({
                "distribution": {"kind": "normal"}, "n_values": [4],
                "trials_per_n": 1, "master_seed": 0, "typo_field": 1})


class TestAnalyze:
    def test_maj3(self):
        rec, warnings = analyze_weights((0.0, 1.0, 1.0, 1.0))
        assert warnings == []
        assert rec.mode == "exact"
        assert rec.entropy_bits == 2.0
        assert rec.influence_exact == 1.5
        assert rec.fei_ratio == pytest.approx(4.0 / 3.0, abs=1e-15)
        assert rec.per_coordinate_influences == (0.5, 0.5, 0.5)

    def test_single_variable(self):
        rec, _ = analyze_weights((0.0, 1.0))
        assert rec.entropy_bits == 0.0
        assert rec.influence_exact == 1.0
        assert rec.fei_ratio == 0.0

    def test_tau_regularity_flag(self):
        n = 15
        rec, _ = analyze_weights(np.ones(n + 1))
        assert rec.tau_regular          # all weights equal is as regular as it gets
        spiked = np.ones(n + 1)
        spiked[5] = 50.0
        rec2, _ = analyze_weights(spiked)
        assert not rec2.tau_regular

    def test_accepts_ltf_and_dict(self):
        a, _ = analyze_weights(Ltf((0.0, 1.0, 1.0, 1.0)))
        b, _ = analyze_weights({"n": 3, "weights": [0.0, 1.0, 1.0, 1.0]})
        assert a.weights_digest == b.weights_digest

    def test_estimate_mode_warns(self):
        w = np.concatenate([[0.0], np.ones(24)])
        rec, warnings = analyze_weights(w, mc_samples=20_000)
        assert rec.mode == "estimate"
        assert rec.entropy_bits is None and rec.fei_ratio is None
        assert rec.influence_estimate is not None
        assert len(warnings) == 1 and "exact limit" in warnings[0]

    def test_lowered_exact_limit(self):
        rec, warnings = analyze_weights((0.0, 1.0, 1.0, 1.0), exact_limit=2)
        assert rec.mode == "estimate"
        assert warnings


class TestRunExperiment:
    def test_records_sorted_and_complete(self):
        cfg = ExperimentConfig(distribution=uniform_symmetric(1.0),
                               n_values=(6, 4), trials_per_n=3, master_seed=9)
        records, summary = run_experiment(cfg)
        keys = [(r.n, r.trial_id) for r in records]
        assert keys == sorted(keys)
        assert len(records) == 6
        assert summary["records"] == 6
        assert {e["n"] for e in summary["per_n"]} == {4, 6}

    def test_identical_bytes_across_threads(self):
        cfg = ExperimentConfig(distribution=standard_normal(), n_values=(5, 7),
                               trials_per_n=6, master_seed=31)
        solo = records_to_csv(run_experiment(cfg, threads=1)[0])
        multi = records_to_csv(run_experiment(cfg, threads=3)[0])
        assert solo == multi

    def test_seed_changes_output(self):
        base = dict(distribution=standard_normal(), n_values=(5,), trials_per_n=3)
        a, _ = run_experiment(ExperimentConfig(**base, master_seed=1))
        b, _ = run_experiment(ExperimentConfig(**base, master_seed=2))
        assert [r.weights_digest for r in a] != [r.weights_digest for r in b]

    def test_summary_soundness_fractions(self):
        cfg = ExperimentConfig(distribution=standard_normal(), n_values=(8,),
                               trials_per_n=20, master_seed=17)
        _, summary = run_experiment(cfg)
        entry = summary["per_n"][0]
        assert entry["frac_khintchine_sound"] == 1.0
        assert entry["frac_thm3_sound"] == 1.0
        assert entry["max_fei_ratio"] >= entry["mean_fei_ratio"]
        assert summary["overall"]["max_fei_ratio"] == entry["max_fei_ratio"]

    def test_fei_ratio_present_iff_influence_positive(self):
        cfg = ExperimentConfig(distribution=uniform_symmetric(1.0),
                               n_values=(4,), trials_per_n=25, master_seed=3)
        records, _ = run_experiment(cfg)
        for r in records:
            if r.influence_exact > 0:
                assert r.fei_ratio is not None
            else:
                assert r.fei_ratio is None


class TestSoundnessTripwires:
    def test_inflated_khintchine_detected(self, monkeypatch):
        real = bounds.khintchine_lower_bound

        def inflated(weights):
            r = real(weights)
            return dataclasses.replace(r, value=r.value + 10.0)

        monkeypatch.setattr(bounds, "khintchine_lower_bound", inflated)
        with pytest.raises(SoundnessError, match="[Kk]hintchine"):
            analyze_weights((0.0, 1.0, 1.0, 1.0))

    def test_record_field_mismatch_rejected(self):
        rec, _ = analyze_weights((0.0, 1.0, 1.0, 1.0))
        d = rec.to_dict()
        d.pop("fei_ratio")
        with pytest.raises(ValueError):
            ExperimentRecord.from_dict(d)
        d2 = rec.to_dict()
        d2["extra"] = 1
        with pytest.raises(ValueError):
            ExperimentRecord.from_dict(d2)


class TestVerification:
    def test_default_suite_passes(self):
        report = verify_bounds(n_max_exact=10, trials=60, seed=0)
        assert report.passed
        assert len(report.checks) == 10
        assert all(c.violation_count == 0 for c in report.checks)

    def test_weakened_constant_is_caught(self, monkeypatch):
        monkeypatch.setattr(bounds, "SHEVTSOVA_CONSTANT", 0.34106)
        report = verify_bounds(n_max_exact=8, trials=40, seed=0)
        assert not report.passed
        failed = {c.name for c in report.checks if not c.passed}
        assert "formula-freeze" in failed
        bad = next(c for c in report.checks if c.name == "formula-freeze")
        assert bad.violations                     # counterexample is recorded

    def test_validation(self):
        with pytest.raises(ValueError):
            verify_bounds(trials=0)
        with pytest.raises(ValueError):
            verify_bounds(n_max_exact=1)

    def test_report_serializes(self):
        report = verify_bounds(n_max_exact=8, trials=20, seed=5)
        d = report.to_dict()
        assert d["passed"] is True
        assert len(d["checks"]) == 10


def test_summarize_rejects_empty():
    cfg = ExperimentConfig(distribution=standard_normal(), n_values=(4,),
                           trials_per_n=1, master_seed=0)
    with pytest.raises(ValueError):
        summarize([], cfg)
