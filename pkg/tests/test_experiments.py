import numpy as np
import pytest

from scorecd import (PRESETS, ExperimentConfig, ThetaPattern, config_from_text,
                     config_to_text, run_experiment)
from scorecd.errors import ParseError


def test_preset_table_matches_published_settings():
    spec = {
        "1": (1000, 2, 50, "constant", {"c": 0.2}),
        "2a": (2000, 2, 100, "constant", {"c": 0.1}),
        "2b": (800, 2, 100, "linear", {"d0": 0.025, "c0": 0.5}),
        "2c": (1200, 2, 100, "quadratic", {"d0": 0.025, "c0": 0.5}),
        "2d": (1500, 3, 100, "quadratic", {"d0": 0.015, "c0": 0.8}),
        "3": (1500, 3, 25, "quadratic", {"d0": 0.015, "c0": 0.8}),
        "4a": (1000, 2, 50, "linear", {"d0": 0.02, "c0": 0.5}),
        "4b": (1000, 2, 50, "quadratic", {"d0": 0.02, "c0": 0.5}),
        "4c": (1000, 2, 50, "two_point", {"c0": 0.5, "d0": 0.02}),
    }
    assert set(PRESETS) == set(spec)
    for pid, (n, K, rep, kind, params) in spec.items():
        cfg = PRESETS[pid]
        assert (cfg.n, cfg.K, cfg.rep) == (n, K, rep)
        assert cfg.theta.kind == kind
        assert cfg.theta.params == pytest.approx(params)
        A = cfg.a_matrix()
        assert np.allclose(A, A.T)
        assert np.allclose(np.diag(A), 1.0)
    assert PRESETS["1"].A[0][1] == 0.5
    assert PRESETS["2a"].A[0][1] == 0.4
    A3 = PRESETS["2d"].a_matrix()
    assert A3[0, 1] == 0.4 and A3[1, 2] == 0.4 and A3[0, 2] == 0.05
    # the off-pattern theta profiles reproduce the published formulas
    i = np.arange(1, 801)
    assert np.allclose(PRESETS["2b"].theta.generate(800),
                       0.025 + 0.475 * i / 800)
    i = np.arange(1, 1501)
    assert np.allclose(PRESETS["2d"].theta.generate(1500),
                       0.015 + 0.785 * (i / 1500) ** 2)


@pytest.mark.parametrize("pid", sorted(PRESETS))
def test_config_round_trip(pid):
    cfg = PRESETS[pid]
    assert config_from_text(config_to_text(cfg)) == cfg


def test_config_parse_errors():
    with pytest.raises(ParseError, match="missing keys"):
        config_from_text("n = 10\n")
    with pytest.raises(ParseError, match="key = value"):
        config_from_text("just some words\n")
    with pytest.raises(ParseError, match="bad config value"):
        config_from_text("n = 10\nK = x\nrep = 1\nA = 1\ntheta = constant c=0.2\n")


def tiny_config(**overrides):
    fields = dict(id="tiny", n=60, K=2, rep=3,
                  A=((1.0, 0.9), (0.9, 1.0)),
                  theta=ThetaPattern("constant", {"c": 0.5}),
                  methods=("score", "opca"), seed=5)
    fields.update(overrides)
    return ExperimentConfig(**fields)


def test_run_experiment_shapes_and_rates():
    report = run_experiment(tiny_config(), restarts=10)
    assert len(report.n0) == 3
    for method in ("score", "opca"):
        assert len(report.rates[method]) == 3
        for r, rate in enumerate(report.rates[method]):
            assert rate == report.mismatches[method][r] / report.n0[r]
        assert 0.0 <= report.means[method] <= 1.0
    assert set(report.wall_clock) == {"score", "opca"}


def test_run_experiment_deterministic_and_worker_invariant():
    a = run_experiment(tiny_config(), restarts=10)
    b = run_experiment(tiny_config(), restarts=10)
    c = run_experiment(tiny_config(), restarts=10, workers=3)
    assert a.payload() == b.payload() == c.payload()
    single = run_experiment(tiny_config(rep=1), restarts=10)
    again = run_experiment(tiny_config(rep=1), restarts=10)
    assert single.payload() == again.payload()


def test_overrides_change_the_run():
    base = run_experiment(tiny_config(), restarts=10)
    other = run_experiment(tiny_config(), seed=99, restarts=10)
    assert base.payload() != other.payload()
    short = run_experiment(tiny_config(), reps=2, restarts=10)
    assert len(short.n0) == 2


def test_report_renderings():
    report = run_experiment(tiny_config(), restarts=10)
    table = report.to_table()
    assert "experiment tiny" in table and "score" in table
    csv = report.to_csv()
    assert csv.startswith("rep,n0,method,mismatches,rate")
    assert len(csv.strip().splitlines()) == 1 + 2 * 3
    payload = report.payload()
    assert payload["config"]["theta"] == {"kind": "constant", "c": 0.5}


def test_baseline_clustering_policy_applied_and_overridable():
    cfg = tiny_config(methods=("score", "npca"))
    default = run_experiment(cfg, restarts=10)
    assert default.clustering == {"npca": {"restarts": 1, "init": "sample"}}
    assert default.payload()["clustering"]["npca"]["init"] == "sample"
    forced = run_experiment(cfg, restarts=10, clustering={"npca": {}})
    assert forced.clustering == {"npca": {}}
    # the score stream is untouched by the policy change
    assert forced.rates["score"] == default.rates["score"]


def test_finite_truncation_still_runs():
    # the harness scores untruncated ratios by default; a forced tiny T_n
    # clips every entry and the pipeline must still return valid rates
    report = run_experiment(tiny_config(methods=("score",)), restarts=10,
                            T_n=1e-6)
    assert all(0.0 <= r <= 1.0 for r in report.rates["score"])
