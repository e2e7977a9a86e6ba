import json

import numpy as np
import pytest

from msvekit.errors import ConfigError
from msvekit.experiments import (
    ExperimentConfig,
    dumps,
    provenance,
    run_coverage,
    run_eigdist,
    run_sweep,
    write_csv,
)
from msvekit.autocov import autocov_range
from msvekit.msve import msve_from_autocov
from msvekit.numerics import RngStream
from msvekit.var1 import setting, simulate, truth
from msvekit.windows import TruncationRule, make_window


def small(**kw):
    base = dict(spec={"setting": 1}, sample_sizes=[100, 400], replications=6, seed=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_config_validation():
    with pytest.raises(ConfigError):
        small(replications=0)
    with pytest.raises(ConfigError):
        small(sample_sizes=[2])
    with pytest.raises(ConfigError):
        small(windows=["parzen,q=9.5"])
    with pytest.raises(ConfigError):
        small(level=1.0)
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict({"setting": 1, "bogus": 1})
    assert ExperimentConfig.from_dict({"setting": 2}).spec == {"setting": 2}


def test_sweep_shapes_and_truth():
    cfg = small()
    rep = run_sweep(cfg)
    assert len(rep.rows) == 3 * 2 * 6
    assert len(rep.summary) == 3 * 2
    row = rep.summary_for("bartlett", 400)
    assert row["replications"] == 6 and row["b_n"] == 7
    assert rep.true_lambda1 == pytest.approx(truth(setting(1)).sigma_eigenvalues[0], rel=1e-14)
    vals = [r["frobenius_rel_error"] for r in rep.rows if r["window"] == "bartlett" and r["n"] == 400]
    assert row["frobenius_rel_error_mean"] == pytest.approx(np.mean(vals))
    assert row["frobenius_rel_error_se"] == pytest.approx(np.std(vals, ddof=1) / np.sqrt(6))


def test_sweep_independent_of_threads():
    a = run_sweep(small(threads=1))
    b = run_sweep(small(threads=4))
    assert dumps(a.rows) == dumps(b.rows)
    assert dumps(a.summary) == dumps(b.summary)
    assert a.provenance == b.provenance


def test_prefix_reuse_bit_identical():
    cfg = small(replications=2)
    rep = run_sweep(cfg)
    spec = setting(1)
    w = make_window("tukey-hanning")
    for r in range(2):
        fresh = simulate(spec, 100, RngStream(cfg.seed, r))
        b = TruncationRule()(100)
        est = msve_from_autocov(autocov_range(fresh, b), w)
        row = next(x for x in rep.rows if x["window"] == "tukey-hanning" and x["n"] == 100
                   and x["replication"] == r)
        assert row["lambda1"] == float(est.eigenvalues[0])


def test_independent_samples_differ():
    a = run_sweep(small(replications=2))
    b = run_sweep(small(replications=2, independent_samples=True))
    la = [r["lambda1"] for r in a.rows if r["n"] == 100]
    lb = [r["lambda1"] for r in b.rows if r["n"] == 100]
    assert la != lb


def test_eigdist_reuses_sweep():
    a = run_sweep(small(replications=3))
    b = run_eigdist(small(replications=3))
    assert [r["lambda1"] for r in a.rows] == [r["lambda1"] for r in b.rows]
    assert b.provenance["command"] == "eigdist"


def test_coverage_rows():
    cfg = small(spec={"phi": [0.0] * 3, "w": {"ar1": {"rho": 0.0}}}, replications=40,
                sample_sizes=[2000], windows=["bartlett"])
    rep = run_coverage(cfg)
    assert [r["method"] for r in rep.rows] == ["ellipsoid", "bonferroni-box", "uncorrected-box"]
    for r in rep.rows:
        assert 0 <= r["coverage"] <= 1 and r["replications"] == 40
        assert r["coverage_se"] == pytest.approx(np.sqrt(r["coverage"] * (1 - r["coverage"]) / 40))
    assert rep.row("bonferroni-box", 2000)["coverage"] >= rep.row("uncorrected-box", 2000)["coverage"]


@pytest.mark.slow
def test_coverage_iid_exact_sigma_regime():
    cfg = ExperimentConfig(spec={"phi": [0.0] * 5, "w": {"ar1": {"rho": 0.0}}}, windows=["bartlett"],
                           sample_sizes=[100_000], replications=500, seed=2, threads=4)
    row = run_coverage(cfg).row("ellipsoid", 100_000)
    assert abs(row["coverage"] - 0.90) <= 3 * np.sqrt(0.9 * 0.1 / 500)


def test_provenance_hash_ignores_threads_and_outputs():
    a = provenance(small(threads=1, outputs="x"), "sweep")
    b = provenance(small(threads=8, outputs="y"), "sweep")
    assert a == b
    assert provenance(small(seed=4), "sweep")["config_hash"] != a["config_hash"]


def test_writers(tmp_path):
    write_csv(tmp_path / "a.csv", [{"x": 0.1, "y": True, "z": None}])
    assert (tmp_path / "a.csv").read_bytes() == b"x,y,z\n0.1,true,\n"
    assert json.loads(dumps({"b": float("nan"), "a": np.arange(2)})) == {"a": [0, 1], "b": None}
