import json
import math

import numpy as np
import pytest

from msvekit.chain_io import save_chain
from msvekit.cli import main
from msvekit.numerics import z_quantile


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def iid_file(tmp_path):
    y = np.random.default_rng(4).standard_normal((100_000, 2))
    path = tmp_path / "iid.csv"
    save_chain(y, path)
    return path


def test_estimate_iid_ess(capsys, iid_file):
    code, out, _ = run(capsys, "estimate", iid_file, "--window", "bartlett")
    assert code == 0
    rep = json.loads(out)
    assert 0.9 <= rep["confidence"]["ess_over_n"] <= 1.1
    assert rep["estimate"]["b_n"] == 46
    assert rep["provenance"]["toolkit"] == "msvekit"


def test_estimate_scalar_interval(capsys, tmp_path):
    x = np.random.default_rng(9).standard_normal((500, 1))
    path = tmp_path / "x.csv"
    save_chain(x, path)
    code, out, _ = run(capsys, "estimate", path, "--bn", "5", "--level", "0.8")
    assert code == 0
    rep = json.loads(out)
    s2 = rep["estimate"]["matrix"][0][0]
    half = z_quantile(0.9) * math.sqrt(s2 / 500)
    assert rep["confidence"]["box_half_widths"]["uncorrected"][0] == pytest.approx(half, rel=1e-13)
    assert rep["confidence"]["box_half_widths"]["bonferroni"][0] == pytest.approx(half, rel=1e-13)
    assert rep["confidence"]["volume_pth_root"]["ellipsoid"] == pytest.approx(2 * half, rel=1e-12)


def test_estimate_bn_too_large_exits_2(capsys, tmp_path):
    path = tmp_path / "x.csv"
    save_chain(np.arange(10.0)[:, None], path)
    code, _, err = run(capsys, "estimate", path, "--bn", "5")
    assert code == 2 and "n > 2*b_n" in err


def test_estimate_bad_file_exits_4(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\nx,3\n")
    code, _, err = run(capsys, "estimate", path)
    assert code == 4 and "line 2" in err
    assert run(capsys, "estimate", tmp_path / "missing.csv")[0] == 4


def test_estimate_non_pd_exits_3(capsys, tmp_path):
    y = np.tile([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]], (6, 1))
    path = tmp_path / "alt.csv"
    save_chain(y, path)
    code, out, _ = run(capsys, "estimate", path, "--window", "scaled-bartlett,eta=2", "--bn", "3")
    assert code == 3
    rep = json.loads(out)
    assert "error" in rep["confidence"]
    assert rep["estimate"]["is_positive_definite"] is False


def test_estimate_extras(capsys, tmp_path):
    y = np.random.default_rng(1).standard_normal((300, 2))
    path = tmp_path / "c.csv"
    save_chain(y, path)
    out = tmp_path / "o"
    code, _, _ = run(capsys, "estimate", path, "--acf", "0,1,4", "--lags", "--out", out)
    assert code == 0
    rep = json.loads((out / "estimate.json").read_text())
    assert len(rep["acf"]["values"]) == 5
    lines = (out / "autocov.csv").read_text().splitlines()
    assert lines[0] == "lag,i,j,value"
    b = rep["estimate"]["b_n"]
    assert len(lines) == 1 + (2 * b - 1) * 4


def test_simulate_then_estimate(capsys, tmp_path):
    chain = tmp_path / "s.f64"
    code, _, _ = run(capsys, "simulate", "--setting", "2", "--n", "2000", "--seed", "5",
                     "--chain-format", "raw-f64", "-o", chain)
    assert code == 0 and chain.stat().st_size == 16 + 2000 * 10 * 8
    code, out, _ = run(capsys, "estimate", chain, "--window", "tukey-hanning")
    assert code == 0 and json.loads(out)["p"] == 10


def test_simulate_spec_file(capsys, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"phi": [0.5, 0.2], "w": {"ar1": {"rho": 0.3}}}))
    code, _, _ = run(capsys, "simulate", "--spec", spec, "--n", "50", "--out", tmp_path)
    assert code == 0 and len((tmp_path / "chain.csv").read_text().splitlines()) == 50
    assert run(capsys, "simulate", "--n", "5")[0] == 2


def test_diagnose(capsys):
    code, out, _ = run(capsys, "diagnose", "--window", "bartlett")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert all(all(v.values()) for v in rep["identities"].values())
    for name in ("scaled-bartlett,eta=2", "truncated"):
        rep = json.loads(run(capsys, "diagnose", "--window", name)[1])
        assert not rep["verdicts"]["delta2_abs_sum"]


def test_sweep_and_coverage_files(capsys, tmp_path):
    common = ["--setting", "1", "--sample-sizes", "200,400", "--replications", "3", "--seed", "1"]
    assert run(capsys, "sweep", *common, "--out", tmp_path / "s")[0] == 0
    assert {p.name for p in (tmp_path / "s").iterdir()} == {
        "sweep_replications.csv", "sweep_summary.csv", "sweep.json"}
    assert run(capsys, "eigdist", *common, "--out", tmp_path / "e")[0] == 0
    meta = json.loads((tmp_path / "e" / "eigdist.json").read_text())
    assert meta["true_lambda1"] > 0
    assert run(capsys, "coverage", *common, "--windows", "bartlett", "--out", tmp_path / "c")[0] == 0
    assert (tmp_path / "c" / "coverage.json").exists()


def test_config_errors_exit_2(capsys, tmp_path):
    assert run(capsys, "coverage", "--setting", "1", "--replications", "0", "--out", tmp_path)[0] == 2
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"setting": 9, "sample_sizes": [200], "replications": 1}))
    assert run(capsys, "sweep", "--config", cfg, "--out", tmp_path)[0] == 2


def test_config_file_drives_sweep(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"setting": 2, "sample_sizes": [300], "replications": 2,
                               "windows": ["parzen,q=2"], "seed": 12}))
    assert run(capsys, "sweep", "--config", cfg, "--out", tmp_path / "o")[0] == 0
    meta = json.loads((tmp_path / "o" / "sweep.json").read_text())
    assert meta["provenance"]["seed"] == 12
    assert meta["summary"][0]["window"] == "parzen,q=2"
