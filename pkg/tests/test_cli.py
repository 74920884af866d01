import json

import numpy as np
import pytest

import zanova as z
from zanova import experiments
from zanova.cli import main


def write_cfg(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload, indent=1))
    return str(path)


def read_csv(path):
    import csv

    meta, header, rows = {}, None, []
    with open(path, "r", encoding="utf-8", newline="") as fh:
        data_lines = []
        for line in fh:
            if line.startswith("# "):
                key, _, value = line[2:].rstrip("\n").partition("=")
                meta[key] = value
            else:
                data_lines.append(line)
        for record in csv.reader(data_lines):
            if header is None:
                header = record
            else:
                rows.append(record)
    return meta, header, rows


DECOMPOSE_CFG = {
    "kernels": [{"family": "brownian"}, {"family": "gaussian", "theta": 1.0}],
    "measure": {"kind": "uniform", "a": 0.0, "b": 5.0, "nodes": 100},
    "slices": [0.0, 2.0, 4.0],
    "grid": 50,
}


def fit_cfg(mode="star", n=20):
    component = {"kernel": {"family": "matern32", "theta": 1.0},
                 "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 60}}
    return {
        "test": {"test": "g", "a": [1.0, 2.0]},
        "kernel": {"mode": mode, "scale": 1.0, "components": [component, dict(component)]},
        "design": {"n": n, "seed": 42, "restarts": 50},
        "lambda": 0.0,
    }


REPLICATE_G_CFG = {
    "test": {"test": "g", "a": [0.2, 0.6, 0.8]},
    "kernels": [{"family": "matern32", "theta": 1.0}],
    "measure": {"kind": "uniform", "a": 0.0, "b": 1.0, "nodes": 40},
    "design": {"n": 30, "seed": 7, "restarts": 10},
    "replicates": 6,
    "subsets": ["1", "2", "3"],
}

REPLICATE_NOISE_CFG = {
    "test": {"test": "quadratic"},
    "kernel": {"family": "gaussian", "theta": 10.0},
    "scale": 200.0,
    "measure": {"kind": "normal", "a": -8.0, "b": 8.0, "nodes": 80},
    "design": {"n": 20, "bounds": [[-5.0, 5.0], [-5.0, 5.0]], "seed": 11, "restarts": 20},
    "lambdas": [0.0, 1.0],
    "replicates": 3,
    "subsets": ["1", "2", "1,2"],
}


def test_decompose_writes_slice_tables(tmp_path):
    cfg = write_cfg(tmp_path, "dec.json", DECOMPOSE_CFG)
    out = tmp_path / "out"
    assert main(["decompose", "--config", cfg, "--out", str(out)]) == 0
    files = sorted(p.name for p in out.iterdir())
    assert files == [
        "decompose_brownian_y0.csv", "decompose_brownian_y2.csv",
        "decompose_brownian_y4.csv", "decompose_gaussian_y0.csv",
        "decompose_gaussian_y2.csv", "decompose_gaussian_y4.csv",
    ]
    meta, header, rows = read_csv(out / "decompose_brownian_y2.csv")
    assert meta["schema"] == "zanova/1"
    assert len(meta["config_sha256"]) == 64
    assert header == ["x", "k", "k0", "k1"]
    assert len(rows) == 50
    data = np.array(rows, dtype=float)
    # the split must add back up to the raw kernel at every grid point
    assert np.max(np.abs(data[:, 1] - data[:, 2] - data[:, 3])) < 1e-12
    # the rank-one part vanishes on the slice pinned at the origin
    _, _, rows0 = read_csv(out / "decompose_brownian_y0.csv")
    assert np.max(np.abs(np.array(rows0, dtype=float)[:, 3])) == 0.0


def test_decompose_rejects_unknown_keys(tmp_path, capsys):
    bad = dict(DECOMPOSE_CFG)
    bad["kernel"] = {"family": "brownian"}
    cfg = write_cfg(tmp_path, "bad.json", bad)
    assert main(["decompose", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    message = capsys.readouterr().err
    assert "config error" in message and "$" in message and "kernel" in message


def test_decompose_rejects_out_of_support_slice(tmp_path, capsys):
    bad = dict(DECOMPOSE_CFG)
    bad["slices"] = [0.0, 9.0]
    cfg = write_cfg(tmp_path, "bad.json", bad)
    assert main(["decompose", "--config", cfg, "--out", str(tmp_path / "o")]) == 1
    assert "slices[1]" in capsys.readouterr().err


def test_fit_report_star_mode(tmp_path):
    cfg = write_cfg(tmp_path, "fit.json", fit_cfg())
    out = tmp_path / "out"
    assert main(["fit-report", "--config", cfg, "--out", str(out)]) == 0
    report = json.loads((out / "fit_report.json").read_text())
    assert report["schema"] == "zanova/1"
    assert report["centered_terms"] is True
    assert set(report["indices"]) == {"1", "2", "1,2"}
    assert abs(sum(report["indices"].values()) - 1.0) < 1e-8
    for label in ("1", "2", "1,2"):
        assert abs(report["submodel_means"][label]) < 1e-10
    assert report["orthogonality_max_inner"] < 1e-8
    assert report["residual"] < 1e-8


def test_fit_report_emits_submodel_grids(tmp_path):
    cfg_payload = fit_cfg()
    cfg_payload["grid"] = 25
    cfg = write_cfg(tmp_path, "fit.json", cfg_payload)
    out = tmp_path / "out"
    assert main(["fit-report", "--config", cfg, "--out", str(out)]) == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["design.csv", "fit_report.json", "indices.csv", "model_grid.csv",
                     "submodel_1.csv", "submodel_1_2.csv", "submodel_2.csv"]
    X, F = z.load_design_csv(out / "design.csv")
    assert X.shape == (20, 2) and len(F) == 20
    _, header, rows = read_csv(out / "indices.csv")
    assert header == ["subset", "index"]
    assert [r[0] for r in rows] == ["1", "2", "1,2"]
    _, header, rows = read_csv(out / "submodel_1.csv")
    assert header == ["x1", "value"] and len(rows) == 25
    _, header, rows = read_csv(out / "model_grid.csv")
    assert header == ["x1", "x2", "value"] and len(rows) == 625


def test_fit_report_standard_mode_flags_uncentered_means(tmp_path):
    cfg = write_cfg(tmp_path, "fit.json", fit_cfg(mode="standard"))
    assert main(["fit-report", "--config", cfg, "--out", str(tmp_path / "o")]) == 0
    report = json.loads((tmp_path / "o" / "fit_report.json").read_text())
    assert report["centered_terms"] is False
    assert "indices" not in report
    assert max(abs(v) for v in report["submodel_means"].values()) > 1e-3
    assert "note" in report


def test_fit_report_rejects_empty_design(tmp_path, capsys):
    payload = fit_cfg(n=0)
    cfg = write_cfg(tmp_path, "fit.json", payload)
    assert main(["fit-report", "--config", cfg]) == 1
    assert "design.n" in capsys.readouterr().err


def test_replicate_g_table(tmp_path):
    cfg = write_cfg(tmp_path, "rg.json", REPLICATE_G_CFG)
    out = tmp_path / "out"
    assert main(["replicate-g", "--config", cfg, "--out", str(out)]) == 0
    meta, header, rows = read_csv(out / "replicate_g.csv")
    assert meta["schema"] == "zanova/1"
    assert meta["seed"] == "7" and meta["replicates"] == "6"
    assert header == ["kernel", "subset", "mean", "std"]
    labels = [(r[0], r[1]) for r in rows]
    assert labels == [("matern32", "1"), ("matern32", "2"), ("matern32", "3"),
                      ("matern32", "sum")]
    means = {r[1]: float(r[2]) for r in rows}
    assert means["1"] > means["2"] > means["3"]


def test_replicate_g_deterministic_and_thread_invariant(tmp_path):
    cfg = write_cfg(tmp_path, "rg.json", REPLICATE_G_CFG)
    out1, out2, out3 = (tmp_path / s for s in ("a", "b", "c"))
    assert main(["replicate-g", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["replicate-g", "--config", cfg, "--out", str(out2)]) == 0
    assert main(["replicate-g", "--config", cfg, "--out", str(out3), "--threads", "4"]) == 0
    ref = (out1 / "replicate_g.csv").read_bytes()
    assert (out2 / "replicate_g.csv").read_bytes() == ref
    assert (out3 / "replicate_g.csv").read_bytes() == ref


def test_replicate_g_cli_overrides_change_output(tmp_path):
    cfg = write_cfg(tmp_path, "rg.json", REPLICATE_G_CFG)
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert main(["replicate-g", "--config", cfg, "--out", str(out1)]) == 0
    assert main(["replicate-g", "--config", cfg, "--out", str(out2), "--seed", "8"]) == 0
    assert (out1 / "replicate_g.csv").read_bytes() != (out2 / "replicate_g.csv").read_bytes()
    meta, _, _ = read_csv(out2 / "replicate_g.csv")
    assert meta["seed"] == "8"


def test_replicate_noise_table(tmp_path):
    cfg = write_cfg(tmp_path, "rn.json", REPLICATE_NOISE_CFG)
    out = tmp_path / "out"
    assert main(["replicate-noise", "--config", cfg, "--out", str(out)]) == 0
    meta, header, rows = read_csv(out / "replicate_noise.csv")
    assert header == ["lambda", "subset", "mean", "std"]
    assert meta["resampling"] == "design and noise per replicate"
    by_key = {(r[0], r[1]): (float(r[2]), float(r[3])) for r in rows}
    # noise-free fits recover the exact shares of the quadratic benchmark
    assert by_key[("0.0", "1")][0] == pytest.approx(0.25, abs=0.01)
    assert by_key[("0.0", "2")][0] == pytest.approx(0.50, abs=0.01)
    assert by_key[("0.0", "1,2")][0] == pytest.approx(0.25, abs=0.01)
    assert by_key[("0.0", "1")][1] < 0.01
    # noisy fits scatter more
    assert by_key[("1.0", "1")][1] > by_key[("0.0", "1")][1]


def test_verify_passes_and_writes_diagnostics(tmp_path):
    out = tmp_path / "out"
    assert main(["verify", "--out", str(out)]) == 0
    payload = json.loads((out / "verify.json").read_text())
    assert payload["passed"] is True
    assert len(payload["checks"]) == 9
    assert all(c["passed"] for c in payload["checks"])


def test_verify_tolerances_are_configurable(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "v.json", {"tolerances": {"centering_max_abs": 1e-30}})
    assert main(["verify", "--config", cfg]) == 3
    err = capsys.readouterr()
    assert "FAIL" in err.out


def test_verify_catches_injected_sign_error(monkeypatch, capsys):
    import zanova.sensitivity as sens
    original = sens.component_moment_matrices

    def flipped(est):
        return [-m for m in original(est)]

    monkeypatch.setattr(sens, "component_moment_matrices", flipped)
    checks = {c["name"]: c for c in experiments.run_verify({})}
    assert not checks["share_normalization_error"]["passed"]


def test_exit_code_numerical_failure(monkeypatch, tmp_path):
    cfg = write_cfg(tmp_path, "fit.json", fit_cfg())

    def boom(cfg, out_dir=None):
        raise np.linalg.LinAlgError("synthetic factorization failure")

    monkeypatch.setattr(experiments, "run_fit_report", boom)
    assert main(["fit-report", "--config", cfg]) == 2


def test_missing_config_file_is_config_error(tmp_path, capsys):
    assert main(["decompose", "--config", str(tmp_path / "nope.json"),
                 "--out", str(tmp_path / "o")]) == 1
    assert "cannot read" in capsys.readouterr().err
