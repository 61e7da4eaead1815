import dataclasses
import json
import shutil
import subprocess

import numpy as np
import pytest

from lindsymlab.classify import catalog
from lindsymlab.cli import build_parser, cmd_table, main
from lindsymlab.observables import Coherence

LN2 = np.log(2.0)


def _write_cfg(tmp_path, name="cfg.json", **kw):
    base = {"hamiltonian": "tr_invariant", "coupling": "sx^2",
            "gamma": 0.1, "t_max": 50.0, "n_samples": 51}
    base.update(kw)
    base = {k: v for k, v in base.items() if v is not None}
    path = tmp_path / name
    path.write_text(json.dumps(base))
    return str(path)


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    data = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    return header, data


def test_simulate_coherent_run(tmp_path, capsys):
    cfg = _write_cfg(tmp_path)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    assert "verdict: Coherence" in capsys.readouterr().out

    summary = json.loads((out / "summary.json").read_text())
    assert summary["verdict"] == "Coherence"
    assert summary["block_identity"] is True
    assert summary["block_residual"] < 1e-9
    assert summary["stationarity"] < 1e-8
    assert summary["peak_entropy"] < 1e-6
    # population may equilibrate between the doublets; only the
    # normalized subspace state is protected
    assert 0.0 < summary["terminal_trace_g"] <= 1.0 + 1e-9
    assert summary["integrator"] == "expm"
    assert summary["gamma"] == 0.1

    header, data = _read_csv(out / "trajectory.csv")
    assert header == ["t", "gamma_t", "s_v", "trace_g", "re_rho_pp",
                      "re_rho_pm", "im_rho_pm", "re_rho_mm"]
    assert data.shape == (51, 8)
    assert data[0, 0] == 0.0
    assert data[0, 4] == pytest.approx(0.5, abs=1e-12)  # |equal> block
    assert data[0, 5] == pytest.approx(0.5, abs=1e-12)
    assert np.max(data[:, 2]) < 1e-6  # entropy stays flat


def test_simulate_decoherent_run(tmp_path):
    cfg = _write_cfg(tmp_path, coupling="sz", t_max=None)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    # t_max falls back to horizon gamma*t = 20
    assert summary["t_max"] == pytest.approx(200.0)
    assert summary["verdict"] == "Decoherence"
    assert abs(summary["terminal_entropy"] - LN2) < 1e-6
    assert summary["block_identity"] is False


def test_simulate_integrator_and_gamma_overrides(tmp_path):
    cfg = _write_cfg(tmp_path, coupling="sz", t_max=2.0, n_samples=11)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(out_a),
                 "--gamma", "0.05"]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out_b),
                 "--gamma", "0.05", "--integrator", "rk4"]) == 0
    sa = json.loads((out_a / "summary.json").read_text())
    sb = json.loads((out_b / "summary.json").read_text())
    assert sa["gamma"] == 0.05
    assert sa["integrator"] == "expm"
    assert sb["integrator"] == "rk4"
    # the two integration routes agree through the CLI as well
    _, da = _read_csv(out_a / "trajectory.csv")
    _, db = _read_csv(out_b / "trajectory.csv")
    assert np.allclose(da[:, 0], db[:, 0], atol=1e-12)
    assert np.max(np.abs(da[:, 2:] - db[:, 2:])) < 1e-8


def test_simulate_deterministic_output(tmp_path):
    cfg = _write_cfg(tmp_path, t_max=5.0, n_samples=21)
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(out_a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(out_b)]) == 0
    assert (out_a / "trajectory.csv").read_bytes() == \
        (out_b / "trajectory.csv").read_bytes()
    assert (out_a / "summary.json").read_bytes() == \
        (out_b / "summary.json").read_bytes()
    text = (out_a / "trajectory.csv").read_text()
    assert "-0.00000000000e+00" not in text
    assert text.endswith("\n")
    assert "\r" not in text


def test_simulate_literal_matrix_coupling(tmp_path):
    sz_rows = [[1.5, 0, 0, 0], [0, 0.5, 0, 0],
               [0, 0, -0.5, 0], [0, 0, 0, -1.5]]
    cfg = _write_cfg(tmp_path, coupling={"matrix": sz_rows},
                     t_max=5.0, n_samples=11)
    out = tmp_path / "out"
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    named = _write_cfg(tmp_path, name="named.json", coupling="sz",
                       t_max=5.0, n_samples=11)
    out2 = tmp_path / "out2"
    assert main(["simulate", "--config", named, "--out", str(out2)]) == 0
    assert (out / "trajectory.csv").read_bytes() == \
        (out2 / "trajectory.csv").read_bytes()


def test_table_subset_exit_codes(tmp_path):
    picks = [sc for sc in catalog()
             if sc.name in ("tr_invariant:sx2", "tr_invariant:isz")]
    parser = build_parser()
    args = parser.parse_args(["table", "--out", str(tmp_path / "ok")])
    assert cmd_table(args, scenarios=picks) == 0
    doc = json.loads((tmp_path / "ok" / "table.json").read_text())
    assert doc["all_pass"] is True
    assert doc["oracle_all_agree"] is True
    assert len(doc["rows"]) == 2
    assert (tmp_path / "ok" / "table.txt").read_text().count("ok") >= 2

    # a row with a wrong expectation must flip the exit code to 1
    flipped = [picks[0],
               dataclasses.replace(picks[1],
                                   expected_coherence=Coherence.DECOHERENT
                                   if picks[1].expected_coherence
                                   is Coherence.COHERENT
                                   else Coherence.COHERENT)]
    args = parser.parse_args(["table", "--out", str(tmp_path / "bad")])
    assert cmd_table(args, scenarios=flipped) == 1
    doc = json.loads((tmp_path / "bad" / "table.json").read_text())
    assert doc["all_pass"] is False


def test_sweep_recovers_first_order_scaling(tmp_path):
    cfg = _write_cfg(tmp_path, coupling="isz", t_max=5.0, n_samples=11,
                     n_quad=128, gammas=[1e-3, 2e-3, 4e-3, 8e-3])
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out)]) == 0
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert 1.8 < summary["fitted_exponent"] < 2.1
    assert len(summary["discrepancies"]) == 4
    header, data = _read_csv(out / "sweep.csv")
    assert header == ["gamma", "terminal_s_v", "discrepancy"]
    assert data.shape == (4, 3)
    # discrepancy grows with gamma
    assert np.all(np.diff(data[:, 2]) > 0)


def test_sweep_gamma_flag_and_validation(tmp_path, capsys):
    cfg = _write_cfg(tmp_path, coupling="isz", t_max=5.0, n_samples=11,
                     n_quad=128)
    out = tmp_path / "out"
    assert main(["sweep", "--config", cfg, "--out", str(out),
                 "--gamma", "1e-3,4e-3"]) == 0
    summary = json.loads((out / "sweep_summary.json").read_text())
    assert summary["gammas"] == [1e-3, 4e-3]

    bad_out = tmp_path / "bad"
    assert main(["sweep", "--config", cfg, "--out", str(bad_out),
                 "--gamma", "1e-3"]) == 2
    assert "error:" in capsys.readouterr().err
    assert not bad_out.exists()


def test_classify_op_named(capsys):
    assert main(["classify-op", "sxsy"]) == 0
    out = capsys.readouterr().out
    assert "hermitian: no" in out
    assert "[O,T]=0:   yes" in out
    assert "fails on: j, j_bar, k_bar, k" in out

    assert main(["classify-op", "sy^2"]) == 0
    out = capsys.readouterr().out
    assert "canonical: sy2" in out
    assert "hermitian: yes" in out
    assert "[O,Q]=0:   yes" in out


def test_classify_op_errors(tmp_path, capsys):
    assert main(["classify-op"]) == 2
    assert main(["classify-op", "no_such_operator"]) == 2
    # Hamiltonian names are not couplings
    assert main(["classify-op", "tr_invariant"]) == 2
    capsys.readouterr()


def test_config_error_paths(tmp_path, capsys):
    out = tmp_path / "out"

    def run(cfg_path):
        code = main(["simulate", "--config", cfg_path, "--out", str(out)])
        err = capsys.readouterr().err
        assert not out.exists()
        return code, err

    bad = tmp_path / "bad.json"
    bad.write_text('{"hamiltonian": "tr_invariant",')
    code, err = run(str(bad))
    assert code == 2
    assert "bad.json:1:" in err

    unknown = _write_cfg(tmp_path, name="unknown.json", tmax=5.0)
    code, err = run(unknown)
    assert code == 2
    assert "tmax" in err

    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"hamiltonian": "tr_invariant"}))
    code, err = run(str(missing))
    assert code == 2
    assert "coupling" in err

    lopsided = _write_cfg(tmp_path, name="lopsided.json", alpha=1.0, beta=1.0)
    code, err = run(lopsided)
    assert code == 2
    assert "alpha" in err or "normal" in err

    integ = _write_cfg(tmp_path, name="integ.json", integrator="euler")
    code, err = run(integ)
    assert code == 2

    neg = _write_cfg(tmp_path, name="neg.json", gamma=-0.1)
    code, err = run(neg)
    assert code == 2

    unparsable = _write_cfg(tmp_path, name="unparsable.json", gamma="fast")
    code, err = run(unparsable)
    assert code == 2
    assert "invalid value" in err

    absent = main(["simulate", "--config", str(tmp_path / "nope.json"),
                   "--out", str(out)])
    assert absent == 2
    assert not out.exists()
    capsys.readouterr()


def test_tolerance_scale_env(tmp_path, capsys, monkeypatch):
    cfg = _write_cfg(tmp_path, t_max=5.0, n_samples=11)
    out = tmp_path / "out"
    monkeypatch.setenv("LSL_TOLERANCE_SCALE", "not-a-number")
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 2
    monkeypatch.setenv("LSL_TOLERANCE_SCALE", "-2")
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 2
    monkeypatch.setenv("LSL_TOLERANCE_SCALE", "10")
    assert main(["simulate", "--config", cfg, "--out", str(out)]) == 0
    capsys.readouterr()


def test_console_script_installed():
    path = shutil.which("lindsymlab")
    assert path is not None
    proc = subprocess.run([path, "--help"], capture_output=True, text=True)
    assert proc.returncode == 0
    for sub in ("simulate", "table", "sweep", "classify-op"):
        assert sub in proc.stdout
