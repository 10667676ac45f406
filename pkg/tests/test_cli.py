import hashlib
import json

import numpy as np
import pytest

from chiralgate.cli import main


def run(argv):
    return main(argv)


def read_manifest(out):
    return json.loads((out / "manifest.json").read_text())


def check_digests(out):
    manifest = read_manifest(out)
    assert manifest["output_digests"], "manifest lists no files"
    for name, digest in manifest["output_digests"].items():
        payload = (out / name).read_bytes()
        assert hashlib.sha256(payload).hexdigest() == digest


def test_dispersion_subcommand(tmp_path):
    out = tmp_path / "disp"
    assert run(["dispersion", "--dk", "4.712", "--band-points", "32", "--out", str(out)]) == 0
    lines = (out / "dispersion.csv").read_text().splitlines()
    assert lines[0] == "q_d,band,omega,v_g"
    assert len(lines) == 65  # both bands
    summary = json.loads((out / "summary.json").read_text())
    assert summary["initial_delay"] == pytest.approx(42.4, abs=0.5)
    check_digests(out)


def test_s1_subcommand(tmp_path):
    out = tmp_path / "s1"
    assert run(["s1", "--half-width", "1.0", "--points", "21", "--out", str(out)]) == 0
    header = (out / "s1.csv").read_text().splitlines()[0]
    assert header.startswith("delta,s_aa_re,s_aa_im")
    check_digests(out)


def test_two_polariton_map_subcommand(tmp_path):
    out = tmp_path / "map"
    code = run(
        [
            "two-polariton-map",
            "--delta-range=-0.5:0.5:5",
            "--dk-range", "1.0:5.28:5",
            "--out", str(out),
        ]
    )
    assert code == 0
    for name in ("p_elastic.csv", "arg_t_el.csv", "minus_im_Qprime_d.csv"):
        lines = (out / name).read_text().splitlines()
        assert len(lines) == 6  # header row + 5 delta rows
        assert lines[0].startswith("_,")
    check_digests(out)


def test_propagate_subcommand(tmp_path):
    out = tmp_path / "prop"
    code = run(
        [
            "propagate",
            "--n", "2",
            "--sigma", "0.1",
            "--half-width", "2.0",
            "--points", "101",
            "--out", str(out),
        ]
    )
    assert code == 0
    summary = json.loads((out / "summary.json").read_text())
    assert 0.0 < summary["inelastic_weight"] < 1.0
    assert (out / "re_amplitude_aa.csv").exists()
    assert (out / "density_ab.csv").exists()
    check_digests(out)


def test_fidelity_subcommand_with_config_document(tmp_path):
    cfg = tmp_path / "job.json"
    cfg.write_text(json.dumps({"n_emitters": 4, "sigma": 0.1, "half_width": 2.0, "n_points": 201}))
    out = tmp_path / "fid"
    assert run(["fidelity", "--config", str(cfg), "--out", str(out)]) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert 0.0 < summary["fidelity"] < 1.0
    # flag overrides the document
    out2 = tmp_path / "fid2"
    assert run(["fidelity", "--config", str(cfg), "--n", "6", "--out", str(out2)]) == 0
    s2 = json.loads((out2 / "summary.json").read_text())
    assert s2["fidelity"] != summary["fidelity"]
    assert read_manifest(out2)["parameters"]["n_emitters"] == 6


def test_sweep_subcommand(tmp_path):
    out = tmp_path / "sweep"
    code = run(
        [
            "sweep",
            "--n", "4",
            "--sigma", "0.1",
            "--half-width", "2.0",
            "--points", "201",
            "--axis", "gamma_loss=0:0.01:2",
            "--out", str(out),
        ]
    )
    assert code == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0].startswith("gamma_loss,")
    assert len(lines) == 3
    check_digests(out)


def test_byte_identical_reruns(tmp_path):
    args = [
        "propagate", "--n", "2", "--sigma", "0.1",
        "--half-width", "2.0", "--points", "61",
    ]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--out", str(out2)]) == 0
    for name in sorted(p.name for p in out1.iterdir() if p.name != "manifest.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    d1 = read_manifest(out1)["output_digests"]
    d2 = read_manifest(out2)["output_digests"]
    assert d1 == d2


def test_validation_failure_is_machine_readable(tmp_path, capsys):
    out = tmp_path / "bad"
    code = run(["fidelity", "--gamma-a", "0.9", "--out", str(out)])
    assert code == 1
    record = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert record["error"] == "ValidationError"
    assert "normalization" in record["message"]


def test_config_parse_error_reported(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SystemExit, match="config parse error"):
        run(["fidelity", "--config", str(bad), "--out", str(tmp_path / "x")])


def test_csv_numbers_have_full_precision(tmp_path):
    out = tmp_path / "prec"
    run(["dispersion", "--dk", "4.712", "--band-points", "8", "--out", str(out)])
    row = (out / "dispersion.csv").read_text().splitlines()[1]
    value = row.split(",")[0]
    assert "e" in value and len(value.split("e")[0].rstrip("0")) >= 10
