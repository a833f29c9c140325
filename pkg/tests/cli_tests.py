import csv
import json
import os

from app.models.specfun import bessel_zero

SMALLNESS = {
    "dimension": 2,
    "wavenumber": 1.0,
    "radii": [1.0],
    "branches": [1],
    "n_dirs": 16,
    "spacing": 0.2,
}


def _read_bytes(path):
    with open(path, "rb") as handle:
        return handle.read()


def _rows(path):
    with open(path, encoding="utf-8") as handle:
        return list(csv.reader(handle))


def test_source_command_writes_fields_and_far_field(app, runner, write_config, tmp_path, disk_source_scene):
    scene = write_config("scene.json", disk_source_scene)
    outputs = []
    for run in ("a", "b"):
        fields, far = str(tmp_path / f"u_{run}.csv"), str(tmp_path / f"ff_{run}.csv")
        result = runner.invoke(app, ["source", scene, "--fields", fields, "--farfield", far, "--dirs", "16",
                                     "--json", str(tmp_path / f"ff_{run}.json")])
        assert result.exit_code == 0, result.stderr
        assert "far-field sup" in result.stdout
        outputs.append((fields, far))
    (fields, far), (fields_again, far_again) = outputs
    assert _rows(fields)[0] == ["x1", "x2", "re", "im"]
    assert len(_rows(far)) == 17, "header plus one row per direction"
    assert _read_bytes(fields) == _read_bytes(fields_again), "reruns must be byte-identical"
    assert _read_bytes(far) == _read_bytes(far_again)


def test_source_command_config_errors(app, runner, write_config, tmp_path, disk_source_scene):
    out = ["--fields", str(tmp_path / "u.csv"), "--farfield", str(tmp_path / "ff.csv")]
    missing = runner.invoke(app, ["source", str(tmp_path / "nope.json"), *out])
    assert missing.exit_code == 2

    del disk_source_scene["intensity"]
    invalid = runner.invoke(app, ["source", write_config("bad.json", disk_source_scene), *out])
    assert invalid.exit_code == 2
    assert "intensity" in invalid.stderr

    broken = tmp_path / "broken.json"
    broken.write_text("{not json", encoding="utf-8")
    assert runner.invoke(app, ["source", str(broken), *out]).exit_code == 2


def test_medium_command_with_both_solvers(app, runner, write_config, tmp_path, disk_medium_scene):
    scene = write_config("medium.json", disk_medium_scene)
    sups = {}
    for solver in ("grid", "series"):
        far = str(tmp_path / f"ff_{solver}.csv")
        result = runner.invoke(app, ["medium", scene, "--fields", str(tmp_path / f"u_{solver}.csv"),
                                     "--farfield", far, "--dirs", "16", "--solver", solver])
        assert result.exit_code == 0, result.stderr
        sups[solver] = float(result.stdout.split()[-1])
        assert len(_rows(far)) == 17
    assert abs(sups["grid"] - sups["series"]) < 5e-2 * sups["series"], f"grid and series disagree: {sups}"


def test_medium_command_rejects_absorbing_sign(app, runner, write_config, tmp_path, disk_medium_scene):
    disk_medium_scene["contrast"] = {"kind": "constant", "value": {"re": 0.1, "im": -0.1}}
    result = runner.invoke(app, ["medium", write_config("medium.json", disk_medium_scene),
                                 "--fields", str(tmp_path / "u.csv"), "--farfield", str(tmp_path / "ff.csv")])
    assert result.exit_code == 2
    assert "Im V" in result.stderr


def test_teig_command(app, runner, write_config, tmp_path):
    itp = write_config("itp.json", {"radius": 1.0, "contrast": 15.0})
    out = str(tmp_path / "teig.csv")
    result = runner.invoke(app, ["teig", itp, "--kmax", "5", "--modes", "0,1", "--out", out])
    assert result.exit_code == 0, result.stderr
    rows = _rows(out)
    assert rows[0][:2] == ["mode", "k"] and len(rows) > 1
    assert {row[0] for row in rows[1:]} <= {"0", "1"}

    assert runner.invoke(app, ["teig", itp, "--kmax", "5", "--modes", "a", "--out", out]).exit_code == 2
    assert runner.invoke(app, ["teig", itp, "--out", out]).exit_code == 2, "k_max is required somewhere"
    none = runner.invoke(app, ["teig", itp, "--kmax", "0.1", "--out", out])
    assert none.exit_code == 3, "no eigenvalue below 0.1 is a numerical failure"


def test_cgo_verify_command(app, runner, tmp_path):
    out = str(tmp_path / "cgo.csv")
    result = runner.invoke(app, ["cgo-verify", "--samples", "2", "--n", "2", "--seed", "3", "--out", out])
    assert result.exit_code == 0, result.stderr
    rows = _rows(out)
    assert len(rows) == 1 + 2 + 3 * 2 + 20, "parabola, three bound checks per sample, twenty Gaussians"
    assert all(row[-1] == "true" for row in rows[1:])


def test_experiment_passes_and_reruns_identically(app, runner, write_config, tmp_path):
    config = write_config("smallness.json", SMALLNESS)
    first, second = str(tmp_path / "first"), str(tmp_path / "second")
    for out in (first, second):
        result = runner.invoke(app, ["experiment", "smallness-source", config, "--out", out])
        assert result.exit_code == 0, result.stderr
        assert "smallness-source: passed" in result.stdout
    for name in ("smallness-source.csv", "smallness-source.json", "calibration.json"):
        assert _read_bytes(os.path.join(first, name)) == _read_bytes(os.path.join(second, name)), name
    with open(os.path.join(first, "smallness-source.json"), encoding="utf-8") as handle:
        summary = json.load(handle)
    assert summary["passed"] and summary["radiationless_invisible"] and not summary["frozen_calibration"]


def test_experiment_frozen_calibration(app, runner, write_config, tmp_path):
    config = write_config("smallness.json", SMALLNESS)
    strict = write_config("strict.json", {"smallness-source": {"C": 0.0, "floor": 1e-6}})
    result = runner.invoke(app, ["experiment", "smallness-source", config, "--out", str(tmp_path / "out"),
                                 "--calibration", strict])
    assert result.exit_code == 1, "a radiationless ball above C = 0 is a counterexample"
    assert "FAIL" in result.stderr
    with open(tmp_path / "out" / "smallness-source.json", encoding="utf-8") as handle:
        assert json.load(handle)["frozen_calibration"] is True

    other = write_config("other.json", {"curvature-source": {"C": 1.0, "floor": 1e-6}})
    missing = runner.invoke(app, ["experiment", "smallness-source", config, "--out", str(tmp_path / "out2"),
                                  "--calibration", other])
    assert missing.exit_code == 2


def test_experiment_pdf_and_bad_arguments(app, runner, write_config, tmp_path):
    config = write_config("smallness.json", SMALLNESS)
    out = tmp_path / "pdf"
    result = runner.invoke(app, ["experiment", "smallness-source", config, "--out", str(out), "--pdf"])
    assert result.exit_code == 0, result.stderr
    assert _read_bytes(out / "smallness-source.pdf").startswith(b"%PDF")

    assert runner.invoke(app, ["experiment", "no-such-suite", config, "--out", str(out)]).exit_code == 2
    bad = write_config("bad.json", {"radii": []})
    assert runner.invoke(app, ["experiment", "smallness-source", bad, "--out", str(out)]).exit_code == 2


def test_source_command_for_silent_sources(app, runner, write_config, tmp_path, disk_source_scene):
    disk_source_scene["domain"]["params"]["radius"] = bessel_zero(1.0, 1)
    disk_source_scene.update({"spacing": 0.2, "fields": {"spacing": 0.5, "padding": 0.0}})
    for name, intensity in (("bessel", 1.0), ("empty", 0.0)):
        disk_source_scene["intensity"] = {"kind": "constant", "value": intensity}
        far = str(tmp_path / f"ff_{name}.csv")
        result = runner.invoke(app, ["source", write_config(f"{name}.json", disk_source_scene),
                                     "--fields", str(tmp_path / f"u_{name}.csv"), "--farfield", far])
        assert result.exit_code == 0, result.stderr
        sup = max(abs(complex(float(re), float(im))) for _, re, im in _rows(far)[1:])
        assert sup < 1e-6, f"{name} source radiates {sup}"
