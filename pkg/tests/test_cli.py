"""Tests for the command line."""
import io
import json
import math
import sys

import pandas as pd
import pytest

from src.cli.main import main
from src.cli.schemas import load_spec_file
from src.core.dist_core import make_fp
from src.models.analysis_result import UI_CONSISTENT, UI_INCONCLUSIVE, UI_VIOLATION, UIReport
from src.utils.errors import DomainError


def _run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


# ── Spec files ────────────────────────────────────────────────────


def test_fixture_specs_load(specs_dir):
    names = sorted(p.stem for p in specs_dir.glob("*.json"))
    assert "fp2" in names
    for path in specs_dir.glob("*.json"):
        spec = load_spec_file(path)
        assert spec.norm is not None


def test_fp2_fixture_matches_constructor(fp2_file_spec):
    built = make_fp(2)
    assert fp2_file_spec.a == pytest.approx(built.a, rel=1e-15)
    assert fp2_file_spec.b == pytest.approx(built.b, rel=1e-15)
    assert fp2_file_spec.alpha == pytest.approx(built.alpha, rel=1e-15)
    assert fp2_file_spec.exact == built.exact
    assert fp2_file_spec.label == "fp(2)"


def test_spec_file_errors(tmp_path):
    with pytest.raises(DomainError):
        load_spec_file(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(DomainError):
        load_spec_file(bad)
    extra = tmp_path / "extra.json"
    extra.write_text(json.dumps({"a": 1, "b": 4, "alpha": [1], "l": [0], "colour": "red"}))
    with pytest.raises(DomainError):
        load_spec_file(extra)


def test_exact_weights_checked_on_load(tmp_path, fp2_file_spec):
    """Weights must equal 2 pi norm alpha_k when the file is read, not when moments are asked for."""
    base = {"a": fp2_file_spec.a, "b": fp2_file_spec.b, "alpha": [1 / (2 * math.pi)], "l": [0], "norm": 1}
    good = tmp_path / "good.json"
    good.write_text(json.dumps({**base, "exact": {"p": "2", "weights": ["1"]}}))
    assert load_spec_file(good).exact is not None

    for name, weights in [("wrong_value", ["1/2"]), ("wrong_count", ["1", "1"])]:
        path = tmp_path / f"{name}.json"
        path.write_text(json.dumps({**base, "exact": {"p": "2", "weights": weights}}))
        with pytest.raises(DomainError, match="exact"):
            load_spec_file(path)


def test_label_defaults_to_file_stem(tmp_path):
    path = tmp_path / "my_law.json"
    path.write_text(json.dumps({"a": 1, "b": 4, "alpha": [1], "l": [0]}))
    assert load_spec_file(path).label == "my_law"


# ── Subcommands ───────────────────────────────────────────────────


def test_pdf(capsys, specs_dir):
    code, out, _ = _run(capsys, "pdf", str(specs_dir / "fp2.json"), "--grid", "1:5:5")
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["x", "pdf"]
    assert len(frame) == 5
    assert (frame["pdf"] > 0).all()


def test_cumulants_exact(capsys, specs_dir):
    code, out, _ = _run(capsys, "cumulants", str(specs_dir / "fp2.json"), "--n", "5", "--exact")
    assert code == 0
    data = json.loads(out)
    assert data["method"] == "exact"
    assert data["moments"] == ["2", "6", "22", "90", "394"]
    assert data["cumulants"] == ["2"] * 5


def test_cumulants_quadrature_csv(capsys, specs_dir):
    code, out, _ = _run(
        capsys, "cumulants", str(specs_dir / "fgig_1_4_0.json"), "--n", "3", "--output", "csv"
    )
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["n", "moment", "cumulant"]
    assert frame["moment"][0] == pytest.approx(frame["cumulant"][0])


def test_cumulants_exact_unavailable(capsys, specs_dir):
    code, _, err = _run(capsys, "cumulants", str(specs_dir / "fgig_1_4_0.json"), "--n", "3", "--exact")
    assert code == 4
    assert err.startswith("error[exact-unavailable]")


def test_hankel_eta(capsys):
    code, out, err = _run(capsys, "hankel", "--eta", "0.15", "--explain")
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "fail"
    assert data["alpha2"] == 0.15
    assert "NOT freely infinitely divisible" in err


def test_hankel_spec_file(capsys, specs_dir):
    code, out, _ = _run(capsys, "hankel", str(specs_dir / "fp2.json"))
    assert code == 0
    assert json.loads(out)["verdict"] == "inconclusive"


def test_hankel_needs_a_source(capsys):
    code, _, err = _run(capsys, "hankel")
    assert code == 2
    assert "error[domain]" in err


def test_threshold(capsys):
    code, out, _ = _run(capsys, "threshold")
    assert code == 0
    data = json.loads(out)
    assert data["root"] == pytest.approx(0.157781, abs=1e-4)
    assert data["bracket"][0] <= data["root"] <= data["bracket"][1]


@pytest.mark.parametrize("figure", ["fig2", "fig3"])
def test_repro(capsys, figure):
    code, out, _ = _run(capsys, "repro", figure, "--points", "10")
    assert code == 0
    frame = pd.read_csv(io.StringIO(out))
    assert list(frame.columns) == ["alpha2", "det"]
    assert len(frame) == 10


def test_sample_is_seeded(capsys, specs_dir):
    path = str(specs_dir / "fp2.json")
    _, first, _ = _run(capsys, "sample", path, "--count", "20", "--seed", "3")
    _, second, _ = _run(capsys, "sample", path, "--count", "20", "--seed", "3")
    assert first == second
    assert len(pd.read_csv(io.StringIO(first))) == 20


def test_ui_verify_consistent(capsys, specs_dir, tmp_path):
    trace = tmp_path / "trace.csv"
    code, out, _ = _run(
        capsys, "ui-verify", str(specs_dir / "fp2.json"), "--probes", "9", "--trace", str(trace)
    )
    assert code == 0
    data = json.loads(out)
    assert data["verdict"] == "consistent-with-UI"
    assert all(p["winding"] == 1 for p in data["probes"])
    assert list(pd.read_csv(trace).columns) == ["z_re", "z_im", "G_re", "G_im"]


@pytest.mark.parametrize(
    "spec_file,power",
    [
        ("fgig_1_4_0.json", "3"),
        ("shifted_semicircle_3.json", "-1.5"),
        ("truncated_stable_100_4.json", "2"),
    ],
)
def test_ui_verify_powers(capsys, specs_dir, spec_file, power):
    code, out, _ = _run(capsys, "ui-verify", str(specs_dir / spec_file), "--power", power)
    data = json.loads(out)
    assert code == 0, data["assumption_checks"]
    assert data["verdict"] == "consistent-with-UI"
    assert data["in_regime"]


@pytest.mark.parametrize(
    "verdict,expected",
    [(UI_CONSISTENT, 0), (UI_INCONCLUSIVE, 3), (UI_VIOLATION, 5)],
)
def test_ui_verify_exit_code_per_verdict(capsys, monkeypatch, specs_dir, verdict, expected):
    """Only a violation witness exits with 5; an uncertified run exits with 3."""

    def fake_verify(dist, **kwargs):
        report = UIReport(label="fp(2)", r=1.0, epsilon=1e-2, theta=3.14, in_regime=True, delta=0.1, eta=20.0)
        report.probe_points, report.windings = [-0.5j], [0 if verdict == UI_VIOLATION else 1]
        report.verdict = verdict
        if verdict == UI_VIOLATION:
            report.witness = -0.5j
        return report

    monkeypatch.setattr(sys.modules["src.cli.main"], "ui_verify", fake_verify)
    code, out, _ = _run(capsys, "ui-verify", str(specs_dir / "fp2.json"))
    assert code == expected
    assert json.loads(out)["verdict"] == verdict


def test_ui_verify_outside_regime(capsys, specs_dir):
    code, _, err = _run(capsys, "ui-verify", str(specs_dir / "shifted_semicircle_3.json"))
    assert code == 4
    assert err.startswith("error[outside-regime]")


def test_missing_spec_file(capsys):
    code, _, err = _run(capsys, "pdf", "nope.json", "--grid", "0:1:3")
    assert code == 2
    assert err.strip().count("\n") == 0


def test_bad_grid(capsys, specs_dir):
    code, _, _ = _run(capsys, "pdf", str(specs_dir / "fp2.json"), "--grid", "1:5")
    assert code == 2


def test_usage_errors(capsys):
    assert main([]) == 2
    assert main(["unknown"]) == 2
    capsys.readouterr()


def test_bad_threads_flag(capsys):
    code, _, err = _run(capsys, "threshold", "--threads", "many")
    assert code == 2
    assert "--threads" in err
