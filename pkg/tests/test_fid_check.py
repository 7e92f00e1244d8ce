"""Tests for the free infinite divisibility checks."""
from fractions import Fraction

import pytest

from src.core import fid_check
from src.core.dist_core import eta_measure, make_power
from src.models.analysis_result import VERDICT_FAIL, VERDICT_INCONCLUSIVE
from src.models.sequences import CumulantSeq
from src.utils.errors import DomainError, ExactPathUnavailable

RATIONALS = [Fraction(k, 42) for k in range(1, 21)]


# ── Closed forms against the exact pipeline ──────────────────────


@pytest.mark.parametrize("alpha2", RATIONALS)
def test_eta_closed_form_matches_pipeline(alpha2):
    closed = fid_check.cumulants_eta(alpha2)
    pipeline = fid_check.pipeline_cumulants(eta_measure(alpha2), 4)
    assert pipeline.exact
    assert [closed.order(m) for m in (2, 3, 4)] == [pipeline.order(m) for m in (2, 3, 4)]


@pytest.mark.parametrize("alpha2", RATIONALS)
def test_sigma_inverse_closed_form_matches_pipeline(alpha2):
    closed = fid_check.cumulants_sigma_inverse(alpha2)
    pipeline = fid_check.pipeline_cumulants(fid_check.sigma_inverse_measure(alpha2), 4)
    assert [closed.order(m) for m in (2, 3, 4)] == [pipeline.order(m) for m in (2, 3, 4)]


def test_closed_form_types():
    assert fid_check.cumulants_eta(Fraction(1, 5)).exact
    assert not fid_check.cumulants_eta(0.2).exact
    assert list(fid_check.cumulants_eta(0.2).values) == pytest.approx(
        [float(v) for v in fid_check.cumulants_eta(Fraction(1, 5)).values]
    )


def test_closed_form_range():
    with pytest.raises(DomainError):
        fid_check.cumulants_eta(Fraction(1, 2))
    with pytest.raises(DomainError):
        fid_check.cumulants_sigma_inverse(0)


def test_quadrature_pipeline_agrees():
    assert fid_check.threshold_quadrature_check(0.3) < 1e-6


def test_threshold_from_quadrature_moments_matches_exact_root():
    """The eta root recomputed from float-path cumulants agrees with the exact bisection."""
    exact_root = fid_check.eta_threshold().root
    float_root = fid_check.eta_threshold_quadrature()
    assert abs(float_root - exact_root) <= 1e-6
    assert float_root == pytest.approx(0.157781, abs=1e-4)


def test_exact_pipeline_needs_exact_form(fgig):
    with pytest.raises(ExactPathUnavailable):
        fid_check.pipeline_cumulants(fgig, 4)
    with pytest.raises(ExactPathUnavailable):
        fid_check.pipeline_cumulants(make_power(fgig, 2), 4)
    assert fid_check.pipeline_cumulants(fgig, 4, exact=False).provenance == "quadrature-moments"


# ── Hankel witnesses ──────────────────────────────────────────────


def test_hankel_matrix_layout():
    kappas = CumulantSeq((1, 2, 3, 4, 5), start=2)
    witness = fid_check.hankel_witness(kappas, 2)
    assert witness.matrix == ((1, 2), (2, 3))
    assert witness.det == -1
    assert witness.exact


def test_hankel_needs_enough_cumulants():
    with pytest.raises(DomainError):
        fid_check.hankel_witness(CumulantSeq((1, 2), start=2), 2)
    with pytest.raises(DomainError):
        fid_check.hankel_witness(CumulantSeq((1, 2, 3), start=2), 0)


def test_float_determinant_near_zero_is_not_negative():
    kappas = CumulantSeq((1.0, 1e-14, 1e-14), start=2)
    assert not fid_check.is_negative(fid_check.hankel_witness(kappas, 2))


def test_eta_fails_below_threshold():
    report = fid_check.fid_necessary(eta_measure(Fraction(3, 20)))
    assert report.verdict == VERDICT_FAIL
    assert report.order == 2
    assert report.det < 0


def test_sigma_inverse_fails():
    report = fid_check.fid_necessary(fid_check.cumulants_sigma_inverse(Fraction(1, 5)), measure="sigma-inverse")
    assert report.failed
    assert report.measure == "sigma-inverse"


def test_free_poisson_is_inconclusive(fp2):
    report = fid_check.fid_necessary(fp2)
    assert report.verdict == VERDICT_INCONCLUSIVE
    assert report.det == 0


def test_semicircle_is_inconclusive(semicircle):
    closed = fid_check.fid_necessary(CumulantSeq((1, 0, 0), start=2, provenance="semicircle"))
    assert closed.verdict == VERDICT_INCONCLUSIVE
    kappas = fid_check.pipeline_cumulants(semicircle, 4, exact=False)
    assert kappas.order(1) == pytest.approx(3.0, abs=1e-9)
    assert kappas.order(2) == pytest.approx(1.0, abs=1e-9)
    assert kappas.order(3) == pytest.approx(0.0, abs=1e-8)
    assert kappas.order(4) == pytest.approx(0.0, abs=1e-8)


def test_report_json_fields():
    report = fid_check.fid_necessary(fid_check.cumulants_eta(Fraction(3, 20)), measure="eta")
    data = report.to_dict()
    assert set(data) == {"measure", "alpha2", "order", "det", "verdict"}
    assert data["verdict"] == "fail"


# ── Threshold and sweeps ──────────────────────────────────────────


def test_eta_threshold():
    result = fid_check.eta_threshold()
    assert 0.1577 <= result.root <= 0.1579
    assert result.root == pytest.approx(0.157781, abs=1e-6)
    lo, hi = result.bracket
    assert 0 < hi - lo <= 2e-9
    assert result.degree == 6


def test_threshold_separates_verdicts():
    root = fid_check.eta_threshold().root
    below = fid_check.fid_necessary(fid_check.cumulants_eta(root - 1e-3))
    above = fid_check.fid_necessary(fid_check.cumulants_eta(root + 1e-3))
    assert below.failed
    assert not above.failed


def test_sigma_inverse_sweep_is_negative():
    rows = fid_check.sweep("sigma-inverse", 50)
    assert len(rows) == 50
    assert all(0 < r["alpha2"] < 0.5 for r in rows)
    assert all(r["det"] < 0 for r in rows)


def test_eta_sweep_changes_sign_once():
    rows = fid_check.sweep("eta", 200)
    signs = [r["det"] < 0 for r in rows]
    flips = [i for i in range(1, len(signs)) if signs[i] != signs[i - 1]]
    assert len(flips) == 1
    assert rows[flips[0] - 1]["alpha2"] < 0.1578 < rows[flips[0]]["alpha2"]
    assert rows[-1]["det"] > 0


def test_unknown_sweep_kind():
    with pytest.raises(DomainError):
        fid_check.sweep("beta", 10)
