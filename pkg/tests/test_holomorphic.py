"""Tests for the continuation, Cauchy transforms, contour, winding numbers and the UI verifier."""
import math

import numpy as np
import pytest

from src.core.dist_core import gpfp_pdf, make_power, power_density
from src.holomorphic import build_contour, cauchy_continued, cauchy_upper, continued_density, sector_for, ui_verify
from src.holomorphic.cauchy import plemelj_gap
from src.holomorphic.continuation import boundary_density_below, continued_density_along
from src.holomorphic.contour import large_arc_limit
from src.holomorphic.ui_verifier import _continuity_offsets, contour_trace_frame, log_polar_probes
from src.holomorphic.winding import crossing_number, winding_number
from src.models.analysis_result import UI_CONSISTENT
from src.utils.errors import (
    DecayNotCertifiedError,
    DomainError,
    IllConditionedError,
    OutsideRegimeError,
    ProbeTooCloseError,
)


def _circle(turns=1, samples=400, center=0j, radius=1.0):
    phi = np.linspace(0.0, 2 * math.pi * turns, samples)
    values = center + radius * np.exp(1j * phi)
    values[-1] = values[0]
    return values


# ── Sectors ───────────────────────────────────────────────────────


def test_sectors(fp2, fgig, semicircle, truncated_stable):
    assert sector_for(fp2).theta == pytest.approx(math.pi)
    assert sector_for(make_power(fgig, 2)).theta == pytest.approx(math.pi)
    assert sector_for(make_power(fgig, -1)).theta == pytest.approx(math.pi)
    assert sector_for(truncated_stable).theta == pytest.approx(math.pi)
    inverse = sector_for(make_power(semicircle, -1))
    assert inverse.shift == 1
    assert inverse.theta == pytest.approx(math.pi / 2)
    assert sector_for(make_power(semicircle, -2)).theta == pytest.approx(2 * math.pi / 3)


def test_outside_regime(semicircle):
    with pytest.raises(OutsideRegimeError):
        sector_for(semicircle)
    forced = sector_for(semicircle, force=True)
    assert not forced.in_regime


# ── Continued density ─────────────────────────────────────────────


def test_continuation_matches_density_on_support(fp2, fgig):
    x = np.linspace(fp2.a, fp2.b, 41)[1:-1]
    h = continued_density(fp2, x.astype(complex))
    assert np.allclose(h.real, gpfp_pdf(fp2, x), rtol=1e-13)
    assert np.all(np.abs(h.imag) <= 1e-14)

    dist = make_power(fgig, -2)
    y = np.linspace(dist.A, dist.B, 23)[1:-1]
    assert np.allclose(continued_density(dist, y.astype(complex)).real, power_density(dist, y), rtol=1e-12)


def test_boundary_values_below(fp2):
    """h(x - i0) is purely imaginary, negative imaginary part left of the support, positive right."""
    left = boundary_density_below(fp2, np.array([0.02, 0.1, 0.17]))
    right = boundary_density_below(fp2, np.array([6.0, 10.0, 100.0]))
    assert np.all(left.real == 0) and np.all(left.imag < 0)
    assert np.all(right.real == 0) and np.all(right.imag > 0)
    with pytest.raises(DomainError):
        boundary_density_below(fp2, 1.0)


def test_raw_continuation_is_imaginary_off_support(fgig):
    dist = make_power(fgig, 2)
    x = np.concatenate([np.linspace(0.05, 0.95, 10), np.linspace(17.0, 60.0, 10)]).astype(complex)
    h = continued_density(dist, x)
    assert np.all(np.abs(h.real) <= 1e-12 * np.maximum(1.0, np.abs(h)))


def test_continuation_domain(fp2):
    with pytest.raises(DomainError):
        continued_density(fp2, 1 + 1j)
    with pytest.raises(DomainError):
        continued_density(fp2, 0j)


@pytest.mark.parametrize("r", [1, 2])
def test_path_continuation_agrees(fgig, r):
    """Tracking the square root along a lower arc reproduces the closed-form branch."""
    dist = make_power(fgig, r)
    radius = 0.5 * (dist.A + dist.B)
    path = radius * np.exp(1j * np.linspace(-0.05, -math.pi + 0.05, 400))
    tracked = continued_density_along(dist, path)
    assert tracked.shape == path.shape
    assert np.allclose(tracked, continued_density(dist, path), rtol=1e-10, atol=1e-14)


# ── Cauchy transforms ─────────────────────────────────────────────


def test_semicircle_closed_form(semicircle):
    """S(3, 1) at 3 + 2i: G = (w - sqrt(w^2 - 4))/2 with w = 2i, i.e. -(sqrt(2) - 1) i."""
    g = cauchy_upper(semicircle, 3 + 2j)
    assert g == pytest.approx(-(math.sqrt(2) - 1) * 1j, abs=1e-9)


def test_cauchy_decay(fp2):
    z = 1e4j
    assert abs(z * cauchy_upper(fp2, z) - 1) <= 1e-3
    assert cauchy_upper(fp2, 1j).imag < 0


def test_cauchy_upper_domain(fp2):
    with pytest.raises(DomainError):
        cauchy_upper(fp2, 2 - 1j)
    with pytest.raises(IllConditionedError):
        cauchy_upper(fp2, 2 + 0j)


def test_continued_transform_sector(semicircle):
    dist = make_power(semicircle, -1)
    value = cauchy_continued(dist, 0.6 - 0.1j)
    assert np.isfinite(value)
    with pytest.raises(DomainError):
        cauchy_continued(dist, -1 - 1j)


@pytest.mark.parametrize("x", [1.0, 2.0, 3.0, 4.0])
def test_plemelj_gap(fp2, x):
    """Limits onto the support from both sheets agree."""
    assert plemelj_gap(fp2, x) <= 1e-6


def test_plemelj_gap_domain(fp2):
    with pytest.raises(DomainError):
        plemelj_gap(fp2, 8.0)


# ── Contour ───────────────────────────────────────────────────────


def test_contour_is_closed(fp2):
    contour = build_contour(fp2, 1e-2)
    assert [seg.name for seg in contour.segments] == [f"c{k}" for k in range(1, 9)]
    assert contour.closure_gap() <= 1e-12
    assert 0 < contour.delta < fp2.a
    assert contour.eta >= 4 * fp2.b


def test_large_arc_limit(fp2, fgig):
    assert large_arc_limit(make_power(fp2, 1)) == pytest.approx(1.0)
    assert large_arc_limit(make_power(fgig, 2)) == 0.0


def test_contour_arguments(fp2):
    with pytest.raises(DomainError):
        build_contour(fp2, 1.5)
    with pytest.raises(DomainError):
        build_contour(fp2, 1e-2, samples=2)


def test_bounded_density_has_no_small_arc(semicircle):
    with pytest.raises(DecayNotCertifiedError):
        build_contour(semicircle, 1e-2, force=True)


# ── Winding numbers ───────────────────────────────────────────────


def test_unit_circle_winding():
    circle = _circle()
    assert winding_number(circle, 0j) == 1
    assert winding_number(circle, 3 + 0j) == 0
    assert crossing_number(circle, 0j) == 1
    assert crossing_number(circle, 3 + 0j) == 0


def test_double_and_reversed_circles():
    assert winding_number(_circle(turns=2, samples=800), 0.2j) == 2
    assert winding_number(_circle()[::-1], -0.3 + 0j) == -1
    assert crossing_number(_circle(turns=2, samples=800), 0.2j) == 2


def test_coarse_curve_is_refined():
    """Four samples of the unit circle turn by pi/2 per step; refinement fixes the count."""
    coarse = np.exp(1j * np.linspace(0.0, 2 * math.pi, 5))
    coarse[-1] = coarse[0]

    def refine(values, steps):
        mids = 0.5 * (values[steps] + values[steps + 1])
        return mids / np.abs(mids)

    assert winding_number(coarse, 0j, refine=refine) == 1


def test_winding_errors():
    circle = _circle()
    with pytest.raises(ProbeTooCloseError):
        winding_number(circle, complex(circle[10]))
    with pytest.raises(DomainError):
        winding_number(circle[:-50], 0j)


# ── UI verifier ───────────────────────────────────────────────────


def test_probe_grid():
    probes = log_polar_probes(1e-2, 100)
    assert len(probes) == 100
    assert all(w.imag < 0 and 1e-2 < abs(w) < 1e2 for w in probes)
    with pytest.raises(DomainError):
        log_polar_probes(0.7)


UI_CASES = [
    ("fp2", 1),
    ("fgig", 1),
    ("fgig", 2),
    ("fgig", 3),
    ("fgig", -1),
    ("semicircle", -1),
    ("semicircle", -1.5),
    ("semicircle", -2),
    ("truncated_stable", 1),
    ("truncated_stable", 2),
]


@pytest.mark.parametrize("name,r", UI_CASES)
def test_ui_windings_are_one(request, name, r):
    """Every probe of a 100-point grid in D_0.01 has winding exactly 1 and every check passes."""
    dist = make_power(request.getfixturevalue(name), r)
    report = ui_verify(dist, epsilon=1e-2, probes=100)
    assert report.in_regime
    assert len(report.windings) == 100, report.notes
    assert all(k == 1 for k in report.windings)
    assert report.check("A2").residual <= 1e-12
    assert report.check("A4").residual <= 1e-10
    assert report.check("A6").passed, report.check("A6").detail
    assert report.verdict == UI_CONSISTENT, [c.to_dict() for c in report.assumption_checks]


def test_continuity_offsets_shrink_near_the_origin(truncated_stable):
    """Offsets stay a small fraction of the distance to 0 on the segment between delta and A."""
    power = make_power(truncated_stable, 2)
    x = np.array([0.01, 0.03, 0.5 * (power.A + power.B), 2.0 * power.B])
    offsets = _continuity_offsets(power, x)
    assert np.all(offsets > 0)
    assert np.all(offsets <= 1e-7 * (power.B - power.A))
    assert offsets[0] <= 1e-4 * 0.01
    assert offsets[1] <= 1e-4 * 0.03


@pytest.mark.parametrize("name,r", [("fgig", 2), ("semicircle", -1)])
def test_ui_verdict_independent_of_grid_size(request, name, r):
    """Doubling the grid of test points keeps the verdict and the winding numbers."""
    dist = make_power(request.getfixturevalue(name), r)
    coarse = ui_verify(dist, epsilon=1e-2, probes=50)
    fine = ui_verify(dist, epsilon=1e-2, probes=100)
    assert coarse.verdict == fine.verdict == UI_CONSISTENT
    assert set(coarse.windings) == set(fine.windings) == {1}


def test_ui_report_for_free_poisson(fp2):
    report = ui_verify(fp2, probes=16, threads=2, keep_trace=True)
    assert report.verdict == UI_CONSISTENT
    assert report.witness is None
    assert {c.name for c in report.assumption_checks} == {"A2", "A3", "A4", "A5", "A6"}
    frame = contour_trace_frame(report)
    assert list(frame.columns) == ["z_re", "z_im", "G_re", "G_im"]
    assert len(frame) == len(report.trace)
    data = report.to_dict()
    assert data["verdict"] == "consistent-with-UI"
    assert len(data["probes"]) == 16


def test_ui_rejects_probes_outside_annulus(fp2):
    with pytest.raises(DomainError):
        ui_verify(fp2, probe_grid=[0.5 + 0.5j])


def test_ui_outside_regime(semicircle):
    with pytest.raises(OutsideRegimeError):
        ui_verify(semicircle)
