"""
Argument-principle check of univalence of the continued Cauchy transform.

G is traced once along the contour c1..c8, the trace is refined until no step
turns by pi/2 or more around any probe, and every probe in
D_eps = {w : Im w < 0, eps < |w| < 1/eps} must be wound around exactly once.
"""

from __future__ import annotations

import logging
import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from src.holomorphic.cauchy import TWO_PI_I, cauchy_tilde, richardson_limit
from src.holomorphic.contour import (
    CONTINUED,
    Contour,
    build_contour,
    evaluate_sheet,
    small_z_constants,
)
from src.holomorphic.continuation import Distribution, as_power, continued_density
from src.holomorphic.winding import STEP_LIMIT, crossing_number, winding_number
from src.models.analysis_result import (
    UI_CONSISTENT,
    UI_INCONCLUSIVE,
    UI_VIOLATION,
    AssumptionCheck,
    UIReport,
)
from src.models.distribution import PowerSpec
from src.models.sequences import QuadratureRule
from src.utils.errors import DomainError, ProbeTooCloseError, ToleranceNotMetError
from src.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

REFINE_ROUNDS = 12
MAX_TRACE_POINTS = 200_000
MIN_PARAM_STEP = 1e-13

BOUNDARY_RE_TOL = 1e-12
RAY_RE_TOL = 1e-10
SMALL_Z_TOL = 0.5
ARC_SLACK = 1e-2
CONTINUITY_OFFSET = 1e-7
CONTINUITY_FRACTION = 1e-4
CONTINUITY_TOL = 1e-6

Node = Tuple[int, float]


def log_polar_probes(epsilon: float, count: int = 100) -> List[complex]:
    """
    Probes in D_eps: radii geometric in [2 eps, 1/(2 eps)], angles
    -pi (j + 1/2) / n_angles.
    """
    if not 0.0 < epsilon < 0.5:
        raise DomainError(f"epsilon must lie in (0, 1/2) for a probe grid, got {epsilon}")
    if count < 1:
        raise DomainError("need at least one probe")
    n_r = math.ceil(math.sqrt(count))
    n_a = math.ceil(count / n_r)
    radii = np.geomspace(2.0 * epsilon, 0.5 / epsilon, n_r)
    angles = -math.pi * (np.arange(n_a) + 0.5) / n_a
    grid = [complex(r * math.cos(a), r * math.sin(a)) for r in radii for a in angles]
    return grid[:count]


def _check_probes(probes: Sequence[complex], epsilon: float) -> List[complex]:
    out = []
    for w in probes:
        w = complex(w)
        if not (w.imag < 0 and epsilon < abs(w) < 1.0 / epsilon):
            raise DomainError(f"probe {w} is not in D_eps for eps = {epsilon:g}")
        out.append(w)
    if not out:
        raise DomainError("empty probe grid")
    return out


# ── Trace ─────────────────────────────────────────────────────────


class _Trace:
    """Sampled image of the contour; the last node repeats the first."""

    def __init__(self, contour: Contour, dist: Distribution, rule: Optional[QuadratureRule]):
        self.contour = contour
        self.dist = dist
        self.rule = rule
        self.max_error = 0.0
        n = contour.samples_per_segment
        self.nodes: List[Node] = [(k, j / n) for k in range(len(contour.segments)) for j in range(n)]
        self.values = self._evaluate(self.nodes)
        self.nodes.append((0, 0.0))
        self.values = np.append(self.values, self.values[0])

    def _evaluate(self, nodes: Sequence[Node]) -> np.ndarray:
        z = self.contour.points(nodes)
        side = np.array([self.contour.segments[k].side for k, _ in nodes])
        values, err = evaluate_sheet(self.dist, z, side, self.rule)
        self.max_error = max(self.max_error, err)
        return values

    def z(self) -> np.ndarray:
        return self.contour.points(self.nodes)

    def _midpoint(self, i: int) -> Tuple[Node, float]:
        (k1, t1), (k2, t2) = self.nodes[i], self.nodes[i + 1]
        end = t2 if k1 == k2 else 1.0
        return (k1, 0.5 * (t1 + end)), end - t1

    def _wide_steps(self, probes: np.ndarray) -> np.ndarray:
        turns = np.angle((self.values[None, 1:] - probes[:, None]) / (self.values[None, :-1] - probes[:, None]))
        return np.nonzero(np.any(np.abs(turns) >= STEP_LIMIT, axis=0))[0]

    def refine(self, probes: np.ndarray, rounds: int = REFINE_ROUNDS) -> int:
        """Bisect every step that turns by pi/2 or more around some probe; returns steps left."""
        for round_no in range(rounds):
            steps = self._wide_steps(probes)
            mids = [self._midpoint(int(i)) for i in steps]
            keep = [(int(i), node) for i, (node, width) in zip(steps, mids) if width > MIN_PARAM_STEP]
            if not keep or len(self.nodes) + len(keep) > MAX_TRACE_POINTS:
                return len(steps)
            logger.debug("trace refinement round %d: %d step(s)", round_no + 1, len(keep))
            new_values = self._evaluate([node for _, node in keep])
            inserted = dict(keep)
            nodes: List[Node] = []
            for i, node in enumerate(self.nodes):
                nodes.append(node)
                if i in inserted:
                    nodes.append(inserted[i])
            self.nodes = nodes
            self.values = np.insert(self.values, np.array([i for i, _ in keep]) + 1, new_values)
        return len(self._wide_steps(probes))

    def segment_values(self, k: int) -> np.ndarray:
        mask = np.array([s == k for s, _ in self.nodes])
        return self.values[mask]


# ── Assumption checks ─────────────────────────────────────────────


def _boundary_check(power: PowerSpec, eta: float) -> AssumptionCheck:
    frac = np.arange(1, 51) / 51.0
    x = np.concatenate([power.A * frac, power.B + (eta - power.B) * frac])
    h = np.asarray(continued_density(power, x.astype(complex)))
    residual = float(np.max(np.abs(h.real)))
    return AssumptionCheck(
        "A2", residual, BOUNDARY_RE_TOL, residual <= BOUNDARY_RE_TOL,
        "max |Re h(x - i0)| off the support",
    )


def _small_z_residual(power: PowerSpec, theta: float, radius: float) -> float:
    alpha, l = small_z_constants(power)
    z = radius * complex(math.cos(-0.5 * theta), math.sin(-0.5 * theta))
    h = complex(continued_density(power, z))
    scaled = h * np.exp((1.0 + l) * np.log(z)) / (-1j * alpha)
    return float(abs(scaled - 1.0))


def _small_z_check(power: PowerSpec, theta: float, delta: float) -> AssumptionCheck:
    near, nearer = _small_z_residual(power, theta, delta), _small_z_residual(power, theta, 1e-2 * delta)
    passed = near < SMALL_Z_TOL and (nearer < near or near < 1e-6)
    return AssumptionCheck(
        "A3", near, SMALL_Z_TOL, passed,
        f"|h z^(1+l) / (-i alpha) - 1| = {near:.3g} at delta, {nearer:.3g} at delta/100",
    )


def _ray_check(power: PowerSpec, theta: float, delta: float, eta: float) -> AssumptionCheck:
    u = np.geomspace(delta, eta, 100)
    h = np.asarray(continued_density(power, u * complex(math.cos(-theta), math.sin(-theta))))
    residual = max(0.0, float(np.max(h.real / np.maximum(1.0, np.abs(h)))))
    return AssumptionCheck(
        "A4", residual, RAY_RE_TOL, residual <= RAY_RE_TOL,
        "max Re h(u e^(-i theta)) / max(1, |h|)",
    )


def _arc_check(trace: _Trace, contour: Contour, epsilon: float) -> AssumptionCheck:
    lower = float(np.max(np.abs(trace.segment_values(4) - contour.g_inf)))
    upper = float(np.max(np.abs(trace.segment_values(7))))
    residual = max(lower, upper)
    threshold = epsilon * (1.0 + ARC_SLACK)
    return AssumptionCheck(
        "A5", residual, threshold, residual <= threshold,
        f"large arcs: |G - {contour.g_inf:.6g}| on c5 {lower:.3g}, |G| on c8 {upper:.3g}",
    )


def _continuity_offsets(power: PowerSpec, x: np.ndarray) -> np.ndarray:
    """Offset per point, capped by a fixed share of B - A and of the distance to 0, A and B."""
    gap = np.min(np.abs(x[:, None] - np.array([0.0, power.A, power.B])[None, :]), axis=1)
    return np.minimum(CONTINUITY_OFFSET * (power.B - power.A), CONTINUITY_FRACTION * gap)


def _continuity_check(power: PowerSpec, contour: Contour, rule) -> AssumptionCheck:
    x, side = [], []
    for seg in (contour.segments[i] for i in (0, 1, 5, 6)):
        for t in (0.25, 0.5, 0.75):
            x.append(complex(seg.point(t)).real)
            side.append(seg.side)
    x, side = np.array(x), np.array(side)
    offsets = _continuity_offsets(power, x)

    def sheet(scale: float) -> np.ndarray:
        z = x + 1j * side * offsets * scale
        values = np.asarray(cauchy_tilde(power, z, rule, strict=False), dtype=complex)
        lower = side == CONTINUED
        values[lower] -= TWO_PI_I * np.asarray(continued_density(power, z[lower]))
        return values

    limit = richardson_limit(sheet(1.0), sheet(0.5), sheet(0.25))
    on_axis, _ = evaluate_sheet(power, x.astype(complex), side, rule)
    residual = float(np.max(np.abs(limit - on_axis) / np.maximum(1.0, np.abs(on_axis))))
    return AssumptionCheck(
        "A6", residual, CONTINUITY_TOL, residual <= CONTINUITY_TOL,
        f"three-point limit at offsets {offsets.min():.3g}..{offsets.max():.3g} vs on-axis values",
    )


# ── Verifier ──────────────────────────────────────────────────────


def _wind(values: np.ndarray):
    def one(w: complex):
        try:
            k = winding_number(values, w)
        except (ProbeTooCloseError, ToleranceNotMetError) as exc:
            return w, None, exc
        return w, k, crossing_number(values, w)

    return one


def ui_verify(
    dist: Distribution,
    epsilon: float = 1e-2,
    probe_grid: Optional[Sequence[complex]] = None,
    probes: int = 100,
    threads: int = 1,
    force: bool = False,
    rule: Optional[QuadratureRule] = None,
    samples: int = 200,
    keep_trace: bool = False,
) -> UIReport:
    """
    Verify the UI property numerically.

    Args:
        dist: GPFP spec (taken as r = 1) or power law
        epsilon: size of the probe annulus D_eps
        probe_grid: explicit probes; defaults to :func:`log_polar_probes`
        probes: probe count for the default grid
        threads: workers for the per-probe winding sums
        force: run outside the proven regime (the report is labelled)
        keep_trace: store (z, G) along the refined contour

    Returns:
        UIReport; "consistent-with-UI" needs every winding equal to 1 and every
        assumption check passing, a winding other than 1 is a violation witness

    Raises:
        OutsideRegimeError: out of regime without ``force``
        DecayNotCertifiedError: the delta or eta search failed
    """
    power = as_power(dist)
    grid = _check_probes(probe_grid if probe_grid is not None else log_polar_probes(epsilon, probes), epsilon)
    contour = build_contour(power, epsilon, samples, rule, force)
    sector = contour.sector

    trace = _Trace(contour, power, rule)
    unresolved = trace.refine(np.array(grid))
    logger.info("trace of %s has %d points", power.label, len(trace.nodes))

    report = UIReport(
        label=power.label, r=power.r, epsilon=epsilon, theta=sector.theta,
        in_regime=sector.in_regime, delta=contour.delta, eta=contour.eta,
    )
    if not sector.in_regime:
        report.notes.append("outside the proven regime; run forced")
    if unresolved:
        report.notes.append(f"{unresolved} step(s) still turn by pi/2 or more after refinement")

    numerics_ok = not unresolved
    for w, k, extra in ordered_map(_wind(trace.values), grid, threads):
        if k is None:
            report.notes.append(f"probe {w:.6g} excluded: {extra}")
            numerics_ok = numerics_ok and isinstance(extra, ProbeTooCloseError)
            continue
        if extra != k:
            report.notes.append(f"probe {w:.6g}: arg sum gives {k}, ray crossings give {extra}")
            numerics_ok = False
        report.probe_points.append(w)
        report.windings.append(k)

    report.assumption_checks = [
        _boundary_check(power, contour.eta),
        _small_z_check(power, sector.theta, contour.delta),
        _ray_check(power, sector.theta, contour.delta, contour.eta),
        _arc_check(trace, contour, epsilon),
        _continuity_check(power, contour, rule),
    ]
    report.max_quadrature_error = trace.max_error
    if keep_trace:
        report.trace = list(zip(trace.z().tolist(), trace.values.tolist()))

    bad = [w for w, k in zip(report.probe_points, report.windings) if k != 1]
    if bad:
        report.verdict, report.witness = UI_VIOLATION, bad[0]
    elif report.windings and numerics_ok and report.all_checks_passed:
        report.verdict = UI_CONSISTENT
    else:
        report.verdict = UI_INCONCLUSIVE
        if not report.windings:
            report.notes.append("no probe could be evaluated")
    logger.info("%s: %s over %d probe(s)", power.label, report.verdict, len(report.windings))
    return report


def contour_trace_frame(report: UIReport) -> pd.DataFrame:
    """Trace of a report run with ``keep_trace`` as columns z_re, z_im, G_re, G_im."""
    if not report.trace:
        raise DomainError("report carries no trace; run ui_verify with keep_trace=True")
    z = np.array([p for p, _ in report.trace], dtype=complex)
    g = np.array([v for _, v in report.trace], dtype=complex)
    return pd.DataFrame({"z_re": z.real, "z_im": z.imag, "G_re": g.real, "G_im": g.imag})
