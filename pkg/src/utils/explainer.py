"""Functions to generate human-readable summaries of reports."""

from typing import List

from src.models.analysis_result import (
    UI_CONSISTENT,
    UI_VIOLATION,
    FIDReport,
    ThresholdResult,
    UIReport,
)


def explain_fid(report: FIDReport) -> str:
    """Generate a human-readable explanation of a Hankel test outcome."""
    explanation = f"Hankel test for {report.measure}"
    if report.alpha2 is not None:
        explanation += f" (alpha2 = {report.alpha2})"
    explanation += ":\n"

    if report.failed:
        explanation += f"  - The order-{report.order} Hankel determinant is negative ({report.det}).\n"
        explanation += "  - The shifted free cumulants are not a positive semidefinite sequence,\n"
        explanation += "    so the law is NOT freely infinitely divisible.\n"
    else:
        explanation += f"  - Determinants up to order {report.order} are non-negative (last: {report.det}).\n"
        explanation += "  - This is a necessary condition only; the test is inconclusive.\n"

    for note in report.notes:
        explanation += f"  - Note: {note}\n"
    return explanation


def explain_threshold(result: ThresholdResult) -> str:
    """Generate explanation for the eta threshold."""
    lo, hi = result.bracket
    explanation = f"The order-2 Hankel determinant of eta changes sign at alpha2 = {result.root:.9f}\n"
    explanation += f"  - Certified bracket: [{lo:.12f}, {hi:.12f}] (tol {result.tol:g})\n"
    explanation += f"  - Determinant polynomial of degree {result.degree}\n"
    explanation += "  - Below the root the eta law fails the Hankel test.\n"
    return explanation


def explain_ui(report: UIReport) -> str:
    """Generate explanation for an argument-principle run."""
    if report.verdict == UI_CONSISTENT:
        assessment = "consistent with a univalent inverse Cauchy transform"
    elif report.verdict == UI_VIOLATION:
        assessment = f"NOT univalent: probe {report.witness} has winding != 1"
    else:
        assessment = "inconclusive"

    explanation = f"UI check for {report.label}: {assessment}.\n\n"
    explanation += "Contour:\n"
    explanation += f"  - theta = {report.theta:.6g}, delta = {report.delta:.3g}, eta = {report.eta:.3g}\n"
    if not report.in_regime:
        explanation += "  - Outside the proven regime (forced run)\n"

    windings = sorted(set(report.windings))
    explanation += f"\nProbes: {len(report.windings)} evaluated, windings seen: {windings}\n"

    explanation += "\nAssumption checks:\n"
    for check in report.assumption_checks:
        mark = "ok" if check.passed else "FAILED"
        explanation += f"  - {check.name}: {mark} (residual {check.residual:.3g}, limit {check.threshold:.3g})\n"

    if report.notes:
        explanation += "\nNotes:\n"
        for note in report.notes[:10]:
            explanation += f"  - {note}\n"
    return explanation


def explain_sweep(kind: str, rows: List[dict]) -> str:
    """Generate a one-paragraph summary of a determinant sweep."""
    negative = [r for r in rows if r["det"] < 0]
    explanation = f"Sweep of det(alpha2) for {kind} over {len(rows)} points:\n"
    explanation += f"  - {len(negative)} negative, {len(rows) - len(negative)} non-negative\n"
    if negative and len(negative) < len(rows):
        explanation += f"  - First negative at alpha2 = {negative[0]['alpha2']:.6f}\n"
    return explanation
