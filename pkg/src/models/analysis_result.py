"""Analysis result data models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from src.models.sequences import jsonable

VERDICT_FAIL = "fail"
VERDICT_INCONCLUSIVE = "inconclusive"

UI_CONSISTENT = "consistent-with-UI"
UI_VIOLATION = "violation-witness"
UI_INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class HankelWitness:
    """Hankel matrix of shifted cumulants with its determinant."""
    order: int
    matrix: Tuple[Tuple[Any, ...], ...]  # (i, j) -> kappa_{i+j+2}
    det: Any
    exact: bool

    def to_dict(self) -> Dict:
        return {
            "order": self.order,
            "matrix": [[jsonable(v) for v in row] for row in self.matrix],
            "det": jsonable(self.det),
            "exact": self.exact,
        }


@dataclass
class FIDReport:
    """Outcome of the necessary free infinite divisibility test."""
    measure: str
    order: int
    det: Any
    verdict: str  # "fail" or "inconclusive", never "FID"
    alpha2: Optional[Any] = None
    witness: Optional[HankelWitness] = None
    notes: List[str] = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return self.verdict == VERDICT_FAIL

    def to_dict(self) -> Dict:
        """Convert report to dictionary for JSON serialization."""
        return {
            "measure": self.measure,
            "alpha2": None if self.alpha2 is None else jsonable(self.alpha2),
            "order": self.order,
            "det": jsonable(self.det),
            "verdict": self.verdict,
        }


@dataclass(frozen=True)
class ThresholdResult:
    """Sign-change root of the eta Hankel polynomial."""
    root: float
    bracket: Tuple[float, float]
    tol: float
    degree: int
    coefficients: Tuple[Any, ...]  # ascending powers of alpha2

    def to_dict(self) -> Dict:
        return {
            "root": self.root,
            "bracket": list(self.bracket),
            "tol": self.tol,
            "degree": self.degree,
            "coefficients": [jsonable(c) for c in self.coefficients],
        }


@dataclass(frozen=True)
class AssumptionCheck:
    """Numerical check of one analytic assumption on the continued density."""
    name: str
    residual: float
    threshold: float
    passed: bool
    detail: str = ""

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "residual": self.residual,
            "threshold": self.threshold,
            "passed": self.passed,
            "detail": self.detail,
        }


@dataclass
class UIReport:
    """Result of the argument-principle verification of univalence."""

    label: str
    r: float
    epsilon: float
    theta: float
    in_regime: bool
    delta: float
    eta: float
    probe_points: List[complex] = field(default_factory=list)
    windings: List[int] = field(default_factory=list)
    assumption_checks: List[AssumptionCheck] = field(default_factory=list)
    verdict: str = UI_INCONCLUSIVE
    witness: Optional[complex] = None
    notes: List[str] = field(default_factory=list)
    max_quadrature_error: float = 0.0
    trace: List[Tuple[complex, complex]] = field(default_factory=list)

    @property
    def all_checks_passed(self) -> bool:
        return all(check.passed for check in self.assumption_checks)

    def check(self, name: str) -> Optional[AssumptionCheck]:
        """Get an assumption check by name."""
        for item in self.assumption_checks:
            if item.name == name:
                return item
        return None

    def to_dict(self) -> Dict:
        """Convert report to dictionary for JSON serialization."""
        return {
            "label": self.label,
            "r": self.r,
            "epsilon": self.epsilon,
            "theta": self.theta,
            "in_regime": self.in_regime,
            "delta": self.delta,
            "eta": self.eta,
            "verdict": self.verdict,
            "witness": None if self.witness is None else jsonable(self.witness),
            "probes": [
                {"w": jsonable(w), "winding": k}
                for w, k in zip(self.probe_points, self.windings)
            ],
            "assumption_checks": [c.to_dict() for c in self.assumption_checks],
            "max_quadrature_error": self.max_quadrature_error,
            "notes": list(self.notes),
        }
