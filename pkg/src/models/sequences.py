"""Sequence and quadrature value models."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

from src.utils.errors import DomainError
from src.utils.numbers import is_exact

QUADRATURE_KINDS = ("cosine", "adaptive")
MOMENT_METHODS = ("exact-closed-form", "quadrature")


def jsonable(value: Any) -> Any:
    """Render exact, float and complex scalars for JSON."""
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    if is_exact(value):
        return str(value)
    try:
        return float(value)
    except (TypeError, ValueError):
        return str(value)


@dataclass(frozen=True)
class CumulantSeq:
    """
    Free cumulants kappa_start, kappa_start+1, ...

    ``exact`` is True when every value is an int or a Fraction.
    """

    values: Tuple[Any, ...]
    start: int = 1
    provenance: str = "pipeline"

    @property
    def exact(self) -> bool:
        return all(is_exact(v) for v in self.values)

    @property
    def stop(self) -> int:
        """Largest order held."""
        return self.start + len(self.values) - 1

    def order(self, n: int) -> Any:
        """Cumulant of order ``n``."""
        if not self.start <= n <= self.stop:
            raise DomainError(f"cumulant order {n} not in [{self.start}, {self.stop}]")
        return self.values[n - self.start]

    def shifted(self, start: int) -> "CumulantSeq":
        """Drop the orders below ``start``."""
        if start < self.start:
            raise DomainError(f"sequence starts at order {self.start}")
        return CumulantSeq(self.values[start - self.start:], start, self.provenance)

    def to_dict(self) -> Dict:
        return {
            "start": self.start,
            "exact": self.exact,
            "provenance": self.provenance,
            "values": [jsonable(v) for v in self.values],
        }

    def to_rows(self) -> List[Dict]:
        return [
            {"order": self.start + i, "value": jsonable(v), "exact": is_exact(v)}
            for i, v in enumerate(self.values)
        ]


@dataclass(frozen=True)
class MomentValue:
    """A single moment with its provenance."""

    order: Any
    value: Any
    method: str
    err_bound: float = 0.0

    def __post_init__(self):
        if self.method not in MOMENT_METHODS:
            raise DomainError(f"unknown moment method {self.method!r}")

    def to_dict(self) -> Dict:
        return {
            "order": jsonable(self.order),
            "value": jsonable(self.value),
            "method": self.method,
            "err_bound": self.err_bound,
        }


@dataclass(frozen=True)
class QuadratureRule:
    """
    Quadrature settings.

    ``cosine`` uses the substitution x = c - h cos(phi) and the trapezoid rule
    in phi; node counts double from ``nodes`` until the change drops below
    ``tol``. ``adaptive`` delegates to scipy's QUADPACK with algebraic weights.
    """

    kind: str = "cosine"
    nodes: int = 256
    tol: float = 1e-10
    max_nodes: int = 1 << 16

    def __post_init__(self):
        if self.kind not in QUADRATURE_KINDS:
            raise DomainError(f"unknown quadrature kind {self.kind!r}")
        if self.nodes < 8:
            raise DomainError("quadrature needs at least 8 nodes")
        if self.tol <= 0:
            raise DomainError("tolerance must be positive")
        if self.max_nodes < self.nodes:
            raise DomainError("max_nodes below the starting node count")

    def with_kind(self, kind: str) -> "QuadratureRule":
        return QuadratureRule(kind, self.nodes, self.tol, self.max_nodes)

    def with_tol(self, tol: Optional[float]) -> "QuadratureRule":
        if tol is None:
            return self
        return QuadratureRule(self.kind, self.nodes, tol, self.max_nodes)
