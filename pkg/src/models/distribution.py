"""Distribution data models: GPFP specs, their exact forms and power laws."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Optional, Tuple

from src.utils.errors import DomainError


@dataclass(frozen=True)
class ExactForm:
    """
    Exact description of a spec aligned with a free Poisson support.

    The spec lives on ``scale * ((sqrt(p) - 1)^2, (sqrt(p) + 1)^2)`` and its
    density is ``sum_k weights[k] * sqrt(...)/(2 pi x) * x^(-l_k)`` with integer
    ``l_k``; ``weights[k] = 2 pi * norm * alpha_k`` exactly.
    """

    p: Fraction
    weights: Tuple[Fraction, ...]
    scale: Fraction = Fraction(1)

    def __post_init__(self):
        if self.p <= 1:
            raise DomainError("exact form needs p > 1")
        if self.scale <= 0:
            raise DomainError("exact form needs a positive scale")
        if any(w <= 0 for w in self.weights):
            raise DomainError("exact weights must be positive")

    def endpoints(self) -> Tuple[float, float]:
        root = float(self.p) ** 0.5
        theta = float(self.scale)
        return theta * (root - 1.0) ** 2, theta * (root + 1.0) ** 2

    def to_dict(self) -> Dict:
        return {
            "p": str(self.p),
            "scale": str(self.scale),
            "weights": [str(w) for w in self.weights],
        }


@dataclass(frozen=True)
class GPFPSpec:
    """
    Parameters of a GPFP law.

    Density ``norm * sqrt((b-x)(x-a))/x * sum_k alpha_k x^(-l_k)`` on (a, b).
    ``norm is None`` marks a raw (unnormalized) spec.
    """

    a: float
    b: float
    alpha: Tuple[float, ...]
    l: Tuple[float, ...]
    norm: Optional[float] = None
    exact: Optional[ExactForm] = field(default=None, compare=False)
    label: str = field(default="", compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(x) for x in self.alpha))
        object.__setattr__(self, "l", tuple(float(x) for x in self.l))
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not self.alpha:
            raise DomainError("a GPFP spec needs at least one term")
        if len(self.alpha) != len(self.l):
            raise DomainError(f"alpha has {len(self.alpha)} entries but l has {len(self.l)}")
        if not 0.0 <= self.a < self.b:
            raise DomainError(f"need 0 <= a < b, got a={self.a}, b={self.b}")
        if any(not x > 0 for x in self.alpha):
            raise DomainError("every alpha_k must be positive")
        if any(x >= y for x, y in zip(self.l, self.l[1:])):
            raise DomainError("l must be strictly increasing")
        if self.norm is not None and not self.norm > 0:
            raise DomainError("norm must be positive")
        if self.exact is not None and len(self.exact.weights) != len(self.alpha):
            raise DomainError("exact weights do not match the number of terms")

    @property
    def N(self) -> int:
        return len(self.alpha)

    @property
    def is_normalized(self) -> bool:
        return self.norm is not None

    @property
    def has_integer_l(self) -> bool:
        return all(float(x).is_integer() for x in self.l)

    def with_norm(self, norm: float, exact: Optional[ExactForm] = None) -> "GPFPSpec":
        return replace(self, norm=norm, exact=exact if exact is not None else self.exact)

    def with_label(self, label: str) -> "GPFPSpec":
        return replace(self, label=label)

    def to_dict(self) -> Dict:
        data = {
            "a": self.a,
            "b": self.b,
            "alpha": list(self.alpha),
            "l": list(self.l),
            "norm": self.norm,
        }
        if self.exact is not None:
            data["exact"] = self.exact.to_dict()
        if self.label:
            data["label"] = self.label
        return data


@dataclass(frozen=True)
class PowerSpec:
    """
    Law of X^r for X following ``base``.

    For r >= 1 the carrier is ``base``; for r <= -1 it is the inverse law and
    X^r = (X^-1)^|r|. ``s = 1/|r|`` and the support is (A, B).
    """

    base: GPFPSpec
    r: float
    carrier: GPFPSpec
    s: float
    A: float
    B: float

    @property
    def rho(self) -> float:
        """Exponent applied to the carrier variable."""
        return abs(self.r)

    @property
    def exponents(self) -> Tuple[float, ...]:
        """Exponents s * l_k of the carrier terms."""
        return tuple(self.s * x for x in self.carrier.l)

    @property
    def label(self) -> str:
        name = self.base.label or "X"
        return name if self.r == 1 else f"({name})^{self.r:g}"

    def to_dict(self) -> Dict:
        return {
            "base": self.base.to_dict(),
            "r": self.r,
            "s": self.s,
            "A": self.A,
            "B": self.B,
        }
