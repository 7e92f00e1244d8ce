"""The closed contour c1..c8 around the upper half-disc and the lower sector."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.holomorphic.cauchy import TWO_PI_I, cauchy_tilde
from src.holomorphic.continuation import Distribution, Sector, as_power, continued_density, sector_for
from src.models.distribution import PowerSpec
from src.models.sequences import QuadratureRule
from src.utils.errors import DecayNotCertifiedError, DomainError

logger = logging.getLogger(__name__)

UPPER = 1
CONTINUED = -1
SPACINGS = ("uniform", "ratio", "log-start", "log-end")
DELTA_HALVINGS = 40
ETA_DOUBLINGS = 30
SEARCH_SAMPLES = 64
# smallest distance to a clustered endpoint, relative to the segment length
CLUSTER_DEPTH = 1e-6


@dataclass(frozen=True)
class Segment:
    """
    One piece of the contour, parametrized by t in [0, 1].

    Lines on the real axis stand for the boundary values from above
    (``side = +1``) or from below on the continued sheet (``side = -1``).
    """

    name: str
    kind: str  # "line" or "arc"
    start: complex
    end: complex
    side: int
    spacing: str = "uniform"
    radius: float = 0.0
    psi0: float = 0.0
    psi1: float = 0.0

    def __post_init__(self):
        if self.kind not in ("line", "arc"):
            raise DomainError(f"unknown segment kind {self.kind!r}")
        if self.spacing not in SPACINGS:
            raise DomainError(f"unknown spacing {self.spacing!r}")
        if self.side not in (UPPER, CONTINUED):
            raise DomainError("side must be +1 or -1")

    def _clustered(self, u: np.ndarray) -> np.ndarray:
        """Fraction of the way from the clustered end, dense near u = 0."""
        scale = math.log1p(1.0 / CLUSTER_DEPTH)
        return np.expm1(u * scale) * CLUSTER_DEPTH

    def point(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.kind == "arc":
            z = self.radius * np.exp(1j * (self.psi0 + (self.psi1 - self.psi0) * t))
        elif self.spacing == "ratio":
            z = self.start * np.power(self.end / self.start, t)
        elif self.spacing == "log-end":
            z = self.end + (self.start - self.end) * self._clustered(1.0 - t)
        elif self.spacing == "log-start":
            z = self.start + (self.end - self.start) * self._clustered(t)
        else:
            z = self.start + (self.end - self.start) * t
        z = np.asarray(z, dtype=complex)
        z = np.where(t == 0.0, self.start, z)
        return np.where(t == 1.0, self.end, z)

    def to_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "start": [self.start.real, self.start.imag],
            "end": [self.end.real, self.end.imag],
            "side": self.side,
            "spacing": self.spacing,
        }


@dataclass
class Contour:
    """Eight segments c1..c8 traversed counterclockwise around the region."""

    segments: List[Segment]
    delta: float
    eta: float
    samples_per_segment: int
    sector: Sector
    g_inf: float = 0.0
    notes: List[str] = field(default_factory=list)

    def closure_gap(self) -> float:
        """Largest mismatch between the end of one segment and the start of the next."""
        pairs = zip(self.segments, self.segments[1:] + self.segments[:1])
        return max(abs(cur.end - nxt.start) for cur, nxt in pairs)

    def points(self, nodes: Sequence[Tuple[int, float]]) -> np.ndarray:
        """z at (segment index, t) nodes."""
        out = np.empty(len(nodes), dtype=complex)
        for idx, seg in enumerate(self.segments):
            mask = [k for k, (s, _) in enumerate(nodes) if s == idx]
            if mask:
                out[mask] = seg.point([nodes[k][1] for k in mask])
        return out


def small_z_constants(power: PowerSpec) -> Tuple[float, float]:
    """(alpha, l) with h(z) ~ -i alpha / z^(1+l) as z -> 0 in the sector."""
    carrier = power.carrier
    alpha = power.s * carrier.norm * carrier.alpha[-1] * math.sqrt(carrier.a * carrier.b)
    return alpha, power.s * carrier.l[-1]


def large_arc_limit(power: PowerSpec) -> float:
    """Limit of G on the lower large arc; nonzero only when some s(l_k - 1) + 1 vanishes."""
    carrier, s = power.carrier, power.s
    total = sum(a for a, l in zip(carrier.alpha, carrier.l) if abs(1.0 + s * (l - 1.0)) <= 1e-12)
    return 2.0 * math.pi * carrier.norm * s * total


def evaluate_sheet(
    dist: Distribution,
    z: np.ndarray,
    side: np.ndarray,
    rule: Optional[QuadratureRule] = None,
) -> Tuple[np.ndarray, float]:
    """
    G at the given points: G~ where ``side`` is +1, G~ - 2 pi i h where it is -1.

    Returns:
        (values, largest quadrature error)
    """
    z = np.asarray(z, dtype=complex)
    side = np.asarray(side)
    values, errors = cauchy_tilde(dist, z, rule, strict=False, with_error=True)
    values = np.array(values, dtype=complex, ndmin=1)
    lower = side == CONTINUED
    if np.any(lower):
        values[lower] -= TWO_PI_I * np.asarray(continued_density(dist, z[lower]), dtype=complex)
    max_err = float(np.max(errors)) if np.size(errors) else 0.0
    return values, max_err


def _arc(radius: float, psi0: float, psi1: float, samples: int) -> np.ndarray:
    return radius * np.exp(1j * np.linspace(psi0, psi1, samples))


def _search_delta(power: PowerSpec, sector: Sector, epsilon: float, rule) -> float:
    alpha, l = small_z_constants(power)
    if 1.0 + l <= 0:
        raise DecayNotCertifiedError(f"h stays bounded at 0 (exponent {l:g}); no small arc can certify |G| > 1/epsilon")
    delta = 0.5 * (math.pi * alpha * epsilon) ** (1.0 / (1.0 + l))
    delta = min(delta, 0.5 * power.A)
    for _ in range(DELTA_HALVINGS):
        z = _arc(delta, 0.0, -sector.theta, SEARCH_SAMPLES)
        values, _ = evaluate_sheet(power, z, np.full(z.size, CONTINUED), rule)
        smallest = float(np.min(np.abs(values)))
        if smallest > 1.0 / epsilon:
            logger.debug("delta = %.3g (min |G| on the small arc %.3g)", delta, smallest)
            return delta
        delta *= 0.5
    raise DecayNotCertifiedError(
        f"|G| did not exceed 1/epsilon = {1.0 / epsilon:g} on the small arc after {DELTA_HALVINGS} halvings"
    )


def _search_eta(power: PowerSpec, sector: Sector, epsilon: float, g_inf: float, rule) -> float:
    eta = 4.0 * max(power.A, power.B)
    for _ in range(ETA_DOUBLINGS + 1):
        lower = _arc(eta, -sector.theta, 0.0, SEARCH_SAMPLES)
        upper = _arc(eta, 0.0, math.pi, SEARCH_SAMPLES)
        g_lower, _ = evaluate_sheet(power, lower, np.full(lower.size, CONTINUED), rule)
        g_upper, _ = evaluate_sheet(power, upper, np.full(upper.size, UPPER), rule)
        spread = max(float(np.max(np.abs(g_lower - g_inf))), float(np.max(np.abs(g_upper))))
        if spread < epsilon:
            logger.debug("eta = %.3g (arc spread %.3g)", eta, spread)
            return eta
        eta *= 2.0
    raise DecayNotCertifiedError(f"G did not settle within epsilon = {epsilon:g} on arcs up to radius {eta / 2:g}")


def build_contour(
    dist: Distribution,
    epsilon: float,
    samples: int = 200,
    rule: Optional[QuadratureRule] = None,
    force: bool = False,
) -> Contour:
    """
    Radii delta and eta plus the segments c1..c8.

    delta starts at half the small-z bound (pi alpha epsilon)^(1/(1+l)) and is
    halved until |G| > 1/epsilon on the small arc; eta doubles from 4 max(A, B)
    until G is within epsilon of its limit on both large arcs.

    Raises:
        DomainError: epsilon outside (0, 1), too few samples or a support touching 0
        OutsideRegimeError: from :func:`sector_for` unless ``force``
        DecayNotCertifiedError: either search hit its cap
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must lie in (0, 1), got {epsilon}")
    if samples < 4:
        raise DomainError("need at least 4 samples per segment")
    power = as_power(dist)
    if power.A <= 0:
        raise DomainError("the contour needs a support bounded away from 0")
    sector = sector_for(power, force=force)
    g_inf = large_arc_limit(power)
    delta = _search_delta(power, sector, epsilon, rule)
    eta = _search_eta(power, sector, epsilon, g_inf, rule)

    theta, A, B = sector.theta, power.A, power.B
    ray = complex(math.cos(-theta), math.sin(-theta))
    segments = [
        Segment("c1", "line", complex(-eta), complex(A), UPPER, "log-end"),
        Segment("c2", "line", complex(A), complex(delta), CONTINUED, "ratio"),
        Segment("c3", "arc", complex(delta), delta * ray, CONTINUED, radius=delta, psi0=0.0, psi1=-theta),
        Segment("c4", "line", delta * ray, eta * ray, CONTINUED, "ratio"),
        Segment("c5", "arc", eta * ray, complex(eta), CONTINUED, radius=eta, psi0=-theta, psi1=0.0),
        Segment("c6", "line", complex(eta), complex(B), CONTINUED, "log-end"),
        Segment("c7", "line", complex(B), complex(eta), UPPER, "log-start"),
        Segment("c8", "arc", complex(eta), complex(-eta), UPPER, radius=eta, psi0=0.0, psi1=math.pi),
    ]
    contour = Contour(segments, delta, eta, samples, sector, g_inf)
    logger.info(
        "contour for %s: theta=%.4g delta=%.3g eta=%.3g G_inf=%.4g",
        power.label, theta, delta, eta, g_inf,
    )
    return contour
