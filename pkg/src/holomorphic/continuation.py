"""Analytic continuation of GPFP and power densities into the lower half-plane."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

import numpy as np

from src.core.dist_core import make_power
from src.models.distribution import GPFPSpec, PowerSpec
from src.utils.errors import DomainError, OutsideRegimeError

logger = logging.getLogger(__name__)

Distribution = Union[GPFPSpec, PowerSpec]

ARG_TOL = 1e-12
BRIDGE_STEPS = 256


@dataclass(frozen=True)
class Sector:
    """
    Opening of the lower sector -theta < arg z < 0 the continuation is used on.

    ``shift`` is n - 1 for exponents in [n - 1, n]; ``tilde_l`` are the carrier
    exponents minus the shift.
    """

    theta: float
    n0: float
    s: float
    shift: int
    tilde_l: Tuple[float, ...]
    in_regime: bool

    def to_dict(self):
        return {
            "theta": self.theta,
            "n0": self.n0,
            "s": self.s,
            "shift": self.shift,
            "tilde_l": list(self.tilde_l),
            "in_regime": self.in_regime,
        }


def as_power(dist: Distribution) -> PowerSpec:
    """Every law handled here is a power map; a plain spec is its own r = 1 power."""
    if isinstance(dist, PowerSpec):
        return dist
    if isinstance(dist, GPFPSpec):
        return make_power(dist, 1)
    raise DomainError(f"expected a GPFPSpec or PowerSpec, got {type(dist).__name__}")


def sector_for(dist: Distribution, force: bool = False) -> Sector:
    """
    Sector of the power law.

    theta = pi / n0 with n0 = s * shift + 1 and shift = max(0, ceil(l_N) - 1) on
    the carrier. In regime iff l_1 >= shift, l_N <= shift + 1 and the carrier
    support stays away from zero.

    Raises:
        OutsideRegimeError: out of regime and not ``force``
    """
    power = as_power(dist)
    carrier = power.carrier
    shift = max(0, math.ceil(carrier.l[-1]) - 1)
    in_regime = carrier.l[0] >= shift and carrier.l[-1] <= shift + 1 and carrier.a > 0
    n0 = power.s * shift + 1.0
    sector = Sector(math.pi / n0, n0, power.s, shift, tuple(x - shift for x in carrier.l), in_regime)
    if not in_regime:
        message = (
            f"{power.label}: exponents {list(carrier.l)} on ({carrier.a:g}, {carrier.b:g}) "
            "are outside the proven regime"
        )
        if not force:
            raise OutsideRegimeError(message)
        logger.warning("%s; continuing because force is set", message)
    return sector


def _arguments(z: np.ndarray) -> np.ndarray:
    """arg z clamped to [-pi, 0]; the negative real axis counts as -pi."""
    if np.any(z == 0):
        raise DomainError("the continued density is not defined at z = 0")
    ang = np.angle(z)
    ang = np.where(ang >= math.pi - ARG_TOL, -math.pi, ang)
    if np.any(ang > ARG_TOL):
        raise DomainError("the continuation lives on the closed lower half-plane (arg z in [-pi, 0])")
    return np.minimum(ang, 0.0)


def _power(modulus: np.ndarray, ang: np.ndarray, p: float) -> np.ndarray:
    return np.exp(p * np.log(modulus)) * np.exp(1j * p * ang)


def _sqrt_upper(u: np.ndarray) -> np.ndarray:
    """Square root continued from the closed upper half-plane."""
    return np.sqrt(u.real + 1j * np.abs(u.imag))


def _sqrt_lower(v: np.ndarray) -> np.ndarray:
    """Square root continued from the closed lower half-plane."""
    return np.conj(_sqrt_upper(np.conj(v)))


def _terms(power: PowerSpec, modulus: np.ndarray, ang: np.ndarray) -> np.ndarray:
    carrier, s = power.carrier, power.s
    out = np.zeros(modulus.shape, dtype=complex)
    for alpha, l in zip(carrier.alpha, carrier.l):
        out += alpha * _power(modulus, ang, -s * l)
    return out


def _assemble(power: PowerSpec, z: np.ndarray, modulus: np.ndarray, ang: np.ndarray, root: np.ndarray):
    return power.carrier.norm * power.s * root / z * _terms(power, modulus, ang)


def _shape(z: np.ndarray, values: np.ndarray):
    return complex(values) if z.ndim == 0 else values


def continued_density(dist: Distribution, z) -> Union[complex, np.ndarray]:
    """
    Continued density h(z) on the closed lower half-plane.

    With w = z^s the square-root factor is sqrt(b - w) * sqrt(w - a) on the
    carrier endpoints, the branch that is positive on the support; real z off
    the support gives the boundary value from below.

    Raises:
        DomainError: z = 0 or Im z > 0
    """
    power = as_power(dist)
    carrier = power.carrier
    arr = np.asarray(z, dtype=complex)
    ang = _arguments(arr)
    modulus = np.abs(arr)
    w = _power(modulus, ang, power.s)
    root = _sqrt_upper(carrier.b - w) * _sqrt_lower(w - carrier.a)
    return _shape(arr, _assemble(power, arr, modulus, ang, root))


def boundary_density_below(dist: Distribution, x) -> Union[complex, np.ndarray]:
    """
    h(x - i0) off the support: purely imaginary, negative left of A and
    positive right of B.

    Raises:
        DomainError: x <= 0 or x in [A, B]
    """
    power = as_power(dist)
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0) or np.any((arr >= power.A) & (arr <= power.B)):
        raise DomainError(f"boundary values need 0 < x < {power.A:g} or x > {power.B:g}")
    values = 1j * np.imag(np.asarray(continued_density(power, arr.astype(complex)), dtype=complex))
    return _shape(arr, values)


def _bridge(power: PowerSpec, target: complex) -> np.ndarray:
    """Seed on (A, B), then a dip below the axis, then the target."""
    seed = 0.5 * (power.A + power.B)
    low = seed - 0.5j * (power.B - power.A)
    t = np.linspace(0.0, 1.0, BRIDGE_STEPS)
    return np.concatenate([seed + (low - seed) * t, low + (target - low) * t[1:]])


def continued_density_along(dist: Distribution, path: Sequence[complex]) -> np.ndarray:
    """
    h along a path, with the square root taken as exp(log(P)/2) and its sign
    chosen step by step for continuity from the positive value on (A, B).

    Raises:
        DomainError: empty path or a point outside the closed lower half-plane
    """
    power = as_power(dist)
    carrier = power.carrier
    pts = np.asarray(path, dtype=complex).ravel()
    if pts.size == 0:
        raise DomainError("empty path")
    full = np.concatenate([_bridge(power, complex(pts[0])), pts[1:]])
    ang = _arguments(full)
    modulus = np.abs(full)
    w = _power(modulus, ang, power.s)
    principal = np.exp(0.5 * np.log((carrier.b - w) * (w - carrier.a)))
    root = np.empty_like(principal)
    root[0] = principal[0] if principal[0].real > 0 else -principal[0]
    for k in range(1, principal.size):
        cand = principal[k]
        root[k] = cand if abs(cand - root[k - 1]) <= abs(cand + root[k - 1]) else -cand
    start = BRIDGE_STEPS * 2 - 2
    values = _assemble(power, full, modulus, ang, root)
    return values[start:]
