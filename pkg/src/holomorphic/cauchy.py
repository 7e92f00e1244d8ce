"""Cauchy transform on the upper sheet and its continuation through the support."""

from __future__ import annotations

import logging
import math
from typing import Optional, Tuple, Union

import numpy as np

from src.core.quad_engine import DEFAULT_RULE, carrier_of, density_nodes
from src.holomorphic.continuation import Distribution, Sector, as_power, continued_density, sector_for
from src.models.sequences import QuadratureRule
from src.utils.errors import DomainError, IllConditionedError, ToleranceNotMetError

logger = logging.getLogger(__name__)

TWO_PI_I = 2j * math.pi
SUPPORT_CLEARANCE = 1e-8
# points x nodes per evaluation block
BLOCK_ELEMENTS = 1 << 20
PLEMELJ_RULE = QuadratureRule(nodes=256, tol=1e-12, max_nodes=1 << 21)


def _transform(z: np.ndarray, x: np.ndarray, w: np.ndarray) -> np.ndarray:
    step = max(1, BLOCK_ELEMENTS // x.size)
    out = np.empty(z.size, dtype=complex)
    for lo in range(0, z.size, step):
        block = z[lo:lo + step]
        out[lo:lo + step] = (w[None, :] / (block[:, None] - x[None, :])).sum(axis=1)
    return out


def cauchy_tilde(
    dist: Distribution,
    z,
    rule: Optional[QuadratureRule] = None,
    strict: bool = True,
    with_error: bool = False,
):
    """
    G~(z) = int f(x) / (z - x) dx for z off the support, by the cosine rule.

    Each point doubles its node count independently until the change is below
    ``tol * max(1, |G|)``. With ``strict=False`` points that hit ``max_nodes``
    keep their last value and report the last change as their error.

    Returns:
        values (scalar or array like ``z``), plus the per-point errors when
        ``with_error`` is set

    Raises:
        ToleranceNotMetError: strict mode and a point did not converge
    """
    rule = rule or DEFAULT_RULE
    spec, rho = carrier_of(dist)
    arr = np.asarray(z, dtype=complex)
    flat = arr.ravel()
    values = np.empty(flat.size, dtype=complex)
    errors = np.zeros(flat.size)

    panels = rule.nodes + 1
    y, w = density_nodes(spec, panels)
    previous = _transform(flat, np.power(y, rho), w)
    active = np.arange(flat.size)
    while active.size:
        panels *= 2
        if panels - 1 > rule.max_nodes:
            if strict:
                raise ToleranceNotMetError(
                    f"Cauchy transform did not reach tol={rule.tol:g} at {active.size} point(s) "
                    f"within {rule.max_nodes} nodes"
                )
            logger.debug("%d point(s) kept at the node cap", active.size)
            values[active] = previous
            break
        y, w = density_nodes(spec, panels)
        current = _transform(flat[active], np.power(y, rho), w)
        change = np.abs(current - previous)
        done = change <= rule.tol * np.maximum(1.0, np.abs(current))
        values[active[done]] = current[done]
        errors[active] = change
        active, previous = active[~done], current[~done]

    if arr.ndim == 0:
        values, errors = complex(values[0]), float(errors[0])
    else:
        values, errors = values.reshape(arr.shape), errors.reshape(arr.shape)
    return (values, errors) if with_error else values


def _support(dist: Distribution) -> Tuple[float, float]:
    power = as_power(dist)
    return power.A, power.B


def cauchy_upper(dist: Distribution, z, rule: Optional[QuadratureRule] = None) -> Union[complex, np.ndarray]:
    """
    Cauchy transform for Im z >= 0.

    Raises:
        DomainError: Im z < 0
        IllConditionedError: z within 1e-8 of the support
    """
    a, b = _support(dist)
    arr = np.asarray(z, dtype=complex)
    if np.any(arr.imag < 0):
        raise DomainError("cauchy_upper needs Im z >= 0; use cauchy_continued below the axis")
    gap = np.hypot(arr.imag, np.maximum(np.maximum(a - arr.real, arr.real - b), 0.0))
    if np.any(gap < SUPPORT_CLEARANCE):
        raise IllConditionedError(f"evaluation point within {SUPPORT_CLEARANCE:g} of the support [{a:g}, {b:g}]")
    return cauchy_tilde(dist, arr, rule)


def cauchy_continued(
    dist: Distribution,
    z,
    sector: Optional[Sector] = None,
    rule: Optional[QuadratureRule] = None,
) -> Union[complex, np.ndarray]:
    """
    G(z) = G~(z) - 2 pi i h(z) for -theta <= arg z <= 0.

    Raises:
        DomainError: z outside the sector
    """
    sector = sector or sector_for(dist, force=True)
    arr = np.asarray(z, dtype=complex)
    ang = np.angle(arr)
    ang = np.where(ang >= math.pi - 1e-12, -math.pi, ang)
    if np.any(ang > 1e-12) or np.any(ang < -sector.theta - 1e-12):
        raise DomainError(f"cauchy_continued needs -{sector.theta:.6g} <= arg z <= 0")
    return cauchy_tilde(dist, arr, rule) - TWO_PI_I * continued_density(dist, arr)


def richardson_limit(f_full, f_half, f_quarter):
    """Limit at zero offset of a sequence with linear and quadratic error terms."""
    return (8.0 * f_quarter - 6.0 * f_half + f_full) / 3.0


def plemelj_gap(
    dist: Distribution,
    x,
    offset: float = 2e-3,
    rule: Optional[QuadratureRule] = None,
) -> Union[float, np.ndarray]:
    """
    Gap between the limits onto the support taken from above (G~) and from
    below (G~ - 2 pi i h).

    ``offset`` is relative to the support width; both sides are extrapolated
    from offsets ``offset``, ``offset/2``, ``offset/4``.

    Raises:
        DomainError: x outside (A, B)
    """
    a, b = _support(dist)
    arr = np.asarray(x, dtype=float)
    if np.any((arr <= a) | (arr >= b)):
        raise DomainError(f"plemelj_gap needs A < x < B = ({a:g}, {b:g})")
    rule = rule or PLEMELJ_RULE
    flat = arr.ravel()
    eps = offset * (b - a) * np.array([1.0, 0.5, 0.25])
    above = flat[None, :] + 1j * eps[:, None]
    below = flat[None, :] - 1j * eps[:, None]
    up = cauchy_tilde(dist, above.ravel(), rule).reshape(above.shape)
    down = (
        cauchy_tilde(dist, below.ravel(), rule) - TWO_PI_I * continued_density(dist, below.ravel())
    ).reshape(below.shape)
    gap = np.abs(richardson_limit(*up) - richardson_limit(*down))
    logger.debug("Plemelj gap %.3g at offset %g", float(np.max(gap)), offset)
    return float(gap[0]) if arr.ndim == 0 else gap.reshape(arr.shape)
