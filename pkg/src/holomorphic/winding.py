"""Winding numbers of sampled closed curves."""

from __future__ import annotations

import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np

from src.utils.errors import DomainError, ProbeTooCloseError, ToleranceNotMetError

logger = logging.getLogger(__name__)

INTEGRALITY_TOL = 1e-6
PROBE_CLEARANCE = 1e-9
MAX_ROUNDS = 12
STEP_LIMIT = 0.5 * math.pi

# refine(values, steps) returns one new value per step index i, to be placed
# between values[i] and values[i + 1]
Refiner = Callable[[np.ndarray, np.ndarray], Sequence[complex]]


def _closed(values) -> np.ndarray:
    arr = np.asarray(values, dtype=complex).ravel()
    if arr.size < 3:
        raise DomainError("a closed curve needs at least 3 samples")
    scale = max(1.0, float(np.max(np.abs(arr))))
    if abs(arr[-1] - arr[0]) > 1e-12 * scale:
        raise DomainError("curve is not closed: last sample differs from the first")
    return arr


def winding_increments(values, w: complex) -> np.ndarray:
    """Wrapped arg increments of values - w along consecutive samples, in (-pi, pi]."""
    shifted = np.asarray(values, dtype=complex) - w
    return np.angle(shifted[1:] / shifted[:-1])


def crossing_number(values, w: complex) -> int:
    """
    Signed count of crossings of the ray from w towards +infinity.

    Independent of arg increments; agrees with :func:`winding_number` on any
    closed curve that avoids w.
    """
    arr = _closed(values) - w
    x, y = arr.real, arr.imag
    above = y >= 0
    flips = np.nonzero(above[1:] != above[:-1])[0]
    total = 0
    for i in flips:
        x0, y0, x1, y1 = x[i], y[i], x[i + 1], y[i + 1]
        if x0 > 0 and x1 > 0:
            hit = True
        elif x0 <= 0 and x1 <= 0:
            hit = False
        else:
            hit = (x0 * y1 - x1 * y0) / (y1 - y0) > 0
        if hit:
            total += 1 if above[i + 1] else -1
    return total


def winding_number(
    values,
    w: complex,
    refine: Optional[Refiner] = None,
    rounds: int = MAX_ROUNDS,
) -> int:
    """
    Winding number of a closed sampled curve around w.

    Steps with |delta arg| >= pi/2 are bisected through ``refine`` (up to
    ``rounds`` times) before summing.

    Raises:
        ProbeTooCloseError: the curve passes within the clearance of w
        ToleranceNotMetError: the sum is not an integer within 1e-6
    """
    arr = _closed(values)
    for round_no in range(rounds if refine is not None else 0):
        steps = np.nonzero(np.abs(winding_increments(arr, w)) >= STEP_LIMIT)[0]
        if steps.size == 0:
            break
        logger.debug("winding refinement round %d: %d step(s)", round_no + 1, steps.size)
        new = np.asarray(refine(arr, steps), dtype=complex)
        arr = np.insert(arr, steps + 1, new)

    clearance = PROBE_CLEARANCE * max(1.0, abs(w))
    if float(np.min(np.abs(arr - w))) <= clearance:
        raise ProbeTooCloseError(f"curve passes within {clearance:g} of w = {w:.6g}")
    total = float(np.sum(winding_increments(arr, w))) / (2.0 * math.pi)
    nearest = round(total)
    if abs(total - nearest) > INTEGRALITY_TOL:
        raise ToleranceNotMetError(f"winding sum {total:.9g} around w = {w:.6g} is not an integer")
    return int(nearest)
