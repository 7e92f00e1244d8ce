"""Non-crossing partition lattice - enumeration, Möbius function, moment/cumulant transforms."""

from __future__ import annotations

import logging
import threading
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from src.models.partition import NCPartition
from src.models.sequences import CumulantSeq
from src.utils.errors import DomainError

logger = logging.getLogger(__name__)

ExactScalar = Fraction

# Catalan(12) = 208012 partitions; enumeration beyond this is not offered.
LATTICE_CAP = 12
# Möbius tables cost O(n * Catalan(n)^2) bit operations: about 3 s at n = 10.
MOBIUS_CAP = 10

_LOCK = threading.Lock()
_MOBIUS: Dict[int, Dict[Tuple, int]] = {}
_TYPE_WEIGHTS: Dict[int, Dict[Tuple[int, ...], Tuple[int, int]]] = {}

Shape = Tuple[Tuple[int, ...], ...]


def catalan(n: int) -> int:
    """n-th Catalan number."""
    if n < 0:
        raise DomainError("Catalan numbers need n >= 0")
    return comb(2 * n, n) // (n + 1)


def _shift(shape: Shape, offset: int) -> Shape:
    return tuple(tuple(x + offset for x in block) for block in shape)


@lru_cache(maxsize=None)
def _shapes(k: int) -> Tuple[Shape, ...]:
    """NC partitions of {0, ..., k-1} as block tuples.

    The block of 0 is grown member by member; the stretch between two
    consecutive members and the stretch after the last member are partitioned
    independently.
    """
    if k == 0:
        return ((),)
    out: List[Shape] = []

    def grow(block: Tuple[int, ...], pos: int, parts: Shape) -> None:
        for tail in _shapes(k - pos):
            out.append(parts + (block,) + _shift(tail, pos))
        for j in range(pos, k):
            for gap in _shapes(j - pos):
                grow(block + (j,), j + 1, parts + _shift(gap, pos))

    grow((0,), 1, ())
    return tuple(out)


def _check_n(n: int, cap: int = LATTICE_CAP) -> None:
    if not isinstance(n, int) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if n > cap:
        raise DomainError(f"n = {n} exceeds the lattice cap {cap}")


def _canonical_blocks(shape: Shape) -> Tuple[Tuple[int, ...], ...]:
    return tuple(sorted(tuple(x + 1 for x in block) for block in shape))


def enumerate_nc(n: int) -> List[NCPartition]:
    """
    Every non-crossing partition of {1..n}, each exactly once.

    Args:
        n: ground set size, 1 <= n <= LATTICE_CAP

    Returns:
        Partitions ordered by number of blocks, then lexicographically by blocks
    """
    _check_n(n)
    blocks = sorted((_canonical_blocks(s) for s in _shapes(n)), key=lambda b: (len(b), b))
    return [NCPartition(n, b) for b in blocks]


def leq(pi: NCPartition, sigma: NCPartition) -> bool:
    """Refinement order: every block of ``pi`` sits inside a block of ``sigma``."""
    if pi.n != sigma.n:
        raise DomainError(f"partitions of different sizes ({pi.n} vs {sigma.n})")
    label = {}
    for idx, block in enumerate(sigma.blocks):
        for x in block:
            label[x] = idx
    return all(len({label[x] for x in block}) == 1 for block in pi.blocks)


def _mobius_table(n: int) -> Dict[Tuple, int]:
    """mu(pi, 1_n) for every pi in NC(n), keyed by canonical blocks."""
    with _LOCK:
        if n in _MOBIUS:
            return _MOBIUS[n]
        _check_n(n, MOBIUS_CAP)
        elements = [tuple(sorted(_canonical_blocks(s))) for s in _shapes(n)]
        elements.sort(key=lambda b: (len(b), b))
        size = len(elements)

        # together[i, j] marks the partitions in which i and j share a block
        together = np.zeros((n + 1, n + 1, size), dtype=bool)
        for idx, blocks in enumerate(elements):
            for block in blocks:
                for i in block:
                    for j in block:
                        together[i, j, idx] = True

        mu = np.zeros(size, dtype=np.int64)
        for idx, blocks in enumerate(elements):
            if len(blocks) == 1:
                mu[idx] = 1
                continue
            upper = np.ones(size, dtype=bool)
            for block in blocks:
                for i, j in zip(block, block[1:]):
                    upper &= together[i, j]
            upper[idx] = False
            mu[idx] = -int(mu[upper].sum())

        table = {blocks: int(mu[idx]) for idx, blocks in enumerate(elements)}
        _MOBIUS[n] = table
        logger.debug("Möbius table for NC(%d) built over %d elements", n, size)
        return table


def mobius_to_top(pi: NCPartition) -> int:
    """
    Möbius function mu(pi, 1_n) of the NC lattice.

    Computed by the interval recursion mu(x, 1) = -sum_{x < z <= 1} mu(z, 1)
    over the whole lattice, memoized per n.
    """
    return _mobius_table(pi.n)[pi.blocks]


def partition_type_weights(n: int, with_mobius: bool = True) -> Dict[Tuple[int, ...], Tuple[int, int]]:
    """
    Aggregate NC(n) by block-size multiset.

    Returns:
        Mapping size-type -> (number of partitions, sum of mu(pi, 1_n));
        the Möbius sum is 0 when ``with_mobius`` is False
    """
    _check_n(n)
    key = n if with_mobius else -n
    with _LOCK:
        cached = _TYPE_WEIGHTS.get(key)
    if cached is not None:
        return cached
    mobius = _mobius_table(n) if with_mobius else None
    counts: Counter = Counter()
    sums: Counter = Counter()
    for shape in _shapes(n):
        size_type = tuple(sorted(len(b) for b in shape))
        counts[size_type] += 1
        if mobius is not None:
            sums[size_type] += mobius[_canonical_blocks(shape)]
    result = {t: (counts[t], sums[t]) for t in counts}
    with _LOCK:
        _TYPE_WEIGHTS[key] = result
    return result


def _product(values: Sequence[Any], size_type: Tuple[int, ...]) -> Any:
    out: Any = 1
    for size in size_type:
        out = out * values[size - 1]
    return out


def moments_to_cumulants(moments: Sequence[Any], provenance: str = "pipeline") -> CumulantSeq:
    """
    Free cumulants from moments: kappa_n = sum_{pi in NC(n)} mu(pi, 1_n) prod_{V in pi} m_|V|.

    Works for ints, Fractions, floats and sympy expressions; the result has
    the scalar type of the input.

    Args:
        moments: m_1, ..., m_K
        provenance: tag stored on the returned sequence

    Returns:
        CumulantSeq kappa_1..kappa_K
    """
    moments = list(moments)
    if not moments:
        raise DomainError("empty moment sequence")
    _check_n(len(moments), MOBIUS_CAP)
    kappas = []
    for n in range(1, len(moments) + 1):
        total: Any = 0
        for size_type, (_, weight) in sorted(partition_type_weights(n).items()):
            if weight:
                total = total + weight * _product(moments, size_type)
        kappas.append(total)
    return CumulantSeq(tuple(kappas), start=1, provenance=provenance)


def cumulants_to_moments(kappas: Sequence[Any]) -> List[Any]:
    """Moments from free cumulants: m_n = sum_{pi in NC(n)} prod_{V in pi} kappa_|V|."""
    if isinstance(kappas, CumulantSeq):
        if kappas.start != 1:
            raise DomainError("moment recovery needs the sequence from order 1")
        kappas = kappas.values
    kappas = list(kappas)
    if not kappas:
        raise DomainError("empty cumulant sequence")
    _check_n(len(kappas))
    moments = []
    for n in range(1, len(kappas) + 1):
        total: Any = 0
        for size_type, (count, _) in sorted(partition_type_weights(n, with_mobius=False).items()):
            total = total + count * _product(kappas, size_type)
        moments.append(total)
    return moments
