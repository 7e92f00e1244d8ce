"""Tests for the non-crossing partition lattice and the moment/cumulant transforms."""
import random
from fractions import Fraction

import pytest
import sympy

from src.core.nc_lattice import (
    MOBIUS_CAP,
    catalan,
    cumulants_to_moments,
    enumerate_nc,
    leq,
    mobius_to_top,
    moments_to_cumulants,
    partition_type_weights,
)
from src.models.partition import NCPartition
from src.utils.errors import DomainError

FP2_MOMENTS = [2, 6, 22, 90, 394]


def test_catalan_numbers():
    """First Catalan numbers."""
    assert [catalan(n) for n in range(8)] == [1, 1, 2, 5, 14, 42, 132, 429]


@pytest.mark.parametrize("n", range(1, 9))
def test_enumeration_counts_match_catalan(n):
    """|NC(n)| is the n-th Catalan number and no partition repeats."""
    parts = enumerate_nc(n)
    assert len(parts) == catalan(n)
    assert len({p.blocks for p in parts}) == len(parts)


def test_enumeration_order():
    """Ordered by block count: the top comes first, the bottom last."""
    parts = enumerate_nc(4)
    assert parts[0] == NCPartition.top(4)
    assert parts[-1] == NCPartition.bottom(4)


def test_crossing_partition_rejected():
    with pytest.raises(DomainError):
        NCPartition.of(4, [[1, 3], [2, 4]])


def test_enumeration_cap():
    with pytest.raises(DomainError):
        enumerate_nc(13)
    with pytest.raises(DomainError):
        enumerate_nc(0)


def test_refinement_order():
    """Bottom <= everything <= top."""
    bottom, top = NCPartition.bottom(5), NCPartition.top(5)
    for pi in enumerate_nc(5):
        assert leq(bottom, pi)
        assert leq(pi, top)
    middle = NCPartition.of(5, [[1, 2], [3], [4, 5]])
    assert not leq(top, middle)


@pytest.mark.parametrize("n,expected", [(1, 1), (2, -1), (3, 2), (4, -5), (5, 14), (6, -42)])
def test_mobius_bottom_to_top(n, expected):
    """mu(0_n, 1_n) = (-1)^(n-1) Catalan(n-1)."""
    assert mobius_to_top(NCPartition.bottom(n)) == expected


def test_mobius_of_top_is_one():
    assert mobius_to_top(NCPartition.top(6)) == 1


def test_mobius_products_over_blocks():
    """mu(pi, 1) for {1,2},{3},{4} equals mu(0_3, 1_3) after merging 1 and 2."""
    pi = NCPartition.of(4, [[1, 2], [3], [4]])
    assert mobius_to_top(pi) == 2


@pytest.mark.parametrize("n", range(2, 9))
def test_mobius_column_sums_vanish(n):
    """sum over pi in NC(n) of mu(pi, 1_n) is 0, and so is the sum over every interval [sigma, 1_n]."""
    parts = enumerate_nc(n)
    assert sum(mobius_to_top(pi) for pi in parts) == 0
    if n <= 6:
        for sigma in parts:
            if sigma == NCPartition.top(n):
                continue
            assert sum(mobius_to_top(pi) for pi in parts if leq(sigma, pi)) == 0


def test_type_weights_cover_the_lattice():
    """Counts per size-type add up to Catalan(n); Möbius sums add up to 0 for n >= 2."""
    for n in range(2, 8):
        weights = partition_type_weights(n)
        assert sum(count for count, _ in weights.values()) == catalan(n)
        assert sum(mu for _, mu in weights.values()) == 0


def test_free_poisson_cumulants_are_constant():
    """fp(2) moments 2, 6, 22, 90, 394 give kappa_n = 2 exactly."""
    kappas = moments_to_cumulants(FP2_MOMENTS)
    assert list(kappas.values) == [2, 2, 2, 2, 2]
    assert kappas.exact


def test_moments_from_cumulants():
    assert cumulants_to_moments([2] * 5) == FP2_MOMENTS


def test_semicircle_cumulants():
    """Standard semicircle: moments 0, 1, 0, 2, 0, 5 -> only kappa_2 = 1."""
    kappas = moments_to_cumulants([0, 1, 0, 2, 0, 5])
    assert list(kappas.values) == [0, 1, 0, 0, 0, 0]


def test_exact_round_trip_rationals():
    moments = [Fraction(1, 3), Fraction(2, 7), Fraction(5, 11), Fraction(1, 2)]
    kappas = moments_to_cumulants(moments)
    assert cumulants_to_moments(kappas) == moments
    assert all(isinstance(k, Fraction) for k in kappas.values)


def test_low_order_cumulant_formulas():
    """kappa_1..kappa_4 match the explicit polynomials on random rational moments."""
    rng = random.Random(2024)
    for _ in range(50):
        m1, m2, m3, m4 = (Fraction(rng.randint(-40, 40), rng.randint(1, 30)) for _ in range(4))
        kappas = moments_to_cumulants([m1, m2, m3, m4]).values
        assert kappas[0] == m1
        assert kappas[1] == m2 - m1**2
        assert kappas[2] == m3 - 3 * m1 * m2 + 2 * m1**3
        assert kappas[3] == m4 - 4 * m1 * m3 - 2 * m2**2 + 10 * m1**2 * m2 - 5 * m1**4


def test_symbolic_round_trip():
    """The transforms are inverse as polynomial maps."""
    symbols = sympy.symbols("k1:7")
    moments = cumulants_to_moments(list(symbols))
    back = moments_to_cumulants(moments)
    assert [sympy.expand(v) for v in back.values] == list(symbols)


def test_float_moments_stay_float():
    kappas = moments_to_cumulants([2.0, 6.0, 22.0])
    assert all(isinstance(k, float) for k in kappas.values)
    assert list(kappas.values) == pytest.approx([2.0, 2.0, 2.0])


def test_mobius_cap():
    with pytest.raises(DomainError):
        moments_to_cumulants([1] * (MOBIUS_CAP + 1))
    with pytest.raises(DomainError):
        moments_to_cumulants([])
