"""Unit tests for the exact constraint arithmetic and pair enumeration."""

import math
from fractions import Fraction

import pytest

from pawclock.constraints import (
    AllowedPair,
    ClockSpec,
    CouplingRatios,
    NoOddOverEvenForm,
    OscillatorSpec,
    ReducedRatio,
    allowed_pair_count,
    brute_force_pairs,
    enumerate_pairs,
    is_entanglement_admissible,
    pairs_for,
    reduce_ratio,
)


def test_reduce_ratio_odd_over_even():
    ratio = reduce_ratio(Fraction(3, 4))
    assert ratio.i_n == 1 and ratio.i_m == 2
    assert ratio.value == Fraction(3, 4)

    ratio = reduce_ratio("1/2")
    assert ratio.i_n == 0 and ratio.i_m == 1

    # 6/8 reduces to 3/4 first
    assert reduce_ratio(Fraction(6, 8)) == reduce_ratio(Fraction(3, 4))


def test_reduce_ratio_rejects_forms_without_solutions():
    # even numerator
    with pytest.raises(NoOddOverEvenForm):
        reduce_ratio(Fraction(2, 3))
    # odd denominator
    with pytest.raises(NoOddOverEvenForm):
        reduce_ratio(Fraction(3, 5))
    # integers have odd denominator 1
    with pytest.raises(NoOddOverEvenForm):
        reduce_ratio(3)
    with pytest.raises(ValueError):
        reduce_ratio(Fraction(-3, 4))
    with pytest.raises(ValueError):
        reduce_ratio(0)


def test_reduced_ratio_requires_lowest_terms():
    # (2*4+1)/(2*3) = 9/6 is reducible; the normal form must be 3/2
    with pytest.raises(ValueError):
        ReducedRatio(i_n=4, i_m=3)


def test_golden_family_three_quarters():
    """kappa*r = 3/4 as the spin grows: the first entangled case is J = 3."""
    expected = {
        1: [],
        2: [(Fraction(1), 1)],
        3: [(Fraction(1, 2), 1)],
        4: [(Fraction(0), 1)],
        5: [(Fraction(-1, 2), 1)],
        6: [(Fraction(-1), 1), (Fraction(3), 4)],
    }
    for two_j, pairs in expected.items():
        family = pairs_for(Fraction(3, 4), two_j)
        assert family.mn_pairs() == pairs, f"2J = {two_j}"
        assert is_entanglement_admissible(family) == (len(pairs) >= 2)


def test_enumeration_matches_brute_force_search():
    """Closed form vs exhaustive rational search over a dense ratio sweep."""
    for num in range(1, 12):
        for den in range(1, 13):
            kappa_r = Fraction(num, den)
            for two_j in range(1, 41):
                n_max = math.ceil(kappa_r * two_j) + 1
                expected = brute_force_pairs(kappa_r, two_j, n_max)
                try:
                    found = pairs_for(kappa_r, two_j).mn_pairs()
                except NoOddOverEvenForm:
                    found = []
                assert found == expected, f"kappa*r = {kappa_r}, 2J = {two_j}"


def test_pair_count_closed_form():
    for i_n in range(0, 4):
        for i_m in range(1, 5):
            if math.gcd(2 * i_n + 1, 2 * i_m) != 1:
                continue
            ratio = ReducedRatio(i_n=i_n, i_m=i_m)
            for two_j in range(1, 30):
                family = enumerate_pairs(ratio, two_j)
                assert len(family) == allowed_pair_count(ratio, two_j)


def test_admissibility_threshold():
    """Entanglement needs at least two pairs, i.e. 2J >= 3*i_m."""
    ratio = reduce_ratio(Fraction(3, 4))  # i_m = 2
    assert not is_entanglement_admissible(enumerate_pairs(ratio, 5))
    assert is_entanglement_admissible(enumerate_pairs(ratio, 6))
    ratio = reduce_ratio(Fraction(1, 2))  # i_m = 1
    assert not is_entanglement_admissible(enumerate_pairs(ratio, 2))
    assert is_entanglement_admissible(enumerate_pairs(ratio, 3))


def test_pair_labels_and_m_fraction():
    family = pairs_for(Fraction(3, 4), 6)
    first, second = family.pairs
    assert first == AllowedPair(m_plus_j=2, n=1, l=0)
    assert second == AllowedPair(m_plus_j=6, n=4, l=1)
    assert family.m_fraction(first) == Fraction(-1)
    assert family.m_fraction(second) == Fraction(3)
    assert family.m_plus_j_values() == [2, 6]


def test_every_enumerated_pair_satisfies_the_constraint():
    for kappa_r in (Fraction(3, 4), Fraction(1, 2), Fraction(5, 6), Fraction(7, 2)):
        for two_j in (3, 6, 17, 40):
            family = pairs_for(kappa_r, two_j)
            for pair in family:
                assert kappa_r * pair.m_plus_j == Fraction(2 * pair.n + 1, 2)
                assert 0 <= pair.m_plus_j <= two_j


def test_clock_spec_levels():
    clock = ClockSpec(two_j=6, epsilon=0.75)
    assert clock.j == 3.0
    assert clock.level_energy(0) == 0.0
    assert clock.level_energy(6) == pytest.approx(4.5)
    with pytest.raises(ValueError):
        ClockSpec(two_j=0, epsilon=1.0)
    with pytest.raises(ValueError):
        ClockSpec(two_j=6, epsilon=-1.0)


def test_oscillator_spec_levels():
    osc = OscillatorSpec(mass=170, omega=1.0)
    assert osc.level_energy(0) == 0.5
    assert osc.level_energy(4) == 4.5
    with pytest.raises(ValueError):
        OscillatorSpec(mass=0, omega=1.0)


def test_coupling_ratios_from_parameters():
    ratios = CouplingRatios.from_parameters(Fraction(3, 4), two_j=6, mass=1)
    assert ratios.kappa_r == Fraction(3, 4)
    assert ratios.r == Fraction(2, 6)  # 2M / 2J
    assert ratios.kappa == Fraction(9, 4)  # eps*J/(omega*M)
    assert ratios.kappa_r_j == Fraction(9, 4)  # eps*J/omega

    ratios = CouplingRatios.from_parameters(Fraction(1, 2), two_j=510, mass=170)
    assert ratios.r == Fraction(2, 3)
    assert ratios.kappa == Fraction(3, 4)
    assert ratios.kappa_r == ratios.kappa * ratios.r
