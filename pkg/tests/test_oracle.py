from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import exponents, finite_sequences, weights
from lorentzseq import (
    HARMONIC,
    Finite,
    PlacementSearchConfig,
    Power,
    SupportTooLarge,
    UnsupportedVariant,
    brute_force_equinorm_gap,
    brute_force_norm_pth,
    brute_force_seminorm_pth,
    lorentz_norm_pth,
    seminorm_pth,
)


def test_norm_examples():
    assert brute_force_norm_pth(Finite([1, 2]), 1, HARMONIC, PlacementSearchConfig(slack=0)) == 2.5
    assert brute_force_norm_pth(Finite([-3]), 2, HARMONIC, PlacementSearchConfig(slack=5)) == 9.0
    assert brute_force_norm_pth(Finite([1, 1, 1]), 1, HARMONIC) == pytest.approx(11 / 6, abs=1e-15)


def test_seminorm_examples():
    assert brute_force_seminorm_pth(Finite([1, 2]), 1, HARMONIC, 2) == 2.5
    assert brute_force_seminorm_pth(Finite([4, 2]), 2, HARMONIC, 1) == 16.0
    assert brute_force_seminorm_pth(Finite([0, 0, 3]), 1, HARMONIC, 2) == 0.0


def test_gap_examples():
    assert brute_force_equinorm_gap([Finite([1, 2])], 1, HARMONIC, 2) == 0.0
    assert brute_force_equinorm_gap([Finite([0, 0, 1])], 1, HARMONIC, 2) == 1.0
    assert all(brute_force_equinorm_gap([Finite([])], 1, HARMONIC, n) == 0.0 for n in range(4))


def test_caps():
    with pytest.raises(SupportTooLarge):
        brute_force_norm_pth(Finite(range(1, 10)), 1, HARMONIC)
    with pytest.raises(SupportTooLarge):
        brute_force_seminorm_pth(Finite(range(1, 12)), 1, HARMONIC, 11)
    with pytest.raises(UnsupportedVariant):
        brute_force_norm_pth(Power(1, 1), 1, HARMONIC)
    with pytest.raises(ValueError):
        PlacementSearchConfig(slack=-1)


def test_search_size():
    assert PlacementSearchConfig(slack=2).search_size(3) == 60
    assert PlacementSearchConfig(slack=0).search_size(4) == 24


def test_sparse_seminorm_beyond_literal_cap():
    a = Finite([0] * 8 + [1, 0, 0, 3])
    assert brute_force_seminorm_pth(a, 1, HARMONIC, 12) == seminorm_pth(a, 1, HARMONIC, 12)


@given(finite_sequences(max_support=6), exponents, weights)
@settings(max_examples=200)
def test_slack_never_helps(a, p, w):
    values = [brute_force_norm_pth(a, p, w, PlacementSearchConfig(slack=s)) for s in range(4)]
    assert all(x == values[0] for x in values)


@given(finite_sequences(max_support=6), exponents, weights)
@settings(max_examples=200)
def test_agrees_with_library(a, p, w):
    assert brute_force_norm_pth(a, p, w) == pytest.approx(lorentz_norm_pth(a, p, w).mid, rel=1e-12, abs=1e-12)


@given(finite_sequences(max_len=8), exponents, weights, st.integers(0, 8))
@settings(max_examples=200)
def test_seminorm_agrees_with_library(a, p, w, i):
    assert brute_force_seminorm_pth(a, p, w, i) == pytest.approx(seminorm_pth(a, p, w, i), rel=1e-12, abs=1e-12)
