from __future__ import annotations

import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from conftest import exponents, finite_sequences, weights
from lorentzseq import (
    HARMONIC,
    INVSQRT,
    Dominated,
    ExplicitFinite,
    Finite,
    Geometric,
    InvalidSpec,
    Method,
    NotEquinormed,
    NotSatisfied,
    NotSummable,
    NotUniform,
    Power,
    PowerDecay,
    PowerTail,
    ScaledBasis,
    ShiftFamily,
    Tabled,
    Unbounded,
    UnsupportedVariant,
    Verdict,
    brute_force_equinorm_gap,
    certify,
    decompose,
    difference_family,
    family_bound,
    gamma_inverse_at,
    gamma_of,
    lambda_of,
    lorentz_norm_pth,
    min_equinorm_index,
    tail_criterion_index,
)

E1 = ShiftFamily(Finite([1.0]))


def _tail_scan(c, s, p, beta, eps):
    """Least N with sum_k (c (N+k)^-s)^p k^-beta < eps, by Euler-Maclaurin summation and bisection."""

    def small(n):
        with mpmath.workdps(20):
            return mpmath.nsum(lambda k: (c * (n + k) ** -s) ** p * k**-beta, [1, mpmath.inf],
                               method="euler-maclaurin") < eps

    lo, hi = 0, 1
    while not small(hi):
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        lo, hi = (lo, mid) if small(mid) else (mid, hi)
    return hi


class TestFamilies:
    def test_dominated_samples_checked(self):
        Dominated(Power(1, 1), (Finite([0.5, -0.5]), Power(1, 2)))
        with pytest.raises(InvalidSpec, match="samples"):
            Dominated(Power(1, 1), (Finite([0.5, 0.6]),))

    def test_dominated_rejects_tabled_envelope(self):
        with pytest.raises(InvalidSpec):
            Dominated(Tabled([1.0], PowerTail(1, 1)))

    def test_shift_needs_finite(self):
        with pytest.raises(InvalidSpec):
            ShiftFamily(Power(1, 1))

    def test_members(self):
        assert E1.member(2) == Finite([0, 0, 1])
        assert ScaledBasis(Power(1, 1)).member(3) == Finite([0, 0, 1 / 3])


class TestBound:
    def test_examples(self):
        assert family_bound(E1, 1, HARMONIC) == lorentz_norm_pth(Finite([1]), 1, HARMONIC)
        assert family_bound(Dominated(Power(1, 2)), 1, HARMONIC).contains(1.2020569031595942)
        assert isinstance(family_bound(ScaledBasis(Power(1, -1)), 1, HARMONIC), Unbounded)

    def test_explicit_is_max(self):
        A = ExplicitFinite([Finite([1, 2]), Finite([3])])
        assert family_bound(A, 1, HARMONIC).hi == 3.0
        assert family_bound(ExplicitFinite([]), 1, HARMONIC).hi == 0.0

    def test_scaled_basis(self):
        assert family_bound(ScaledBasis(Geometric(4, 0.5)), 2, HARMONIC).hi == 4.0
        assert family_bound(ScaledBasis(Power(2, 0)), 3, HARMONIC).hi == 8.0

    def test_not_summable(self):
        with pytest.raises(NotSummable):
            family_bound(ExplicitFinite([Power(1, 0.5)]), 1, INVSQRT)


class TestEquinorm:
    def test_shift_witness(self):
        r = min_equinorm_index(E1, 1, HARMONIC, 0.5)
        assert isinstance(r, NotEquinormed)
        assert r.value == 1.0 and r.index is None

    def test_explicit(self):
        assert min_equinorm_index(ExplicitFinite([Finite([1, 2])]), 1, HARMONIC, 0.1) == 2
        assert min_equinorm_index(ExplicitFinite([Finite([1, 2]), Finite([0, 0, 1])]), 1, HARMONIC, 0.1) == 3

    @pytest.mark.parametrize("c,eps,expected", [
        (1.0, 0.1, 4), (1.0, 0.01, 16), (1.0, 0.001, 61),
        (3.0, 0.1, 8), (3.0, 0.01, 31), (3.0, 0.001, 114),
    ])
    def test_dominated_frozen(self, c, eps, expected):
        assert min_equinorm_index(Dominated(Power(c, 2)), 1, HARMONIC, eps) == expected

    def test_dominated_against_independent_scan(self):
        for eps in (0.05, 0.02):
            assert min_equinorm_index(Dominated(Power(2, 1.5)), 1, INVSQRT, eps) == _tail_scan(2, 1.5, 1, 0.5, eps)

    def test_dominated_extremal_member(self):
        # g restricted to indices beyond N realizes the supremum of the gap
        g, n = Power(1, 2), 4
        tail = Finite([0.0] * n + Power(1, 2).terms(4000)[n:].tolist())
        gap = lorentz_norm_pth(tail, 1, HARMONIC).hi - 0.0
        t = decompose(g, 1, HARMONIC, n, tol=1e-10).T
        assert gap <= t.hi and t.lo - gap < 1e-3

    def test_scaled_basis(self):
        assert min_equinorm_index(ScaledBasis(Power(1, 1)), 1, HARMONIC, 0.1) == 10
        assert min_equinorm_index(ScaledBasis(Power(1, 1)), 2, HARMONIC, 0.01) == 10
        r = min_equinorm_index(ScaledBasis(Power(0.5, 0)), 1, HARMONIC, 0.5)
        assert isinstance(r, NotEquinormed) and r.value == 0.5
        assert min_equinorm_index(ScaledBasis(Power(0.5, 0)), 1, HARMONIC, 0.6) == 1

    @given(st.lists(finite_sequences(max_len=7, max_support=6), min_size=1, max_size=4), exponents, weights,
           st.sampled_from([0.5, 0.1, 0.01]))
    @settings(max_examples=100)
    def test_against_oracle(self, members, p, w, eps):
        n = min_equinorm_index(ExplicitFinite(members), p, w, eps)
        assert brute_force_equinorm_gap(members, p, w, n) < eps
        if n > 1:
            assert brute_force_equinorm_gap(members, p, w, n - 1) >= eps * (1 - 1e-12)

    @given(st.lists(finite_sequences(), min_size=1, max_size=4), exponents, weights)
    @settings(max_examples=100)
    def test_monotone_in_eps(self, members, p, w):
        ns = [min_equinorm_index(ExplicitFinite(members), p, w, e) for e in (1.0, 0.1, 0.01, 0.001)]
        assert ns == sorted(ns)


class TestTailCriterion:
    def test_examples(self):
        assert tail_criterion_index(ExplicitFinite([Finite([1, 2])]), 1, HARMONIC, 0.1) == 2
        r = tail_criterion_index(E1, 1, HARMONIC, 0.5)
        assert isinstance(r, NotSatisfied) and r.value == 1.0

    def test_dominated(self):
        A = Dominated(Power(1, 2))
        for eps in (0.1, 0.01, 0.001):
            n = tail_criterion_index(A, 1, HARMONIC, eps)
            assert n == min_equinorm_index(A, 1, HARMONIC, eps) == _tail_scan(1, 2, 1, 1, eps)
            # g alone keeps its large entries at the front, so its own tail is smaller
            own = 1
            while decompose(A.envelope, 1, HARMONIC, own, tol=eps * 1e-3).H_tilde.hi >= eps:
                own += 1
            assert own <= n

    @given(st.lists(finite_sequences(), min_size=1, max_size=4), exponents, weights, st.sampled_from([0.3, 0.03]))
    @settings(max_examples=100)
    def test_tail_index_valid(self, members, p, w, eps):
        n = tail_criterion_index(ExplicitFinite(members), p, w, eps)
        assert all(decompose(a, p, w, n).H_tilde.hi < eps for a in members)


class TestAuxiliary:
    def test_lambda_examples(self):
        assert lambda_of(1, 0.5, 1, HARMONIC) == 3
        assert lambda_of(0, 0.3, 1, HARMONIC) == 0
        for w in (HARMONIC, INVSQRT, PowerDecay(0.9)):
            assert lambda_of(1, 1, 1, w) == 1

    def test_lambda_large(self):
        # least n with H_n > 10 (resp. 20) is 12367 (resp. 272400600)
        assert lambda_of(10, 1, 1, HARMONIC) == 12366
        assert lambda_of(20, 1, 1, HARMONIC) == 272400599
        assert lambda_of(80, 2, 2, HARMONIC) == 272400599

    def test_lambda_invsqrt_against_mpmath(self):
        n = lambda_of(100, 1, 1, INVSQRT)
        s = lambda m: mpmath.zeta(0.5) - mpmath.zeta(0.5, m + 1)  # noqa: E731
        assert s(n) <= 100 < s(n + 1)

    def test_lambda_limit(self):
        from lorentzseq import BudgetExhausted
        with pytest.raises(BudgetExhausted):
            lambda_of(1e3, 1, 1, HARMONIC)

    def test_gamma_examples(self):
        assert gamma_of(Dominated(Power(1, 1)), 0.25) == 5
        assert gamma_of(E1, 0.5) == math.inf
        assert gamma_of(ExplicitFinite([Finite([1, 2])]), 0.1) == 3
        assert gamma_of(ScaledBasis(Geometric(1, 0.5)), 0.2) == 3

    def test_gamma_inverse(self):
        assert gamma_inverse_at(Dominated(Power(1, 1)), 4) == pytest.approx(0.25, abs=1e-11)
        assert gamma_inverse_at(ExplicitFinite([Finite([]), Finite([0, 0])]), 3) == 0.0
        assert gamma_inverse_at(ExplicitFinite([Finite([1, 2])]), 1) == pytest.approx(2.0, abs=1e-11)
        assert gamma_inverse_at(ExplicitFinite([Finite([1, 2])]), 3) == 0.0
        with pytest.raises(NotUniform):
            gamma_inverse_at(E1, 2)
        with pytest.raises(NotUniform):
            gamma_inverse_at(ScaledBasis(Power(1, 0)), 2)

    @given(st.lists(finite_sequences(), min_size=1, max_size=4), exponents, weights, st.floats(0.05, 12))
    @settings(max_examples=100)
    def test_lambda_gamma_soundness(self, members, p, w, d):
        A = ExplicitFinite(members)
        M = family_bound(A, p, w).hi
        assume(M <= 20 * d**p)
        lam = lambda_of(M, d, p, w)
        g = gamma_of(A, d)
        for a in members:
            vals = np.abs(np.asarray(a.entries))
            assert int(np.sum(vals >= d)) <= lam
            assert np.all(vals[int(g) - 1:] < d)
        for n in range(1, 9):
            v = gamma_inverse_at(A, n)
            assert all(abs(a.term(n)) <= v + 1e-12 for a in members)


class TestDifferenceFamily:
    def test_examples(self):
        d = difference_family(ExplicitFinite([Finite([1]), Finite([0])]))
        assert set(d.members) == {Finite([0]), Finite([1]), Finite([-1])}
        assert difference_family(ExplicitFinite([Finite([2, 3])])).members == (Finite([]),)
        d = difference_family(ExplicitFinite([Finite([1, 2]), Finite([1, 0])]))
        assert Finite([0, 2]) in d.members and Finite([0, -2]) in d.members

    def test_unsupported(self):
        with pytest.raises(UnsupportedVariant):
            difference_family(E1)
        with pytest.raises(UnsupportedVariant):
            difference_family(ExplicitFinite([Power(1, 1)]))

    @given(st.lists(finite_sequences(), min_size=1, max_size=4), exponents, weights, st.integers(0, 8))
    @settings(max_examples=100)
    def test_tail_norm_propagation(self, members, p, w, n):
        # ||(a-b) beyond n|| <= ||a beyond n|| + ||b beyond n||, so T_n(a-b) <= 2^p max T_n
        A = ExplicitFinite(members)
        worst = max(decompose(a, p, w, n).T.hi for a in members)
        for diff in difference_family(A).members:
            assert decompose(diff, p, w, n).T.hi <= 2**p * worst * (1 + 1e-12) + 1e-300


FIXTURES = [
    (E1, Verdict.NOT_PRECOMPACT),
    (ShiftFamily(Finite([0.5, -2, 1])), Verdict.NOT_PRECOMPACT),
    (ExplicitFinite([Finite([1, 2]), Finite([0, 0, 1]), Finite([])]), Verdict.PRECOMPACT),
    (Dominated(Power(1, 2)), Verdict.PRECOMPACT),
    (Dominated(Geometric(2, 0.5), (Finite([1, -0.5]),)), Verdict.PRECOMPACT),
    (ScaledBasis(Power(1, 1)), Verdict.PRECOMPACT),
    (ScaledBasis(Power(0.5, 0)), Verdict.NOT_PRECOMPACT),
    (ScaledBasis(Power(1, -1)), Verdict.NOT_PRECOMPACT),
    (ExplicitFinite([Power(1, 2), Geometric(1, -0.5)]), Verdict.PRECOMPACT),
    (ExplicitFinite([Power(1, 0.5)]), Verdict.NOT_PRECOMPACT),
]


@pytest.mark.parametrize("family,verdict", FIXTURES)
def test_certify_fixtures(family, verdict):
    p, w = (1, INVSQRT) if family == ExplicitFinite([Power(1, 0.5)]) else (1, HARMONIC)
    cert = certify(family, p, w)
    assert cert.verdict is verdict
    assert cert.cross_check_agreement
    if verdict is Verdict.PRECOMPACT:
        assert cert.bound_M is not None
        assert [e for e, _ in cert.equinorm_table] == [0.1, 0.01, 0.001]
        ns = [n for _, n in cert.equinorm_table]
        assert ns == sorted(ns)
        assert cert.tail_table == cert.equinorm_table
    else:
        assert cert.witness is not None


def test_certify_shift_caught_below_ladder():
    # ||base||^p = 0.05 is below every ladder eps except the critical probe
    cert = certify(ShiftFamily(Finite([0.05])), 1, HARMONIC, eps_ladder=(0.1,))
    assert cert.verdict is Verdict.NOT_PRECOMPACT
    assert isinstance(cert.witness, NotEquinormed) and cert.witness.eps == pytest.approx(0.05)


def test_certify_tabled():
    t = Tabled([1 / i**2 for i in range(1, 201)], PowerTail(1, 2))
    cert = certify(ExplicitFinite([t]), 1, HARMONIC)
    assert cert.verdict is Verdict.PRECOMPACT and cert.method is Method.BOTH


def test_certify_inconclusive():
    loose = Tabled([1 / i**2 for i in range(1, 21)], PowerTail(10, 1.1))
    cert = certify(ExplicitFinite([loose]), 1, HARMONIC, budget=10**5)
    assert cert.verdict is Verdict.INCONCLUSIVE
    assert cert.notes


def test_certificate_serializes():
    import json
    for family, _ in FIXTURES[:4]:
        json.dumps(certify(family, 1, HARMONIC).to_dict())
