"""Families of sequences, equinormedness and precompactness certificates.

A family A in L_{p,w} is precompact iff it is bounded and equinormed, i.e.
for every eps one truncation index N gives ||a||^p - S_N(a) < eps on all of
A.  Equivalently (for bounded A), the tails of the norm sum taken by original
index, H~_N(a), fall below eps uniformly.  Both routes are computed here and
cross-checked.

Infinite families are only accepted in four structured shapes, each of which
admits an exact or certified evaluation of the supremum over the family:

* ExplicitFinite: a finite list of members;
* ShiftFamily: all right shifts of one finitely supported base;
* ScaledBasis: the scaled unit vectors c_n e_n;
* Dominated: every a with |a_i| <= |g_i|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from .core import (
    DEFAULT_BUDGET,
    Finite,
    SequenceSpec,
    Tabled,
    WeightSpec,
    weight_prefix_sum,
)
from .errors import BudgetExhausted, InvalidSpec, NotSummable, NotUniform, UnknownTerm, UnsupportedVariant
from .norms import (
    DEFAULT_TOL,
    Interval,
    _check_p,
    decompose,
    lorentz_norm_bounds,
    lorentz_norm_pth,
    seminorm_pth,
)

DEFAULT_LADDER = (1e-1, 1e-2, 1e-3)

# how many leading terms of a Dominated sample are checked against the envelope
_SAMPLE_CHECK_HORIZON = 1000


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExplicitFinite:
    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))


@dataclass(frozen=True)
class ShiftFamily:
    """{sigma^n(base) : n >= 0}, where sigma^n prepends n zeros."""

    base: Finite

    def __post_init__(self):
        if not isinstance(self.base, Finite):
            raise InvalidSpec("base: a shift family needs a Finite base sequence")

    def member(self, n: int) -> Finite:
        return Finite((0.0,) * n + self.base.entries)


@dataclass(frozen=True)
class ScaledBasis:
    """{c_n e_n : n >= 1}."""

    coeffs: SequenceSpec

    def member(self, n: int) -> Finite:
        return Finite((0.0,) * (n - 1) + (self.coeffs.term(n),))


@dataclass(frozen=True)
class Dominated:
    """{a : |a_i| <= |g_i| for all i}, with optional explicit members."""

    envelope: SequenceSpec
    samples: tuple = ()

    def __post_init__(self):
        g = self.envelope
        if isinstance(g, Tabled):
            raise InvalidSpec("envelope: a dominating sequence must be known exactly (not Tabled)")
        object.__setattr__(self, "samples", tuple(self.samples))
        for k, s in enumerate(self.samples):
            horizon = _SAMPLE_CHECK_HORIZON
            if isinstance(s, Finite):
                horizon = max(len(s.entries), 1)
            elif isinstance(s, Tabled):
                horizon = max(s.cutoff, 1)
            bound = np.abs(g.terms(horizon))
            vals = np.abs(s.terms(horizon)) if not isinstance(s, Tabled) else np.abs(
                np.asarray(s.entries, dtype=np.float64))
            bad = np.flatnonzero(vals > bound[: len(vals)])
            if bad.size:
                i = int(bad[0]) + 1
                raise InvalidSpec(f"samples[{k}]: |a_{i}| = {vals[i - 1]} exceeds the envelope {bound[i - 1]}")


FamilySpec = Union[ExplicitFinite, ShiftFamily, ScaledBasis, Dominated]


@dataclass(frozen=True)
class Unbounded:
    reason: str


@dataclass(frozen=True)
class Counterexample:
    """A member whose gap stays >= eps.

    ``index`` None means the witness works for every truncation index N; the
    member is then described relative to N.
    """

    eps: float
    index: Optional[int]
    member: str
    value: float
    reason: str

    def to_dict(self) -> dict:
        return {
            "kind": type(self).__name__,
            "eps": self.eps,
            "index": self.index,
            "member": self.member,
            "gap": None if math.isinf(self.value) else self.value,
            "reason": self.reason,
        }


class NotEquinormed(Counterexample):
    pass


class NotSatisfied(Counterexample):
    pass


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _least_true(pred: Callable[[int], bool], start: int = 1, limit: Optional[int] = None) -> int:
    """Least n >= start with pred(n), for pred monotone False -> True."""
    if pred(start):
        return start
    lo, hi = start, max(2 * start, start + 1)
    while not pred(hi):
        if limit is not None and hi >= limit:
            raise BudgetExhausted(f"no index up to {limit} satisfies the criterion")
        lo, hi = hi, hi * 2 if limit is None else min(hi * 2, limit)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def _index_limit(a: SequenceSpec, budget: int) -> int:
    return min(budget, a.cutoff) if isinstance(a, Tabled) else budget


def _inner_tol(tol: float, eps: float) -> float:
    return min(tol, eps * 1e-3)


def _family_limsup(A: FamilySpec) -> float:
    """lim sup over positions of sup over the family of |a_m|."""
    if isinstance(A, ExplicitFinite):
        return max((a.limsup() for a in A.members), default=0.0)
    if isinstance(A, ShiftFamily):
        return max((abs(x) for x in A.base.entries), default=0.0)
    if isinstance(A, ScaledBasis):
        return A.coeffs.limsup()
    return A.envelope.limsup()


def _family_sup(A: FamilySpec) -> float:
    """sup over the family and all positions of |a_m| (an upper bound for Tabled data)."""
    if isinstance(A, ExplicitFinite):
        return max((a.tail_sup(0) for a in A.members), default=0.0)
    if isinstance(A, ShiftFamily):
        return A.base.tail_sup(0)
    if isinstance(A, ScaledBasis):
        return A.coeffs.tail_sup(0)
    return A.envelope.tail_sup(0)


# ---------------------------------------------------------------------------
# Bound
# ---------------------------------------------------------------------------


def family_bound(A: FamilySpec, p: float, w: WeightSpec, tol: float = DEFAULT_TOL,
                 budget: int = DEFAULT_BUDGET) -> Union[Interval, Unbounded]:
    """Certified enclosure of sup_{a in A} ||a||^p, or Unbounded.

    Shifts keep the multiset of values, so a shift family has the norm of its
    base.  ||c_n e_n||^p = |c_n|^p w_1.  A dominated family contains its
    envelope, whose norm dominates every member's.
    """
    p = _check_p(p)
    if isinstance(A, ExplicitFinite):
        bounds = [lorentz_norm_bounds(a, p, w, tol, budget) for a in A.members]
        if not bounds:
            return Interval.point(0.0)
        return Interval(max(b.lo for b in bounds), max(b.hi for b in bounds))
    if isinstance(A, ShiftFamily):
        return lorentz_norm_pth(A.base, p, w, tol, budget)
    if isinstance(A, ScaledBasis):
        c = A.coeffs
        sup = c.tail_sup(0)
        if math.isinf(sup) or c.limsup() == math.inf:
            return Unbounded("sup_n |c_n| is infinite, so ||c_n e_n||^p = |c_n|^p w_1 is unbounded")
        if isinstance(c, Tabled):
            known = max((abs(x) for x in c.entries), default=0.0)
            return Interval(known**p, sup**p)
        return Interval.point(sup**p)
    if isinstance(A, Dominated):
        return lorentz_norm_pth(A.envelope, p, w, tol, budget)
    raise UnsupportedVariant(f"unsupported family type {type(A).__name__}")


# ---------------------------------------------------------------------------
# Equinormedness
# ---------------------------------------------------------------------------


def _member_gap_index(a: SequenceSpec, p: float, w: WeightSpec, eps: float, tol: float,
                      budget: int) -> int:
    """Least N >= 1 with ||a||^p - S_N(a) certified < eps."""
    if isinstance(a, Finite):
        norm = lorentz_norm_pth(a, p, w).hi
        return _least_true(lambda n: norm - seminorm_pth(a, p, w, n) < eps, 1, max(len(a.entries), 1))
    norm = lorentz_norm_bounds(a, p, w, _inner_tol(tol, eps), budget).hi
    limit = _index_limit(a, budget)
    return _least_true(lambda n: n <= limit and norm - seminorm_pth(a, p, w, min(n, limit)) < eps, 1, limit)


def _scaled_basis_index(A: ScaledBasis, p: float, eps: float, kind) -> Union[int, Counterexample]:
    c = A.coeffs
    lim = c.limsup()
    if lim**p >= eps:
        return kind(eps, None, "c_n e_n for some n > N", lim**p,
                    f"|c_n|^p does not fall below eps: lim sup |c_n|^p = {lim**p:g}")
    return _least_true(lambda n: c.tail_sup(n) ** p < eps, 1)


def _shift_index(A: ShiftFamily, p: float, w: WeightSpec, eps: float, kind) -> Union[int, Counterexample]:
    norm = lorentz_norm_pth(A.base, p, w).lo
    if norm >= eps:
        return kind(eps, None, "shift by N (support moved past index N)", norm,
                    "for every N the member shifted by N has S_N = H_N = 0, so its gap equals "
                    f"||base||^p = {norm:g} >= eps")
    return 1


def _dominated_tail_index(A: Dominated, p: float, w: WeightSpec, eps: float, tol: float,
                          budget: int) -> int:
    g = A.envelope
    inner = _inner_tol(tol, eps)
    return _least_true(lambda n: decompose(g, p, w, n, inner, budget).T.hi < eps, 1, budget)


def min_equinorm_index(A: FamilySpec, p: float, w: WeightSpec, eps: float,
                       budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL) -> Union[int, NotEquinormed]:
    """Least N with sup_{a in A} (||a||^p - S_N(a)) < eps, or a witness that none exists.

    Dominated families use gap(a) <= T_N(a) <= T_N(g); the bound is attained by
    the member that keeps g beyond N only, so the index is exact.  For
    ExplicitFinite members other than Finite the index is the least N whose
    certified gap (upper end of the norm enclosure minus S_N) is < eps.
    """
    p = _check_p(p)
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if isinstance(A, ExplicitFinite):
        return max((_member_gap_index(a, p, w, eps, tol, budget) for a in A.members), default=1)
    if isinstance(A, ShiftFamily):
        return _shift_index(A, p, w, eps, NotEquinormed)
    if isinstance(A, ScaledBasis):
        return _scaled_basis_index(A, p, eps, NotEquinormed)
    if isinstance(A, Dominated):
        return _dominated_tail_index(A, p, w, eps, tol, budget)
    raise UnsupportedVariant(f"unsupported family type {type(A).__name__}")


def _member_tail_index(a: SequenceSpec, p: float, w: WeightSpec, eps: float, tol: float,
                       budget: int) -> int:
    """Least N >= 1 with H~_N(a) certified < eps."""
    if isinstance(a, Finite):
        return _least_true(lambda n: decompose(a, p, w, n).H_tilde.hi < eps, 1, max(len(a.entries), 1))
    inner = _inner_tol(tol, eps)
    limit = _index_limit(a, budget)
    return _least_true(lambda n: n <= limit and decompose(a, p, w, n, inner, budget).H_tilde.hi < eps,
                       1, limit)


def tail_criterion_index(A: FamilySpec, p: float, w: WeightSpec, eps: float,
                         budget: int = DEFAULT_BUDGET, tol: float = DEFAULT_TOL) -> Union[int, NotSatisfied]:
    """Least N with sup_{a in A} H~_N(a) < eps, or a witness that none exists.

    H~_N is nonincreasing in N, so the least N also works for every larger
    index.  For a shift family the member shifted by N keeps its whole norm
    in the tail; for c_n e_n the rank of n is 1, so H~_N = |c_n|^p for n > N;
    for a dominated family H~_N(a) <= T_N(a) <= T_N(g) with equality for the
    member g restricted to indices beyond N.
    """
    p = _check_p(p)
    if eps <= 0:
        raise ValueError("eps must be > 0")
    if isinstance(A, ExplicitFinite):
        return max((_member_tail_index(a, p, w, eps, tol, budget) for a in A.members), default=1)
    if isinstance(A, ShiftFamily):
        return _shift_index(A, p, w, eps, NotSatisfied)
    if isinstance(A, ScaledBasis):
        return _scaled_basis_index(A, p, eps, NotSatisfied)
    if isinstance(A, Dominated):
        return _dominated_tail_index(A, p, w, eps, tol, budget)
    raise UnsupportedVariant(f"unsupported family type {type(A).__name__}")


# ---------------------------------------------------------------------------
# Auxiliary bounds
# ---------------------------------------------------------------------------


def lambda_of(M: float, d: float, p: float, w: WeightSpec, limit: int = 10**18) -> int:
    """Largest n with d^p * (w_1 + ... + w_n) <= M, or 0.

    No member of a family with ||a||^p <= M has more than this many entries
    with |a_i| >= d.  Finite because sum w_i diverges; values above ``limit``
    raise BudgetExhausted.
    """
    if d <= 0:
        raise ValueError("d must be > 0")
    if M < 0:
        raise ValueError("M must be >= 0")
    p = _check_p(p)
    dp = d**p
    # rounding in d^p or in a norm computed elsewhere must not shrink the count
    M = M * (1.0 + 1e-12)

    def fits(n: int) -> bool:
        return dp * weight_prefix_sum(w, n) <= M

    if not fits(1):
        return 0
    size = 256
    while size <= 1 << 20:
        cums = dp * np.cumsum(w.array(size))
        n = int(np.searchsorted(cums, M, side="right"))
        if n < size:
            # cumsum rounding can misplace a near-tie; settle it with exact sums
            n = max(n, 1)
            while n > 1 and not fits(n):
                n -= 1
            while fits(n + 1):
                n += 1
            return n
        size *= 16
    lo = 1 << 20
    hi = 2 * lo
    while fits(hi):
        if hi >= limit:
            raise BudgetExhausted(f"lambda exceeds {limit}")
        lo, hi = hi, 2 * hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if fits(mid):
            lo = mid
        else:
            hi = mid
    return lo


def _sequence_gamma(a: SequenceSpec, d: float) -> Union[int, float]:
    if a.limsup() >= d:
        return math.inf
    return _least_true(lambda n: a.tail_sup(n - 1) < d, 1)


def gamma_of(A: FamilySpec, d: float) -> Union[int, float]:
    """Least N with |a_n| < d for all n >= N and all a in A; math.inf if none.

    Exact for fully known sequences.  Tabled members contribute through their
    envelope, which makes the value a certified upper bound.
    """
    if d <= 0:
        raise ValueError("d must be > 0")
    if isinstance(A, ExplicitFinite):
        return max((_sequence_gamma(a, d) for a in A.members), default=1)
    if isinstance(A, ShiftFamily):
        return math.inf if A.base.tail_sup(0) >= d else 1
    if isinstance(A, ScaledBasis):
        return _sequence_gamma(A.coeffs, d)
    if isinstance(A, Dominated):
        return _sequence_gamma(A.envelope, d)
    raise UnsupportedVariant(f"unsupported family type {type(A).__name__}")


def gamma_inverse_at(A: FamilySpec, n: int, tol: float = 1e-12) -> float:
    """Majorant value sup{x > 0 : gamma(x) > n}, found by bisection on x.

    gamma is nonincreasing in x, and gamma(x) > n exactly when some member
    has |a_m| >= x at some m >= n, so the result is sup_{m >= n} sup_A |a_m|:
    it dominates |a_n| for every member.  The upper end of the final bracket
    is returned (within tol of the supremum, never below it).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if _family_limsup(A) > 0:
        raise NotUniform("the family does not tend to 0 uniformly; gamma is infinite near 0")
    top = _family_sup(A)
    if math.isinf(top):
        raise NotUniform("the family is unbounded")
    lo, hi = 0.0, 2.0 * top + 1.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if gamma_of(A, mid) > n:
            lo = mid
        else:
            hi = mid
    return 0.0 if lo == 0.0 else hi


def difference_family(A: ExplicitFinite) -> ExplicitFinite:
    """All differences a - b for a, b in A (both orders, a = b included), deduplicated."""
    if not isinstance(A, ExplicitFinite) or not all(isinstance(a, Finite) for a in A.members):
        raise UnsupportedVariant("difference_family needs an ExplicitFinite family of Finite members")
    seen = {}
    for a in A.members:
        for b in A.members:
            n = max(len(a.entries), len(b.entries))
            diff = Finite(tuple(a.term(i) - b.term(i) for i in range(1, n + 1)))
            seen.setdefault(diff, None)
    return ExplicitFinite(tuple(seen))


# ---------------------------------------------------------------------------
# Certification
# ---------------------------------------------------------------------------


class Verdict(str, Enum):
    PRECOMPACT = "Precompact"
    NOT_PRECOMPACT = "NotPrecompact"
    INCONCLUSIVE = "Inconclusive"


class Method(str, Enum):
    SEMINORM_GAP = "SeminormGap"
    TAIL_CRITERION = "TailCriterion"
    BOTH = "Both"


@dataclass
class Certificate:
    verdict: Verdict
    bound_M: Optional[Interval]
    equinorm_table: list
    tail_table: list
    witness: object
    method: Method
    cross_check_agreement: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        if isinstance(self.witness, Counterexample):
            witness = self.witness.to_dict()
        elif isinstance(self.witness, Unbounded):
            witness = {"kind": "Unbounded", "reason": self.witness.reason}
        else:
            witness = None
        return {
            "verdict": self.verdict.value,
            "bound_M": None if self.bound_M is None else self.bound_M.to_dict(),
            "table": [{"eps": e, "N": n} for e, n in self.equinorm_table],
            "tail_table": [{"eps": e, "N": n} for e, n in self.tail_table],
            "witness": witness,
            "method": self.method.value,
            "cross_check_agreement": self.cross_check_agreement,
            "notes": list(self.notes),
        }


def _critical_eps(A: FamilySpec, p: float, w: WeightSpec) -> Optional[float]:
    """For the canonical infinite families, the eps at which equinormedness fails."""
    if isinstance(A, ShiftFamily):
        norm = lorentz_norm_pth(A.base, p, w).lo
        return norm if norm > 0 else None
    if isinstance(A, ScaledBasis):
        lim = A.coeffs.limsup()
        return lim**p if 0 < lim < math.inf else None
    return None


def _run_ladder(index_fn, A, p, w, ladder, critical, tol, budget):
    table, witness, exhausted = [], None, []
    for eps in ladder:
        try:
            result = index_fn(A, p, w, eps, budget, tol)
        except (BudgetExhausted, UnknownTerm) as exc:
            exhausted.append(f"eps={eps:g}: {exc}")
            continue
        if isinstance(result, Counterexample):
            witness = witness or result
        else:
            table.append((eps, result))
    if witness is None and critical is not None:
        result = index_fn(A, p, w, critical, budget, tol)
        if isinstance(result, Counterexample):
            witness = result
    if witness is not None:
        return Verdict.NOT_PRECOMPACT, table, witness, exhausted
    if exhausted:
        return Verdict.INCONCLUSIVE, table, None, exhausted
    return Verdict.PRECOMPACT, table, None, exhausted


def certify(A: FamilySpec, p: float, w: WeightSpec, eps_ladder=DEFAULT_LADDER, tol: float = DEFAULT_TOL,
            budget: int = DEFAULT_BUDGET) -> Certificate:
    """Decide precompactness: bounded and equinormed, cross-checked by the tail criterion.

    Precompact requires an N(eps) for every eps of the ladder.  Shift and
    scaled-basis families are additionally probed at the eps where their
    equinormedness provably breaks, so a small ladder cannot hide a
    counterexample.  Budget exhaustion never becomes a mathematical claim.
    """
    p = _check_p(p)
    ladder = tuple(float(e) for e in eps_ladder)
    notes = []
    try:
        bound = family_bound(A, p, w, tol, budget)
    except NotSummable as exc:
        return Certificate(Verdict.NOT_PRECOMPACT, None, [], [], Unbounded(f"a member is not in L_(p,w): {exc}"),
                           Method.BOTH, True, notes)
    except BudgetExhausted as exc:
        return Certificate(Verdict.INCONCLUSIVE, None, [], [], None, Method.BOTH, True, [str(exc)])
    if isinstance(bound, Unbounded):
        return Certificate(Verdict.NOT_PRECOMPACT, None, [], [], bound, Method.BOTH, True, notes)

    critical = _critical_eps(A, p, w)
    gap_verdict, gap_table, gap_witness, gap_notes = _run_ladder(
        min_equinorm_index, A, p, w, ladder, critical, tol, budget)
    tail_verdict, tail_table, tail_witness, tail_notes = _run_ladder(
        tail_criterion_index, A, p, w, ladder, critical, tol, budget)
    notes += [f"seminorm gap, {n}" for n in gap_notes] + [f"tail criterion, {n}" for n in tail_notes]

    agree = gap_verdict == tail_verdict
    decided = {v for v in (gap_verdict, tail_verdict) if v is not Verdict.INCONCLUSIVE}
    if len(decided) == 2:
        notes.append("seminorm-gap and tail-criterion verdicts disagree")
        verdict, method = Verdict.INCONCLUSIVE, Method.BOTH
    elif agree:
        verdict, method = gap_verdict, Method.BOTH
    elif gap_verdict is not Verdict.INCONCLUSIVE:
        verdict, method = gap_verdict, Method.SEMINORM_GAP
    else:
        verdict, method = tail_verdict, Method.TAIL_CRITERION

    # smaller eps can only need a larger N
    ns = [n for _, n in sorted(gap_table, reverse=True)]
    if ns != sorted(ns):
        notes.append("N(eps) is not monotone in eps")
    return Certificate(verdict, bound, gap_table, tail_table, gap_witness or tail_witness, method, agree, notes)
