"""Lorentz norms, truncation seminorms and head/tail decompositions.

All quantities are p-th powers of norms.  Infinite sums are returned as
:class:`Interval` enclosures: the materialised part is summed with
``math.fsum`` and the remainder is bounded by the integral test (power tails)
or a geometric series (geometric tails).  Enclosure widths account for
truncation only, not for floating point rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .core import (
    DEFAULT_BUDGET,
    Finite,
    Geometric,
    Power,
    SequenceSpec,
    Tabled,
    WeightSpec,
    exact_sum,
    stable_order,
)
from .errors import (
    BudgetExhausted,
    InvalidSpec,
    NotSummable,
    ToleranceUnreachable,
    UnknownTerm,
    UnsupportedVariant,
)

DEFAULT_TOL = 1e-8


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with finite endpoints."""

    lo: float
    hi: float

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ValueError(f"interval endpoints must be finite: [{self.lo}, {self.hi}]")
        if self.lo > self.hi:
            raise ValueError(f"empty interval: [{self.lo}, {self.hi}]")

    @classmethod
    def point(cls, x: float) -> Interval:
        return cls(x, x)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    def contains(self, x: float, slack: float = 0.0) -> bool:
        return self.lo - slack <= x <= self.hi + slack

    def overlaps(self, other: Interval, slack: float = 0.0) -> bool:
        return self.lo <= other.hi + slack and other.lo <= self.hi + slack

    def __add__(self, other: Interval) -> Interval:
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: Interval) -> Interval:
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def nonneg(self) -> Interval:
        """Intersect with [0, inf); used for complements of nonnegative sums."""
        return Interval(max(self.lo, 0.0), max(self.hi, 0.0))

    def to_dict(self) -> dict:
        return {"lo": self.lo, "hi": self.hi}


# ---------------------------------------------------------------------------
# Membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Member:
    norm_pth: Interval


@dataclass(frozen=True)
class NotMember:
    reason: str


@dataclass(frozen=True)
class Inconclusive:
    partial_sum: float
    horizon: int


MembershipVerdict = Union[Member, NotMember, Inconclusive]


def _check_p(p: float) -> float:
    p = float(p)
    if not (math.isfinite(p) and p >= 1.0):
        raise InvalidSpec(f"p: must be a finite real >= 1, got {p}")
    return p


def _membership_rule(a: SequenceSpec, p: float, w: WeightSpec) -> tuple:
    """Analytic membership decision: ('member' | 'not' | 'unknown', reason)."""
    if isinstance(a, (Finite, Geometric)):
        return "member", ""
    if isinstance(a, Power):
        if a.c == 0.0:
            return "member", ""
        if a.s <= 0:
            return "not", (
                f"|a_i| = {abs(a.c)}*i^({-a.s}) does not tend to 0, so the rearranged "
                "terms stay bounded below and the weighted sum diverges with sum w_i"
            )
        q = a.s * p + w.tail_beta
        if q > 1.0:
            return "member", ""
        return "not", (
            f"|a_i| is strictly decreasing, so the rearrangement is the identity and "
            f"|a_i|^p w_i ~ i^(-{q:g}) with exponent s*p + beta = {q:g} <= 1 (p-series diverges)"
        )
    if isinstance(a, Tabled):
        if a.envelope.summable(p, w):
            return "member", ""
        return "unknown", "the envelope tail sum diverges; the tabled prefix alone decides nothing"
    raise UnsupportedVariant(f"unsupported sequence type {type(a).__name__}")


# ---------------------------------------------------------------------------
# Certified evaluation engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _ExactView:
    """|a_i| known exactly: a finite table, then a nonincreasing closed-form tail."""

    prefix: np.ndarray
    tail: object  # PowerTail | GeometricTail | None

    def values(self, n: int) -> np.ndarray:
        k = len(self.prefix)
        if n <= k:
            return self.prefix[:n]
        if self.tail is None:
            return np.concatenate([self.prefix, np.zeros(n - k)])
        return np.concatenate([self.prefix, self.tail.take(np.arange(k + 1, n + 1))])


def _views(a: SequenceSpec) -> tuple:
    """(lower, upper) exact views bracketing |a| pointwise.

    The two coincide except for Tabled, where the lower view zeroes the
    unknown tail and the upper view replaces it by the envelope.
    """
    empty = np.zeros(0)
    if isinstance(a, Finite):
        view = _ExactView(np.abs(np.asarray(a.entries, dtype=np.float64)), None)
        return view, view
    if isinstance(a, (Power, Geometric)):
        view = _ExactView(empty, a.envelope)
        return view, view
    if isinstance(a, Tabled):
        table = np.abs(np.asarray(a.entries, dtype=np.float64))
        return _ExactView(table, None), _ExactView(table, a.envelope)
    raise UnsupportedVariant(f"unsupported sequence type {type(a).__name__}")


def _remainder(view: _ExactView, p: float, w: WeightSpec, start: int, shift: int) -> tuple:
    if view.tail is None:
        return 0.0, 0.0
    return view.tail.tail_bounds(p, w, start, shift)


def _at_horizon(view: _ExactView, p: float, w: WeightSpec, N: int, split: Optional[int]) -> dict:
    """All quantities with the first N terms materialised.

    Requires every entry beyond N to rank after every nonzero entry within N,
    so an index i > N has rank i - (number of zeros among the first N).
    """
    v = view.values(N)
    wp = w.array(N)
    order = stable_order(v)
    m = len(order)
    powered = v[order] ** p
    body = exact_sum(powered * wp[:m])
    lo, hi = _remainder(view, p, w, N, N - m)
    out = {"norm": (body + lo, body + hi)}
    if split is None:
        return out

    i = split
    head = v[:i]
    horder = stable_order(head)
    s_val = exact_sum(head[horder] ** p * wp[: len(horder)])
    out["S"] = (s_val, s_val)

    w_val = exact_sum(powered[:i] * wp[: min(i, m)])
    out["W"] = (w_val, w_val)

    rank = np.zeros(N, dtype=np.int64)
    rank[order] = np.arange(1, m + 1)
    hr = rank[:i]
    mask = hr > 0
    h_val = exact_sum(head[mask] ** p * wp[hr[mask] - 1])
    out["H"] = (h_val, h_val)

    tv = v[i:]
    torder = stable_order(tv)
    mt = len(torder)
    tpow = tv[torder] ** p
    zeros = (N - i) - mt
    body = exact_sum(tpow * wp[i : i + mt])
    lo, hi = _remainder(view, p, w, N, zeros)
    out["S_tilde"] = (body + lo, body + hi)
    body = exact_sum(tpow * wp[:mt])
    lo, hi = _remainder(view, p, w, N, i + zeros)
    out["T"] = (body + lo, body + hi)
    return out


def _widest(result: dict) -> float:
    return max(hi - lo for lo, hi in result.values())


def _evaluate(view: _ExactView, p: float, w: WeightSpec, split: Optional[int], tol: float,
              budget: int, strict: bool = True) -> dict:
    """Grow the horizon by doubling until every enclosure is narrower than tol."""
    k = len(view.prefix)
    extra = split or 0
    if view.tail is None:
        return _at_horizon(view, p, w, max(k, extra, 1), split)
    positive = view.prefix[view.prefix > 0]
    floor = float(positive.min()) if positive.size else math.inf
    N = max(64, 2 * (k + extra + w.power_start))
    best = None
    while True:
        if view.tail.at(N + 1) <= floor:
            best = _at_horizon(view, p, w, N, split)
            if _widest(best) <= tol:
                return best
        if N >= budget:
            if not strict and best is not None:
                return best
            raise BudgetExhausted(f"tolerance {tol:g} not reached within a horizon of {budget} terms")
        N = min(2 * N, budget)


def _quantities(a: SequenceSpec, p: float, w: WeightSpec, split: Optional[int], tol: float,
                budget: int, strict: bool = True) -> dict:
    """Certified intervals for the norm and, if split is given, the split quantities."""
    status, reason = _membership_rule(a, p, w)
    if status == "not":
        raise NotSummable(reason)
    if status == "unknown":
        raise ToleranceUnreachable(reason)
    if split is not None and isinstance(a, Tabled) and split > a.cutoff:
        raise UnknownTerm(f"split index {split} lies beyond the tabled cutoff {a.cutoff}")
    lower, upper = _views(a)
    hi_res = _evaluate(upper, p, w, split, tol, budget, strict)
    if lower is upper:
        return {key: Interval(*bounds) for key, bounds in hi_res.items()}
    lo_res = _evaluate(lower, p, w, split, tol, budget, strict)
    out = {}
    for key in hi_res:
        if key == "H":
            # extra tail mass can only push ranks later, lowering H
            out[key] = Interval(hi_res[key][0], lo_res[key][1])
        else:
            out[key] = Interval(lo_res[key][0], hi_res[key][1])
    return out


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def p_norm(a: Finite, p: float) -> float:
    """Plain l_p norm of a finitely supported sequence."""
    if not isinstance(a, Finite):
        raise UnsupportedVariant("p_norm is defined for Finite sequences only")
    p = _check_p(p)
    return exact_sum(np.abs(np.asarray(a.entries, dtype=np.float64)) ** p) ** (1.0 / p)


def lorentz_norm_bounds(a: SequenceSpec, p: float, w: WeightSpec, tol: float = DEFAULT_TOL,
                        budget: int = DEFAULT_BUDGET) -> Interval:
    """Best certified enclosure of ||a||^p, without enforcing its width.

    For Tabled sequences the width is bounded below by what the envelope
    leaves undetermined; for other variants it is at most tol.
    """
    p = _check_p(p)
    return _quantities(a, p, w, None, tol, budget)["norm"]


def lorentz_norm_pth(a: SequenceSpec, p: float, w: WeightSpec, tol: float = DEFAULT_TOL,
                     budget: int = DEFAULT_BUDGET) -> Interval:
    """Enclosure of width <= tol of ||a||_{p,w}^p = sum_i |a_{sigma_i}|^p w_i."""
    result = lorentz_norm_bounds(a, p, w, tol, budget)
    if result.width > tol:
        raise ToleranceUnreachable(
            f"the tabled data only pins the norm to width {result.width:.3g} > tol {tol:g}"
        )
    return result


def classify_membership(a: SequenceSpec, p: float, w: WeightSpec, budget: int = DEFAULT_BUDGET,
                        tol: float = DEFAULT_TOL) -> MembershipVerdict:
    """Decide whether a lies in L_{p,w}.

    Finite and Geometric sequences always do.  Power(c, s) against a weight
    with power tail exponent beta is a member iff s*p + beta > 1.  A Tabled
    sequence is a member when its envelope is summable, otherwise nothing is
    claimed.  The enclosure attached to Member is best effort within budget.
    """
    p = _check_p(p)
    status, reason = _membership_rule(a, p, w)
    if status == "not":
        return NotMember(reason)
    if status == "unknown":
        return Inconclusive(seminorm_pth(a, p, w, a.cutoff), a.cutoff)
    return Member(_quantities(a, p, w, None, tol, budget, strict=False)["norm"])


def seminorm_pth(a: SequenceSpec, p: float, w: WeightSpec, i: int) -> float:
    """S_i(a) = ||r_i(a)||^p: the first i terms sorted and paired with w_1..w_i."""
    p = _check_p(p)
    if i < 0:
        raise ValueError(f"seminorm index must be >= 0, got {i}")
    if i == 0:
        return 0.0
    head = a.terms(i)
    order = stable_order(head)
    return exact_sum(np.abs(head[order]) ** p * w.array(len(order)))


@dataclass(frozen=True)
class DecompositionRecord:
    """The eight head/tail quantities of a sequence at split index i."""

    i: int
    S: Interval
    S_tilde: Interval
    H: Interval
    H_tilde: Interval
    W: Interval
    W_tilde: Interval
    T: Interval
    norm_pth: Interval

    def to_dict(self) -> dict:
        out = {"i": self.i}
        for name in ("S", "S_tilde", "H", "H_tilde", "W", "W_tilde", "T", "norm_pth"):
            out[name] = getattr(self, name).to_dict()
        return out


def decompose(a: SequenceSpec, p: float, w: WeightSpec, i: int, tol: float = DEFAULT_TOL,
              budget: int = DEFAULT_BUDGET) -> DecompositionRecord:
    """Head/tail decomposition of ||a||^p at split index i >= 0.

    S: seminorm of the first i terms.  S_tilde: the tail a_{i+1}, a_{i+2}, ...
    normed with the shifted weights w_{i+1}, w_{i+2}, ....  H / H_tilde: the
    norm sum split by original index (weights via sigma^{-1}, zero for
    entries outside the range of sigma).  W / W_tilde: split by weight rank.
    T: the tail normed with the full weight sequence.  i = 0 means all tail.
    """
    p = _check_p(p)
    if i < 0:
        raise ValueError(f"split index must be >= 0, got {i}")
    q = _quantities(a, p, w, i, tol, budget)
    norm = q["norm"]
    return DecompositionRecord(
        i=i,
        S=q["S"],
        S_tilde=q["S_tilde"],
        H=q["H"],
        H_tilde=(norm - q["H"]).nonneg(),
        W=q["W"],
        W_tilde=(norm - q["W"]).nonneg(),
        T=q["T"],
        norm_pth=norm,
    )


def tail_norm_pth(a: SequenceSpec, p: float, w: WeightSpec, i: int, tol: float = DEFAULT_TOL,
                  budget: int = DEFAULT_BUDGET) -> Interval:
    """T_i(a) alone; cheaper than a full decomposition only in bookkeeping."""
    return decompose(a, p, w, i, tol, budget).T
