"""Weight sequences, sequence representations and the stable rearrangement.

Every object here is an immutable, validated value.  Sequences are limited to
closed-form families and explicit tables with a decaying envelope, because any
certified statement about an infinite sum needs an analysable tail.

Indices are 1-based throughout, matching the usual notation a = (a_1, a_2, ...).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import mpmath
import numpy as np

from .errors import HorizonExhausted, InvalidSpec, UnknownTerm

DEFAULT_BUDGET = 10**7

# Prefix sums up to this length are summed term by term with math.fsum; above
# it the generalized harmonic closed form (Hurwitz zeta) is evaluated instead.
_DIRECT_SUM_LIMIT = 1 << 16


def _finite_float(value, name: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise InvalidSpec(f"{name}: expected a real number, got {value!r}") from None
    if not math.isfinite(x):
        raise InvalidSpec(f"{name}: expected a finite number, got {value!r}")
    return x + 0.0  # folds -0.0 into 0.0


def _index_array(start: int, stop: int) -> np.ndarray:
    """Float array of the indices start..stop inclusive."""
    return np.arange(start, stop + 1, dtype=np.float64)


def exact_sum(values) -> float:
    """Correctly rounded sum of a float array (math.fsum, error <= 1/2 ulp)."""
    if isinstance(values, np.ndarray):
        values = values.tolist()
    return math.fsum(values)


# ---------------------------------------------------------------------------
# Weights
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerDecay:
    """w_i = i^(-beta) with beta in (0, 1]; the sum diverges, w_1 = 1."""

    beta: float

    def __post_init__(self):
        beta = _finite_float(self.beta, "beta")
        if not 0.0 < beta <= 1.0:
            raise InvalidSpec(f"beta: must lie in (0, 1], got {beta}")
        object.__setattr__(self, "beta", beta)

    @property
    def tail_beta(self) -> float:
        return self.beta

    @property
    def power_start(self) -> int:
        """First index from which w_i = i^(-tail_beta)."""
        return 1

    def at(self, i: int) -> float:
        return float(i) ** -self.beta

    def take(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.float64)
        if self.beta == 1.0:
            return 1.0 / idx
        return idx ** -self.beta

    def array(self, n: int) -> np.ndarray:
        return self.take(_index_array(1, n))


@dataclass(frozen=True)
class ExplicitPrefix:
    """Explicit leading weights followed by a PowerDecay tail.

    For i > len(values), w_i = i^(-tail.beta).  The junction must keep the
    sequence nonincreasing.
    """

    values: tuple
    tail: PowerDecay

    def __post_init__(self):
        vals = tuple(_finite_float(v, f"values[{k}]") for k, v in enumerate(self.values))
        if not vals:
            raise InvalidSpec("values: explicit prefix must not be empty")
        if vals[0] != 1.0:
            raise InvalidSpec(f"values[0]: the first weight must be exactly 1, got {vals[0]}")
        for k in range(1, len(vals)):
            if not 0.0 < vals[k] <= vals[k - 1]:
                raise InvalidSpec(
                    f"values[{k}]: weights must be positive and nonincreasing "
                    f"({vals[k - 1]} then {vals[k]})"
                )
        if not isinstance(self.tail, PowerDecay):
            raise InvalidSpec("tail: must be a PowerDecay")
        nxt = self.tail.at(len(vals) + 1)
        if nxt > vals[-1]:
            raise InvalidSpec(
                f"tail_beta: junction breaks monotonicity, w_{len(vals) + 1} = {nxt} "
                f"exceeds w_{len(vals)} = {vals[-1]}"
            )
        object.__setattr__(self, "values", vals)

    @property
    def tail_beta(self) -> float:
        return self.tail.beta

    @property
    def power_start(self) -> int:
        return len(self.values) + 1

    def at(self, i: int) -> float:
        if i <= len(self.values):
            return self.values[i - 1]
        return self.tail.at(i)

    def take(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        out = self.tail.take(idx)
        head = idx <= len(self.values)
        if np.any(head):
            table = np.asarray(self.values)
            out[head] = table[idx[head].astype(np.int64) - 1]
        return out

    def array(self, n: int) -> np.ndarray:
        k = min(n, len(self.values))
        head = np.asarray(self.values[:k], dtype=np.float64)
        if n <= k:
            return head
        return np.concatenate([head, self.tail.take(_index_array(k + 1, n))])


WeightSpec = Union[PowerDecay, ExplicitPrefix]

HARMONIC = PowerDecay(1.0)
INVSQRT = PowerDecay(0.5)


def weight_at(w: WeightSpec, i: int) -> float:
    """Return w_i (exact for tabled prefix entries, closed form otherwise)."""
    if i < 1:
        raise ValueError(f"weight index must be >= 1, got {i}")
    return w.at(i)


def _generalized_harmonic(beta: float, n: int) -> float:
    """sum_{k=1}^n k^(-beta) through the Hurwitz zeta identity."""
    with mpmath.workdps(40):
        if beta == 1.0:
            value = mpmath.harmonic(n)
        else:
            value = mpmath.zeta(beta) - mpmath.zeta(beta, n + 1)
        return float(value)


def weight_prefix_sum(w: WeightSpec, n: int) -> float:
    """Return sum_{i=1}^n w_i.

    Up to 2^16 terms the sum is formed with math.fsum over the double
    precision weights, so the only error is the rounding of each w_i (relative
    1 ulp) plus half an ulp for the total.  Larger n use the closed form at 40
    significant digits, rounded once to double.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return 0.0
    if n <= _DIRECT_SUM_LIMIT:
        return exact_sum(w.array(n))
    if isinstance(w, PowerDecay):
        return _generalized_harmonic(w.beta, n)
    k = len(w.values)
    return math.fsum(
        [math.fsum(w.values), _generalized_harmonic(w.tail.beta, n), -_generalized_harmonic(w.tail.beta, k)]
    )


# ---------------------------------------------------------------------------
# Envelopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerTail:
    """env(i) = c * i^(-s)."""

    c: float
    s: float

    def __post_init__(self):
        c = _finite_float(self.c, "c")
        s = _finite_float(self.s, "s")
        if c < 0:
            raise InvalidSpec(f"c: envelope constant must be >= 0, got {c}")
        if s <= 0:
            raise InvalidSpec(f"s: envelope exponent must be > 0, got {s}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "s", s)

    def at(self, i: int) -> float:
        return self.c * float(i) ** -self.s

    def take(self, idx: np.ndarray) -> np.ndarray:
        return self.c * np.asarray(idx, dtype=np.float64) ** -self.s

    def summable(self, p: float, w: WeightSpec) -> bool:
        """Whether sum_i env(i)^p w_i converges (p-series test)."""
        return self.c == 0.0 or self.s * p + w.tail_beta > 1.0

    def tail_bounds(self, p: float, w: WeightSpec, start: int, shift: int = 0) -> tuple:
        """Enclose R = sum_{i > start} env(i)^p * w_(i - shift).

        Needs 0 <= shift <= start and start + 1 - shift >= w.power_start, so
        every weight involved follows the power law.  Upper bound: on
        i >= start + 1 we have i - shift >= i * (start + 1 - shift) / (start + 1),
        then the integral test.  Lower bound: w_(i - shift) >= w_i, then the
        integral test from start + 1.
        """
        if self.c == 0.0:
            return 0.0, 0.0
        if not 0 <= shift <= start or start + 1 - shift < w.power_start:
            raise ValueError(f"tail_bounds: start={start}, shift={shift} outside the power-law range")
        beta = w.tail_beta
        q = self.s * p + beta
        if q <= 1.0:
            return 0.0, math.inf
        cp = self.c**p
        factor = ((start + 1) / (start + 1 - shift)) ** beta
        if start > 0:
            hi = factor * cp * float(start) ** (1.0 - q) / (q - 1.0)
        else:
            hi = cp * (1.0 + 1.0 / (q - 1.0))
        lo = cp * float(start + 1) ** (1.0 - q) / (q - 1.0)
        return lo, hi


@dataclass(frozen=True)
class GeometricTail:
    """env(i) = c * r^i with r in (0, 1)."""

    c: float
    r: float

    def __post_init__(self):
        c = _finite_float(self.c, "c")
        r = _finite_float(self.r, "r")
        if c < 0:
            raise InvalidSpec(f"c: envelope constant must be >= 0, got {c}")
        if not 0.0 < r < 1.0:
            raise InvalidSpec(f"r: envelope ratio must lie in (0, 1), got {r}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)

    def at(self, i: int) -> float:
        return self.c * self.r ** float(i)

    def take(self, idx: np.ndarray) -> np.ndarray:
        return self.c * self.r ** np.asarray(idx, dtype=np.float64)

    def summable(self, p: float, w: WeightSpec) -> bool:
        return True

    def tail_bounds(self, p: float, w: WeightSpec, start: int, shift: int = 0) -> tuple:
        """Enclose R = sum_{i > start} env(i)^p * w_(i - shift).

        All weights are <= w_(start + 1 - shift), leaving a geometric series;
        the first term alone is the lower bound.
        """
        if self.c == 0.0:
            return 0.0, 0.0
        if not 0 <= shift <= start:
            raise ValueError(f"tail_bounds: start={start}, shift={shift} invalid")
        lead = w.at(start + 1 - shift)
        first = self.c**p * self.r ** (p * (start + 1))
        return first * lead, first * lead / (1.0 - self.r**p)


EnvelopeSpec = Union[PowerTail, GeometricTail]


# ---------------------------------------------------------------------------
# Sequences
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Finite:
    """Finitely supported sequence; trailing zeros are dropped on construction."""

    entries: tuple

    def __post_init__(self):
        vals = [_finite_float(v, f"entries[{k}]") for k, v in enumerate(self.entries)]
        while vals and vals[-1] == 0.0:
            vals.pop()
        object.__setattr__(self, "entries", tuple(vals))

    exact_limit = None

    @property
    def envelope(self) -> Optional[EnvelopeSpec]:
        return None

    def term(self, i: int) -> float:
        return self.entries[i - 1] if i <= len(self.entries) else 0.0

    def terms(self, n: int) -> np.ndarray:
        out = np.zeros(n)
        k = min(n, len(self.entries))
        out[:k] = self.entries[:k]
        return out

    def tail_sup(self, n: int) -> float:
        rest = self.entries[n:]
        return max((abs(x) for x in rest), default=0.0)

    def limsup(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Power:
    """a_i = c * i^(-s).

    Any real s is accepted so that non-decaying sequences (s <= 0) can be
    represented and rejected by membership tests.
    """

    c: float
    s: float

    def __post_init__(self):
        object.__setattr__(self, "c", _finite_float(self.c, "c"))
        object.__setattr__(self, "s", _finite_float(self.s, "s"))

    exact_limit = None

    @property
    def is_zero(self) -> bool:
        return self.c == 0.0

    @property
    def envelope(self) -> Optional[EnvelopeSpec]:
        if self.c == 0.0 or self.s <= 0:
            return None
        return PowerTail(abs(self.c), self.s)

    def term(self, i: int) -> float:
        return self.c * float(i) ** -self.s

    def terms(self, n: int) -> np.ndarray:
        return self.c * _index_array(1, n) ** -self.s

    def tail_sup(self, n: int) -> float:
        if self.c == 0.0:
            return 0.0
        if self.s < 0:
            return math.inf
        return abs(self.c) * float(n + 1) ** -self.s

    def limsup(self) -> float:
        if self.c == 0.0 or self.s > 0:
            return 0.0
        return abs(self.c) if self.s == 0 else math.inf


@dataclass(frozen=True)
class Geometric:
    """a_i = c * r^i with |r| < 1."""

    c: float
    r: float

    def __post_init__(self):
        c = _finite_float(self.c, "c")
        r = _finite_float(self.r, "r")
        if not abs(r) < 1.0:
            raise InvalidSpec(f"r: ratio must satisfy |r| < 1, got {r}")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "r", r)

    exact_limit = None

    @property
    def envelope(self) -> Optional[EnvelopeSpec]:
        if self.c == 0.0 or self.r == 0.0:
            return None
        return GeometricTail(abs(self.c), abs(self.r))

    def term(self, i: int) -> float:
        return self.c * self.r**i

    def terms(self, n: int) -> np.ndarray:
        return self.c * self.r ** _index_array(1, n)

    def tail_sup(self, n: int) -> float:
        return abs(self.c) * abs(self.r) ** (n + 1)

    def limsup(self) -> float:
        return 0.0


@dataclass(frozen=True)
class Tabled:
    """Exact values for i <= len(entries); beyond that only |a_i| <= envelope(i).

    ``envelope_start`` is the first index from which the envelope is claimed
    to bound |a_i|; tabled entries at or after it are checked against it.  It
    defaults to the first unknown index.
    """

    entries: tuple
    envelope: EnvelopeSpec
    envelope_start: Optional[int] = None

    def __post_init__(self):
        vals = tuple(_finite_float(v, f"entries[{k}]") for k, v in enumerate(self.entries))
        if not isinstance(self.envelope, (PowerTail, GeometricTail)):
            raise InvalidSpec("envelope: must be a PowerTail or GeometricTail")
        start = len(vals) + 1 if self.envelope_start is None else int(self.envelope_start)
        if not 1 <= start <= len(vals) + 1:
            raise InvalidSpec(f"envelope_start: must lie in [1, {len(vals) + 1}], got {start}")
        for i in range(start, len(vals) + 1):
            if abs(vals[i - 1]) > self.envelope.at(i):
                raise InvalidSpec(
                    f"entries[{i - 1}]: |a_{i}| = {abs(vals[i - 1])} exceeds envelope {self.envelope.at(i)}"
                )
        object.__setattr__(self, "entries", vals)
        object.__setattr__(self, "envelope_start", start)

    @property
    def cutoff(self) -> int:
        return len(self.entries)

    @property
    def exact_limit(self) -> int:
        return len(self.entries)

    def term(self, i: int) -> float:
        if i > len(self.entries):
            raise UnknownTerm(f"a_{i} lies beyond the tabled cutoff {len(self.entries)}; only |a_{i}| <= {self.envelope.at(i)} is known")
        return self.entries[i - 1]

    def terms(self, n: int) -> np.ndarray:
        if n > len(self.entries):
            raise UnknownTerm(f"a_{len(self.entries) + 1} onwards are not tabled")
        return np.asarray(self.entries[:n], dtype=np.float64)

    def tail_sup(self, n: int) -> float:
        """Certified upper bound on sup_{i > n} |a_i|."""
        rest = max((abs(x) for x in self.entries[n:]), default=0.0)
        return max(rest, self.envelope.at(max(n, len(self.entries)) + 1))

    def limsup(self) -> float:
        return 0.0


SequenceSpec = Union[Finite, Power, Geometric, Tabled]


def term_at(a: SequenceSpec, i: int) -> float:
    """Return a_i, raising UnknownTerm where only a bound on |a_i| is known."""
    if i < 1:
        raise ValueError(f"sequence index must be >= 1, got {i}")
    return a.term(i)


def is_zero_sequence(a: SequenceSpec) -> bool:
    if isinstance(a, Finite):
        return not a.entries
    if isinstance(a, Power):
        return a.c == 0.0
    if isinstance(a, Geometric):
        return a.c == 0.0 or a.r == 0.0
    return not any(a.entries) and a.envelope.c == 0.0


# ---------------------------------------------------------------------------
# Rearrangement
# ---------------------------------------------------------------------------


def stable_order(values: np.ndarray) -> np.ndarray:
    """0-based positions of the nonzero entries of |values|, largest first.

    Equal values keep increasing index order, which is the smallest-index
    tie-break of the optimal injective map.
    """
    mags = np.abs(values)
    order = np.argsort(-mags, kind="stable")
    return order[mags[order] > 0]


@dataclass(frozen=True)
class Rearrangement:
    """Leading ranks of the nonincreasing rearrangement of a sequence.

    ``sigma[k]`` is the index holding the (k+1)-th largest |a_i|, or None once
    the nonzero entries are exhausted (the matching value is then 0).
    """

    seq: SequenceSpec
    sigma: tuple
    values: tuple

    def rank_of(self, j: int, budget: int = DEFAULT_BUDGET) -> Optional[int]:
        """sigma^{-1}(j), looked up in the prefix when possible."""
        for k, idx in enumerate(self.sigma):
            if idx == j:
                return k + 1
        return sigma_inverse_at(self.seq, j, budget)


def _grow(horizon: int, a: SequenceSpec, budget: int, what: str) -> int:
    limit = a.exact_limit
    if limit is not None and horizon >= limit:
        raise HorizonExhausted(f"{what}: the tabled cutoff {limit} does not separate the envelope")
    if horizon >= budget:
        raise HorizonExhausted(f"{what}: no separating horizon within budget {budget}")
    nxt = min(2 * horizon, budget)
    return nxt if limit is None else min(nxt, limit)


def rearrangement_prefix(a: SequenceSpec, n: int, budget: int = DEFAULT_BUDGET) -> Rearrangement:
    """First n ranks of the stable nonincreasing rearrangement.

    A horizon H is grown by doubling until sup_{i > H} |a_i| is at most the
    n-th largest value found within H.  Entries past H then cannot displace
    any of the first n ranks (equal values lose to smaller indices), so the
    prefix is globally correct.  Missing ranks are padded with (None, 0.0).
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    horizon = max(2 * n, 64)
    if isinstance(a, Finite):
        horizon = max(len(a.entries), 1)
    if a.exact_limit is not None:
        horizon = min(horizon, a.exact_limit)
    while True:
        vals = a.terms(horizon)
        order = stable_order(vals)
        top = order[:n]
        threshold = abs(vals[top[-1]]) if len(top) == n else 0.0
        if a.tail_sup(horizon) <= threshold:
            break
        horizon = _grow(horizon, a, budget, "rearrangement_prefix")
    sigma = [int(k) + 1 for k in top] + [None] * (n - len(top))
    values = [float(abs(vals[k])) for k in top] + [0.0] * (n - len(top))
    return Rearrangement(a, tuple(sigma), tuple(values))


def sigma_inverse_at(a: SequenceSpec, j: int, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    """Rank of index j under the stable rearrangement, or None when a_j = 0.

    Counts entries preceding j: strictly larger ones anywhere, equal ones at
    smaller indices.  The horizon grows until the tail bound is <= |a_j|.
    """
    x = abs(term_at(a, j))
    if x == 0.0:
        return None
    horizon = max(2 * j, 64)
    if isinstance(a, Finite):
        horizon = max(len(a.entries), j)
    if a.exact_limit is not None:
        horizon = min(horizon, a.exact_limit)
    while a.tail_sup(horizon) > x:
        horizon = _grow(horizon, a, budget, "sigma_inverse_at")
    mags = np.abs(a.terms(horizon))
    return 1 + int(np.count_nonzero(mags > x)) + int(np.count_nonzero(mags[: j - 1] == x))
