"""Exhaustive reference computations for small finitely supported sequences.

Nothing here sorts values: the supremum over injective maps is found by
trying every placement, so agreement with :mod:`lorentzseq.norms` is an
independent check of the greedy rearrangement.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .core import Finite, WeightSpec
from .errors import SupportTooLarge, UnsupportedVariant


@dataclass(frozen=True)
class PlacementSearchConfig:
    """slack: extra weight positions beyond the support size; max_support: cap on k."""

    slack: int = 2
    max_support: int = 8

    def __post_init__(self):
        if self.slack < 0:
            raise ValueError("slack must be >= 0")
        if self.max_support < 0:
            raise ValueError("max_support must be >= 0")

    def search_size(self, k: int) -> int:
        return math.perm(k + self.slack, k)


@lru_cache(maxsize=64)
def _placements(positions: int, k: int) -> np.ndarray:
    """All injective maps {0..k-1} -> {0..positions-1}, one per row."""
    rows = list(itertools.permutations(range(positions), k))
    return np.asarray(rows, dtype=np.int64).reshape(len(rows), k)


def _best_placement(mags: np.ndarray, p: float, weights: np.ndarray) -> float:
    k = len(mags)
    if k == 0:
        return 0.0
    powered = mags**p
    table = _placements(len(weights), k)
    scores = (weights[table] * powered).sum(axis=1)
    # re-score the near-optimal rows exactly so rounding cannot pick the wrong one
    top = np.flatnonzero(scores >= scores.max() - 1e-9 * max(1.0, abs(scores.max())))
    return max(math.fsum((weights[table[r]] * powered).tolist()) for r in top)


def _require_finite(a) -> Finite:
    if not isinstance(a, Finite):
        raise UnsupportedVariant("brute-force oracles accept Finite sequences only")
    return a


def brute_force_norm_pth(a: Finite, p: float, w: WeightSpec,
                         cfg: PlacementSearchConfig = PlacementSearchConfig()) -> float:
    """max over injective placements of the support into k + slack positions."""
    a = _require_finite(a)
    mags = np.abs(np.asarray([x for x in a.entries if x != 0.0], dtype=np.float64))
    if len(mags) > cfg.max_support:
        raise SupportTooLarge(f"support size {len(mags)} exceeds max_support {cfg.max_support}")
    return _best_placement(mags, p, w.array(len(mags) + cfg.slack))


def brute_force_seminorm_pth(a: Finite, p: float, w: WeightSpec, i: int,
                             cfg: PlacementSearchConfig = PlacementSearchConfig()) -> float:
    """max over all orderings of |a_1..a_i| paired with w_1..w_i.

    For i <= max_support this is the literal i! search.  Larger i are only
    accepted when at most max_support of the first i entries are nonzero; the
    zeros are dropped and the nonzeros placed into the first
    min(i, k + slack) positions.
    """
    a = _require_finite(a)
    head = np.abs(np.asarray(a.terms(i), dtype=np.float64)) if i > 0 else np.zeros(0)
    if i <= cfg.max_support:
        return _best_placement(head, p, w.array(i)) if i else 0.0
    mags = head[head != 0.0]
    if len(mags) > cfg.max_support:
        raise SupportTooLarge(f"{len(mags)} nonzero entries among the first {i} exceed max_support")
    return _best_placement(mags, p, w.array(min(i, len(mags) + cfg.slack)))


def brute_force_equinorm_gap(members, p: float, w: WeightSpec, N: int,
                             cfg: PlacementSearchConfig = PlacementSearchConfig()) -> float:
    """max over members of brute-force norm minus brute-force seminorm at N."""
    gaps = [
        brute_force_norm_pth(a, p, w, cfg) - brute_force_seminorm_pth(a, p, w, N, cfg)
        for a in members
    ]
    return max(gaps, default=0.0)
