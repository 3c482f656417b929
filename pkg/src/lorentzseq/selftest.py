"""Randomized cross-checks of the library against the brute-force oracle and basic invariants."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import HARMONIC, INVSQRT, Finite
from .norms import decompose, lorentz_norm_pth, seminorm_pth
from .oracle import brute_force_norm_pth, brute_force_seminorm_pth

ORACLE_TOL = 1e-12
REL_TOL = 1e-12


def random_finite(rng: np.random.Generator, max_support: int = 7, max_len: int = 10,
                  tie_prob: float = 0.3, bound: float = 10.0) -> Finite:
    """Random Finite sequence with at most ``max_support`` nonzeros.

    With probability ``tie_prob`` some entries copy the magnitude of an
    earlier entry (sign chosen at random) so that ties are exercised.
    """
    length = int(rng.integers(1, max_len + 1))
    k = int(rng.integers(0, min(max_support, length) + 1))
    vals = np.zeros(length)
    pos = rng.choice(length, size=k, replace=False)
    vals[pos] = rng.uniform(-bound, bound, size=k)
    if k >= 2 and rng.random() < tie_prob:
        src = pos[0]
        for j in pos[1:]:
            if rng.random() < 0.5:
                vals[j] = abs(vals[src]) * rng.choice([-1.0, 1.0])
    return Finite(vals.tolist())


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= REL_TOL * max(1.0, abs(x), abs(y))


@dataclass
class CheckResult:
    name: str
    passed: int = 0
    failed: int = 0
    first_failure: str | None = None

    def record(self, ok: bool, detail: str) -> None:
        if ok:
            self.passed += 1
        else:
            self.failed += 1
            if self.first_failure is None:
                self.first_failure = detail


@dataclass
class SelftestReport:
    seed: int
    trials: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(c.failed == 0 for c in self.checks.values())

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials": self.trials,
            "ok": self.ok,
            "checks": {
                name: {"passed": c.passed, "failed": c.failed, "first_failure": c.first_failure}
                for name, c in self.checks.items()
            },
        }


def run_selftest(seed: int = 0, trials: int = 200) -> SelftestReport:
    rng = np.random.default_rng(seed)
    report = SelftestReport(seed, trials)
    names = ["oracle_norm", "oracle_seminorm", "seminorm_monotone", "seminorm_limit",
             "placement_dominance", "decomposition_chain", "domination"]
    checks = {n: CheckResult(n) for n in names}
    report.checks = checks

    for t in range(trials):
        p = (1.0, 2.0)[t % 2]
        w = (HARMONIC, INVSQRT)[(t // 2) % 2]
        a = random_finite(rng)
        tag = f"trial {t}: a={list(a.entries)}, p={p}, w={w}"
        norm = lorentz_norm_pth(a, p, w).mid
        n = max(len(a.entries), 1)

        ref = brute_force_norm_pth(a, p, w)
        checks["oracle_norm"].record(abs(norm - ref) <= ORACLE_TOL * max(1.0, ref), f"{tag}: {norm} vs {ref}")

        i = int(rng.integers(0, n + 1))
        s = seminorm_pth(a, p, w, i)
        ref_s = brute_force_seminorm_pth(a, p, w, i)
        checks["oracle_seminorm"].record(abs(s - ref_s) <= ORACLE_TOL * max(1.0, ref_s), f"{tag}, i={i}")

        seq = [seminorm_pth(a, p, w, j) for j in range(n + 3)]
        checks["seminorm_monotone"].record(all(x <= y for x, y in zip(seq, seq[1:])), tag)
        checks["seminorm_limit"].record(_close(seq[-1], norm), tag)

        mags = np.abs(np.asarray(a.entries))
        slots = rng.permutation(n + 2)[:n] + 1
        placed = math.fsum((mags**p * w.take(slots)).tolist())
        checks["placement_dominance"].record(placed <= norm * (1 + REL_TOL) + 1e-300, tag)

        r = decompose(a, p, w, i)
        slack = 1e-9 * max(1.0, norm)
        chain = (
            r.S.lo + r.S_tilde.lo <= norm + slack
            and abs(r.H.mid + r.H_tilde.mid - norm) <= slack
            and abs(r.W.mid + r.W_tilde.mid - norm) <= slack
            and norm <= r.S.hi + r.T.hi + slack
        )
        checks["decomposition_chain"].record(chain, f"{tag}, i={i}")

        shrink = rng.uniform(0.0, 1.0, size=len(a.entries))
        b = Finite((np.asarray(a.entries) * shrink).tolist())
        checks["domination"].record(lorentz_norm_pth(b, p, w).mid <= norm * (1 + REL_TOL), tag)
    return report
