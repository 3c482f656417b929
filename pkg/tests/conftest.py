from __future__ import annotations

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from lorentzseq import HARMONIC, INVSQRT, ExplicitPrefix, Finite, PowerDecay

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

WEIGHTS = [HARMONIC, INVSQRT, PowerDecay(0.75), ExplicitPrefix((1.0, 0.9, 0.9, 0.5), PowerDecay(1.0))]


@st.composite
def finite_sequences(draw, max_len: int = 10, max_support: int = 7, bound: float = 10.0):
    """Finite sequences with small support; ties are drawn deliberately often."""
    n = draw(st.integers(1, max_len))
    pool = draw(st.lists(st.floats(-bound, bound, allow_nan=False), min_size=1, max_size=3))
    entries = []
    for _ in range(n):
        choice = draw(st.integers(0, 3))
        if choice == 0:
            entries.append(0.0)
        elif choice == 1:
            entries.append(draw(st.sampled_from(pool)) * draw(st.sampled_from([-1.0, 1.0])))
        else:
            entries.append(draw(st.floats(-bound, bound, allow_nan=False)))
    support = [k for k, x in enumerate(entries) if x != 0.0]
    for k in support[max_support:]:
        entries[k] = 0.0
    return Finite(entries)


weights = st.sampled_from(WEIGHTS)
exponents = st.sampled_from([1.0, 1.5, 2.0, 3.0])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_criteria = {}
_docs = {}


def _criterion_key(nodeid):
    name = nodeid.split("::")[-1]
    if not name.startswith("test_criterion_"):
        return None
    return name[len("test_criterion_"):].split("_")[0].rstrip("abcdefgh")


def pytest_itemcollected(item):
    key = _criterion_key(item.nodeid)
    if key is not None:
        _docs[key] = getattr(item.module, "CRITERIA", {}).get(key, "")


def pytest_runtest_logreport(report):
    key = _criterion_key(report.nodeid)
    if key is None or report.when != "call" and report.outcome == "passed":
        return
    _criteria[key] = _criteria.get(key, True) and report.outcome == "passed"


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_criteria, key=int):
        verdict = "PASS" if _criteria[key] else "FAIL"
        terminalreporter.write_line(f"{verdict}  criterion {key}: {_docs.get(key, '')}")
