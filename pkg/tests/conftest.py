"""Shared fixtures and strategies.

The step-function strategy draws jump locations and heights on a
hundredths grid, which keeps examples exactly representable and makes
shrunk counterexamples readable.
"""

from __future__ import annotations

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from pmstat import (
    FinitePMSpace,
    Ideal,
    StepDistFn,
    build_equilateral,
    build_metric_induced,
    cesaro1,
)

settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@st.composite
def step_fns(draw, max_jumps: int = 5) -> StepDistFn:
    n = draw(st.integers(1, max_jumps))
    locs = draw(
        st.lists(st.integers(0, 300), min_size=n, max_size=n, unique=True).map(sorted)
    )
    heights = draw(
        st.lists(st.integers(1, 99), min_size=n - 1, max_size=n - 1, unique=True).map(sorted)
    )
    vals = [h / 100.0 for h in heights] + [1.0]
    return StepDistFn.from_pairs([(l / 100.0, v) for l, v in zip(locs, vals)])


@pytest.fixture
def eq3() -> FinitePMSpace:
    return build_equilateral(("a", "b", "c"), StepDistFn.from_pairs([(0.25, 0.5), (0.75, 1.0)]))


@pytest.fixture
def line4() -> FinitePMSpace:
    return build_metric_induced(
        ("w0", "w1", "w2", "w3"),
        lambda p, q: 0.2 * abs(int(p[1:]) - int(q[1:])),
    )


@pytest.fixture
def cesaro():
    return cesaro1()


@pytest.fixture
def fin_ideal():
    return Ideal.fin()
