import hypothesis.strategies as st
import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bergman_offdiag.corpus import random_jet
from bergman_offdiag.numbers import GaussianRational, mpq
from bergman_offdiag.series import TruncatedSeries

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

small_rationals = st.builds(
    lambda p, q: mpq(p, q), st.integers(-10, 10), st.integers(1, 10)
)
gaussian_rationals = st.builds(GaussianRational, small_rationals, small_rationals)


@st.composite
def series(draw, m=1, order=4, max_terms=5):
    """Random TruncatedSeries with small Gaussian-rational coefficients."""
    n = draw(st.integers(0, max_terms))
    terms = {}
    for _ in range(n):
        exps = draw(st.lists(st.integers(0, order), min_size=2 * m, max_size=2 * m))
        if sum(exps) > order:
            continue
        terms[(tuple(exps[:m]), tuple(exps[m:]))] = draw(gaussian_rationals)
    return TruncatedSeries(m, order, terms)


@st.composite
def jets(draw, dims=(1, 2), order=6, k_form=True):
    """Seeded corpus-style jets driven by a hypothesis-chosen seed."""
    seed = draw(st.integers(0, 2**32 - 1))
    m = draw(st.sampled_from(dims))
    return random_jet(np.random.default_rng(seed), m, order, n_terms=6, k_form=k_form)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    """Repeat the acceptance lines at the end of the run."""
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for n in sorted(results):
            terminalreporter.write_line(results[n])
