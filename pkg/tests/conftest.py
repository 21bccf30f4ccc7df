import numpy as np
import pytest
from hypothesis import strategies as st

from discaudit.data import Dataset, Schema

ACCEPTANCE_RESULTS: list[str] = []


def random_dataset(rng, n_rows, n_protected=1, n_explanatory=2, n_other=0, p_outcome=None):
    """Random binary dataset; each column gets its own Bernoulli rate."""
    schema = Schema.from_roles(
        "D",
        protected=[f"P{i}" for i in range(n_protected)],
        explanatory=[f"E{i}" for i in range(n_explanatory)],
        other=[f"O{i}" for i in range(n_other)],
    )
    m = len(schema.names)
    rates = rng.uniform(0.05, 0.95, size=m)
    if p_outcome is not None:
        rates[0] = p_outcome
    values = (rng.random((n_rows, m)) < rates).astype(np.uint8)
    return Dataset(schema, values)


@st.composite
def datasets(draw, max_rows=60, max_protected=2, max_explanatory=3, min_rows=1):
    n_p = draw(st.integers(1, max_protected))
    n_e = draw(st.integers(0, max_explanatory))
    n = draw(st.integers(min_rows, max_rows))
    schema = Schema.from_roles("D", protected=[f"P{i}" for i in range(n_p)],
                               explanatory=[f"E{i}" for i in range(n_e)])
    m = len(schema.names)
    bits = draw(st.lists(st.lists(st.integers(0, 1), min_size=m, max_size=m), min_size=n, max_size=n))
    return Dataset(schema, np.array(bits, dtype=np.uint8).reshape(n, m))


counts_tables = st.tuples(*[st.integers(0, 40)] * 4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(line)
