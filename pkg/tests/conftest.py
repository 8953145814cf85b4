import pytest

from submin.families import CutFunction, ExplicitTable, make_oracle
from submin.oracle import SetFunctionOracle
from submin.rational import Q


def table(values, labels=None, **kw):
    return make_oracle(ExplicitTable(values), labels, **kw)


def modular(weights, labels=None):
    w = [Q(q) for q in weights]
    return SetFunctionOracle(lambda m: sum((w[i] for i in range(len(w)) if m >> i & 1), Q(0)), len(w), labels)


@pytest.fixture
def fx():
    """f(∅)=0, f({a})=-1, f({b})=2, f({a,b})=1."""
    return table([0, -1, 2, 1], ["a", "b"])


@pytest.fixture
def edge():
    """Undirected single edge {a,b} with capacity 1."""
    return make_oracle(CutFunction(2, ((0, 1, 1),)), ["a", "b"])


# filled by test_acceptance and printed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s[7:9])):
            terminalreporter.write_line(line)
