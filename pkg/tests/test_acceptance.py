"""The full acceptance suite, one test per criterion.

Each test prints a PASS/FAIL line; the lines are repeated in the terminal
summary so a plain ``pytest`` run shows the whole table.
"""

import pytest
from conftest import ACCEPTANCE_LINES

from submin import cli
from submin.acceptance import Suite
from submin.flow import Flow


@pytest.fixture(scope="module")
def suite():
    return Suite()


@pytest.mark.parametrize("number,title", [(k, t) for k, t, _ in Suite.CRITERIA], ids=[f"{k}" for k, _, _ in Suite.CRITERIA])
def test_criterion(suite, number, title):
    res = suite.run_one(number)
    print(res.line())
    ACCEPTANCE_LINES.append(res.line())
    assert res.passed, res.line()


def test_sabotaged_push_fails_selftest(monkeypatch, capsys):
    real_add = Flow.add

    def skewed(self, u, v, amount):
        # pushes move -alpha along (u, v); double it so z drifts
        real_add(self, u, v, 2 * amount if amount < 0 else amount)

    monkeypatch.setattr(Flow, "add", skewed)
    code = cli.main(["selftest", "--quick", "--only", "4"])
    out = capsys.readouterr().out
    assert code != 0
    assert out.startswith("[FAIL]  4 z-invariance")
