import json
import math

from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from submin.families import ConcaveCardinality, Coverage, CutFunction, ExplicitTable, make_oracle
from submin.oracle import find_violation
from submin.rational import Q
from submin.scaling import sfm
from submin.strong import strong_sfm
from submin.verify import brute_force_min, check_certificate

SETTINGS = settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@st.composite
def submodular_tables(draw, max_n=6, rational=False):
    n = draw(st.integers(1, max_n))
    number = st.integers(-6, 6) if not rational else st.fractions(-6, 6, max_denominator=4)
    items = n + 1
    cov = Coverage(
        draw(st.lists(st.integers(0, 6), min_size=items, max_size=items)),
        draw(st.lists(st.lists(st.integers(0, items - 1), max_size=3), min_size=n, max_size=n)),
        [0] * n,
    )
    steps = sorted(draw(st.lists(st.integers(-4, 6), min_size=n, max_size=n)), reverse=True)
    g = [0]
    for s in steps:
        g.append(g[-1] + s)
    concave = ConcaveCardinality(g)
    edges = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1), st.integers(0, 5)), max_size=2 * n))
    cut = CutFunction(n, tuple((u, v, c) for u, v, c in edges if u != v), directed=True)
    w = draw(st.lists(number, min_size=n, max_size=n))
    values = [cov(m) + concave(m) + cut(m) + sum((Q(w[i]) for i in range(n) if m >> i & 1), Q(0))
              for m in range(1 << n)]
    return make_oracle(ExplicitTable(values))


@SETTINGS
@given(submodular_tables())
def test_generated_tables_are_submodular(f):
    assert find_violation(f) is None


@SETTINGS
@given(submodular_tables())
def test_both_algorithms_find_the_minimum(f):
    _, best, minimizers = brute_force_min(f)
    a = sfm(f)
    b = strong_sfm(f)
    assert a.value == best and a.minimizer in minimizers
    assert b.value == best and b.minimizer in minimizers


@SETTINGS
@given(submodular_tables())
def test_certificates_verify(f):
    r = sfm(f)
    cert = json.loads(json.dumps(r.to_json()))["certificate"]
    assert check_certificate(f, cert)
    assert r.gap < 1


@SETTINGS
@given(submodular_tables(max_n=5, rational=True))
def test_strong_handles_rational_values(f):
    assert strong_sfm(f).value == brute_force_min(f)[1]


@SETTINGS
@given(submodular_tables(max_n=5, rational=True))
def test_epsilon_mode_with_common_denominator(f):
    den = math.lcm(*(int(f(m).denominator) for m in range(1 << f.n)))
    r = sfm(f, epsilon=Q(1, den))
    assert r.value == brute_force_min(f)[1]
