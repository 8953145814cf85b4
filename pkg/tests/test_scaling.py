import json

import pytest
from conftest import modular, table

from submin.base import ConvexCombination, LinearOrdering, greedy_extreme_base
from submin.flow import Flow, boundary
from submin.instances import generate
from submin.rational import Q
from submin.scaling import (
    ScalingState,
    active_vertex,
    begin_phase,
    negative_part,
    output_set,
    push,
    run_phase,
    sfm,
    trace_to_json,
)
from submin.verify import brute_force_min, check_certificate


def state(f, perm, delta, **kw):
    return ScalingState(f, Q(delta), ConvexCombination.single(greedy_extreme_base(f, perm)), Flow(f.n), **kw)


def test_active_vertex_examples():
    a, b, c = 0, 1, 2
    assert active_vertex(LinearOrdering((a, b, c)), 0b111) is None
    assert active_vertex(LinearOrdering((a, b, c)), 1 << c) == b
    assert active_vertex(LinearOrdering((c, a, b)), 1 << c) is None
    assert active_vertex(LinearOrdering((a, b, c)), 0) is None


def test_nonsaturating_push(edge):
    st = state(edge, (0, 1), 1, checks=True)
    z = st.z()
    assert push(st, 0, 1, 0) is False
    assert sorted(lam for lam, _ in st.comb.entries) == [Q(1, 2), Q(1, 2)]
    assert st.comb.x == [0, 0]
    assert st.z() == z
    assert st.phi[0, 1] == 1


def test_saturating_push(edge):
    st = state(edge, (0, 1), 5, checks=True)
    assert push(st, 0, 1, 0) is True
    assert len(st.comb) == 1
    assert st.comb.entries[0][1].y == (-1, 1)
    assert st.phi[1, 0] == -2


def test_zero_capacity_push_only_swaps(fx):
    st = state(fx, (0, 1), 1, checks=True)
    push(st, 0, 1, 0)
    assert st.comb.entries[0][1].ordering.perm == (1, 0)
    assert st.comb.x == [-1, 2]
    assert st.phi == Flow(2)


def test_push_requires_consecutive_pair(fx):
    st = state(fx, (0, 1), 1)
    with pytest.raises(Exception, match="does not immediately succeed"):
        push(st, 0, 0, 1)


def test_phase_with_empty_S_is_a_no_op():
    st = state(modular([1, 1]), (0, 1), 2)
    st.refresh()
    assert st.S == 0
    assert run_phase(st) == "S_empty"
    assert st.comb.x == [1, 1] and st.stats.augmentations == 0


def test_first_phase_on_the_two_element_table(fx):
    st = state(fx, (0, 1), 2)
    begin_phase(st)
    assert st.delta == 1
    assert (st.S, st.T) == (0b01, 0b10)
    before = negative_part(st.z())
    assert run_phase(st) == "S_empty"
    assert st.stats.augmentations == 1
    assert negative_part(st.z()) == before + st.delta
    # an intermediate phase may end with S empty; later phases find {a}
    assert output_set(st) == 0


def test_output_set_rules():
    st = state(modular([1, 1]), (0, 1), 1)
    st.S, st.T = 0, 0b11
    assert output_set(st) == 0
    st.S, st.T = 0b11, 0
    assert output_set(st) == 0b11


@pytest.mark.parametrize("weights,expected,value", [([1, 1, 1], [], 0), ([-1, -1, -1], ["0", "1", "2"], -3)])
def test_modular_minimizers(weights, expected, value):
    r = sfm(modular(weights))
    assert r.minimizer_labels == expected and r.value == value


def test_two_element_table(fx):
    r = sfm(fx)
    assert r.minimizer_labels == ["a"]
    assert r.value == -1
    assert r.gap == 0
    assert r.stats.as_dict() == {"oracle_calls": 3, "phases": 4, "augmentations": 1, "pushes": 0}
    assert r.certificate.phi.matrix() == [[0, Q(1, 8)], [Q(-1, 8), 0]]


def test_offset_is_added_back():
    r = sfm(table([10, 9, 12, 11]))
    assert r.value == 9 and r.minimizer == 1


def test_single_element():
    assert sfm(table([0, -4])).minimizer == 1
    assert sfm(table([0, 4])).minimizer == 0
    assert sfm(table([0, 0])).value == 0


FROZEN = [
    ("cut", 6, 42, ["0", "1", "2", "3", "4", "5"], -15, "27487/183296",
     {"oracle_calls": 28, "phases": 12, "augmentations": 72, "pushes": 198}),
    ("coverage", 8, 7, ["0", "1", "2", "3", "4", "5", "7"], -12, "42216861151/412499312640",
     {"oracle_calls": 49, "phases": 13, "augmentations": 61, "pushes": 178}),
    ("matroid", 7, 3, ["0", "2", "3", "5", "6"], -5, "0",
     {"oracle_calls": 19, "phases": 9, "augmentations": 15, "pushes": 15}),
    ("table", 5, 2, [], 0, "0", {"oracle_calls": 10, "phases": 13, "augmentations": 0, "pushes": 0}),
]


@pytest.mark.parametrize("family,n,seed,labels,value,gap,stats", FROZEN)
def test_frozen_runs(family, n, seed, labels, value, gap, stats):
    f = generate(family, n, seed).oracle()
    r = sfm(f)
    assert r.minimizer_labels == labels
    assert r.value == value == brute_force_min(f)[1]
    assert r.gap == Q(gap)
    assert r.stats.as_dict() == stats


def test_certificate_round_trip():
    f = generate("cut", 7, 5).oracle()
    r = sfm(f)
    doc = json.loads(json.dumps(r.to_json()))
    assert check_certificate(f, doc["certificate"])
    assert Q(doc["gap"]) < 1


def test_final_state_is_consistent():
    f = generate("coverage", 7, 9).oracle()
    r = sfm(f)
    c = r.certificate
    c.comb.check()
    assert c.phi.is_feasible(Q(1, 49))
    assert len(c.comb) <= f.n + 1
    assert c.gap == f(r.minimizer) - negative_part(c.comb.x)


def test_trace_events(fx):
    r = sfm(fx, trace=True)
    kinds = [e["event"] for e in r.trace]
    assert kinds.count("phase") == 2 * r.stats.phases
    assert kinds.count("augment") == r.stats.augmentations
    aug = next(e for e in r.trace if e["event"] == "augment")
    assert aug["path"] == [0, 1]
    assert aug["zminus_after"] - aug["zminus_before"] == aug["delta"]
    line = json.dumps(trace_to_json(aug, fx.labels))
    assert json.loads(line)["path"] == ["a", "b"]


def test_checked_run_reports_z_before_and_after():
    f = generate("cut", 5, 1).oracle()
    r = sfm(f, trace=True, checks=True)
    pushes = [e for e in r.trace if e["event"] == "push"]
    assert pushes
    for e in pushes:
        assert e["z_before"] == e["z_after"]


def test_checks_do_not_change_the_result():
    inst = generate("table", 6, 4)
    a, b = sfm(inst.oracle()), sfm(inst.oracle(), checks=True)
    assert a.to_json() == b.to_json()


def test_epsilon_mode():
    f = table([0, Q(-1, 3), Q(2, 3), Q(1, 3)], ["a", "b"])
    r = sfm(f, epsilon=Q(1, 3))
    assert r.minimizer_labels == ["a"] and r.value == Q(-1, 3)
    doc = r.to_json()
    assert doc["certificate"]["epsilon"] == "1/3"
    assert check_certificate(f, doc["certificate"])
    with pytest.raises(ValueError):
        sfm(f, epsilon=0)


def test_boundary_identity_for_final_z():
    f = generate("concave", 6, 3).oracle()
    r = sfm(f)
    z = [x - d for x, d in zip(r.certificate.comb.x, boundary(r.certificate.phi))]
    assert sum(z) == f(f.full)
