import pytest

from submin.errors import InternalInvariantError
from submin.flow import Flow, augment, boundary, clamp, find_augmenting_path, residual_reachable
from submin.rational import Q

A, B, C = 0, 1, 2


def flow(n, **arcs):
    phi = Flow(n)
    for name, value in arcs.items():
        u, v = ("abc".index(name[0]), "abc".index(name[1]))
        phi[u, v] = value
    return phi


def test_skew_symmetry():
    phi = flow(2, ab=3)
    assert phi[A, B] == 3 and phi[B, A] == -3
    phi.add(B, A, 1)
    assert phi[A, B] == 2
    with pytest.raises(ValueError):
        phi[A, A] = 1


def test_matrix_round_trip():
    phi = flow(3, ab=1, ca=Q(1, 2))
    assert Flow.from_matrix(phi.matrix()) == phi
    with pytest.raises(ValueError):
        Flow.from_matrix([[0, 1], [1, 0]])


def test_boundary_examples():
    assert boundary(Flow(3)) == [0, 0, 0]
    assert boundary(flow(2, ab=1)) == [-1, 1]
    assert boundary(flow(3, ab=1, bc=1, ca=1)) == [0, 0, 0]


def test_clamp_examples():
    assert clamp(flow(2, ab=2), 1)[A, B] == 1
    assert clamp(flow(2, ab=Q(1, 2)), 1)[A, B] == Q(1, 2)
    out = clamp(flow(2, ab=-2), 1)
    assert out[A, B] == -1 and out[B, A] == 1
    assert clamp(flow(2, ab=5), 1).is_feasible(1)


def test_residual_reachability():
    assert residual_reachable(Flow(3), 1 << A) == 0b111
    assert residual_reachable(flow(2, ab=1), 1 << A) == 1 << A
    assert residual_reachable(flow(2, ab=1), 0) == 0


def test_augmenting_paths():
    assert find_augmenting_path(Flow(2), 1 << A, 1 << B) == [A, B]
    assert find_augmenting_path(flow(2, ab=1), 1 << A, 1 << B) is None
    assert find_augmenting_path(flow(3, ab=1), 1 << A, 1 << B) == [A, C, B]


def test_augment():
    out = augment(Flow(2), [A, B], 1)
    assert out[A, B] == 1 and out[B, A] == -1
    assert augment(flow(2, ab=-1), [A, B], 1)[A, B] == 0
    out = augment(Flow(3), [A, C, B], Q(1, 2))
    assert out[A, C] == out[C, B] == Q(1, 2)
    with pytest.raises(InternalInvariantError):
        augment(flow(2, ab=1), [A, B], 1)


def test_augment_moves_boundary_only_at_the_ends():
    phi = flow(3, ab=Q(1, 4))
    out = augment(phi, [A, C, B], 1)
    before, after = boundary(phi), boundary(out)
    assert [a - b for a, b in zip(after, before)] == [-1, 1, 0]
