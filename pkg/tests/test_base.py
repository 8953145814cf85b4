import itertools
import random

import pytest
from conftest import modular

from submin.base import (
    ConvexCombination,
    ExtremeBase,
    LinearOrdering,
    affine_dependency,
    apply_interchange,
    exchange_capacity_consecutive,
    greedy_extreme_base,
    reduce_combination,
)
from submin.errors import InternalInvariantError
from submin.instances import generate
from submin.rational import Q
from submin.verify import exchange_capacity_bruteforce, in_base_polyhedron


def point(*y):
    n = len(y)
    return ExtremeBase(tuple(Q(v) for v in y), LinearOrdering.identity(n), (Q(0),) * (n + 1))


def test_ordering_rejects_non_permutations():
    with pytest.raises(ValueError):
        LinearOrdering((0, 0, 1))
    L = LinearOrdering((2, 0, 1))
    assert L.pos == (1, 2, 0)
    assert L.prefix_mask(2) == 0b101
    assert L.swapped(1).perm == (0, 2, 1)


def test_greedy_on_modular_returns_weights():
    f = modular([3, -1, 4])
    for perm in itertools.permutations(range(3)):
        assert greedy_extreme_base(f, perm).y == (3, -1, 4)


def test_greedy_examples(edge, fx):
    assert greedy_extreme_base(edge, (0, 1)).y == (1, -1)
    b = greedy_extreme_base(fx, (1, 0))
    assert b.y == (-1, 2)
    assert b.prefix == (0, 2, 1)


def test_greedy_bases_lie_in_the_base_polyhedron():
    f = generate("cut", 5, 3).oracle()
    for perm in [(0, 1, 2, 3, 4), (4, 2, 0, 1, 3)]:
        assert in_base_polyhedron(f, greedy_extreme_base(f, perm).y)


def test_exchange_capacity_examples(edge, fx):
    assert exchange_capacity_consecutive(edge, greedy_extreme_base(edge, (0, 1)), 1) == 2
    assert exchange_capacity_consecutive(fx, greedy_extreme_base(fx, (0, 1)), 1) == 0
    f = modular([1, 2, 3])
    b = greedy_extreme_base(f, (2, 0, 1))
    assert [exchange_capacity_consecutive(f, b, k) for k in (1, 2)] == [0, 0]


def test_exchange_capacity_position_range(fx):
    b = greedy_extreme_base(fx, (0, 1))
    for k in (0, 2):
        with pytest.raises(IndexError):
            exchange_capacity_consecutive(fx, b, k)


def test_exchange_capacity_uses_one_call():
    f = generate("coverage", 6, 2).oracle(cache_size=0)
    b = greedy_extreme_base(f, range(6))
    before = f.calls
    exchange_capacity_consecutive(f, b, 3)
    assert f.calls - before == 1


def test_exchange_capacity_matches_enumeration():
    rng = random.Random(11)
    for family in ("cut", "coverage", "matroid", "concave", "table"):
        for _ in range(20):
            n = rng.randint(2, 6)
            f = generate(family, n, rng.randrange(1000)).oracle()
            perm = list(range(n))
            rng.shuffle(perm)
            b = greedy_extreme_base(f, perm)
            k = rng.randint(1, n - 1)
            assert exchange_capacity_consecutive(f, b, k) == exchange_capacity_bruteforce(f, b.y, perm[k], perm[k - 1])


def test_interchange_regenerates_the_swapped_greedy_base(edge):
    b = greedy_extreme_base(edge, (0, 1))
    moved = apply_interchange(b, 1, exchange_capacity_consecutive(edge, b, 1))
    assert moved.y == (-1, 1)
    assert moved.ordering.perm == (1, 0)
    assert moved == greedy_extreme_base(edge, (1, 0))


def test_zero_interchange_only_swaps(fx):
    b = greedy_extreme_base(fx, (0, 1))
    moved = apply_interchange(b, 1, Q(0))
    assert moved.y == b.y and moved.ordering.perm == (1, 0)
    assert moved.prefix == greedy_extreme_base(fx, (1, 0)).prefix


def test_interchange_matches_greedy_on_random_instances():
    rng = random.Random(5)
    for seed in range(40):
        n = rng.randint(2, 7)
        f = generate("table", n, seed).oracle()
        perm = list(range(n))
        rng.shuffle(perm)
        b = greedy_extreme_base(f, perm)
        k = rng.randint(1, n - 1)
        moved = apply_interchange(b, k, exchange_capacity_consecutive(f, b, k))
        assert moved == greedy_extreme_base(f, moved.ordering)


def test_combination_keeps_x():
    c = ConvexCombination([(Q(1, 4), point(4, 0)), (Q(3, 4), point(0, 4))])
    assert c.x == [1, 3]
    c.check()


def test_combination_check_catches_bad_weights():
    c = ConvexCombination([(Q(1, 2), point(1, 0)), (Q(1, 3), point(0, 1))])
    with pytest.raises(InternalInvariantError, match="sum to one"):
        c.check()


def test_reduce_single_entry_is_unchanged():
    c = ConvexCombination.single(point(1, 2))
    r = reduce_combination(c)
    assert r.entries == c.entries


def test_reduce_duplicate_base():
    b = point(1, -1)
    r = reduce_combination(ConvexCombination([(Q(1, 2), b), (Q(1, 2), b)]))
    assert r.entries == [(1, b)]


def test_reduce_three_collinear_bases():
    c = ConvexCombination([(Q(1, 3), point(0, 0, 0)), (Q(1, 3), point(1, -1, 0)), (Q(1, 3), point(3, -3, 0))])
    r = reduce_combination(c)
    assert len(r) == 2
    assert r.x == c.x == [Q(4, 3), Q(-4, 3), 0]
    assert affine_dependency([b.y for _, b in r.entries]) is None


def test_affine_dependency_examples():
    assert affine_dependency([(0, 0), (1, 0), (0, 1)]) is None
    mu = affine_dependency([(0, 0), (1, 1), (2, 2)])
    assert mu is not None and sum(mu) == 0
    assert [sum(m * p[d] for m, p in zip(mu, [(0, 0), (1, 1), (2, 2)])) for d in range(2)] == [0, 0]


def test_reduction_bounds_size_by_dimension():
    rng = random.Random(2)
    pts = [point(*(rng.randint(-3, 3) for _ in range(3))) for _ in range(9)]
    c = ConvexCombination([(Q(1, 9), p) for p in pts])
    r = reduce_combination(c)
    assert len(r) <= 4
    assert r.x == c.x
    assert all(lam > 0 for lam, _ in r.entries)
