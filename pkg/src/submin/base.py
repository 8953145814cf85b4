"""Linear orderings, greedy extreme bases and convex combinations of them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

from .errors import InternalInvariantError
from .oracle import SetFunctionOracle
from .rational import Q

ZERO = Q(0)


@dataclass(frozen=True)
class LinearOrdering:
    """``perm[k]`` is the k-th vertex (0-indexed); ``pos`` is the inverse."""

    perm: tuple[int, ...]
    pos: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        perm = tuple(self.perm)
        if sorted(perm) != list(range(len(perm))):
            raise ValueError(f"{perm} is not a permutation of 0..{len(perm) - 1}")
        pos = [0] * len(perm)
        for k, v in enumerate(perm):
            pos[v] = k
        object.__setattr__(self, "perm", perm)
        object.__setattr__(self, "pos", tuple(pos))

    @classmethod
    def identity(cls, n: int) -> LinearOrdering:
        return cls(tuple(range(n)))

    def __len__(self):
        return len(self.perm)

    def __iter__(self):
        return iter(self.perm)

    def __getitem__(self, k):
        return self.perm[k]

    def prefix_mask(self, k: int) -> int:
        """Mask of the first ``k`` vertices."""
        mask = 0
        for v in self.perm[:k]:
            mask |= 1 << v
        return mask

    def swapped(self, k: int) -> LinearOrdering:
        """Ordering with positions ``k-1`` and ``k`` interchanged."""
        p = list(self.perm)
        p[k - 1], p[k] = p[k], p[k - 1]
        return LinearOrdering(tuple(p))


@dataclass(frozen=True)
class ExtremeBase:
    """A greedy vertex of B(f) with the ordering that generates it.

    ``prefix[k]`` caches f of the first k vertices (``prefix[0] == 0``), so
    tightness checks and exchange capacities cost one fresh oracle call.
    """

    y: tuple[Q, ...]
    ordering: LinearOrdering
    prefix: tuple[Q, ...]

    @property
    def n(self) -> int:
        return len(self.y)

    @cached_property
    def scaled(self) -> tuple[int, tuple[int, ...]]:
        """(d, ints) with y = ints / d, for integer-only accumulation."""
        d = math.lcm(*(int(q.denominator) for q in self.y))
        return d, tuple(int(q.numerator) * (d // int(q.denominator)) for q in self.y)


def greedy_extreme_base(f: SetFunctionOracle, ordering: LinearOrdering | Sequence[int]) -> ExtremeBase:
    if not isinstance(ordering, LinearOrdering):
        ordering = LinearOrdering(tuple(ordering))
    if len(ordering) != f.n:
        raise ValueError("ordering does not match the ground set size")
    y = [ZERO] * f.n
    prefix = [ZERO]
    mask = 0
    for v in ordering.perm:
        mask |= 1 << v
        prefix.append(f(mask))
        y[v] = prefix[-1] - prefix[-2]
    return ExtremeBase(tuple(y), ordering, tuple(prefix))


def exchange_capacity_consecutive(f: SetFunctionOracle, b: ExtremeBase, k: int) -> Q:
    """Exchange capacity of the pair (u, v) = (perm[k], perm[k-1]).

    Since u immediately succeeds v, the capacity is
    ``f(L(u) - v) - f(L(u)) + y(v)`` and needs a single evaluation.
    """
    n = b.n
    if not 1 <= k <= n - 1:
        raise IndexError(f"position {k} out of range 1..{n - 1}")
    v = b.ordering.perm[k - 1]
    without_v = b.ordering.prefix_mask(k + 1) & ~(1 << v)
    return f(without_v) - b.prefix[k + 1] + b.y[v]


def apply_interchange(b: ExtremeBase, k: int, beta: Q) -> ExtremeBase:
    """Swap positions k-1 and k and move ``beta`` from v = perm[k-1] to u = perm[k]."""
    v = b.ordering.perm[k - 1]
    u = b.ordering.perm[k]
    y = list(b.y)
    y[u] += beta
    y[v] -= beta
    prefix = list(b.prefix)
    # new k-prefix is L(u) - v, whose value follows from beta
    prefix[k] = beta + b.prefix[k + 1] - b.y[v]
    return ExtremeBase(tuple(y), b.ordering.swapped(k), tuple(prefix))


class ConvexCombination:
    """``x = Σ λ_i y_i`` with positive weights summing to one."""

    def __init__(self, entries: Sequence[tuple[Q, ExtremeBase]]):
        self.entries = [(Q(lam), b) for lam, b in entries]
        if not self.entries:
            raise ValueError("a convex combination needs at least one base")
        self.recompute()

    @classmethod
    def single(cls, b: ExtremeBase) -> ConvexCombination:
        return cls([(Q(1), b)])

    @property
    def n(self) -> int:
        return self.entries[0][1].n

    def __len__(self):
        return len(self.entries)

    def recompute(self) -> list[Q]:
        # accumulate over a common denominator in plain ints
        lam_den = math.lcm(*(int(lam.denominator) for lam, _ in self.entries))
        y_den = math.lcm(*(b.scaled[0] for _, b in self.entries))
        acc = [0] * self.n
        for lam, b in self.entries:
            d, ints = b.scaled
            a = int(lam.numerator) * (lam_den // int(lam.denominator)) * (y_den // d)
            for v, k in enumerate(ints):
                acc[v] += a * k
        den = lam_den * y_den
        self.x = [Q(k, den) for k in acc]
        return self.x

    def check(self) -> None:
        if any(lam <= 0 for lam, _ in self.entries):
            raise InternalInvariantError("nonpositive convex weight")
        if sum(lam for lam, _ in self.entries) != 1:
            raise InternalInvariantError("convex weights do not sum to one")
        if list(self.x) != ConvexCombination(self.entries).x:
            raise InternalInvariantError("cached x differs from the combination")


def affine_dependency(points: Sequence[Sequence[Q]]) -> list[Q] | None:
    """Coefficients μ, not all zero, with Σμ_i p_i = 0 and Σμ_i = 0, or None.

    Forward elimination over the lifted vectors (1, p_i), one point at a time,
    stopping at the first point that reduces to zero. Pivot rows are chosen by
    largest magnitude, ties to the lowest row.
    """
    basis: list[tuple[list[Q], dict[int, Q], int]] = []
    for j, p in enumerate(points):
        vec = [Q(1), *p]
        coeffs = {j: Q(1)}
        for bvec, bco, piv in basis:
            c = vec[piv]
            if c:
                r = c / bvec[piv]
                vec = [a - r * b for a, b in zip(vec, bvec)]
                for i, m in bco.items():
                    coeffs[i] = coeffs.get(i, ZERO) - r * m
        piv = max(range(len(vec)), key=lambda row: (abs(vec[row]), -row))
        if vec[piv] == 0:
            return [coeffs.get(i, ZERO) for i in range(len(points))]
        basis.append((vec, coeffs, piv))
    return None


def reduce_combination(c: ConvexCombination) -> ConvexCombination:
    """Same x, expressed with affinely independent bases."""
    entries = list(c.entries)
    while len(entries) > 1:
        mu = affine_dependency([b.y for _, b in entries])
        if mu is None:
            break
        theta = min(lam / m for (lam, _), m in zip(entries, mu) if m > 0)
        entries = [(lam - theta * m, b) for (lam, b), m in zip(entries, mu)]
        entries = [(lam, b) for lam, b in entries if lam != 0]
        if any(lam < 0 for lam, _ in entries):
            raise InternalInvariantError("reduction produced a negative weight")
    out = ConvexCombination(entries)
    if out.x != c.x:
        raise InternalInvariantError("reduction changed x")
    return out
