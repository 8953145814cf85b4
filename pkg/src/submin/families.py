"""Built-in submodular function families.

Each family is a callable ``mask -> Q`` and is submodular by
construction (explicit tables are validated instead). Every family except the
explicit table accepts an optional modular vector that is added to the value;
modular terms keep submodularity and make minimization nontrivial for the
otherwise nonnegative cut and rank functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .oracle import DEFAULT_CACHE_SIZE, SetFunctionOracle, check_table, to_indices
from .rational import Q, as_fraction


def _fractions(values) -> tuple[Q, ...]:
    return tuple(as_fraction(v) for v in values)


def _modular(modular, n) -> tuple[Q, ...]:
    if modular is None:
        return (Q(0),) * n
    out = _fractions(modular)
    if len(out) != n:
        raise ValueError(f"modular vector has length {len(out)}, expected {n}")
    return out


def _modular_value(weights, mask) -> Q:
    total = Q(0)
    for i in to_indices(mask):
        total += weights[i]
    return total


@dataclass(frozen=True)
class ExplicitTable:
    values: tuple[Q, ...]
    n: int = field(init=False)

    def __post_init__(self):
        values = _fractions(self.values)
        n = len(values).bit_length() - 1
        if len(values) == 0 or 1 << n != len(values):
            raise ValueError("an explicit table needs 2**n values")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "n", n)

    def __call__(self, mask: int) -> Q:
        return self.values[mask]

    @property
    def integral(self) -> bool:
        return all(v.denominator == 1 for v in self.values)

    def validate(self, labels=None) -> None:
        if self.n <= 16:
            check_table(self.values, self.n, labels)


@dataclass(frozen=True)
class CutFunction:
    """Capacity of the edges leaving X, plus an optional modular term."""

    n: int
    edges: tuple[tuple[int, int, Q], ...]
    directed: bool = False
    modular: tuple[Q, ...] | None = None

    def __post_init__(self):
        edges = []
        for u, v, cap in self.edges:
            cap = as_fraction(cap)
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={self.n}")
            if cap < 0:
                raise ValueError(f"edge ({u}, {v}) has negative capacity {cap}")
            edges.append((u, v, cap))
        object.__setattr__(self, "edges", tuple(edges))
        object.__setattr__(self, "modular", _modular(self.modular, self.n))

    def __call__(self, mask: int) -> Q:
        total = _modular_value(self.modular, mask)
        for u, v, cap in self.edges:
            inu = mask >> u & 1
            inv = mask >> v & 1
            if inu and not inv:
                total += cap
            elif inv and not inu and not self.directed:
                total += cap
        return total

    @property
    def integral(self) -> bool:
        return all(c.denominator == 1 for *_, c in self.edges) and all(w.denominator == 1 for w in self.modular)


@dataclass(frozen=True)
class Coverage:
    """Weight of the items covered by X minus the cost of X.

    ``covers[i]`` lists the item indices element ``i`` covers.
    """

    weights: tuple[Q, ...]
    covers: tuple[tuple[int, ...], ...]
    costs: tuple[Q, ...]

    def __post_init__(self):
        weights = _fractions(self.weights)
        if any(w < 0 for w in weights):
            raise ValueError("item weights must be nonnegative")
        covers = tuple(tuple(c) for c in self.covers)
        for c in covers:
            for item in c:
                if not 0 <= item < len(weights):
                    raise ValueError(f"item index {item} out of range")
        costs = _fractions(self.costs)
        if len(costs) != len(covers):
            raise ValueError("need one cost per element")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "covers", covers)
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "_item_masks", tuple(sum(1 << t for t in set(c)) for c in covers))

    @property
    def n(self) -> int:
        return len(self.covers)

    def __call__(self, mask: int) -> Q:
        covered = 0
        for i in to_indices(mask):
            covered |= self._item_masks[i]
        return _modular_value(self.weights, covered) - _modular_value(self.costs, mask)

    @property
    def integral(self) -> bool:
        return all(q.denominator == 1 for q in self.weights + self.costs)


@dataclass(frozen=True)
class MatroidRank:
    """Rank of a partition matroid: ``Σ_b min(|X ∩ B_b|, cap_b)``, plus a modular term.

    Elements outside every block are loops.
    """

    n: int
    blocks: tuple[tuple[int, ...], ...]
    caps: tuple[int, ...]
    modular: tuple[Q, ...] | None = None

    def __post_init__(self):
        blocks = tuple(tuple(b) for b in self.blocks)
        if len(blocks) != len(self.caps):
            raise ValueError("need one cap per block")
        seen = set()
        for b in blocks:
            for e in b:
                if not 0 <= e < self.n or e in seen:
                    raise ValueError("blocks must be disjoint subsets of the ground set")
                seen.add(e)
        caps = tuple(int(c) for c in self.caps)
        if any(c < 0 for c in caps):
            raise ValueError("block caps must be nonnegative")
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "caps", caps)
        object.__setattr__(self, "modular", _modular(self.modular, self.n))
        object.__setattr__(self, "_block_masks", tuple(sum(1 << e for e in b) for b in blocks))

    def __call__(self, mask: int) -> Q:
        rank = sum(min(bin(mask & bm).count("1"), c) for bm, c in zip(self._block_masks, self.caps))
        return rank + _modular_value(self.modular, mask)

    @property
    def integral(self) -> bool:
        return all(w.denominator == 1 for w in self.modular)


@dataclass(frozen=True)
class ConcaveCardinality:
    """``g(|X|) + m(X)`` for a concave sequence g with g(0) = 0."""

    g: tuple[Q, ...]
    modular: tuple[Q, ...] | None = None

    def __post_init__(self):
        g = _fractions(self.g)
        if not g or g[0] != 0:
            raise ValueError("concave sequence must start with g(0) = 0")
        steps = [b - a for a, b in zip(g, g[1:])]
        if any(s2 > s1 for s1, s2 in zip(steps, steps[1:])):
            raise ValueError("sequence is not concave")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "modular", _modular(self.modular, len(g) - 1))

    @property
    def n(self) -> int:
        return len(self.g) - 1

    def __call__(self, mask: int) -> Q:
        return self.g[bin(mask).count("1")] + _modular_value(self.modular, mask)

    @property
    def integral(self) -> bool:
        return all(q.denominator == 1 for q in self.g + self.modular)


def make_oracle(family, labels: Sequence[str] | None = None, cache_size: int = DEFAULT_CACHE_SIZE) -> SetFunctionOracle:
    if isinstance(family, ExplicitTable):
        family.validate(labels)
    return SetFunctionOracle(family, family.n, labels, cache_size=cache_size)
