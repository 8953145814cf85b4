"""Evaluation oracles for submodular set functions.

Subsets are int bitmasks over the ground indices ``0..n-1``: bit ``i`` set
means element ``i`` belongs to the set. Python ints are unbounded, so the same
encoding serves every ``n``; :func:`to_mask` and :func:`to_indices` convert
to and from sorted index lists.

Every oracle is normalized so that ``f(∅) = 0``; the raw value of the empty
set is kept in ``offset`` so reported minimum values can add it back.
"""

from __future__ import annotations

import functools
import math
import threading
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidSubsetError, NotSubmodularError
from .rational import Q, as_fraction

DEFAULT_CACHE_SIZE = 1 << 16


def to_mask(subset: int | Iterable[int], n: int | None = None) -> int:
    if isinstance(subset, int) and not isinstance(subset, bool):
        mask = subset
        if mask < 0:
            raise InvalidSubsetError(f"negative bitmask {mask}")
    else:
        mask = 0
        for i in subset:
            if not isinstance(i, int) or i < 0:
                raise InvalidSubsetError(f"invalid element index {i!r}")
            mask |= 1 << i
    if n is not None and mask >> n:
        raise InvalidSubsetError(f"subset {to_indices(mask)} is not contained in a ground set of size {n}")
    return mask


def to_indices(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def full_mask(n: int) -> int:
    return (1 << n) - 1


def popcount(mask: int) -> int:
    return bin(mask).count("1")


class SetFunctionOracle:
    """Counted, memoized access to a set function.

    ``fn`` maps a bitmask to an exact rational. Values are normalized so the
    empty set evaluates to zero. ``calls`` counts invocations of ``fn`` (cache
    misses); with ``cache_size=0`` every :meth:`evaluate` is a miss.
    """

    def __init__(
        self,
        fn: Callable[[int], object],
        n: int,
        labels: Sequence[str] | None = None,
        cache_size: int = DEFAULT_CACHE_SIZE,
    ):
        if n < 0:
            raise ValueError("ground set size must be nonnegative")
        self.n = n
        self.labels = _check_labels(labels, n)
        self._fn = fn
        self._lock = threading.Lock()
        self._calls = 0
        self.offset = as_fraction(fn(0))
        if cache_size:
            self._value = functools.lru_cache(maxsize=cache_size)(self._miss)
        else:
            self._value = self._miss

    def _miss(self, mask: int) -> Q:
        with self._lock:
            self._calls += 1
        return as_fraction(self._fn(mask)) - self.offset

    @property
    def calls(self) -> int:
        return self._calls

    @property
    def full(self) -> int:
        return full_mask(self.n)

    def mask(self, subset) -> int:
        return to_mask(subset, self.n)

    def evaluate(self, subset) -> Q:
        return self._value(self.mask(subset))

    __call__ = evaluate

    def label_list(self, mask: int) -> list[str]:
        return [self.labels[i] for i in to_indices(mask)]

    def mask_from_labels(self, names: Iterable[str]) -> int:
        index = {name: i for i, name in enumerate(self.labels)}
        mask = 0
        for name in names:
            if name not in index:
                raise InvalidSubsetError(f"unknown element label {name!r}")
            mask |= 1 << index[name]
        return mask

    def __repr__(self):
        return f"{type(self).__name__}(n={self.n})"


class OracleView(SetFunctionOracle):
    """A derived function evaluated through a parent oracle.

    Element ``i`` of the view stands for the parent subset ``groups[i]``, and

        g(X) = scale * (parent(base ∪ groups(X)) - parent(base)),

    except that ``g(V) = top`` when an override for the full set is present.
    This one shape covers restriction above a set, contraction of elements
    into singletons, lowering the top value, and rescaling. Calls are
    charged to the parent.
    """

    def __init__(
        self,
        parent: SetFunctionOracle,
        groups: Sequence[int],
        base: int = 0,
        top: Q | None = None,
        scale: Q = Q(1),
        labels: Sequence[str] | None = None,
    ):
        self.parent = parent
        self.groups = tuple(groups)
        self.base = base
        self.n = len(self.groups)
        self.scale = Q(scale)
        self.top = None if top is None or self.n == 0 else Q(top)
        self.offset = Q(0)
        if labels is None:
            labels = ["+".join(parent.label_list(g)) or f"#{i}" for i, g in enumerate(self.groups)]
        self.labels = _check_labels(labels, self.n)
        self._base_value = parent._value(base)

    @property
    def calls(self) -> int:
        return self.parent.calls

    def expand(self, mask: int) -> int:
        out = 0
        for i in to_indices(mask):
            out |= self.groups[i]
        return out

    def _value(self, mask: int) -> Q:
        if self.top is not None and mask == self.full:
            return self.top
        return self.scale * (self.parent._value(self.base | self.expand(mask)) - self._base_value)


def identity_view(f: SetFunctionOracle) -> OracleView:
    if isinstance(f, OracleView):
        return f
    return OracleView(f, [1 << i for i in range(f.n)], labels=f.labels)


def scale_oracle(f: SetFunctionOracle, factor) -> OracleView:
    factor = as_fraction(factor)
    if factor <= 0:
        raise ValueError("scale factor must be positive")
    v = identity_view(f)
    top = None if v.top is None else v.top * factor
    return OracleView(v.parent, v.groups, v.base, top, v.scale * factor, labels=v.labels)


def restrict_above(f: SetFunctionOracle, R) -> OracleView:
    """The function ``g(X) = f(X ∪ R) - f(R)`` on the elements outside ``R``."""
    R = f.mask(R)
    v = identity_view(f)
    keep = [i for i in range(v.n) if not R >> i & 1]
    top = None
    if v.top is not None and keep:
        top = v.top - v._value(R)
    return OracleView(
        v.parent,
        [v.groups[i] for i in keep],
        v.base | v.expand(R),
        top,
        v.scale,
        labels=[v.labels[i] for i in keep],
    )


def clamp_top(f: SetFunctionOracle) -> tuple[SetFunctionOracle, bool]:
    """Replace a positive value of the full set by zero.

    Lowering only the top value keeps the function submodular.
    """
    if f.n == 0 or f._value(f.full) <= 0:
        return f, False
    v = identity_view(f)
    return OracleView(v.parent, v.groups, v.base, Q(0), v.scale, labels=v.labels), True


def upper_bound_M(f: SetFunctionOracle, ordering: Iterable[int]) -> Q:
    """A bound ``M >= |f(X)|`` for all X from one greedy pass and the singletons."""
    perm = list(ordering)
    if sorted(perm) != list(range(f.n)):
        raise ValueError("ordering is not a permutation of the ground set")
    neg = Q(0)
    prev = Q(0)
    prefix = 0
    for v in perm:
        prefix |= 1 << v
        cur = f._value(prefix)
        neg += min(cur - prev, 0)
        prev = cur
    pos = sum((max(Q(0), f._value(1 << v)) for v in range(f.n)), Q(0))
    return max(-neg, pos)


def table_violation(values: Sequence[Q], n: int) -> tuple[int, int] | None:
    """First pair (X, Y) with f(X) + f(Y) < f(X ∪ Y) + f(X ∩ Y), or None.

    Uses the local form: it suffices to check X = A+i, Y = A+j for all A and
    distinct i, j outside A.
    """
    if len(values) != 1 << n:
        raise ValueError("table length must be 2**n")
    if n < 2:
        return None
    qs = [Q(q) for q in values]
    den = math.lcm(*(int(q.denominator) for q in qs))
    ints = [int(q * den) for q in qs]
    big = max(abs(k) for k in ints) >= 1 << 60
    arr = np.array(ints, dtype=object if big else np.int64)
    idx = np.arange(1 << n, dtype=np.int64)
    for i in range(n):
        bi = 1 << i
        for j in range(i + 1, n):
            bj = 1 << j
            a = idx[(idx & (bi | bj)) == 0]
            d = arr[a | bi] + arr[a | bj] - arr[a | bi | bj] - arr[a]
            bad = np.nonzero(d < 0)[0]
            if bad.size:
                A = int(a[bad[0]])
                return A | bi, A | bj
    return None


def check_table(values: Sequence[Q], n: int, labels: Sequence[str] | None = None) -> None:
    hit = table_violation(values, n)
    if hit is not None:
        labels = labels or [str(i) for i in range(n)]
        X, Y = ("{" + ",".join(labels[i] for i in to_indices(m)) + "}" for m in hit)
        raise NotSubmodularError(f"submodularity violated at ({X},{Y})", witness=hit)


def find_violation(f: SetFunctionOracle) -> tuple[int, int] | None:
    return table_violation([f._value(m) for m in range(1 << f.n)], f.n)


def _check_labels(labels, n):
    if labels is None:
        return [str(i) for i in range(n)]
    labels = [str(s) for s in labels]
    if len(labels) != n:
        raise ValueError(f"expected {n} labels, got {len(labels)}")
    if len(set(labels)) != n:
        raise ValueError("labels must be distinct")
    return labels
