"""Skew-symmetric flows on the complete digraph over the ground set."""

from __future__ import annotations

from collections import deque
from typing import Sequence

from .errors import InternalInvariantError
from .rational import Q

ZERO = Q(0)


class Flow:
    """phi(u, v) = -phi(v, u); only entries with u < v are stored."""

    def __init__(self, n: int):
        self.n = n
        self._up = [[ZERO] * n for _ in range(n)]

    def __getitem__(self, arc) -> Q:
        u, v = arc
        if u < v:
            return self._up[u][v]
        if u > v:
            return -self._up[v][u]
        return ZERO

    def __setitem__(self, arc, value) -> None:
        u, v = arc
        if u == v:
            if value != 0:
                raise ValueError("a skew-symmetric flow has a zero diagonal")
            return
        if u < v:
            self._up[u][v] = Q(value)
        else:
            self._up[v][u] = -Q(value)

    def add(self, u: int, v: int, amount) -> None:
        """phi(u, v) += amount, and phi(v, u) -= amount with it."""
        self[u, v] = self[u, v] + amount

    def copy(self) -> Flow:
        out = Flow(self.n)
        out._up = [row[:] for row in self._up]
        return out

    def matrix(self) -> list[list[Q]]:
        return [[self[u, v] for v in range(self.n)] for u in range(self.n)]

    @classmethod
    def from_matrix(cls, rows: Sequence[Sequence[Q]]) -> Flow:
        n = len(rows)
        out = cls(n)
        for u in range(n):
            if len(rows[u]) != n:
                raise ValueError("flow matrix must be square")
            for v in range(n):
                if rows[u][v] + rows[v][u] != 0:
                    raise ValueError(f"flow is not skew-symmetric at ({u}, {v})")
            for v in range(u + 1, n):
                out._up[u][v] = Q(rows[u][v])
        return out

    def max_abs(self) -> Q:
        return max((abs(q) for row in self._up for q in row), default=ZERO)

    def is_feasible(self, delta) -> bool:
        return self.max_abs() <= delta

    def __eq__(self, other):
        return isinstance(other, Flow) and self._up == other._up

    def __repr__(self):
        return f"Flow(n={self.n}, max|phi|={self.max_abs()})"


def boundary(phi: Flow) -> list[Q]:
    """Net inflow: ``∂phi(v) = Σ_u phi(u, v)``."""
    out = [ZERO] * phi.n
    for u in range(phi.n):
        for v in range(u + 1, phi.n):
            q = phi._up[u][v]
            if q:
                out[v] += q
                out[u] -= q
    return out


def clamp(phi: Flow, delta) -> Flow:
    """Move every entry to the nearest value in [-delta, delta]."""
    out = phi.copy()
    for row in out._up:
        for v, q in enumerate(row):
            if q > delta:
                row[v] = Q(delta)
            elif q < -delta:
                row[v] = -Q(delta)
    return out


def _residual_row(phi: Flow, u: int) -> list[bool]:
    """Which arcs (u, v) are residual, i.e. have phi(u, v) <= 0."""
    up = phi._up
    return [(up[v][u] >= 0) if v < u else (up[u][v] <= 0) if v > u else False for v in range(phi.n)]


def residual_reachable(phi: Flow, sources: int) -> int:
    """Vertices reachable from ``sources`` along arcs with phi(u, v) <= 0."""
    seen = sources
    queue = deque(v for v in range(phi.n) if sources >> v & 1)
    while queue:
        u = queue.popleft()
        for v, ok in enumerate(_residual_row(phi, u)):
            if ok and not seen >> v & 1:
                seen |= 1 << v
                queue.append(v)
    return seen


def find_augmenting_path(phi: Flow, sources: int, sinks: int) -> list[int] | None:
    """A shortest residual path from ``sources`` to ``sinks`` (BFS, lowest index first)."""
    parent: dict[int, int | None] = {}
    queue = deque()
    for v in range(phi.n):
        if sources >> v & 1:
            parent[v] = None
            if sinks >> v & 1:
                return [v]
            queue.append(v)
    while queue:
        u = queue.popleft()
        for v, ok in enumerate(_residual_row(phi, u)):
            if not ok or v in parent:
                continue
            parent[v] = u
            if sinks >> v & 1:
                path = [v]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                return path[::-1]
            queue.append(v)
    return None


def augment(phi: Flow, path: Sequence[int], delta) -> Flow:
    out = phi.copy()
    for u, v in zip(path, path[1:]):
        if out[u, v] > 0:
            raise InternalInvariantError(f"arc ({u}, {v}) is not residual")
        out.add(u, v, delta)
    return out
