"""Strongly polynomial minimization by repeated element fixing.

A bounded run of the scaling phases (``fix``) exposes an element that lies in
every minimizer. Applied to ``f`` itself this removes elements; applied to the
restriction above ``R(u)`` it yields a pair (u, w) such that any minimizer
containing u contains w. Such pairs form a DAG whose cycles are contracted,
and each round either adds a pair or deletes elements, so at most n² rounds
are needed.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

from .base import ConvexCombination, ExtremeBase, LinearOrdering, greedy_extreme_base
from .errors import InternalInvariantError, PreconditionError
from .flow import Flow
from .oracle import OracleView, SetFunctionOracle, restrict_above, to_indices
from .scaling import ScalingState, SfmResult, SolveStats, begin_phase, run_phase
from .rational import Q

ZERO = Q(0)


@dataclass(frozen=True)
class PrecedenceDag:
    """Compatible pairs over the current vertices.

    ``groups[i]`` is the mask of original elements vertex i stands for; an arc
    (a, b) means every minimizer containing a also contains b.
    """

    groups: tuple[int, ...]
    arcs: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    @classmethod
    def discrete(cls, n: int) -> PrecedenceDag:
        return cls(tuple(1 << i for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.groups)

    @property
    def full(self) -> int:
        return (1 << self.n) - 1

    def successors(self, v: int) -> list[int]:
        return sorted(b for a, b in self.arcs if a == v)

    def reach(self, v: int) -> int:
        """Mask of the vertices reachable from v, v included."""
        adj = self._adjacency()
        seen = 1 << v
        stack = [v]
        while stack:
            a = stack.pop()
            for b in adj[a]:
                if not seen >> b & 1:
                    seen |= 1 << b
                    stack.append(b)
        return seen

    def _adjacency(self) -> list[list[int]]:
        adj = [[] for _ in range(self.n)]
        for a, b in sorted(self.arcs):
            adj[a].append(b)
        return adj

    def add_arc(self, u: int, w: int) -> PrecedenceDag:
        if u == w:
            raise ValueError("self-loops are not compatible pairs")
        return PrecedenceDag(self.groups, self.arcs | {(u, w)})

    def expand(self, mask: int) -> int:
        out = 0
        for i in to_indices(mask):
            out |= self.groups[i]
        return out

    def induced(self, keep: int) -> tuple[PrecedenceDag, list[int]]:
        """Subgraph on the vertices in ``keep``; also returns new index -> old index."""
        old = to_indices(keep)
        new = {v: k for k, v in enumerate(old)}
        arcs = frozenset((new[a], new[b]) for a, b in self.arcs if a in new and b in new)
        return PrecedenceDag(tuple(self.groups[v] for v in old), arcs), old

    def is_acyclic(self) -> bool:
        try:
            reverse_topological_order(self)
        except InternalInvariantError:
            return False
        return True


def reverse_topological_order(dag: PrecedenceDag) -> list[int]:
    """Every vertex after all vertices it reaches; ties by smallest index."""
    pending = [0] * dag.n
    preds = [[] for _ in range(dag.n)]
    for a, b in dag.arcs:
        pending[a] += 1
        preds[b].append(a)
    heap = [v for v in range(dag.n) if pending[v] == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        v = heapq.heappop(heap)
        order.append(v)
        for a in preds[v]:
            pending[a] -= 1
            if pending[a] == 0:
                heapq.heappush(heap, a)
    if len(order) != dag.n:
        raise InternalInvariantError("precedence graph has a cycle")
    return order


def contract(dag: PrecedenceDag, C) -> PrecedenceDag:
    """Merge the strongly connected vertex set C into one vertex.

    The merged vertex takes the smallest index of C; the others keep their
    relative order.
    """
    members = to_indices(C) if isinstance(C, int) else sorted(set(C))
    if not members:
        raise ValueError("cannot contract an empty set")
    cmask = sum(1 << v for v in members)
    for v in members:
        if dag.reach(v) & cmask != cmask:
            raise ValueError(f"vertex set {members} is not strongly connected")
    head = members[0]
    index = {}
    groups = []
    for v in range(dag.n):
        if v in members[1:]:
            continue
        index[v] = len(groups)
        groups.append(dag.expand(cmask) if v == head else dag.groups[v])
    for v in members[1:]:
        index[v] = index[head]
    arcs = frozenset((index[a], index[b]) for a, b in dag.arcs if index[a] != index[b])
    out = PrecedenceDag(tuple(groups), arcs)
    if not out.is_acyclic():
        raise InternalInvariantError("contraction left a cycle")
    return out


def eta(f: SetFunctionOracle, dag: PrecedenceDag) -> tuple[Q, int]:
    """max over v of f(R(v)) - f(R(v) - v), with the smallest maximizing v."""
    if dag.n == 0:
        raise ValueError("no vertices left")
    best = None
    arg = -1
    for v in range(dag.n):
        R = dag.reach(v)
        val = f(R) - f(R & ~(1 << v))
        if best is None or val > best:
            best, arg = val, v
    return best, arg


def consistent_extreme_base(f: SetFunctionOracle, dag: PrecedenceDag, check: bool = True) -> ExtremeBase:
    """Greedy base for an ordering with no arc pointing forward.

    Every such base satisfies x(v) <= f(R(v)) - f(R(v) - v); ``check``
    verifies this with 2n extra evaluations.
    """
    if dag.n != f.n:
        raise ValueError("DAG and oracle have different ground sets")
    b = greedy_extreme_base(f, LinearOrdering(tuple(reverse_topological_order(dag))))
    if check:
        for v in range(dag.n):
            R = dag.reach(v)
            if b.y[v] > f(R) - f(R & ~(1 << v)):
                raise InternalInvariantError(f"consistent base exceeds its bound at vertex {v}")
    return b


def fix_phases(n: int) -> int:
    """Phases needed so that delta = eta/2^k < (eta/2)/n³, i.e. 2^k > 2n³."""
    return (2 * n ** 3).bit_length()


def fix(f: SetFunctionOracle, x0: ExtremeBase, eta_value, stats: SolveStats | None = None, checks: bool = False,
        trace: list | None = None) -> int:
    """Return an element that belongs to every minimizer of f.

    Needs every component of ``x0`` at most ``eta_value`` and some set with
    f(Y) <= -eta_value/2. Runs the scaling phases from delta = eta_value and
    picks the most negative component of x, which must lie below -n²·delta.
    """
    eta_value = Q(eta_value)
    n = f.n
    if eta_value <= 0:
        raise PreconditionError("eta must be positive")
    if max(x0.y) > eta_value:
        raise PreconditionError("initial base exceeds eta")
    st = ScalingState(f, eta_value, ConvexCombination.single(x0), Flow(n),
                      stats=stats if stats is not None else SolveStats(), trace=trace, checks=checks)
    for _ in range(fix_phases(n)):
        begin_phase(st)
        run_phase(st)
    x = st.comb.x
    w = min(range(n), key=lambda v: (x[v], v))
    if not x[w] < -n * n * st.delta:
        raise PreconditionError("no element below -n²·delta; the set with f(Y) <= -eta/2 does not exist")
    return w


@dataclass
class StrongState:
    root: SetFunctionOracle
    dag: PrecedenceDag
    fixed: int = 0
    top: Q | None = None

    def view(self) -> OracleView:
        return OracleView(self.root, self.dag.groups, self.fixed, self.top)


def strong_sfm(f: SetFunctionOracle, trace: bool = False, checks: bool = False) -> SfmResult:
    """Minimize f in a number of steps independent of its values.

    ``checks`` is passed on to the scaling phases inside every Fix call.
    """
    n = f.n
    if n == 0:
        raise ValueError("ground set is empty")
    calls0 = f.calls
    stats = SolveStats()
    events = [] if trace else None
    st = StrongState(f, PrecedenceDag.discrete(n))

    def emit(event):
        if events is not None:
            events.append(event)

    while st.dag.n:
        g = st.view()
        if g(g.full) > 0:
            st.top = ZERO
            g = st.view()
        eta_value, u = eta(g, st.dag)
        emit({"event": "eta", "eta": eta_value, "u": g.label_list(1 << u), "_oracle": g, "_dag": st.dag})
        if eta_value <= 0:
            break
        Ru = st.dag.reach(u)
        if g(Ru) >= eta_value / 2:
            fu = restrict_above(g, Ru)
            sub, old = st.dag.induced(st.dag.full & ~Ru)
            x0 = consistent_extreme_base(fu, sub)
            emit({"event": "consistent_base", "_oracle": fu, "_dag": sub, "_base": x0})
            local = fix(fu, x0, eta_value, stats, checks, events)
            stats.fix_calls += 1
            w = old[local]
            emit({"event": "fix", "eta": eta_value, "w": fu.label_list(1 << local), "_oracle": fu, "_w": local})
            Rw = st.dag.reach(w)
            if Rw >> u & 1:
                cycle = sum(1 << v for v in to_indices(Rw) if st.dag.reach(v) >> u & 1)
                emit({"event": "contract", "members": g.label_list(cycle)})
                st.dag = contract(st.dag.add_arc(u, w), cycle)
            else:
                emit({"event": "arc", "u": g.label_list(1 << u), "w": g.label_list(1 << w), "_oracle": g, "_u": u, "_w": w,
                      "_groups": st.dag.groups})
                st.dag = st.dag.add_arc(u, w)
        else:
            x0 = consistent_extreme_base(g, st.dag)
            emit({"event": "consistent_base", "_oracle": g, "_dag": st.dag, "_base": x0})
            w = fix(g, x0, eta_value, stats, checks, events)
            stats.fix_calls += 1
            emit({"event": "fix", "eta": eta_value, "w": g.label_list(1 << w), "_oracle": g, "_w": w})
            Rw = st.dag.reach(w)
            rest = restrict_above(g, Rw)
            st.fixed, st.top = rest.base, rest.top
            st.dag, _ = st.dag.induced(st.dag.full & ~Rw)
            emit({"event": "delete", "removed": g.label_list(Rw)})
        if stats.fix_calls > n * n:
            raise InternalInvariantError(f"more than {n * n} Fix calls")
    if st.dag.n:
        g = st.view()
        if g(g.full) < 0:
            st.fixed |= st.dag.expand(st.dag.full)
    X = st.fixed
    value = f(X) + f.offset
    stats.oracle_calls = f.calls - calls0
    return SfmResult(X, value, list(f.labels), stats, None, events)
