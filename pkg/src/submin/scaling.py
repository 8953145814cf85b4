"""Capacity-scaling submodular function minimization.

The base x in B(f) is kept as a convex combination of greedy extreme bases
and paired with a flow phi on the complete digraph; each scaling phase
raises ``z⁻(V)`` for ``z = x - ∂phi`` by pushing along orderings and
augmenting delta units along residual paths from S = {z <= -delta} to
T = {z >= delta}. When delta drops below 1/n² the duality gap
``f(X) - x⁻(V)`` is below one, which certifies X for integer-valued f.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

from .base import (
    ConvexCombination,
    ExtremeBase,
    LinearOrdering,
    apply_interchange,
    exchange_capacity_consecutive,
    greedy_extreme_base,
    reduce_combination,
)
from .errors import InternalInvariantError
from .flow import Flow, augment, boundary, clamp, find_augmenting_path, residual_reachable
from .oracle import SetFunctionOracle, scale_oracle, to_indices, upper_bound_M
from .rational import Q, as_fraction, format_fraction

ZERO = Q(0)


def negative_part(vec) -> Q:
    return sum((q for q in vec if q < 0), ZERO)


@dataclass
class SolveStats:
    oracle_calls: int = 0
    phases: int = 0
    augmentations: int = 0
    pushes: int = 0
    # (delta, augmentations, exit reason) for every phase run
    phase_log: list = field(default_factory=list)
    fix_calls: int = 0

    def as_dict(self) -> dict:
        out = {
            "oracle_calls": self.oracle_calls,
            "phases": self.phases,
            "augmentations": self.augmentations,
            "pushes": self.pushes,
        }
        if self.fix_calls:
            out["fix_calls"] = self.fix_calls
        return out


@dataclass
class ScalingState:
    f: SetFunctionOracle
    delta: Q
    comb: ConvexCombination
    phi: Flow
    stats: SolveStats = field(default_factory=SolveStats)
    trace: list | None = None
    S: int = 0
    T: int = 0
    W: int = 0
    # recompute x and z from scratch around every push and augmentation
    checks: bool = False

    def __post_init__(self):
        self.reset_z()

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def x(self) -> list[Q]:
        return self.comb.x

    def z(self) -> list[Q]:
        return list(self.zvec)

    def z_from_scratch(self) -> list[Q]:
        d = boundary(self.phi)
        return [xv - dv for xv, dv in zip(ConvexCombination(self.comb.entries).x, d)]

    def reset_z(self) -> None:
        d = boundary(self.phi)
        self.zvec = [xv - dv for xv, dv in zip(self.comb.x, d)]

    def refresh(self) -> None:
        """Recompute S, T and W from z and phi."""
        S = T = 0
        for v, zv in enumerate(self.zvec):
            if zv <= -self.delta:
                S |= 1 << v
            elif zv >= self.delta:
                T |= 1 << v
        self.S, self.T = S, T
        self.W = residual_reachable(self.phi, S)

    def emit(self, event: dict) -> None:
        if self.trace is not None:
            event.setdefault("_oracle", self.f)
            self.trace.append(event)


@dataclass
class Certificate:
    minimizer: int
    comb: ConvexCombination
    phi: Flow
    gap: Q
    epsilon: Q | None = None

    def to_json(self, labels) -> dict:
        out = {
            "X": [labels[i] for i in to_indices(self.minimizer)],
            "lambda": [format_fraction(lam) for lam, _ in self.comb.entries],
            "bases": [
                {"ordering": [labels[v] for v in b.ordering.perm], "y": [format_fraction(q) for q in b.y]}
                for _, b in self.comb.entries
            ],
            "phi": [[format_fraction(q) for q in row] for row in self.phi.matrix()],
            "gap": format_fraction(self.gap),
        }
        if self.epsilon is not None:
            out["epsilon"] = format_fraction(self.epsilon)
        return out


@dataclass
class SfmResult:
    minimizer: int
    value: Q
    labels: list[str]
    stats: SolveStats
    certificate: Certificate | None = None
    trace: list | None = None

    @property
    def gap(self) -> Q | None:
        return None if self.certificate is None else self.certificate.gap

    @property
    def minimizer_labels(self) -> list[str]:
        return [self.labels[i] for i in to_indices(self.minimizer)]

    def to_json(self) -> dict:
        return {
            "minimizer": self.minimizer_labels,
            "value": format_fraction(self.value),
            "gap": None if self.gap is None else format_fraction(self.gap),
            "stats": self.stats.as_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_json(self.labels),
        }


def active_vertex(ordering: LinearOrdering, W: int) -> int | None:
    """Last vertex outside W that still has some element of W after it."""
    perm = ordering.perm
    last_w = -1
    for k in range(len(perm) - 1, -1, -1):
        if W >> perm[k] & 1:
            last_w = k
            break
    for k in range(last_w - 1, -1, -1):
        if not W >> perm[k] & 1:
            return perm[k]
    return None


def active_pairs(st: ScalingState) -> list[tuple[int, int]]:
    out = []
    for i, (_, b) in enumerate(st.comb.entries):
        v = active_vertex(b.ordering, st.W)
        if v is not None:
            out.append((i, v))
    return out


def find_active_pair(st: ScalingState) -> tuple[int, int] | None:
    for i, (_, b) in enumerate(st.comb.entries):
        v = active_vertex(b.ordering, st.W)
        if v is not None:
            return i, v
    return None


def push(st: ScalingState, i: int, u: int, v: int) -> bool:
    """Push(i, u, v); returns True when the push was saturating.

    Moves alpha = min(delta, λ_i·c) from v to u in x and the same amount
    against the arc (u, v) in phi, so z = x - ∂phi is unchanged.
    """
    lam, b = st.comb.entries[i]
    k = b.ordering.pos[u]
    if k == 0 or b.ordering.perm[k - 1] != v:
        raise InternalInvariantError(f"{u} does not immediately succeed {v} in ordering {i}")
    z_before = st.z_from_scratch() if st.checks else None
    c = exchange_capacity_consecutive(st.f, b, k)
    if c < 0:
        raise InternalInvariantError(f"negative exchange capacity {c}")
    saturating = True
    alpha = ZERO
    if c == 0:
        st.comb.entries[i] = (lam, apply_interchange(b, k, ZERO))
    else:
        alpha = min(st.delta, lam * c)
        st.phi.add(u, v, -alpha)
        st.comb.x[u] += alpha
        st.comb.x[v] -= alpha
        moved = apply_interchange(b, k, c)
        if alpha < lam * c:
            saturating = False
            st.comb.entries.append((lam - alpha / c, b))
            st.comb.entries[i] = (alpha / c, moved)
        else:
            st.comb.entries[i] = (lam, moved)
    z_after = None
    if st.checks:
        x = ConvexCombination(st.comb.entries).x
        if st.comb.x != x:
            raise InternalInvariantError("push moved x by something other than alpha(χ_u - χ_v)")
        z_after = [xv - dv for xv, dv in zip(x, boundary(st.phi))]
        if z_after != z_before or z_after != st.zvec:
            raise InternalInvariantError("push changed z = x - ∂phi")
    st.stats.pushes += 1
    st.emit({
        "event": "push", "i": i, "u": u, "v": v, "capacity": c, "alpha": alpha,
        "saturating": saturating, "delta": st.delta, "zminus": negative_part(st.zvec),
        "z_before": z_before, "z_after": z_after,
    })
    return saturating


def begin_phase(st: ScalingState) -> None:
    """Halve delta, clamp phi to the new capacity and recompute S, T, W."""
    st.delta /= 2
    st.phi = clamp(st.phi, st.delta)
    st.stats.phases += 1
    st.reset_z()
    st.refresh()
    st.emit({"event": "phase", "stage": "start", "phase": st.stats.phases, "delta": st.delta, "zminus": negative_part(st.zvec)})


def run_phase(st: ScalingState) -> str:
    """One delta-scaling phase; returns the exit reason.

    The phase stops once S or T is empty, or when no active pair remains and
    W holds no vertex of T (no augmenting path left).
    """
    n = st.n
    limit = n * n + n
    start_zminus = negative_part(st.z())
    augs = 0
    while st.S and st.T and (st.W & st.T or find_active_pair(st) is not None):
        while not st.W & st.T:
            pair = find_active_pair(st)
            if pair is None:
                break
            i, v = pair
            u = st.comb.entries[i][1].ordering.perm[st.comb.entries[i][1].ordering.pos[v] + 1]
            w_before = st.W
            saturating = push(st, i, u, v)
            st.W = residual_reachable(st.phi, st.S)
            if st.W & w_before != w_before:
                raise InternalInvariantError("W shrank during a push")
            if not saturating and not st.W >> v & 1:
                raise InternalInvariantError("nonsaturating push did not reach v")
        if st.W & st.T:
            path = find_augmenting_path(st.phi, st.S, st.T)
            if path is None:
                raise InternalInvariantError("W meets T but no augmenting path exists")
            before = negative_part(st.zvec)
            st.phi = augment(st.phi, path, st.delta)
            st.zvec[path[0]] += st.delta
            st.zvec[path[-1]] -= st.delta
            if st.checks and st.zvec != st.z_from_scratch():
                raise InternalInvariantError("augmentation moved z off the path ends")
            after = negative_part(st.zvec)
            if after != before + st.delta:
                raise InternalInvariantError("augmentation did not raise z⁻(V) by delta")
            augs += 1
            st.stats.augmentations += 1
            if augs > limit:
                raise InternalInvariantError(f"more than {limit} augmentations in one phase")
            st.emit({"event": "augment", "path": path, "delta": st.delta, "zminus_before": before, "zminus_after": after})
            st.refresh()
        st.comb = reduce_combination(st.comb)
        if len(st.comb) > n + 1:
            raise InternalInvariantError("reduced combination is not affinely independent")
    if not st.S:
        reason = "S_empty"
    elif not st.T:
        reason = "T_empty"
    else:
        reason = "Z_empty"
        _check_tight_prefix(st)
    st.stats.phase_log.append((st.delta, augs, reason))
    st.emit({
        "event": "phase", "stage": "end", "phase": st.stats.phases, "delta": st.delta, "exit": reason,
        "augmentations": augs, "zminus_start": start_zminus, "zminus": negative_part(st.z()),
        "W": st.W, "x": list(st.comb.x),
    })
    return reason


def _check_tight_prefix(st: ScalingState) -> None:
    # With no active pair, W is a prefix of every ordering, so each y_i(W)
    # is the cached prefix value f(W) and x(W) must equal it.
    size = bin(st.W).count("1")
    if st.W & st.T:
        raise InternalInvariantError("phase ended with an augmenting path available")
    values = set()
    for _, b in st.comb.entries:
        if b.ordering.prefix_mask(size) != st.W:
            raise InternalInvariantError("W is not a prefix of every ordering")
        values.add(b.prefix[size])
    xw = sum((st.comb.x[v] for v in to_indices(st.W)), ZERO)
    if len(values) != 1 or xw not in values:
        raise InternalInvariantError("W is not tight for x")


def output_set(st: ScalingState) -> int:
    if not st.S:
        return 0
    if not st.T:
        return st.f.full
    xw = sum((st.comb.x[v] for v in to_indices(st.W)), ZERO)
    if xw != st.f(st.W):
        raise InternalInvariantError("output set W is not tight for x")
    return st.W


def sfm(f: SetFunctionOracle, epsilon=None, trace: bool = False, checks: bool = False) -> SfmResult:
    """Minimize f by the scaling algorithm.

    ``f`` is assumed integer-valued unless ``epsilon`` is given: a positive
    lower bound on the gap between the minimum and the second-smallest value,
    in which case the algorithm runs on f/epsilon. ``checks`` re-derives x
    and z from scratch after every push and augmentation (slow).
    """
    n = f.n
    if n == 0:
        raise ValueError("ground set is empty")
    calls0 = f.calls
    g = f
    if epsilon is not None:
        epsilon = as_fraction(epsilon)
        if epsilon <= 0:
            raise ValueError("epsilon must be positive")
        g = scale_oracle(f, 1 / epsilon)
    ordering = LinearOrdering.identity(n)
    x0 = greedy_extreme_base(g, ordering)
    M = upper_bound_M(g, ordering)
    st = ScalingState(g, M, ConvexCombination.single(x0), Flow(n), trace=[] if trace else None, checks=checks)
    if M == 0:
        X = 0
    else:
        threshold = Q(1, n * n)
        while st.delta >= threshold:
            begin_phase(st)
            run_phase(st)
        X = output_set(st)
    st.comb.check()
    scaled_value = g(X)
    gap = scaled_value - negative_part(st.comb.x)
    if not 0 <= gap < 1:
        raise InternalInvariantError(f"final duality gap {gap} is not in [0, 1)")
    value = scaled_value * (epsilon if epsilon is not None else 1) + f.offset
    st.stats.oracle_calls = f.calls - calls0
    cert = Certificate(X, st.comb, st.phi, gap, epsilon)
    return SfmResult(X, value, list(f.labels), st.stats, cert, st.trace)


def trace_to_json(event: dict, labels) -> dict:
    """Serializable copy of a trace event: exact rationals as strings, sets as labels.

    Events recorded on a derived function carry it under ``_oracle`` and are
    labelled with its element names.
    """
    if "_oracle" in event:
        labels = event["_oracle"].labels
    out: dict[str, Any] = {}
    for key, val in event.items():
        if key.startswith("_"):
            continue
        if key in ("W", "X", "R", "fixed"):
            out[key] = [labels[i] for i in to_indices(val)]
        elif key in ("u", "v", "w") and isinstance(val, int):
            out[key] = labels[val] if val < len(labels) else val
        elif key == "path":
            out[key] = [labels[i] for i in val]
        else:
            out[key] = _jsonable(val)
    return out


def _jsonable(val):
    if isinstance(val, Q):
        return format_fraction(val)
    if isinstance(val, (list, tuple)):
        return [_jsonable(q) for q in val]
    return val
