"""Brute-force references and certificate checking.

Nothing here imports the solver: certificates are consumed in their JSON
form and every quantity is recomputed from oracle values, so a passing check
does not depend on solver code being right.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import PreconditionError
from .oracle import SetFunctionOracle, scale_oracle
from .rational import Q, as_fraction

MAX_BRUTE_N = 24


def brute_force_min(f: SetFunctionOracle) -> tuple[int, Q, list[int]]:
    """(smallest minimizing mask, minimum value, all minimizers)."""
    if f.n > MAX_BRUTE_N:
        raise PreconditionError(f"brute force refused for n={f.n} > {MAX_BRUTE_N}")
    best = None
    minimizers = []
    for mask in range(1 << f.n):
        val = f(mask)
        if best is None or val < best:
            best, minimizers = val, [mask]
        elif val == best:
            minimizers.append(mask)
    return minimizers[0], best, minimizers


def in_base_polyhedron(f: SetFunctionOracle, y) -> bool:
    if sum(y) != f(f.full):
        return False
    for mask in range(1 << f.n):
        if sum((y[i] for i in range(f.n) if mask >> i & 1), Q(0)) > f(mask):
            return False
    return True


def exchange_capacity_bruteforce(f: SetFunctionOracle, y, u: int, v: int) -> Q:
    """min{f(X) - y(X) : u ∈ X ⊆ V - v} by enumeration."""
    if u == v:
        raise ValueError("u and v must differ")
    if f.n > 16:
        raise PreconditionError("exchange capacity enumeration limited to n <= 16")
    y = [as_fraction(q) for q in y]
    if not in_base_polyhedron(f, y):
        raise ValueError("y is not in the base polyhedron")
    best = None
    for mask in range(1 << f.n):
        if not mask >> u & 1 or mask >> v & 1:
            continue
        val = f(mask) - sum((y[i] for i in range(f.n) if mask >> i & 1), Q(0))
        if best is None or val < best:
            best = val
    return best


@dataclass
class CertificateReport:
    ok: bool
    clause: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _fail(clause, message):
    return CertificateReport(False, clause, message)


def check_certificate(f: SetFunctionOracle, cert: dict, threshold=1) -> CertificateReport:
    """Re-derive a certificate from scratch and report the first broken clause.

    Clauses, in order: structure, flow, positivity, sum, greedy, gap, bound.
    When the certificate declares ``epsilon`` the values are those of f/epsilon.
    """
    n = f.n
    try:
        index = {name: i for i, name in enumerate(f.labels)}
        X = 0
        for name in cert["X"]:
            X |= 1 << index[name]
        lambdas = [as_fraction(q) for q in cert["lambda"]]
        bases = []
        for b in cert["bases"]:
            perm = [index[name] for name in b["ordering"]]
            y = [as_fraction(q) for q in b["y"]]
            if sorted(perm) != list(range(n)) or len(y) != n:
                return _fail("structure", "base ordering or vector has the wrong shape")
            bases.append((perm, y))
        phi = [[as_fraction(q) for q in row] for row in cert["phi"]]
        gap = as_fraction(cert["gap"])
        eps = cert.get("epsilon")
    except (KeyError, TypeError, ValueError) as exc:
        return _fail("structure", f"malformed certificate: {exc!r}")
    if not bases or len(lambdas) != len(bases):
        return _fail("structure", "need one weight per base and at least one base")
    g = f if eps is None else scale_oracle(f, 1 / as_fraction(eps))

    if len(phi) != n or any(len(row) != n for row in phi):
        return _fail("flow", "flow matrix has the wrong shape")
    for u in range(n):
        for v in range(n):
            if phi[u][v] + phi[v][u] != 0:
                return _fail("flow", f"flow is not skew-symmetric at ({u}, {v})")

    for i, lam in enumerate(lambdas):
        if lam <= 0:
            return _fail("positivity", f"weight {i} is {lam}")
    if sum(lambdas) != 1:
        return _fail("sum", f"weights sum to {sum(lambdas)}")

    for i, (perm, y) in enumerate(bases):
        prefix, prev = 0, Q(0)
        for v in perm:
            prefix |= 1 << v
            cur = g(prefix)
            if y[v] != cur - prev:
                return _fail("greedy", f"base {i} does not match the greedy vector of its ordering at element {f.labels[v]}")
            prev = cur

    x = [sum((lam * y[v] for lam, (_, y) in zip(lambdas, bases)), Q(0)) for v in range(n)]
    actual = g(X) - sum((q for q in x if q < 0), Q(0))
    if actual != gap:
        return _fail("gap", f"stated gap {gap} but f(X) - x⁻(V) = {actual}")
    if threshold is not None and not gap < threshold:
        return _fail("bound", f"gap {gap} is not below {threshold}")
    return CertificateReport(True, None, "certificate verified")
