"""Instance files and seeded instance generators.

JSON documents carry a ``"type"`` field (table, cut, coverage, matroid,
concave). Cut instances may also use the text form::

    cut <n> <m> <directed|undirected>
    u v cap            (m lines, 0-based vertex ids)
    modular w_0 ... w_{n-1}     (optional)
    labels l_0 ... l_{n-1}      (optional)

Rationals are integers or "p/q" strings throughout.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass
from pathlib import Path

from .errors import InstanceFormatError
from .families import ConcaveCardinality, Coverage, CutFunction, ExplicitTable, MatroidRank, make_oracle
from .oracle import SetFunctionOracle
from .rational import Q, as_fraction, format_fraction

FAMILIES = ("cut", "coverage", "matroid", "concave", "table")


@dataclass
class Instance:
    family: object
    labels: list[str]

    @property
    def n(self) -> int:
        return self.family.n

    @property
    def integral(self) -> bool:
        return self.family.integral

    def oracle(self, cache_size=None) -> SetFunctionOracle:
        if cache_size is None:
            return make_oracle(self.family, self.labels)
        return make_oracle(self.family, self.labels, cache_size=cache_size)


def _rationals(values, where):
    try:
        return [as_fraction(v) for v in values]
    except (TypeError, ValueError) as exc:
        raise InstanceFormatError(f"{where}: {exc}") from None


def _field(doc, key, where="instance"):
    if key not in doc:
        raise InstanceFormatError(f"{where}: missing field {key!r}")
    return doc[key]


def parse_json_instance(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("instance: top-level JSON value must be an object")
    kind = _field(doc, "type")
    try:
        if kind == "table":
            values = _rationals(_field(doc, "values"), "field 'values'")
            family = ExplicitTable(values)
        elif kind == "cut":
            n = int(_field(doc, "n"))
            edges = []
            for u, v, cap in _field(doc, "edges"):
                edges.append((int(u), int(v), _rationals([cap], "field 'edges'")[0]))
            modular = _rationals(doc["modular"], "field 'modular'") if "modular" in doc else None
            family = CutFunction(n, tuple(edges), bool(doc.get("directed", False)), modular)
        elif kind == "coverage":
            family = Coverage(
                _rationals(_field(doc, "weights"), "field 'weights'"),
                [[int(t) for t in c] for c in _field(doc, "covers")],
                _rationals(_field(doc, "costs"), "field 'costs'"),
            )
        elif kind == "matroid":
            modular = _rationals(doc["modular"], "field 'modular'") if "modular" in doc else None
            family = MatroidRank(int(_field(doc, "n")), [[int(e) for e in b] for b in _field(doc, "blocks")],
                                 [int(c) for c in _field(doc, "caps")], modular)
        elif kind == "concave":
            modular = _rationals(doc["modular"], "field 'modular'") if "modular" in doc else None
            family = ConcaveCardinality(_rationals(_field(doc, "g"), "field 'g'"), modular)
        else:
            raise InstanceFormatError(f"field 'type': unknown instance type {kind!r}")
    except InstanceFormatError:
        raise
    except (TypeError, ValueError, IndexError) as exc:
        raise InstanceFormatError(f"{kind} instance: {exc}") from None
    labels = doc.get("labels")
    if labels is None:
        labels = [str(i) for i in range(family.n)]
    labels = [str(s) for s in labels]
    if len(labels) != family.n or len(set(labels)) != len(labels):
        raise InstanceFormatError(f"field 'labels': need {family.n} distinct labels")
    return Instance(family, labels)


def parse_cut_text(text: str) -> Instance:
    lines = [(no, line.split("#", 1)[0].split()) for no, line in enumerate(text.splitlines(), 1)]
    lines = [(no, toks) for no, toks in lines if toks]
    if not lines:
        raise InstanceFormatError("line 1: empty instance file")
    no, head = lines[0]
    if len(head) != 4 or head[0] != "cut" or head[3] not in ("directed", "undirected"):
        raise InstanceFormatError(f"line {no}: expected 'cut <n> <m> <directed|undirected>'")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise InstanceFormatError(f"line {no}: n and m must be integers") from None
    if n < 1 or m < 0:
        raise InstanceFormatError(f"line {no}: need n >= 1 and m >= 0")
    edges = []
    modular = None
    labels = [str(i) for i in range(n)]
    for no, toks in lines[1:]:
        if toks[0] == "modular":
            if len(toks) != n + 1:
                raise InstanceFormatError(f"line {no}: modular line needs {n} values")
            modular = _rationals(toks[1:], f"line {no}")
        elif toks[0] == "labels":
            labels = toks[1:]
            if len(labels) != n or len(set(labels)) != n:
                raise InstanceFormatError(f"line {no}: labels line needs {n} distinct labels")
        else:
            if len(toks) != 3:
                raise InstanceFormatError(f"line {no}: expected 'u v cap'")
            try:
                u, v = int(toks[0]), int(toks[1])
            except ValueError:
                raise InstanceFormatError(f"line {no}: vertex ids must be integers") from None
            cap = _rationals([toks[2]], f"line {no}")[0]
            if not (0 <= u < n and 0 <= v < n):
                raise InstanceFormatError(f"line {no}: vertex id out of range 0..{n - 1}")
            if cap < 0:
                raise InstanceFormatError(f"line {no}: negative capacity")
            edges.append((u, v, cap))
    if len(edges) != m:
        raise InstanceFormatError(f"line {lines[0][0]}: header declares {m} edges but {len(edges)} were given")
    return Instance(CutFunction(n, tuple(edges), head[3] == "directed", modular), labels)


def parse_instance(text: str) -> Instance:
    if text.lstrip().startswith("{"):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InstanceFormatError(f"line {exc.lineno}: invalid JSON ({exc.msg})") from None
        return parse_json_instance(doc)
    return parse_cut_text(text)


def load_instance(path) -> Instance:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InstanceFormatError(f"{path}: {exc.strerror}") from None
    return parse_instance(text)


def _strs(values):
    return [format_fraction(v) for v in values]


def dump_instance(inst: Instance) -> str:
    fam = inst.family
    default_labels = inst.labels == [str(i) for i in range(fam.n)]
    if isinstance(fam, CutFunction):
        out = [f"cut {fam.n} {len(fam.edges)} {'directed' if fam.directed else 'undirected'}"]
        out += [f"{u} {v} {format_fraction(c)}" for u, v, c in fam.edges]
        if any(fam.modular):
            out.append("modular " + " ".join(_strs(fam.modular)))
        if not default_labels:
            out.append("labels " + " ".join(inst.labels))
        return "\n".join(out) + "\n"
    if isinstance(fam, ExplicitTable):
        doc = {"type": "table", "labels": inst.labels, "values": _strs(fam.values)}
    elif isinstance(fam, Coverage):
        doc = {"type": "coverage", "labels": inst.labels, "weights": _strs(fam.weights),
               "covers": [list(c) for c in fam.covers], "costs": _strs(fam.costs)}
    elif isinstance(fam, MatroidRank):
        doc = {"type": "matroid", "labels": inst.labels, "n": fam.n, "blocks": [list(b) for b in fam.blocks],
               "caps": list(fam.caps), "modular": _strs(fam.modular)}
    elif isinstance(fam, ConcaveCardinality):
        doc = {"type": "concave", "labels": inst.labels, "g": _strs(fam.g), "modular": _strs(fam.modular)}
    else:
        raise TypeError(f"cannot serialize {type(fam).__name__}")
    return json.dumps(doc) + "\n"


def generate(family: str, n: int, seed: int) -> Instance:
    """Seeded random instance; every generator is submodular by construction."""
    if n < 1:
        raise ValueError("n must be positive")
    rng = random.Random(f"{family}:{n}:{seed}")
    labels = [str(i) for i in range(n)]
    if family == "cut":
        directed = rng.random() < 0.5
        edges = [(u, v, rng.randint(1, 9)) for u in range(n) for v in range(n)
                 if u != v and (directed or u < v) and rng.random() < 0.4]
        modular = [rng.randint(-8, 3) for _ in range(n)]
        return Instance(CutFunction(n, tuple(edges), directed, modular), labels)
    if family == "coverage":
        m = n + 2
        weights = [rng.randint(1, 9) for _ in range(m)]
        covers = [[t for t in range(m) if rng.random() < 0.35] for _ in range(n)]
        costs = [rng.randint(0, 12) for _ in range(n)]
        return Instance(Coverage(weights, covers, costs), labels)
    if family == "matroid":
        k = rng.randint(1, max(1, n // 2 + 1))
        assign = [rng.randrange(k) for _ in range(n)]
        blocks = [[e for e in range(n) if assign[e] == b] for b in range(k)]
        caps = [rng.randint(0, max(1, len(b))) for b in blocks]
        modular = [rng.randint(-3, 1) for _ in range(n)]
        return Instance(MatroidRank(n, blocks, caps, modular), labels)
    if family == "concave":
        step = rng.randint(-2, 8)
        g = [0]
        for _ in range(n):
            g.append(g[-1] + step)
            step -= rng.randint(0, 3)
        modular = [rng.randint(-4, 4) for _ in range(n)]
        return Instance(ConcaveCardinality(g, modular), labels)
    if family == "table":
        # weighted coverage terms plus a modular term, tabulated
        terms = []
        for _ in range(rng.randint(1, 3)):
            m = n + 1
            terms.append((rng.randint(1, 3), Coverage([rng.randint(0, 5) for _ in range(m)],
                                                     [[t for t in range(m) if rng.random() < 0.4] for _ in range(n)],
                                                     [0] * n)))
        modular = [rng.randint(-6, 2) for _ in range(n)]
        values = []
        for mask in range(1 << n):
            val = sum((Q(c) * cov(mask) for c, cov in terms), Q(0))
            values.append(val + sum(modular[i] for i in range(n) if mask >> i & 1))
        return Instance(ExplicitTable(values), labels)
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")


def rational_variant(inst: Instance, seed: int) -> tuple[Instance, Q]:
    """A rational-valued table f/d + w with a declared gap bound epsilon.

    All values are multiples of 1/D for the common denominator D, so any two
    distinct values differ by at least epsilon = 1/D.
    """
    rng = random.Random(f"rational:{inst.n}:{seed}")
    n = inst.n
    d = rng.randint(2, 7)
    w = [Q(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(n)]
    f = inst.family
    values = [Q(f(mask)) / d + sum((w[i] for i in range(n) if mask >> i & 1), Q(0)) for mask in range(1 << n)]
    den = math.lcm(*(int(v.denominator) for v in values))
    return Instance(ExplicitTable(values), list(inst.labels)), Q(1, den)
