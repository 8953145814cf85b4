"""The acceptance suite behind ``submin selftest``.

Two passes over a seeded corpus (every family, n cycling through 1..10):
a plain timed pass that compares both solvers with brute force and collects
certificates and counters, and an instrumented pass with traces and
from-scratch invariant checks that feeds the per-step criteria.
"""

from __future__ import annotations

import copy
import json
import math
import random
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .base import LinearOrdering, exchange_capacity_consecutive, greedy_extreme_base
from .errors import InternalInvariantError
from .instances import FAMILIES, dump_instance, generate, rational_variant
from .oracle import to_indices, upper_bound_M
from .rational import Q, format_fraction
from .scaling import sfm
from .strong import strong_sfm
from .verify import brute_force_min, check_certificate, exchange_capacity_bruteforce

TIME_LIMIT = 120.0
MUTATIONS = ("lambda_negated", "y_plus_one", "gap_plus_one", "lambda_doubled", "phi_asymmetric")


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        return f"[{'PASS' if self.passed else 'FAIL'}] {self.number:>2} {self.title}: {self.detail} ({self.seconds:.1f}s)"


@dataclass
class Run:
    family: str
    n: int
    seed: int
    minimum: Q
    minimizers: list[int]
    M: Q
    results: dict = field(default_factory=dict)
    errors: dict = field(default_factory=dict)


def ceil_log2(q) -> int:
    """Smallest k with 2**k >= q, for rational q > 0."""
    q = Q(q)
    k = int(q.numerator // q.denominator).bit_length()
    while k > -1 and Q(2) ** (k - 1) >= q:
        k -= 1
    while Q(2) ** k < q:
        k += 1
    return k


def mutate(cert: dict, kind: str) -> dict:
    out = copy.deepcopy(cert)
    if kind == "lambda_negated":
        out["lambda"][0] = format_fraction(-Q(out["lambda"][0]))
    elif kind == "y_plus_one":
        out["bases"][0]["y"][0] = format_fraction(Q(out["bases"][0]["y"][0]) + 1)
    elif kind == "gap_plus_one":
        out["gap"] = format_fraction(Q(out["gap"]) + 1)
    elif kind == "lambda_doubled":
        out["lambda"][0] = format_fraction(2 * Q(out["lambda"][0]))
    elif kind == "phi_asymmetric":
        row = out["phi"][0]
        row[-1] = format_fraction(Q(row[-1]) + 1)
    else:
        raise ValueError(kind)
    return out


class Suite:
    def __init__(self, seeds_per_family=100, exchange_triples=1000, eps_instances=60, fix_instances=200,
                 mutation_sample=50, time_limit=TIME_LIMIT):
        self.seeds_per_family = seeds_per_family
        self.exchange_triples = exchange_triples
        self.eps_instances = eps_instances
        self.fix_instances = fix_instances
        self.mutation_sample = mutation_sample
        self.time_limit = time_limit
        self._plain: list[Run] | None = None
        self._plain_seconds = 0.0
        self._traced: list[Run] | None = None

    @classmethod
    def quick(cls) -> Suite:
        return cls(seeds_per_family=10, exchange_triples=100, eps_instances=10, fix_instances=20, mutation_sample=10)

    def corpus(self):
        for family in FAMILIES:
            for seed in range(self.seeds_per_family):
                yield family, 1 + seed % 10, seed

    # -- passes ---------------------------------------------------------

    def _new_run(self, family, n, seed):
        inst = generate(family, n, seed)
        ref = inst.oracle()
        _, best, minimizers = brute_force_min(ref)
        M = upper_bound_M(inst.oracle(cache_size=0), range(n))
        return inst, Run(family, n, seed, best, minimizers, M)

    def plain_runs(self) -> list[Run]:
        if self._plain is None:
            start = time.perf_counter()
            runs = []
            for family, n, seed in self.corpus():
                inst, run = self._new_run(family, n, seed)
                for name, solver in (("scaling", sfm), ("strong", strong_sfm)):
                    # uncached so that the call counters see every evaluation
                    try:
                        run.results[name] = solver(inst.oracle(cache_size=0))
                    except InternalInvariantError as exc:
                        run.errors[name] = str(exc)
                runs.append(run)
            self._plain_seconds = time.perf_counter() - start
            self._plain = runs
        return self._plain

    def traced_runs(self) -> list[Run]:
        if self._traced is None:
            runs = []
            for family, n, seed in self.corpus():
                inst, run = self._new_run(family, n, seed)
                run.oracle = inst.oracle()
                for name, solver in (("scaling", sfm), ("strong", strong_sfm)):
                    try:
                        run.results[name] = solver(run.oracle, trace=True, checks=True)
                    except InternalInvariantError as exc:
                        run.errors[name] = str(exc)
                runs.append(run)
            self._traced = runs
        return self._traced

    @staticmethod
    def _errors(runs) -> list[str]:
        return [f"{r.family}/n={r.n}/seed={r.seed} {name}: {msg}" for r in runs for name, msg in r.errors.items()]

    # -- criteria -------------------------------------------------------

    def c1_equivalence(self):
        runs = self.plain_runs()
        bad = self._errors(runs)
        for r in runs:
            for name, res in r.results.items():
                if res.value != r.minimum or res.minimizer not in r.minimizers:
                    bad.append(f"{r.family}/n={r.n}/seed={r.seed} {name}: {res.value} != {r.minimum}")
        fams = {r.family for r in runs}
        ok = not bad and self._plain_seconds < self.time_limit
        detail = (f"{len(runs)} instances over {len(fams)} families, {len(bad)} mismatches, "
                  f"{self._plain_seconds:.1f}s for both solvers plus brute force (limit {self.time_limit:.0f}s)")
        return ok, detail + (f"; first: {bad[0]}" if bad else "")

    def c2_certificates(self):
        runs = self.plain_runs()
        checked = mutated = 0
        bad = []
        for r in runs:
            res = r.results.get("scaling")
            if res is None:
                continue
            f = generate(r.family, r.n, r.seed).oracle()
            cert = json.loads(json.dumps(res.certificate.to_json(res.labels)))
            report = check_certificate(f, cert)
            checked += 1
            if not report:
                bad.append(f"{r.family}/seed={r.seed}: {report.clause}: {report.message}")
            if not Q(cert["gap"]) < 1:
                bad.append(f"{r.family}/seed={r.seed}: gap {cert['gap']}")
            if mutated < self.mutation_sample and r.n >= 2:
                mutated += 1
                for kind in MUTATIONS:
                    if check_certificate(f, mutate(cert, kind)):
                        bad.append(f"{r.family}/seed={r.seed}: mutation {kind} accepted")
        detail = (f"{checked} certificates verified with gap < 1; {mutated} certificates x {len(MUTATIONS)} "
                  f"mutations all rejected" if not bad else f"{len(bad)} problems; first: {bad[0]}")
        return not bad and checked > 0, detail

    def c3_exchange_capacity(self):
        rng = random.Random(3)
        bad = []
        for t in range(self.exchange_triples):
            family = FAMILIES[t % len(FAMILIES)]
            n = rng.randint(2, 8)
            f = generate(family, n, rng.randrange(10 ** 6)).oracle()
            perm = list(range(n))
            rng.shuffle(perm)
            b = greedy_extreme_base(f, LinearOrdering(tuple(perm)))
            k = rng.randint(1, n - 1)
            fast = exchange_capacity_consecutive(f, b, k)
            slow = exchange_capacity_bruteforce(f, b.y, perm[k], perm[k - 1])
            if fast != slow:
                bad.append(f"{family} n={n} k={k}: {fast} != {slow}")
        detail = f"{self.exchange_triples} (instance, ordering, position) triples with n <= 8, {len(bad)} mismatches"
        return not bad, detail + (f"; first: {bad[0]}" if bad else "")

    def c4_z_invariance(self):
        runs = self.traced_runs()
        bad = self._errors(runs)
        pushes = augs = 0
        for r in runs:
            for name, res in r.results.items():
                for e in res.trace:
                    if e["event"] == "push":
                        pushes += 1
                        if e["z_before"] is None or e["z_before"] != e["z_after"]:
                            bad.append(f"{r.family}/seed={r.seed} {name}: push changed z")
                    elif e["event"] == "augment":
                        augs += 1
                        if e["zminus_after"] - e["zminus_before"] != e["delta"]:
                            bad.append(f"{r.family}/seed={r.seed} {name}: augmentation gained "
                                       f"{e['zminus_after'] - e['zminus_before']} at delta {e['delta']}")
        detail = f"{pushes} pushes and {augs} augmentations over {len(runs)} instances x 2 solvers, {len(bad)} violations"
        return not bad and pushes > 0, detail + (f"; first: {bad[0]}" if bad else "")

    def c5_envelopes(self):
        runs = self.plain_runs()
        bad = self._errors(runs)
        worst = {"aug": 0.0, "phase": 0.0, "fix": 0.0, "calls": 0.0}
        for r in runs:
            n, M = r.n, r.M
            tag = f"{r.family}/n={n}/seed={r.seed}"
            call_bound = 100 * n ** 5 * (math.log2(max(n * M, 1)) + 2)
            for name, res in r.results.items():
                st = res.stats
                for delta, augs, _ in st.phase_log:
                    worst["aug"] = max(worst["aug"], augs / (n * n + n))
                    if augs > n * n + n:
                        bad.append(f"{tag} {name}: {augs} augmentations in a phase")
                if st.oracle_calls > call_bound:
                    bad.append(f"{tag} {name}: {st.oracle_calls} oracle calls > {call_bound:.0f}")
                worst["calls"] = max(worst["calls"], st.oracle_calls / call_bound)
                if name == "scaling":
                    bound = ceil_log2(n * n * M) + 1 if M > 0 else 0
                    if st.phases > bound:
                        bad.append(f"{tag}: {st.phases} phases > {bound}")
                    if bound:
                        worst["phase"] = max(worst["phase"], st.phases / bound)
                else:
                    if st.fix_calls > n * n:
                        bad.append(f"{tag}: {st.fix_calls} Fix calls > {n * n}")
                    worst["fix"] = max(worst["fix"], st.fix_calls / (n * n))
        detail = ("largest fraction of each bound used: augmentations/phase {aug:.2f}, phases {phase:.2f}, "
                  "Fix calls {fix:.2f}, oracle calls {calls:.4f}").format(**worst)
        return not bad, detail + (f"; {len(bad)} violations, first: {bad[0]}" if bad else "")

    def c6_tight_exit(self):
        runs = self.traced_runs()
        bad = self._errors(runs)
        exits = 0
        for r in runs:
            for name, res in r.results.items():
                for e in res.trace:
                    if e["event"] == "phase" and e.get("stage") == "end" and e["exit"] == "Z_empty":
                        exits += 1
                        g = e["_oracle"]
                        W = e["W"]
                        xw = sum((e["x"][v] for v in to_indices(W)), Q(0))
                        if xw != g(W):
                            bad.append(f"{r.family}/seed={r.seed} {name}: x(W) = {xw} but f(W) = {g(W)}")
        detail = f"{exits} phase exits with no active pair and no augmenting path, {len(bad)} not tight"
        return not bad and exits > 0, detail + (f"; first: {bad[0]}" if bad else "")

    def c7_fix(self):
        runs = [r for r in self.traced_runs() if r.n <= 8]
        bad = self._errors(runs)
        qualifying = fixes = arcs = 0
        for r in runs:
            res = r.results.get("strong")
            if res is None:
                continue
            saw_fix = False
            for e in res.trace:
                if e["event"] == "fix":
                    saw_fix = True
                    fixes += 1
                    _, _, mins = brute_force_min(e["_oracle"])
                    w = 1 << e["_w"]
                    if any(not m & w for m in mins):
                        bad.append(f"{r.family}/seed={r.seed}: Fix returned {e['w']} outside a minimizer")
                elif e["event"] == "arc":
                    arcs += 1
                    gu, gw = e["_groups"][e["_u"]], e["_groups"][e["_w"]]
                    for m in r.minimizers:
                        if m & gu == gu and m & gw != gw:
                            bad.append(f"{r.family}/seed={r.seed}: arc {e['u']} -> {e['w']} not compatible")
            qualifying += saw_fix
        ok = not bad and qualifying >= self.fix_instances
        detail = (f"{qualifying} instances with n <= 8 called Fix (need {self.fix_instances}); "
                  f"{fixes} Fix results and {arcs} arcs checked, {len(bad)} violations")
        return ok, detail + (f"; first: {bad[0]}" if bad else "")

    def c8_consistent_base(self):
        runs = self.traced_runs()
        bad = self._errors(runs)
        bases = 0
        for r in runs:
            res = r.results.get("strong")
            if res is None:
                continue
            for e in res.trace:
                if e["event"] != "consistent_base":
                    continue
                bases += 1
                g, dag, b = e["_oracle"], e["_dag"], e["_base"]
                for v in range(dag.n):
                    R = dag.reach(v)
                    if b.y[v] > g(R) - g(R & ~(1 << v)):
                        bad.append(f"{r.family}/seed={r.seed}: bound broken at vertex {v}")
        detail = f"{bases} consistent extreme bases, {len(bad)} violations"
        return not bad and bases > 0, detail + (f"; first: {bad[0]}" if bad else "")

    def c9_epsilon(self):
        bad = []
        for i in range(self.eps_instances):
            family = FAMILIES[i % len(FAMILIES)]
            n = 1 + i % 8
            inst, eps = rational_variant(generate(family, n, 1000 + i), i)
            f = inst.oracle()
            _, best, mins = brute_force_min(f)
            try:
                res = sfm(f, epsilon=eps)
            except InternalInvariantError as exc:
                bad.append(f"{family}/n={n}: {exc}")
                continue
            if res.minimizer not in mins or res.value != best + f.offset:
                bad.append(f"{family}/n={n}: got {res.value}, minimum {best + f.offset}")
            report = check_certificate(f, json.loads(json.dumps(res.certificate.to_json(res.labels))))
            if not report:
                bad.append(f"{family}/n={n}: certificate {report.clause}")
        detail = f"{self.eps_instances} rational tables with n <= 8 and epsilon = 1/common denominator, {len(bad)} failures"
        return not bad, detail + (f"; first: {bad[0]}" if bad else "")

    def c10_determinism(self):
        from .cli import RunConfig, run_solve

        bad = []
        configs = 0
        with tempfile.TemporaryDirectory() as tmp:
            for family in FAMILIES:
                texts = {dump_instance(generate(family, 6, 42)) for _ in range(2)}
                if len(texts) != 1:
                    bad.append(f"gen {family} differs between runs")
                path = Path(tmp) / f"{family}.inst"
                path.write_text(texts.pop())
                for algorithm in ("scaling", "strong", "brute"):
                    cfg = RunConfig(str(path), algorithm, verify=True, trace="-")
                    outs = [run_solve(cfg) for _ in range(2)]
                    configs += 1
                    if outs[0] != outs[1]:
                        bad.append(f"solve {family} --algorithm {algorithm} differs between runs")
                    if outs[0][0] != 0:
                        bad.append(f"solve {family} --algorithm {algorithm} exited {outs[0][0]}")
        detail = f"{len(FAMILIES)} generated files and {configs} solve configurations repeated, {len(bad)} differences"
        return not bad, detail + (f"; first: {bad[0]}" if bad else "")

    CRITERIA = (
        (1, "exact-optimality equivalence", "c1_equivalence"),
        (2, "certificate soundness", "c2_certificates"),
        (3, "one-call exchange capacity", "c3_exchange_capacity"),
        (4, "z-invariance", "c4_z_invariance"),
        (5, "complexity envelopes", "c5_envelopes"),
        (6, "tight set at phase exit", "c6_tight_exit"),
        (7, "Fix and compatible arcs", "c7_fix"),
        (8, "consistent-base bound", "c8_consistent_base"),
        (9, "epsilon-scaled rational mode", "c9_epsilon"),
        (10, "determinism", "c10_determinism"),
    )

    def run_one(self, number: int) -> CriterionResult:
        for k, title, method in self.CRITERIA:
            if k == number:
                start = time.perf_counter()
                try:
                    ok, detail = getattr(self, method)()
                except Exception as exc:  # a crash is a failed criterion, not a crashed suite
                    ok, detail = False, f"raised {type(exc).__name__}: {exc}"
                return CriterionResult(k, title, ok, detail, time.perf_counter() - start)
        raise ValueError(f"no criterion {number}")

    def run(self, only=None, log: Callable[[str], None] | None = None) -> list[CriterionResult]:
        out = []
        for k, _, _ in self.CRITERIA:
            if only and k not in only:
                continue
            res = self.run_one(k)
            if log is not None:
                log(res.line())
            out.append(res)
        return out
