"""Command-line front end.

    submin solve INSTANCE [--algorithm scaling|strong|brute] [--verify]
                          [--trace PATH] [--epsilon P/Q] [--output PATH]
    submin gen FAMILY N [SEED] [--seed S] [--output PATH]
    submin selftest [--quick] [--only K ...]

Exit codes: 0 success, 1 input error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .errors import InstanceFormatError, NotSubmodularError
from .instances import FAMILIES, dump_instance, generate, load_instance
from .rational import Q, as_fraction, format_fraction
from .scaling import SfmResult, SolveStats, sfm, trace_to_json
from .strong import strong_sfm
from .verify import MAX_BRUTE_N, brute_force_min, check_certificate

EXIT_OK, EXIT_INPUT, EXIT_VERIFY = 0, 1, 2
ALGORITHMS = ("scaling", "strong", "brute")


@dataclass
class RunConfig:
    input: str
    algorithm: str = "scaling"
    verify: bool = False
    trace: str | None = None
    epsilon: Q | None = None
    seed: int = 0
    output: str | None = None


class InputError(Exception):
    pass


def _brute(f) -> SfmResult:
    calls0 = f.calls
    mask, value, _ = brute_force_min(f)
    stats = SolveStats(oracle_calls=f.calls - calls0)
    return SfmResult(mask, value + f.offset, list(f.labels), stats)


def run_solve(cfg: RunConfig) -> tuple[int, str, list[str], list[str]]:
    """Solve without touching the filesystem beyond reading the instance.

    Returns (exit code, result text, trace lines, diagnostics).
    """
    notes: list[str] = []
    try:
        inst = load_instance(cfg.input)
        f = inst.oracle()
    except (InstanceFormatError, NotSubmodularError) as exc:
        return EXIT_INPUT, "", [], [f"error: {exc}"]
    try:
        if cfg.algorithm not in ALGORITHMS:
            raise InputError(f"unknown algorithm {cfg.algorithm!r}")
        if cfg.epsilon is not None:
            if cfg.algorithm != "scaling":
                raise InputError("--epsilon applies to --algorithm scaling only")
            if cfg.epsilon <= 0:
                raise InputError("--epsilon must be positive")
        elif cfg.algorithm == "scaling" and not inst.integral:
            raise InputError("instance has non-integer values; pass --epsilon with a lower bound on the gap "
                             "between the two smallest values, or use --algorithm strong")
        if cfg.algorithm == "brute" and f.n > MAX_BRUTE_N:
            raise InputError(f"brute force refused for n={f.n} > {MAX_BRUTE_N}")
    except InputError as exc:
        return EXIT_INPUT, "", [], [f"error: {exc}"]

    want_trace = cfg.trace is not None
    if cfg.algorithm == "scaling":
        result = sfm(f, epsilon=cfg.epsilon, trace=want_trace)
    elif cfg.algorithm == "strong":
        result = strong_sfm(f, trace=want_trace)
    else:
        result = _brute(f)
    doc = result.to_json()
    text = json.dumps(doc, indent=2) + "\n"
    trace_lines = [json.dumps(trace_to_json(e, f.labels)) for e in result.trace or []]

    code = EXIT_OK
    if cfg.verify:
        code, notes = _verify(f, json.loads(text))
    return code, text, trace_lines, notes


def _verify(f, doc: dict) -> tuple[int, list[str]]:
    notes = []
    ok = True
    if doc["certificate"] is not None:
        report = check_certificate(f, doc["certificate"])
        notes.append(f"certificate: {'ok' if report else 'FAILED'} ({report.message})")
        ok &= bool(report)
    try:
        X = f.mask_from_labels(doc["minimizer"])
    except ValueError as exc:
        return EXIT_VERIFY, notes + [f"minimizer: FAILED ({exc})"]
    claimed = as_fraction(doc["value"])
    if f(X) + f.offset != claimed:
        notes.append(f"value: FAILED (f(minimizer) = {format_fraction(f(X) + f.offset)}, reported {doc['value']})")
        ok = False
    if f.n <= MAX_BRUTE_N:
        _, best, _ = brute_force_min(f)
        best += f.offset
        match = best == claimed
        notes.append(f"brute force: {'ok' if match else 'FAILED'} (minimum {format_fraction(best)})")
        ok &= match
    else:
        notes.append(f"brute force: skipped for n={f.n} > {MAX_BRUTE_N}")
    return (EXIT_OK if ok else EXIT_VERIFY), notes


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_solve(args) -> int:
    try:
        eps = None if args.epsilon is None else as_fraction(args.epsilon)
    except (TypeError, ValueError) as exc:
        print(f"error: --epsilon: {exc}", file=sys.stderr)
        return EXIT_INPUT
    cfg = RunConfig(args.instance, args.algorithm, args.verify, args.trace, eps, args.seed, args.output)
    code, text, trace_lines, notes = run_solve(cfg)
    for line in notes:
        print(line, file=sys.stderr)
    if text:
        _write(cfg.output, text)
    if cfg.trace is not None and text:
        Path(cfg.trace).write_text("".join(line + "\n" for line in trace_lines))
    return code


def cmd_gen(args) -> int:
    seed = args.seed_pos if args.seed_pos is not None else args.seed
    try:
        inst = generate(args.family, args.n, seed)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _write(args.output, dump_instance(inst))
    return EXIT_OK


def cmd_selftest(args) -> int:
    from .acceptance import Suite

    suite = Suite.quick() if args.quick else Suite()
    results = suite.run(only=args.only, log=lambda line: print(line, flush=True))
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed")
    return 1 if failed else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="submin", description="Exact submodular function minimization.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="minimize the function described by an instance file")
    p.add_argument("instance", help="JSON instance or cut text file")
    p.add_argument("--algorithm", choices=ALGORITHMS, default="scaling")
    p.add_argument("--verify", action="store_true", help="check the certificate and cross-check by brute force")
    p.add_argument("--trace", metavar="PATH", help="write line-delimited JSON trace events")
    p.add_argument("--epsilon", metavar="P/Q", help="gap bound for non-integer instances (scaling only)")
    p.add_argument("--seed", type=int, default=0, help="accepted for symmetry with gen; solving is deterministic")
    p.add_argument("--output", metavar="PATH", help="result file (default: stdout)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("gen", help="write a seeded random instance")
    p.add_argument("family", help=f"one of {', '.join(FAMILIES)}")
    p.add_argument("n", type=int)
    p.add_argument("seed_pos", nargs="?", type=int, metavar="SEED")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output", metavar="PATH")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("selftest", help="run the acceptance suite")
    p.add_argument("--quick", action="store_true", help="small corpus for smoke testing")
    p.add_argument("--only", type=int, nargs="+", metavar="K", help="run only these criteria")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
