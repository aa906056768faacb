"""Command-line front end.

Subcommands: ``fuse`` (combine mass-function documents under a chosen
rule), ``sharpen`` (decide the refinement order between two documents),
``table1`` (recompute the built-in reference table for the entropy rule)
and ``logic-check`` (exhaustive model checks of the logic axioms).

Exit codes are a stable contract: 0 success, 1 input error, 2 fusion
rejection, 3 no sharpening witness.
"""

from __future__ import annotations

import argparse
import sys

from . import modal
from .docio import (
    DocumentError,
    dump_json,
    fusion_document,
    load_mass_document,
    mass_document,
    sharpening_document,
)
from .emr import FusionOutcome, SolverConfig, emr_fuse
from .frame import validate_mass
from .maxent import ConvergenceError
from .rules import (
    TotalConflictError,
    conjunctive_many,
    dempster_shafer_many,
    pcr5,
)
from .sharpen import exists_sharpening

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_REJECTED = 2
EXIT_NO_WITNESS = 3

TABLE_TOLERANCE = 1e-4

# Reference fusion cases on the frame {a, b, c}: inputs are
# m1 = {a: alpha1, c: gamma1, top: rest}, m2 = {b: beta2, c: gamma2, top: rest}.
REFERENCE_CASES = [
    ((0.99, 0.01, 0.99, 0.01), None),
    ((0.501, 0.0, 0.501, 0.0), None),
    ((0.499, 0.0, 0.499, 0.0), {"a": 0.499, "b": 0.499, "c": 0.0, "abc": 0.002}),
    ((0.3, 0.1, 0.3, 0.1), {"a": 0.3, "b": 0.3, "c": 0.175, "abc": 0.225}),
    ((0.3, 0.05, 0.3, 0.05), {"a": 0.3, "b": 0.3, "c": 0.09375, "abc": 0.30625}),
    ((0.3, 0.01, 0.3, 0.01), {"a": 0.3, "b": 0.3, "c": 0.01975, "abc": 0.38025}),
]


class _CliParser(argparse.ArgumentParser):
    """argparse that reports usage problems instead of exiting itself,
    so the exit-code contract stays ours."""

    def error(self, message):
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    parser = _CliParser(prog="belfuse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    fuse = sub.add_parser("fuse", help="combine mass-function documents")
    fuse.add_argument("--rule", required=True, choices=["conjunctive", "ds", "pcr5", "emr"])
    fuse.add_argument("inputs", nargs="+", help="input document paths (at least two)")
    fuse.add_argument("--output", help="write the result document to this path")
    fuse.add_argument("--tolerance", type=float, default=1e-9)
    fuse.add_argument("--max-iters", type=int, default=200_000)
    fuse.add_argument("--theta0", type=float, default=1.0)

    sharpen = sub.add_parser("sharpen", help="decide the refinement order")
    sharpen.add_argument("coarse", help="document for the coarser bba")
    sharpen.add_argument("fine", help="document for the finer bba")
    sharpen.add_argument("--output", help="write the witness document to this path")
    sharpen.add_argument("--tolerance", type=float, default=1e-9)

    table = sub.add_parser("table1", help="recompute the built-in reference table")
    table.add_argument("--max-iters", type=int, default=200_000)
    table.add_argument("--theta0", type=float, default=1.0)

    logic = sub.add_parser("logic-check", help="exhaustive logic model checks")
    logic.add_argument("--atoms", type=int, required=True)
    logic.add_argument("--sources", type=int, required=True)
    mode = logic.add_mutually_exclusive_group()
    mode.add_argument("--with-t", dest="t_mode", action="store_const",
                      const=modal.WITH_T, default=modal.WITH_T)
    mode.add_argument("--without-t", dest="t_mode", action="store_const",
                      const=modal.WITHOUT_T)
    return parser


def _load_inputs(paths):
    docs = []
    for path in paths:
        m = load_mass_document(path)
        report = validate_mass(m)
        if not report.ok:
            raise DocumentError(path, "masses", "; ".join(report.violations))
        docs.append(m)
    atoms = docs[0].frame.atoms
    for path, m in zip(paths, docs):
        if m.frame.atoms != atoms:
            raise DocumentError(path, "atoms", f"atom set differs from {paths[0]}")
    return docs


def _emit(doc: dict, output: str | None) -> None:
    text = dump_json(doc, output)
    if output is None:
        print(text)


def cmd_fuse(args) -> int:
    if len(args.inputs) < 2:
        print("fuse needs at least two input documents", file=sys.stderr)
        return EXIT_INPUT
    try:
        ms = _load_inputs(args.inputs)
    except DocumentError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT

    try:
        if args.rule == "conjunctive":
            _emit(mass_document(conjunctive_many(ms)), args.output)
        elif args.rule == "ds":
            _emit(mass_document(dempster_shafer_many(ms)), args.output)
        elif args.rule == "pcr5":
            if len(ms) != 2:
                print("pcr5 combines exactly two inputs", file=sys.stderr)
                return EXIT_INPUT
            _emit(mass_document(pcr5(ms[0], ms[1])), args.output)
        else:
            cfg = SolverConfig(
                theta0=args.theta0,
                max_iterations=args.max_iters,
                feasibility_tolerance=args.tolerance,
            )
            outcome = emr_fuse(ms, cfg)
            _emit(fusion_document(outcome), args.output)
            if outcome.status == "rejected":
                print("fusion rejected: the sources are incompatible", file=sys.stderr)
                return EXIT_REJECTED
    except (TotalConflictError, ValueError) as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    except ConvergenceError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def cmd_sharpen(args) -> int:
    try:
        m1, m2 = _load_inputs([args.coarse, args.fine])
    except DocumentError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    witness = exists_sharpening(m1, m2, tol=args.tolerance)
    if witness is None:
        print("none")
        return EXIT_NO_WITNESS
    _emit(sharpening_document(witness), args.output)
    return EXIT_OK


def cmd_table1(args) -> int:
    from .frame import Frame, MassFunction

    frame = Frame(("a", "b", "c"))
    cfg = SolverConfig(theta0=args.theta0, max_iterations=args.max_iters)
    failures = 0
    header = f"{'alpha1':>7} {'gamma1':>7} {'beta2':>7} {'gamma2':>7}  result"
    print(header)
    print("-" * len(header))
    for (a1, g1, b2, g2), expected in REFERENCE_CASES:
        m1 = MassFunction(frame, {"a": a1, "c": g1, ("a", "b", "c"): 1 - a1 - g1})
        m2 = MassFunction(frame, {"b": b2, "c": g2, ("a", "b", "c"): 1 - b2 - g2})
        outcome = emr_fuse([m1, m2], cfg)
        prefix = f"{a1:>7g} {g1:>7g} {b2:>7g} {g2:>7g}  "
        if expected is None:
            ok = outcome.status == "rejected"
            print(prefix + f"computed: {outcome.status}, expected: rejection "
                  + ("[ok]" if ok else "[MISMATCH]"))
            if not ok:
                failures += 1
            continue
        if outcome.status != "fused":
            print(prefix + "computed: rejection, expected: fusion [MISMATCH]")
            failures += 1
            continue
        cells = []
        worst = 0.0
        for key, want in expected.items():
            got = outcome.fused.mass(tuple(key))
            err = abs(got - want)
            worst = max(worst, err)
            cells.append(f"m({key})={got:.6g} (want {want:.6g})")
        ok = worst <= TABLE_TOLERANCE
        print(prefix + ", ".join(cells) + f", max error {worst:.2e} "
              + ("[ok]" if ok else "[MISMATCH]"))
        if not ok:
            failures += 1
    return EXIT_OK if failures == 0 else EXIT_INPUT


def cmd_logic_check(args) -> int:
    try:
        sig = modal.LogicSignature(
            tuple(f"p{i + 1}" for i in range(args.atoms)), args.sources
        )
    except modal.LogicError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INPUT
    failures = 0
    report = modal.verify_axioms(sig, args.t_mode)
    for axiom, count in report.counts:
        bad = [d for a, d in report.violations if a == axiom]
        if bad:
            failures += len(bad)
            print(f"axiom {axiom}: FAILED {len(bad)}/{count} instances")
            for detail in bad[:5]:
                print(f"  {detail}")
        else:
            print(f"axiom {axiom}: ok ({count} instances)")
    if args.t_mode == modal.WITHOUT_T:
        n = len(report.t_counterexamples)
        print(f"axiom T counterexamples without truth grounding: {n} found (expected absent)")
    for name, check in [
        ("partition", modal.check_bla_partition),
        ("inversion", modal.check_inversion),
        ("combination", modal.check_combination),
    ]:
        issues = check(sig, args.t_mode)
        if issues:
            failures += len(issues)
            print(f"{name} checks: FAILED ({len(issues)} issues)")
            for detail in issues[:5]:
                print(f"  {detail}")
        else:
            print(f"{name} checks: ok")
    return EXIT_OK if failures == 0 else EXIT_INPUT


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.command == "fuse":
        return cmd_fuse(args)
    if args.command == "sharpen":
        return cmd_sharpen(args)
    if args.command == "table1":
        return cmd_table1(args)
    if args.command == "logic-check":
        return cmd_logic_check(args)
    print(f"unknown command {args.command!r}", file=sys.stderr)
    return EXIT_INPUT


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
