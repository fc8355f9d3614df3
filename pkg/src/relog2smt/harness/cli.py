"""Command line front end: ``relog2smt translate|solve|oracle|bench|combos``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..options import INTERESTING, Options, select_combos
from ..pipeline import compile_file
from ..relational import KKIRError, parse_model
from ..scoper import DEFAULT_BUDGET, ScopeError
from ..translator import TranslationError
from .bench import bench, to_csv
from .oracle import DEFAULT_ORACLE_BUDGET, OracleBudgetError, brute_force_solve
from .solver import run_solver

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sorts", choices=("typed", "untyped"), default="typed")
    p.add_argument("--rels", choices=("predicates", "functions"), default="predicates")
    p.add_argument("--scope", choices=("unscoped", "expand", "fmf", "solver_fmf"),
                   default="unscoped")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                   help="node budget for quantifier expansion")


def _parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="relog2smt", description="Translate relational logic problems to SMT-LIB.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("translate", help="write the SMT-LIB translation of a model")
    p.add_argument("model")
    _add_options(p)
    p.add_argument("-o", "--output", help="output file (default: stdout)")

    p = sub.add_parser("solve", help="translate and run the solver, print the verdict")
    p.add_argument("model")
    _add_options(p)
    p.add_argument("--timeout", type=int, default=60_000, help="milliseconds")
    p.add_argument("--solver-cmd", help="command template containing {file}")

    p = sub.add_parser("oracle", help="decide a model by exhaustive search")
    p.add_argument("model")
    p.add_argument("--budget", type=int, default=DEFAULT_ORACLE_BUDGET,
                   help="maximum number of search nodes")
    p.add_argument("--witness", action="store_true", help="also print the satisfying instance")

    p = sub.add_parser("bench", help="run a directory of models under many combinations")
    p.add_argument("models", help="directory of .kkir files")
    p.add_argument("--combos", default="all",
                   help="all, interesting, scoped or a comma list like typed/predicates/unscoped")
    p.add_argument("--timeout", type=int, default=60_000, help="milliseconds per cell")
    p.add_argument("--solver-cmd", help="command template containing {file}")
    p.add_argument("--csv", help="output file (default: stdout)")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--jobs", type=int, default=None, help="parallel solver processes")

    p = sub.add_parser("combos", help="list option combinations")
    p.add_argument("--combos", default="all")
    return ap


def _opts(args) -> Options:
    return Options(args.sorts, args.rels, args.scope)


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _run(args) -> int:
    if args.cmd == "translate":
        _write(compile_file(args.model, _opts(args), args.budget).smtlib, args.output)
        return EXIT_OK
    if args.cmd == "solve":
        compiled = compile_file(args.model, _opts(args), args.budget)
        out = run_solver(compiled.smtlib, args.solver_cmd, args.timeout)
        print(out.result)
        if out.result == "ERROR":
            print(out.stderr.strip(), file=sys.stderr)
            return EXIT_INTERNAL
        return EXIT_OK
    if args.cmd == "oracle":
        m = parse_model(Path(args.model).read_text(encoding="utf-8"))
        res = brute_force_solve(m, args.budget)
        print(res.verdict)
        if args.witness and res.witness is not None:
            for name, tuples in res.witness.items():
                body = " ".join("(" + " ".join(map(str, t)) + ")" for t in sorted(tuples))
                print(f"{name}: {body}")
        return EXIT_OK
    if args.cmd == "bench":
        combos = _combos(args.combos)
        rows = bench(args.models, combos, args.solver_cmd, args.timeout, args.budget, args.jobs)
        _write(to_csv(rows), args.csv)
        return EXIT_OK
    if args.cmd == "combos":
        for o in _combos(args.combos):
            mark = "*" if o in INTERESTING else " "
            print(f"{mark} {o.label}")
        return EXIT_OK
    raise _UsageError(f"unknown command {args.cmd}")


def _combos(spec: str) -> tuple[Options, ...]:
    try:
        combos = select_combos(spec)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    if not combos:
        raise _UsageError("no combinations selected")
    return combos


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
        if getattr(args, "budget", 1) <= 0 or getattr(args, "timeout", 1) <= 0:
            raise _UsageError("--budget and --timeout must be positive")
        return _run(args)
    except _UsageError as exc:
        print(f"relog2smt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, IsADirectoryError) as exc:
        print(f"relog2smt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except KKIRError as exc:
        print(f"relog2smt: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ScopeError, TranslationError, OracleBudgetError, ValueError) as exc:
        print(f"relog2smt: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001
        print(f"relog2smt: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
