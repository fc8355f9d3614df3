"""Why scoping matters: the same injectivity constraint with one ID too few.

Six A atoms cannot map injectively into five IDs, so the bounded problem is
unsatisfiable. Without a scope the solver is free to invent more IDs, and
the translation becomes satisfiable. Scoped modes restore the bound, either
by grounding every quantifier (expand) or by handing the solver domain
constants and closure axioms (solver_fmf).
"""

from __future__ import annotations

import shutil
import sys

from relog2smt import CORPUS_DIR
from relog2smt.harness.oracle import brute_force_solve
from relog2smt.harness.solver import run_solver
from relog2smt.options import ALL_COMBOS
from relog2smt.pipeline import compile_model
from relog2smt.relational import parse_model

text = (CORPUS_DIR / "injective_ids_pigeonhole.kkir").read_text()
model = parse_model(text)

# %% Ground truth from exhaustive search
truth = brute_force_solve(model)
print(f"oracle: {truth.verdict} ({truth.nodes} search nodes)")

if not shutil.which("z3"):
    sys.exit("z3 not found; install it to see the solver verdicts")

# %% Every option combination
print(f"\n{'combination':32} {'result':8} {'size':>8}")
for opts in ALL_COMBOS:
    compiled = compile_model(model, opts)
    out = run_solver(compiled.smtlib, timeout_ms=30_000)
    note = "" if not opts.scoped or out.result == truth.verdict else "  <- disagrees"
    print(f"{opts.label:32} {out.result:8} {len(compiled.smtlib):>8}{note}")

# Unscoped translations are a relaxation of the bounded problem: they may say
# SAT where the bounded problem is UNSAT, but never the reverse. Only scoped
# cells are expected to match the oracle.
