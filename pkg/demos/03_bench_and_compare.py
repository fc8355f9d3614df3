"""Benchmark the four recommended option combinations over the shipped
corpus and look at which one is fastest per model.

This is what ``relog2smt bench <dir> --combos interesting`` writes as CSV;
here the rows are summarised instead.
"""

from __future__ import annotations

import shutil
import sys
from collections import Counter

from relog2smt import CORPUS_DIR
from relog2smt.harness.bench import bench, to_csv
from relog2smt.options import INTERESTING

if not shutil.which("z3"):
    sys.exit("z3 not found; install it to run the benchmark")

rows = bench(CORPUS_DIR, INTERESTING, timeout_ms=10_000)

# %% Raw CSV, first few rows
print("\n".join(to_csv(rows).splitlines()[:6]))

# %% One line per model
labels = [o.label for o in INTERESTING]
print(f"\n{'model':30}" + "".join(f"{lab.replace('/', ' '):>30}" for lab in labels))
winners = Counter()
for model in dict.fromkeys(r.model for r in rows):
    mine = [r for r in rows if r.model == model]
    cells = "".join(f"{r.result:>10} {r.solve_ms:>8.0f} ms" + " " * 8 for r in mine)
    print(f"{model:30}{cells}")
    decided = [r for r in mine if r.result in ("SAT", "UNSAT")]
    if decided:
        winners[min(decided, key=lambda r: r.solve_ms).options.label] += 1

# %% No single combination wins everywhere
print("\nfastest decided combination per model:")
for label, n in winners.most_common():
    print(f"  {label:32} {n}")
