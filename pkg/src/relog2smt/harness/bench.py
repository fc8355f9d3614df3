"""Benchmark runner: every model of a directory under every selected
combination, one CSV row per cell."""

from __future__ import annotations

import csv
import io
import os
import shlex
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from ..options import Options
from ..pipeline import compile_model
from ..relational import parse_model
from ..scoper import DEFAULT_BUDGET
from .solver import SolveRecord, run_solver, solver_command

CSV_HEADER = ("model,sort_mode,rel_mode,scope_mode,translate_ms,solve_ms,"
              "result,solver_id,timeout_ms")


def model_files(directory: str | Path) -> list[Path]:
    d = Path(directory)
    if not d.is_dir():
        raise FileNotFoundError(f"not a readable directory: {d}")
    return sorted(d.glob("*.kkir"))


def run_cell(path: Path, opts: Options, solver_cmd: str | None, timeout_ms: int,
             budget: int = DEFAULT_BUDGET) -> SolveRecord:
    """Translate and solve one (model, combination) cell; failures become ERROR."""
    cmd = solver_command(solver_cmd)
    argv = shlex.split(cmd)
    solver_id = os.path.basename(argv[0]) if argv else "?"
    translate_ms = 0.0
    try:
        t0 = time.perf_counter()
        m = parse_model(path.read_text(encoding="utf-8"))
        compiled = compile_model(m, opts, path.stem, budget)
        translate_ms = (time.perf_counter() - t0) * 1000
    except Exception as exc:  # noqa: BLE001 - any failure is an ERROR row
        return SolveRecord(path.stem, opts, translate_ms, 0.0, "ERROR", solver_id, timeout_ms,
                           f"translation failed: {exc}")
    try:
        out = run_solver(compiled.smtlib, cmd, timeout_ms)
    except Exception as exc:  # noqa: BLE001
        return SolveRecord(path.stem, opts, translate_ms, 0.0, "ERROR", solver_id, timeout_ms,
                           f"solver failed: {exc}")
    note = out.stderr.strip().splitlines()[0] if out.result == "ERROR" and out.stderr.strip() else ""
    return SolveRecord(path.stem, opts, translate_ms, out.solve_ms, out.result, out.solver_id,
                       timeout_ms, note)


def bench(models: str | Path | list[Path], combos: tuple[Options, ...],
          solver_cmd: str | None = None, timeout_ms: int = 60_000,
          budget: int = DEFAULT_BUDGET, workers: int | None = None) -> list[SolveRecord]:
    """Run every cell; rows come back model-major, combination-minor.

    Cells run on a bounded thread pool (each one spends its time waiting on
    a solver process) but the returned order never depends on completion
    order.
    """
    paths = models if isinstance(models, list) else model_files(models)
    cells = [(p, o) for p in paths for o in combos]
    workers = workers or os.cpu_count() or 1
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(run_cell, p, o, solver_cmd, timeout_ms, budget) for p, o in cells]
        return [f.result() for f in futures]


def to_csv(records: list[SolveRecord]) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    w = csv.writer(buf, lineterminator="\n")
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def read_csv(text: str) -> list[dict[str, str]]:
    return list(csv.DictReader(io.StringIO(text)))
