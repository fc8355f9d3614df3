"""Running an external SMT solver on SMT-LIB text."""

from __future__ import annotations

import os
import re
import shlex
import signal
import subprocess
import tempfile
import time
from dataclasses import dataclass

from ..options import Options

# The macro finder lets z3 treat the exactness definitions of is_T as macros
# and expand type-guarded quantifiers over the constants; without it, its
# e-matching can run away on small untyped solver_fmf problems.
DEFAULT_SOLVER_CMD = "z3 smt.macro_finder=true {file}"
SOLVER_ENV = "RELOG2SMT_SOLVER"
RESULTS = ("SAT", "UNSAT", "UNKNOWN", "TIMEOUT", "ERROR")


def solver_command(explicit: str | None = None) -> str:
    """The flag wins over the environment, which wins over the default."""
    return explicit or os.environ.get(SOLVER_ENV) or DEFAULT_SOLVER_CMD


@dataclass
class SolverOutcome:
    result: str
    solve_ms: float
    solver_id: str
    stderr: str = ""


@dataclass
class SolveRecord:
    model: str
    options: Options
    translate_ms: float
    solve_ms: float
    result: str
    solver_id: str
    timeout_ms: int
    peak_note: str = ""

    def __post_init__(self):
        if self.result not in RESULTS:
            raise ValueError(f"unknown result {self.result!r}")
        if self.translate_ms < 0 or self.solve_ms < 0:
            raise ValueError("times must be nonnegative")
        if self.result == "TIMEOUT" and self.solve_ms < self.timeout_ms:
            self.solve_ms = float(self.timeout_ms)

    def row(self) -> list[str]:
        o = self.options
        return [self.model, o.sort_mode, o.rel_mode, o.scope_mode, f"{self.translate_ms:.3f}",
                f"{self.solve_ms:.3f}", self.result, self.solver_id, str(self.timeout_ms)]


def _argv(template: str, path: str) -> list[str]:
    parts = shlex.split(template)
    if not any("{file}" in p for p in parts):
        raise ValueError(f"solver command {template!r} has no {{file}} placeholder")
    return [p.replace("{file}", path) for p in parts]


def _verdict(stdout: str) -> str | None:
    for line in stdout.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("(error"):
            return "ERROR"
        return {"sat": "SAT", "unsat": "UNSAT", "unknown": "UNKNOWN",
                "timeout": "TIMEOUT"}.get(line)
    return None


def _strip_check_sat(text: str) -> str:
    return re.sub(r"\(\s*check-sat\s*\)", "", text)


def run_solver(smtlib: str, solver_cmd: str | None = None, timeout_ms: int = 60_000,
               parse_only: bool = False) -> SolverOutcome:
    """Write ``smtlib`` to a temporary file and run the solver on it.

    ``solver_cmd`` is a template in which ``{file}`` stands for the input
    path. The process group is killed once ``timeout_ms`` of wall-clock time
    has passed. With ``parse_only`` the ``(check-sat)`` command is dropped
    and the result is ``OK`` when the solver reported no error, ``ERROR``
    otherwise.
    """
    template = solver_command(solver_cmd)
    if parse_only:
        smtlib = _strip_check_sat(smtlib)
    with tempfile.TemporaryDirectory(prefix="relog2smt-") as tmp:
        path = os.path.join(tmp, "problem.smt2")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(smtlib)
        argv = _argv(template, path)
        solver_id = os.path.basename(argv[0])
        t0 = time.perf_counter()
        try:
            proc = subprocess.Popen(argv, stdout=subprocess.PIPE, stderr=subprocess.PIPE,
                                    text=True, start_new_session=True)
        except OSError as exc:
            return SolverOutcome("ERROR", 0.0, solver_id, f"cannot start solver: {exc}")
        try:
            out, err = proc.communicate(timeout=timeout_ms / 1000)
        except subprocess.TimeoutExpired:
            _kill(proc)
            proc.communicate()
            ms = (time.perf_counter() - t0) * 1000
            return SolverOutcome("TIMEOUT", max(ms, float(timeout_ms)), solver_id, "")
        ms = (time.perf_counter() - t0) * 1000
    verdict = _verdict(out)
    if parse_only:
        ok = verdict is None and proc.returncode == 0
        return SolverOutcome("OK" if ok else "ERROR", ms, solver_id, err or out)
    if verdict is None:
        return SolverOutcome("ERROR", ms, solver_id, err or out or f"exit status {proc.returncode}")
    if verdict == "ERROR":
        return SolverOutcome("ERROR", ms, solver_id, out)
    if verdict == "TIMEOUT":
        return SolverOutcome("TIMEOUT", max(ms, float(timeout_ms)), solver_id, err)
    return SolverOutcome(verdict, ms, solver_id, err)


def _kill(proc: subprocess.Popen) -> None:
    try:
        os.killpg(proc.pid, signal.SIGKILL)
    except (ProcessLookupError, PermissionError):
        proc.kill()
