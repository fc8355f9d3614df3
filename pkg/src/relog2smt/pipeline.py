"""Parse, translate, scope and emit in one call."""

from __future__ import annotations

import time
from dataclasses import dataclass
from pathlib import Path

from .options import Options
from .relational import RelModel, parse_model
from .scoper import DEFAULT_BUDGET, ScopedTheory, apply_scope
from .tfol import emit_smtlib
from .translator import TransResult, translate


@dataclass
class Compiled:
    smtlib: str
    trans: TransResult
    scoped: ScopedTheory
    translate_ms: float


def compile_model(m: RelModel, opts: Options, name: str = "",
                  budget: int = DEFAULT_BUDGET) -> Compiled:
    t0 = time.perf_counter()
    trans = translate(m, opts, name)
    scoped = apply_scope(trans.theory, trans.env, opts.scope_mode, budget)
    text = emit_smtlib(scoped.theory)
    return Compiled(text, trans, scoped, (time.perf_counter() - t0) * 1000)


def compile_file(path: str | Path, opts: Options, budget: int = DEFAULT_BUDGET) -> Compiled:
    """Like :func:`compile_model`, but the timing also covers parsing."""
    t0 = time.perf_counter()
    path = Path(path)
    m = parse_model(path.read_text(encoding="utf-8"))
    out = compile_model(m, opts, path.stem, budget)
    out.translate_ms = (time.perf_counter() - t0) * 1000
    return out
