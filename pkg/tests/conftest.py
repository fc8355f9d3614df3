from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from relog2smt import CORPUS_DIR
from relog2smt.relational import parse_model

CORPUS = CORPUS_DIR


def corpus_paths() -> list[Path]:
    return sorted(CORPUS.glob("*.kkir"))


def load(name: str):
    return parse_model((CORPUS / f"{name}.kkir").read_text(encoding="utf-8"))


HAVE_Z3 = shutil.which("z3") is not None
needs_z3 = pytest.mark.skipif(not HAVE_Z3, reason="z3 binary not on PATH")


# Lines recorded by test_acceptance, printed once at the end of the session.
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
