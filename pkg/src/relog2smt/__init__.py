"""Translate bounded relational logic problems to SMT-LIB."""

from pathlib import Path

CORPUS_DIR = Path(__file__).resolve().parent / "corpus"
