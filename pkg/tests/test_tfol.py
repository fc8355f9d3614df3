from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import needs_z3
from relog2smt.harness.solver import run_solver
from relog2smt.tfol import (
    BOOL, Apply, Const, Distinct, EmitError, Eq, FuncDecl, Pred, TfolTheory, Var,
    check_well_sorted, emit_smtlib, forall, mangle,
)


def univ_theory() -> TfolTheory:
    x = Var("x", "Univ")
    return TfolTheory(["Univ"], [FuncDecl("p", ("Univ",), BOOL)], [forall([x], Pred("p", (x,)))])


def test_emit_simple_theory():
    text = emit_smtlib(univ_theory())
    assert text == (
        "(set-logic UF)\n"
        "(declare-sort Univ 0)\n"
        "(declare-fun p (Univ) Bool)\n"
        "(assert (forall ((x Univ)) (p x)))\n"
        "(check-sat)\n"
    )


def test_emit_empty_theory():
    assert emit_smtlib(TfolTheory()) == "(set-logic UF)\n(check-sat)\n"


def test_emit_distinct():
    cs = [Const(f"c{i}", "S") for i in (1, 2, 3)]
    t = TfolTheory(["S"], [FuncDecl(c.name, (), "S") for c in cs], [Distinct(tuple(cs))])
    text = emit_smtlib(t)
    assert "(declare-const c1 S)" in text
    assert text.count("(assert ") == 1
    assert "(assert (distinct c1 c2 c3))" in text


def test_split_names_are_quoted():
    t = TfolTheory(["B", "ID"], [FuncDecl("id#B_ID", ("B", "ID"), BOOL)])
    assert "(declare-fun |id#B_ID| (B ID) Bool)" in emit_smtlib(t)


@pytest.mark.parametrize("name, out", [
    ("toC", "toC"),
    ("a'", "a_u27_"),
    ("x.y", "x_u2e_y"),
    ("forall", "forall_"),
    ("and", "and_"),
    ("_h0", "_u5f_h0"),
])
def test_mangle(name, out):
    assert mangle(name) == out


@given(st.text(min_size=1, max_size=8))
def test_mangle_is_plain_and_deterministic(name):
    m = mangle(name)
    assert m == mangle(name)
    assert m[0] == "_" or (m[0].isascii() and m[0].isalpha())
    assert all(ch.isascii() and (ch.isalnum() or ch == "_") for ch in m)


def test_well_sorted_theory_has_no_diagnostics():
    assert check_well_sorted(univ_theory()) == []


def test_arity_diagnostic():
    t = TfolTheory(["S"], [FuncDecl("f", ("S",), "S"), FuncDecl("a", (), "S")],
                   [Eq(Apply("f", (Const("a", "S"), Const("a", "S"))), Const("a", "S"))])
    diags = check_well_sorted(t)
    assert len(diags) == 1 and "expects 1" in diags[0]


def test_sort_diagnostic():
    t = TfolTheory(["S", "T"], [FuncDecl("p", ("S",), BOOL), FuncDecl("b", (), "T")],
                   [Pred("p", (Const("b", "T"),))])
    diags = check_well_sorted(t)
    assert len(diags) == 1 and "sort T" in diags[0]


def test_undeclared_symbol_fails_loudly():
    t = TfolTheory(["S"], [], [Pred("q", ())])
    with pytest.raises(EmitError):
        emit_smtlib(t)


def test_emission_is_deterministic():
    assert emit_smtlib(univ_theory()) == emit_smtlib(univ_theory())


@needs_z3
def test_emitted_text_parses():
    for t in (univ_theory(), TfolTheory()):
        assert run_solver(emit_smtlib(t), parse_only=True).result == "OK"
