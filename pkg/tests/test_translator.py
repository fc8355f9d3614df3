from __future__ import annotations

import re
from pathlib import Path

import pytest
from hypothesis import HealthCheck, given, settings

from conftest import corpus_paths, load, needs_z3
from strategies import models
from relog2smt.harness.oracle import brute_force_solve
from relog2smt.harness.solver import run_solver
from relog2smt.options import ALL_COMBOS, SCOPED_COMBOS, Options
from relog2smt.pipeline import compile_model
from relog2smt.relational import parse_model
from relog2smt.tfol import BOOL, check_well_sorted
from relog2smt.translator import translate

GOLDEN = Path(__file__).parent / "golden"

SMALL = ("(univ B$0 B$1 C$0) (rel B 1 ((B$0)(B$1))) (rel C 1 ((C$0)))"
         " (rel toC 2 ((B$0 C$0)(B$1 C$0))) (rel toB 2 ((C$0 B$0)(C$0 B$1)))"
         " (rel s 1 ((B$0)(B$1))) (rel t 1 ((B$0)(B$1))) ")


def small(formula: str):
    return parse_model(SMALL + f"(formula {formula})")


def decls(theory) -> dict[str, tuple]:
    return {d.name: (d.arg_sorts, d.result) for d in theory.decls}


def assertions(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.startswith("(assert")]


def test_typed_sorts():
    t = translate(load("injective_ids"), Options("typed", "predicates", "unscoped")).theory
    assert t.sorts == ["B", "C", "ID"]


def test_untyped_sorts_and_partition():
    t = translate(load("injective_ids"), Options("untyped", "predicates", "unscoped")).theory
    assert t.sorts == ["Univ"]
    assert t.type_predicates == {"B": "is_B", "C": "is_C", "ID": "is_ID"}
    assert {n for n, (_, r) in decls(t).items() if r == BOOL} >= {"is_B", "is_C", "is_ID"}


def test_injective_ids_typed_predicates_decls():
    t = translate(load("injective_ids"), Options("typed", "predicates", "unscoped")).theory
    assert decls(t) == {
        "id#B_ID": (("B", "ID"), BOOL),
        "id#C_ID": (("C", "ID"), BOOL),
        "toC#B_C": (("B", "C"), BOOL),
        "toB#C_B": (("C", "B"), BOOL),
    }


def test_injective_ids_typed_functions_decls():
    res = translate(load("injective_ids"), Options("typed", "functions", "unscoped"))
    assert decls(res.theory) == {
        "id#B": (("B",), "ID"),
        "id#C": (("C",), "ID"),
        "toC#B": (("B",), "C"),
        "toB#C_B": (("C", "B"), BOOL),
    }
    assert res.split_map == {"id": ["id#B", "id#C"], "toC": ["toC#B"], "toB": ["toB#C_B"]}


def test_injective_ids_untyped_functions_range_axiom():
    text = compile_model(load("injective_ids"), Options("untyped", "functions", "unscoped")).smtlib
    assert "(declare-fun toC (Univ) Univ)" in text
    assert re.search(r"\(forall \(\((\w+) Univ\)\) \(=> \(is_B \1\) \(is_C \(toC \1\)\)\)\)",
                     text)


@pytest.mark.parametrize("label", ["typed/functions/unscoped", "untyped/predicates/unscoped"])
def test_injective_ids_golden(label):
    golden = GOLDEN / f"injective_ids.{label.replace('/', '_')}.smt2"
    assert compile_model(load("injective_ids"), Options.parse(label), "injective_ids").smtlib == golden.read_text()


def test_cross_sort_scalar_equality_is_false():
    text = compile_model(load("injective_ids"), Options("typed", "functions", "unscoped")).smtlib
    assert "(forall ((a2 C)) (not (= (|id#B| a) (|id#C| a2))))" in text


def test_join_of_two_relations_uses_helper():
    res = translate(small("(no (join toC toB))"), Options("typed", "predicates", "unscoped"))
    assert res.helper_count == 1
    assert decls(res.theory)["_h0#B_B"] == (("B", "B"), BOOL)
    text = compile_model(small("(no (join toC toB))"),
                         Options("typed", "predicates", "unscoped")).smtlib
    assert ("(assert (forall ((_x1 B) (_x2 B)) (=> (|_h0#B_B| _x1 _x2) (exists ((_x3 C))"
            " (and (|toC#B_C| _x1 _x3) (|toB#C_B| _x3 _x2))))))") in text
    assert ("(assert (forall ((_x1 B) (_x2 B) (_x3 C)) (=> (and (|toC#B_C| _x1 _x3)"
            " (|toB#C_B| _x3 _x2)) (|_h0#B_B| _x1 _x2))))") in text


def test_subset_of_unary_relations():
    text = compile_model(small("(subset s t)"), Options("typed", "predicates", "unscoped")).smtlib
    assert assertions(text) == ["(assert (forall ((_x1 B)) (=> (|s#B| _x1) (|t#B| _x1))))"]


def test_no_binary_relation():
    text = compile_model(small("(no toC)"), Options("typed", "predicates", "unscoped")).smtlib
    assert assertions(text) == ["(assert (forall ((_x1 B) (_x2 C)) (not (|toC#B_C| _x1 _x2))))"]


def test_union_bound_needs_no_helper():
    res = translate(small("(all ((x (union B C))) (no (join x toC)))"),
                    Options("typed", "predicates", "unscoped"))
    assert res.helper_count == 0


def test_scalar_join_into_function_is_an_application():
    text = compile_model(load("injective_ids"), Options("typed", "functions", "unscoped")).smtlib
    assert "(|id#B| a)" in text and "_h" not in text


def test_empty_formula_declares_only():
    m = parse_model("(univ A$0 A$1) (rel A 1 ((A$0)(A$1))) (rel r 2 ((A$0 A$1))) (formula true)")
    for opts in ALL_COMBOS:
        res = translate(m, opts)
        assert res.theory.assertions == [] or not opts.typed


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_helper_count_matches_declarations(path):
    m = parse_model(path.read_text(encoding="utf-8"))
    for opts in ALL_COMBOS:
        res = translate(m, opts)
        helpers = {d.name.split("#")[0] for d in res.theory.decls if d.name.startswith("_h")}
        assert res.helper_count == len(helpers)
        assert check_well_sorted(res.theory) == []


@needs_z3
def test_empty_formula_sat_everywhere():
    m = parse_model("(univ A$0 A$1) (rel A 1 ((A$0)(A$1))) (rel r 2 ((A$0 A$1))) (formula true)")
    for opts in ALL_COMBOS:
        assert run_solver(compile_model(m, opts).smtlib, timeout_ms=10_000).result == "SAT"


# --- oracle equivalence on random models ---------------------------------------

CHECKED = (
    Options("typed", "predicates", "expand"),
    Options("typed", "functions", "solver_fmf"),
    Options("untyped", "functions", "expand"),
    Options("untyped", "predicates", "solver_fmf"),
)


@needs_z3
@settings(max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(models())
def test_scoped_translation_agrees_with_oracle(m):
    want = brute_force_solve(m).verdict
    for opts in CHECKED:
        got = run_solver(compile_model(m, opts).smtlib, timeout_ms=20_000).result
        assert got == want, (opts.label, got, want)


@needs_z3
@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(models())
def test_unscoped_never_refutes_a_satisfiable_model(m):
    if brute_force_solve(m).verdict != "SAT":
        return
    for opts in ALL_COMBOS:
        if opts.scoped:
            continue
        got = run_solver(compile_model(m, opts).smtlib, timeout_ms=10_000).result
        assert got != "UNSAT", opts.label


def test_scoped_combos():
    assert len(SCOPED_COMBOS) == 8
    assert {o.scope_mode for o in SCOPED_COMBOS} == {"expand", "solver_fmf"}
