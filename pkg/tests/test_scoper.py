from __future__ import annotations

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qf
from conftest import corpus_paths, load
from relog2smt.options import Options
from relog2smt.pipeline import compile_model
from relog2smt.relational import parse_model
from relog2smt.scoper import ScopeError, apply_scope, has_quantifier, simplify
from relog2smt.tfol import FALSE, TRUE, And, Const, Distinct, Eq, Forall, Not, Or, Pred
from relog2smt.translator import translate

INTERPS = list(qf.interpretations())


def scoped(name: str, label: str):
    return compile_model(load(name), Options.parse(label)).scoped


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
@pytest.mark.parametrize("label", ["typed/predicates/expand", "typed/functions/expand",
                                   "untyped/predicates/expand", "untyped/functions/expand"])
def test_expand_removes_every_quantifier(path, label):
    m = parse_model(path.read_text(encoding="utf-8"))
    theory = compile_model(m, Options.parse(label)).scoped.theory
    assert not any(has_quantifier(f) for f in theory.assertions)


def test_injective_ids_domain_constants_typed():
    s = scoped("injective_ids", "typed/predicates/solver_fmf")
    assert {k: len(v) for k, v in s.domain_constants.items()} == {"B": 3, "C": 3, "ID": 6}
    assert sum(isinstance(f, Distinct) for f in s.theory.assertions) == 3


def test_injective_ids_domain_constants_untyped():
    s = scoped("injective_ids", "untyped/predicates/solver_fmf")
    assert {k: len(v) for k, v in s.domain_constants.items()} == {"Univ": 12}


def test_solver_fmf_keeps_quantifiers_and_closes_domains():
    s = scoped("injective_ids", "typed/predicates/solver_fmf")
    closures = [f for f in s.theory.assertions
                if isinstance(f, Forall) and f.vars[0].name == "_d"]
    assert len(closures) == 3
    assert any(isinstance(f, Forall) and f not in closures for f in s.theory.assertions)


def test_unscoped_is_identity():
    m = load("injective_ids")
    res = translate(m, Options("typed", "predicates", "unscoped"))
    assert apply_scope(res.theory, res.env, "unscoped").theory is res.theory


def test_expansion_budget():
    res = translate(load("injective_ids"), Options("typed", "predicates", "expand"))
    with pytest.raises(ScopeError, match="budget"):
        apply_scope(res.theory, res.env, "expand", budget=10)


def test_unknown_mode():
    res = translate(load("injective_ids"), Options("typed", "predicates", "unscoped"))
    with pytest.raises(ScopeError):
        apply_scope(res.theory, res.env, "bogus")


def test_pigeonhole_expands_to_false_or_clauses():
    s = scoped("injective_ids_pigeonhole", "typed/functions/expand")
    assert s.theory.assertions
    assert not any(has_quantifier(f) for f in s.theory.assertions)


def test_partial_bound_gets_negative_ground_axioms():
    s = scoped("partial_bound_unsat", "typed/predicates/expand")
    negatives = [f for f in s.theory.assertions if isinstance(f, Not) and isinstance(f.body, Pred)]
    assert len(negatives) == 9 - 3


# --- simplifier -------------------------------------------------------------------

A, B = Const("c0", "U"), Const("c1", "U")
P = Pred("p", (A,))


@pytest.mark.parametrize("f, g", [
    (And((P, TRUE)), P),
    (Or((P, FALSE)), P),
    (And((P, FALSE)), FALSE),
    (Not(Not(P)), P),
    (Eq(A, A), TRUE),
    (Eq(A, B), FALSE),
    (Distinct((A, B)), TRUE),
    (Distinct((A, A)), FALSE),
    (And((P, And((P, Pred("p", (B,)))))), And((P, Pred("p", (B,))))),
])
def test_simplify_examples(f, g):
    assert simplify(f) == g


def test_simplify_with_facts():
    assert simplify(And((P, Pred("p", (B,)))), {P: True}) == Pred("p", (B,))
    assert simplify(Or((P, Pred("p", (B,)))), {P: True}) == TRUE


@settings(max_examples=300, deadline=None)
@given(st.randoms(use_true_random=False))
def test_simplify_preserves_truth_tables(rnd: random.Random):
    f = qf.random_formula(rnd)
    assert qf.equivalent(f, simplify(f), INTERPS)


@settings(max_examples=200, deadline=None)
@given(st.randoms(use_true_random=False))
def test_simplify_is_idempotent(rnd: random.Random):
    g = simplify(qf.random_formula(rnd))
    assert simplify(g) == g
