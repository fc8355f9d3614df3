from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import corpus_paths, load
from strategies import models
from relog2smt.relational import (
    Atom, Forall, Join, KKIRError, RelModel,
    RelRef, TRUE, Transpose, VarRef, conjuncts, expr_arity, parse_model,
    render_model,
)

MINIMAL = "(univ ID$0) (rel ID 1 ((ID$0))) (formula true)"


def test_minimal_model():
    m = parse_model(MINIMAL)
    assert m.universe == (Atom("ID", 0),)
    assert [r.name for r in m.relations] == ["ID"]
    assert m.formula == TRUE


def test_injective_ids_shape():
    m = load("injective_ids")
    assert len(m.universe) == 12
    assert m.prefixes() == ("B", "C", "ID")
    assert [r.name for r in m.relations] == ["B", "C", "ID", "id", "toC", "toB"]
    assert len(list(conjuncts(m.formula))) == 3
    assert m.relation("id").arity == 2 and len(m.relation("id").upper_bound) == 36
    assert m.goal == "run"


def test_lower_bound_only_for_exact_type_relations():
    m = load("injective_ids")
    assert len(m.lower_bound("B")) == 3
    assert m.lower_bound("id") == ()


@pytest.mark.parametrize("text, message", [
    ("(formula (and))", "empty universe"),
    ("(univ A$0)\n(rel r 2 ((A$0)))", "arity mismatch"),
    ("(univ A$0) (rel r 1 ((A$9)))", "unknown atom"),
    ("(univ A$0) (rel r 1 ((A$0))) (rel r 1 ((A$0)))", "duplicate relation"),
    ("(univ A0)", "malformed atom"),
    ("(univ A$x)", "malformed atom"),
    ("(univ A$0) (rel A 1 ((A$0))) (formula (and true", "unclosed"),
    ("(univ A$0) (rel A 1 ((A$0))) (rel r 2 ((A$0 A$0))) (formula (subset A r))",
     "arity mismatch"),
    ("(univ A$0) (rel A 1 ((A$0))) (formula (all ((x A)) (all ((x A)) true)))", "x"),
])
def test_parse_errors(text, message):
    with pytest.raises(KKIRError, match=message):
        parse_model(text)


def test_error_carries_line_and_column():
    with pytest.raises(KKIRError, match=r"at 2:11"):
        parse_model("(univ A$0)\n(rel r 2 ((A$0)))")


def test_transpose_needs_binary():
    with pytest.raises(KKIRError):
        parse_model("(univ A$0) (rel A 1 ((A$0))) (formula (= (transpose A) A))")


def test_expr_arity():
    ar = {"r": 2, "s": 1, "t": 3}
    assert expr_arity(Join(VarRef("x"), RelRef("r")), ar | {"x": 1}) == 1
    assert expr_arity(Join(RelRef("r"), RelRef("t")), ar) == 3
    assert expr_arity(Transpose(RelRef("r")), ar) == 2


@pytest.mark.parametrize("path", corpus_paths(), ids=lambda p: p.stem)
def test_corpus_round_trips(path):
    m = parse_model(path.read_text(encoding="utf-8"))
    text = render_model(m)
    assert parse_model(text) == m
    assert render_model(parse_model(text)) == text


def test_render_is_stable_for_minimal():
    m = parse_model(MINIMAL)
    assert render_model(m) == render_model(parse_model(MINIMAL))


def test_nested_quantifiers_keep_names():
    text = ("(univ A$0 A$1) (rel A 1 ((A$0)(A$1))) (rel r 2 ((A$0 A$1)(A$1 A$0)))"
            " (formula (all ((x A)) (exists ((y A) (z A)) (in y (join x r)))))")
    m = parse_model(text)
    f = m.formula
    assert isinstance(f, Forall) and f.decls[0][0] == "x"
    assert [d[0] for d in f.body.decls] == ["y", "z"]
    assert parse_model(render_model(m)) == m


@settings(max_examples=150, deadline=None)
@given(models(), st.sampled_from(["run", "check"]))
def test_round_trip_property(m, goal):
    m = RelModel(m.universe, m.relations, m.formulas, goal)
    text = render_model(m)
    assert parse_model(text) == m
    assert parse_model(text) == parse_model(text)
