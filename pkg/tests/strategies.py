"""Hypothesis strategies for small random relational models."""

from __future__ import annotations

from hypothesis import strategies as st

from relog2smt.relational import (
    And, Atom, Diff, Equal, Exists, Forall, In, Inter, Join, Mult, Not, Product, RelDecl,
    RelModel, RelRef, Subset, Transpose, Union_, VarRef,
)

UNIV = tuple(Atom("A", i) for i in range(2)) + tuple(Atom("B", i) for i in range(2))
RELS = (
    RelDecl("A", 1, tuple((a,) for a in UNIV[:2])),
    RelDecl("B", 1, tuple((a,) for a in UNIV[2:])),
    RelDecl("s", 1, ((UNIV[0],),)),
    RelDecl("r", 2, tuple((a, b) for a in UNIV[:2] for b in UNIV[2:])),
    RelDecl("q", 2, tuple((b, a) for a in UNIV[:2] for b in UNIV[2:])),
)
ARITY = {r.name: r.arity for r in RELS}


def exprs(arity: int, scope: tuple[str, ...], size: int = 2):
    leaves = [RelRef(n) for n, k in ARITY.items() if k == arity]
    if arity == 1:
        leaves += [VarRef(v) for v in scope]
    base = st.sampled_from(leaves)
    if size == 0:
        return base
    same = exprs(arity, scope, size - 1)
    parts = [base,
             st.builds(Union_, same, same),
             st.builds(Inter, same, same),
             st.builds(Diff, same, same)]
    if arity == 1:
        parts.append(st.builds(Join, exprs(1, scope, size - 1), exprs(2, scope, size - 1)))
    else:
        parts.append(st.builds(Transpose, same))
        parts.append(st.builds(Join, same, same))
        parts.append(st.builds(Product, exprs(1, scope, size - 1), exprs(1, scope, size - 1)))
    return st.one_of(*parts)


def formulas(depth: int = 2, scope: tuple[str, ...] = ()):
    atoms = st.one_of(
        st.builds(Subset, exprs(1, scope), exprs(1, scope)),
        st.builds(Equal, exprs(2, scope), exprs(2, scope)),
        st.builds(Equal, exprs(1, scope), exprs(1, scope)),
        st.builds(Mult, st.sampled_from(("one", "lone", "some", "no")),
                  st.one_of(exprs(1, scope), exprs(2, scope))),
    )
    if scope:
        atoms = st.one_of(atoms, st.builds(In, st.sampled_from([VarRef(v) for v in scope]),
                                           exprs(1, scope)))
    if depth == 0:
        return atoms
    name = f"v{len(scope)}"
    inner = formulas(depth - 1, scope + (name,))
    return st.one_of(
        atoms,
        st.builds(Not, formulas(depth - 1, scope)),
        st.builds(lambda a, b: And((a, b)), formulas(depth - 1, scope), formulas(depth - 1, scope)),
        st.builds(lambda b, body: Forall(((name, b),), body), exprs(1, ()), inner),
        st.builds(lambda b, body: Exists(((name, b),), body), exprs(1, ()), inner),
    )


# Makes r a total function A -> B when drawn as a top-level conjunct.
R_IS_FUNCTION = Forall((("f", RelRef("A")),), Mult("one", Join(VarRef("f"), RelRef("r"))))


def models(max_formulas: int = 3, depth: int = 2):
    conjunct = st.one_of(formulas(depth), st.just(R_IS_FUNCTION))
    return st.builds(lambda fs: RelModel(UNIV, RELS, tuple(fs)),
                     st.lists(conjunct, min_size=1, max_size=max_formulas))
