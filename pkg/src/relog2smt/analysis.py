"""Recover what Kodkod leaves implicit: leaf types, column types, total
functions and per-type scopes.

Leaf-type sets are stored as tuples ordered by first appearance of the
prefix in the universe, so every later stage iterates them deterministically.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace

from .relational import (Atom, Forall, Join, Mult, RelExpr, RelModel, RelRef,
                         Union_, VarRef, conjuncts)

LeafSet = tuple[str, ...]


@dataclass(frozen=True)
class Scope:
    count: int
    exact: bool = True


@dataclass(frozen=True)
class TotalFunction:
    """A relation recovered as a total function from its ``one`` conjunct.

    ``domain`` holds one leaf set per argument column, ``range`` the leaf set
    of the last column. ``conjunct`` indexes the consumed conjunct in
    :func:`top_conjuncts` order.
    """
    name: str
    domain: tuple[LeafSet, ...]
    range: LeafSet
    conjunct: int


@dataclass(frozen=True)
class TypeEnv:
    leaf_types: tuple[str, ...]
    column_types: dict[str, tuple[LeafSet, ...]]
    type_relations: frozenset[str]
    scopes: dict[str, Scope]
    universe: tuple[Atom, ...] = ()
    bounds: dict[str, frozenset[tuple[Atom, ...]]] = field(default_factory=dict)
    total_functions: dict[str, TotalFunction] = field(default_factory=dict)

    def order(self, leaves) -> LeafSet:
        """``leaves`` as a tuple in leaf_types order."""
        s = set(leaves)
        return tuple(t for t in self.leaf_types if t in s)

    @property
    def consumed(self) -> frozenset[int]:
        return frozenset(f.conjunct for f in self.total_functions.values())


def top_conjuncts(m: RelModel) -> list:
    out = []
    for f in m.formulas:
        out.extend(conjuncts(f))
    return out


def recover_leaf_types(m: RelModel) -> TypeEnv:
    leaves = m.prefixes()
    column_types: dict[str, tuple[LeafSet, ...]] = {}
    type_relations = set()
    for r in m.relations:
        cols = []
        for i in range(r.arity):
            seen = {t[i].prefix for t in r.upper_bound}
            cols.append(tuple(p for p in leaves if p in seen))
        column_types[r.name] = tuple(cols)
        if r.arity == 1 and r.name in leaves and m.lower_bound(r.name):
            type_relations.add(r.name)
    scopes = {}
    for p in leaves:
        scopes[p] = Scope(len(m.atoms_of(p)), p not in m.nonexact)
    bounds = {r.name: frozenset(r.upper_bound) for r in m.relations}
    return TypeEnv(leaves, column_types, frozenset(type_relations), scopes,
                   m.universe, bounds)


def _bound_leaves(e: RelExpr, env: TypeEnv) -> LeafSet | None:
    """Leaf list of a union of type relations, or None for any other shape."""
    match e:
        case RelRef(name) if name in env.type_relations:
            return (name,)
        case Union_(l, r):
            a, b = _bound_leaves(l, env), _bound_leaves(r, env)
            if a is None or b is None:
                return None
            return env.order(a + b)
    return None


def _match_function(f, env: TypeEnv) -> tuple[str, tuple[LeafSet, ...]] | None:
    """Match ``(all ((v T)...) (one (join vk ... (join v1 r))))``.

    The innermost join variable binds column 0 of ``r``. Returns the relation
    name and the domain leaf sets bound by the quantifier.
    """
    if not isinstance(f, Forall) or not isinstance(f.body, Mult) or f.body.kind != "one":
        return None
    chain = []
    e = f.body.expr
    while isinstance(e, Join) and isinstance(e.left, VarRef):
        chain.append(e.left.name)
        e = e.right
    if not isinstance(e, RelRef) or not chain:
        return None
    rel = e.name
    if rel in env.type_relations or rel not in env.column_types:
        return None
    cols = env.column_types[rel]
    chain.reverse()  # chain[i] now binds column i
    if len(cols) != len(chain) + 1 or len(set(chain)) != len(chain):
        return None
    bounds = dict(f.decls)
    if len(bounds) != len(f.decls) or set(bounds) != set(chain):
        return None
    domain = []
    for i, v in enumerate(chain):
        leaves = _bound_leaves(bounds[v], env)
        if leaves is None or not leaves or set(leaves) != set(cols[i]):
            return None
        domain.append(leaves)
    if not cols[-1]:
        return None
    return rel, tuple(domain)


def recover_total_functions(m: RelModel, env: TypeEnv) -> TypeEnv:
    """Add recovered total functions; their conjuncts count as consumed."""
    found: dict[str, TotalFunction] = {}
    for i, f in enumerate(top_conjuncts(m)):
        hit = _match_function(f, env)
        if hit is None:
            continue
        rel, domain = hit
        if rel in found:
            continue  # a repeated conjunct stays in the residual formula
        found[rel] = TotalFunction(rel, domain, env.column_types[rel][-1], i)
    return replace(env, total_functions=found)


def analyze(m: RelModel) -> TypeEnv:
    return recover_total_functions(m, recover_leaf_types(m))


def residual_conjuncts(m: RelModel, env: TypeEnv) -> list:
    """Top-level conjuncts not consumed by function recovery."""
    consumed = env.consumed
    return [f for i, f in enumerate(top_conjuncts(m)) if i not in consumed]


def leaf_splits(rel: str, env: TypeEnv) -> list[tuple[str, ...]]:
    return list(itertools.product(*env.column_types[rel]))
