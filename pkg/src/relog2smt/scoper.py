"""Scope handling: unscoped pass-through, pre-expansion over domain
constants, and solver-side finite model finding.

Both scoped modes declare ``n`` distinct constants ``S$c0 .. S$c(n-1)`` per
sort and a range formula per function. ``solver_fmf`` also closes every sort
over its constants and leaves quantifiers to the solver; ``expand``
instantiates every quantifier over the constants and simplifies the result.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .analysis import TypeEnv
from .relational import Atom
from .tfol import (BOOL, FALSE, TRUE, And, Apply, Bot, Const, Distinct, Eq, Exists, Forall,
                   Formula, FuncDecl, Iff, Implies, Not, Or, Pred, Term, TfolTheory, Top,
                   Var, conj, disj, forall, mangle, neg)

DEFAULT_BUDGET = 10_000_000
UNIV = "Univ"


class ScopeError(ValueError):
    pass


@dataclass
class ScopedTheory:
    theory: TfolTheory
    mode: str
    domain_constants: dict[str, list[str]] = field(default_factory=dict)


# --- simplification ---------------------------------------------------------

def _subst(t: Term, sub: dict[str, Term]) -> Term:
    match t:
        case Var(name):
            return sub.get(name, t)
        case Apply(fn, args):
            return Apply(fn, tuple(_subst(a, sub) for a in args))
    return t


def _eq(l: Term, r: Term) -> Formula:
    if l == r:
        return TRUE
    if isinstance(l, Const) and isinstance(r, Const):
        return FALSE
    return Eq(l, r)


def _distinct(terms: tuple[Term, ...]) -> Formula:
    if len(set(terms)) < len(terms):
        return FALSE
    if all(isinstance(t, Const) for t in terms):
        return TRUE
    return Distinct(terms)


def _dedup(args):
    seen = {}
    for a in args:
        seen.setdefault(a, None)
    return tuple(seen)


def _and(args) -> Formula:
    f = conj(*args)
    if isinstance(f, And):
        args = _dedup(f.args)
        return args[0] if len(args) == 1 else And(args)
    return f


def _or(args) -> Formula:
    f = disj(*args)
    if isinstance(f, Or):
        args = _dedup(f.args)
        return args[0] if len(args) == 1 else Or(args)
    return f


def _implies(a: Formula, b: Formula) -> Formula:
    if a == b:
        return TRUE
    if isinstance(a, Bot) or isinstance(b, Top):
        return TRUE
    if isinstance(a, Top):
        return b
    if isinstance(b, Bot):
        return neg(a)
    return Implies(a, b)


def _iff(a: Formula, b: Formula) -> Formula:
    if a == b:
        return TRUE
    for x, y in ((a, b), (b, a)):
        if isinstance(x, Top):
            return y
        if isinstance(x, Bot):
            return neg(y)
    return Iff(a, b)


def _pass(f: Formula, facts) -> Formula:
    match f:
        case Top() | Bot():
            return f
        case Not(b):
            return neg(_pass(b, facts))
        case And(args):
            return _and(_pass(a, facts) for a in args)
        case Or(args):
            return _or(_pass(a, facts) for a in args)
        case Implies(l, r):
            return _implies(_pass(l, facts), _pass(r, facts))
        case Iff(l, r):
            return _iff(_pass(l, facts), _pass(r, facts))
        case Eq(l, r):
            return _eq(l, r)
        case Distinct(ts):
            return _distinct(ts)
        case Pred():
            if facts and f in facts:
                return TRUE if facts[f] else FALSE
            return f
        case Forall(vs, body):
            b = _pass(body, facts)
            return b if isinstance(b, (Top, Bot)) else Forall(vs, b)
        case Exists(vs, body):
            b = _pass(body, facts)
            return b if isinstance(b, (Top, Bot)) else Exists(vs, b)
    raise TypeError(f"not a formula: {f!r}")


def simplify(f: Formula, facts: dict[Pred, bool] | None = None) -> Formula:
    """Equivalence-preserving cleanup, iterated to a fixpoint.

    Folds boolean constants, flattens and deduplicates conjunctions and
    disjunctions, removes double negation, decides equalities between
    identical terms and between distinct constants, and replaces predicate
    atoms listed in ``facts`` by their truth value.
    """
    while True:
        g = _pass(f, facts)
        if g == f:
            return g
        f = g


# --- expansion --------------------------------------------------------------

class _Expander:
    def __init__(self, consts: dict[str, list[Const]], facts, budget: int):
        self.consts = consts
        self.facts = facts
        self.budget = budget
        self.nodes = 0

    def tick(self, n: int = 1) -> None:
        self.nodes += n
        if self.nodes > self.budget:
            raise ScopeError(f"quantifier expansion exceeds the node budget of {self.budget}")

    def run(self, f: Formula, sub: dict[str, Term]) -> Formula:
        self.tick()
        match f:
            case Top() | Bot():
                return f
            case Not(b):
                return neg(self.run(b, sub))
            case And(args):
                out = []
                for a in args:
                    x = self.run(a, sub)
                    if isinstance(x, Bot):
                        return FALSE
                    out.append(x)
                return _and(out)
            case Or(args):
                out = []
                for a in args:
                    x = self.run(a, sub)
                    if isinstance(x, Top):
                        return TRUE
                    out.append(x)
                return _or(out)
            case Implies(l, r):
                a = self.run(l, sub)
                if isinstance(a, Bot):
                    return TRUE
                return _implies(a, self.run(r, sub))
            case Iff(l, r):
                return _iff(self.run(l, sub), self.run(r, sub))
            case Eq(l, r):
                return _eq(_subst(l, sub), _subst(r, sub))
            case Distinct(ts):
                return _distinct(tuple(_subst(t, sub) for t in ts))
            case Pred(fn, args):
                p = Pred(fn, tuple(_subst(a, sub) for a in args))
                if self.facts and p in self.facts:
                    return TRUE if self.facts[p] else FALSE
                return p
            case Forall(vs, body) | Exists(vs, body):
                universal = isinstance(f, Forall)
                try:
                    domains = [self.consts[v.sort] for v in vs]
                except KeyError as exc:
                    raise ScopeError(f"no scope for sort {exc.args[0]}") from None
                out = []
                for combo in itertools.product(*domains):
                    inner = dict(sub)
                    inner.update((v.name, c) for v, c in zip(vs, combo))
                    x = self.run(body, inner)
                    if universal and isinstance(x, Bot):
                        return FALSE
                    if not universal and isinstance(x, Top):
                        return TRUE
                    out.append(x)
                return _and(out) if universal else _or(out)
        raise TypeError(f"not a formula: {f!r}")


def has_quantifier(f: Formula) -> bool:
    match f:
        case Forall() | Exists():
            return True
        case Not(b):
            return has_quantifier(b)
        case And(args) | Or(args):
            return any(has_quantifier(a) for a in args)
        case Implies(l, r) | Iff(l, r):
            return has_quantifier(l) or has_quantifier(r)
    return False


# --- apply_scope ------------------------------------------------------------

def _atom_constants(t: TfolTheory, env: TypeEnv, typed: bool,
                    consts: dict[str, list[Const]]) -> dict[Atom, Const]:
    out = {}
    if typed:
        pos: dict[str, int] = {}
        for a in env.universe:
            i = pos.get(a.prefix, 0)
            pos[a.prefix] = i + 1
            out[a] = consts[mangle(a.prefix)][i]
    else:
        for i, a in enumerate(env.universe):
            out[a] = consts[UNIV][i]
    return out


def _bound_axioms(t: TfolTheory, env: TypeEnv, typed: bool,
                  atom_const: dict[Atom, Const]) -> list[Formula]:
    """Exclude tuples that the column types allow but the bound does not."""
    out = []
    by_prefix: dict[str, list[Atom]] = {}
    for a in env.universe:
        by_prefix.setdefault(a.prefix, []).append(a)
    for rs in t.rel_symbols:
        bound = env.bounds[rs.relation]
        if typed:
            cols = [(l,) for l in rs.leaves]
        else:
            cols = env.column_types[rs.relation]
        candidates = itertools.product(*([a for l in c for a in by_prefix[l]] for c in cols))
        for tup in candidates:
            if tup in bound:
                continue
            cs = tuple(atom_const[a] for a in tup)
            if rs.is_function:
                out.append(neg(Eq(Apply(rs.symbol, cs[:-1]), cs[-1])))
            else:
                out.append(neg(Pred(rs.symbol, cs)))
    return out


def apply_scope(t: TfolTheory, env: TypeEnv, mode: str,
                budget: int = DEFAULT_BUDGET) -> ScopedTheory:
    """Bound every sort of ``t`` to the scopes recorded in ``env``."""
    if mode == "fmf":
        mode = "solver_fmf"
    if mode == "unscoped":
        return ScopedTheory(t, mode, {})
    if mode not in ("expand", "solver_fmf"):
        raise ScopeError(f"unknown scope mode {mode!r}")
    typed = not t.type_predicates

    sizes: dict[str, int] = {}
    if typed:
        leaf_of = {mangle(l): l for l in env.leaf_types}
        for s in t.sorts:
            if s not in leaf_of or leaf_of[s] not in env.scopes:
                raise ScopeError(f"no scope for sort {s}")
            sizes[s] = env.scopes[leaf_of[s]].count
    else:
        sizes[UNIV] = len(env.universe)
    for s, n in sizes.items():
        if n <= 0:
            raise ScopeError(f"zero scope for sort {s}")

    out = t.copy()
    consts: dict[str, list[Const]] = {}
    preamble: list[Formula] = []
    for s in t.sorts:
        cs = [Const(f"{s}$c{i}", s) for i in range(sizes[s])]
        consts[s] = cs
        for c in cs:
            out.declare(FuncDecl(c.name, (), s))
        if len(cs) >= 2:
            preamble.append(Distinct(tuple(cs)))
        if mode == "solver_fmf":
            x = Var("_d", s)
            preamble.append(forall([x], disj(*(Eq(x, c) for c in cs))))

    atom_const = _atom_constants(t, env, typed, consts)
    pins: list[Formula] = []
    facts: dict[Pred, bool] = {}
    if not typed:
        for a in env.universe:
            c = atom_const[a]
            for leaf, p in t.type_predicates.items():
                facts[Pred(p, (c,))] = leaf == a.prefix
                pins.append(Pred(p, (c,)) if leaf == a.prefix else neg(Pred(p, (c,))))
        # Exactness: the members of a type are precisely its constants. As a
        # definition of is_T this lets a solver expand type-guarded
        # quantifiers over the constants itself.
        by_leaf: dict[str, list[Const]] = {}
        for a in env.universe:
            by_leaf.setdefault(a.prefix, []).append(atom_const[a])
        for leaf, p in t.type_predicates.items():
            x = Var("_d", UNIV)
            preamble.append(forall([x], Iff(Pred(p, (x,)),
                                            disj(*(Eq(x, c) for c in by_leaf.get(leaf, []))))))

    ranges = []
    for d in t.decls:
        if d.result == BOOL or not d.arg_sorts:
            continue
        xs = [Var(f"_r{i}", s) for i, s in enumerate(d.arg_sorts)]
        app = Apply(d.name, tuple(xs))
        ranges.append(forall(xs, disj(*(Eq(app, c) for c in consts[d.result]))))

    bounds = _bound_axioms(t, env, typed, atom_const)
    body = preamble + ranges + bounds + list(t.assertions)

    if mode == "solver_fmf":
        out.assertions = pins + body
    else:
        ex = _Expander(consts, facts, budget)
        expanded = []
        for f in body:
            g = simplify(ex.run(f, {}), facts)
            if isinstance(g, And):
                expanded.extend(g.args)
            elif not isinstance(g, Top):
                expanded.append(g)
        if any(isinstance(g, Bot) for g in expanded):
            expanded = [FALSE]
        out.assertions = pins + list(_dedup(expanded))
    return ScopedTheory(out, mode, {s: [c.name for c in cs] for s, cs in consts.items()})
