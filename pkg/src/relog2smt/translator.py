"""Relational logic to typed first-order logic.

Types are declared first (one sort per leaf type, or a single ``Univ`` sort
with ``is_T`` membership predicates), then relations (as predicates, or as
total functions where the analysis recovered one), and finally every
residual conjunct is translated bottom-up. Each compound set expression
becomes a fresh helper predicate ``_hN`` defined by a biconditional axiom;
expressions that denote a single tuple stay terms.

In typed mode every set value is split over leaf signatures: a relation
over columns ``{B,C} x {ID}`` is the pair of predicates ``r#B_ID`` and
``r#C_ID``, and quantifiers over ``B+C`` become one quantifier per leaf.
In untyped mode everything lives in ``Univ`` and membership predicates
guard each quantifier.

A helper built under quantifiers takes the free variables of its
expression as leading arguments, so its axiom can be stated at top level.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

from . import relational as rl
from .analysis import LeafSet, TotalFunction, TypeEnv, analyze, residual_conjuncts, _bound_leaves
from .options import Options
from .tfol import (BOOL, FALSE, TRUE, And, Apply, Eq, Exists, Formula, FuncDecl, Or, Pred,
                   RelSymbol, Term, TfolTheory, Var, conj, disj, exists, forall, iff, implies,
                   mangle, neg)

UNIV = "Univ"


class TranslationError(ValueError):
    pass


# --- translated values ------------------------------------------------------
# A value is the translation of a relational expression. ``coltypes`` holds
# one leaf set per column. ``atom(sig, args)`` states membership of ``args``;
# ``sig`` is the leaf signature in typed mode and None in untyped mode.

class Value:
    coltypes: tuple[LeafSet, ...]

    @property
    def arity(self) -> int:
        return len(self.coltypes)

    def atom(self, sig, args: Sequence[Term]) -> Formula:
        raise NotImplementedError


@dataclass
class SetVal(Value):
    coltypes: tuple[LeafSet, ...]
    build: Callable[[object, Sequence[Term]], Formula]

    def atom(self, sig, args):
        return self.build(sig, args)


def empty(coltypes) -> SetVal:
    return SetVal(tuple(coltypes), lambda sig, args: FALSE)


@dataclass
class Tup(Value):
    """A singleton set: one tuple of terms (a scalar when of length 1)."""
    terms: tuple[Term, ...]
    argtypes: tuple[LeafSet, ...]

    @property
    def coltypes(self):
        return self.argtypes

    def atom(self, sig, args):
        return conj(*(Eq(a, t) for a, t in zip(args, self.terms)))


@dataclass
class FuncVal(Value):
    """A total function, possibly with its leading arguments already fixed."""
    fn: TotalFunction
    names: dict[tuple[str, ...] | None, str]  # domain signature -> symbol
    prefix: tuple[Term, ...] = ()
    prefix_leaves: tuple[LeafSet, ...] = ()

    @property
    def coltypes(self):
        return self.fn.domain[len(self.prefix):] + (self.fn.range,)

    def symbol(self, dom_sig) -> str:
        return self.names[dom_sig]

    def atom(self, sig, args):
        key = None if sig is None else tuple(l[0] for l in self.prefix_leaves) + tuple(sig[:-1])
        return Eq(Apply(self.symbol(key), tuple(self.prefix) + tuple(args[:-1])), args[-1])


@dataclass
class Binding:
    var: Var
    argtype: LeafSet


@dataclass(frozen=True)
class Branch:
    sort: str
    argtype: LeafSet
    guard: Callable[[Term], Formula]


@dataclass
class TransResult:
    theory: TfolTheory
    env: TypeEnv
    helper_count: int
    split_map: dict[str, list[str]] = field(default_factory=dict)


def _if_cases(body: Formula) -> list[tuple[list[Var], Formula]]:
    """Split ``body`` into (bound variables, matrix) cases whose existential
    closures form a disjunction equivalent to ``body``."""
    match body:
        case Or(args):
            return [c for a in args for c in _if_cases(a)]
        case Exists(vs, b):
            return [(list(vs) + extra, m) for extra, m in _if_cases(b)]
        case And(args) if any(isinstance(a, (Exists, Or)) for a in args):
            # bound variables are fresh, so they can move across conjuncts
            out = [([], TRUE)]
            for a in args:
                out = [(v1 + v2, conj(m1, m2)) for v1, m1 in out for v2, m2 in _if_cases(a)]
            return out
    return [([], body)]


class Translator:
    def __init__(self, m: rl.RelModel, opts: Options, env: TypeEnv | None = None):
        self.m = m
        self.opts = opts
        self.env = env if env is not None else analyze(m)
        self.typed = opts.typed
        self.theory = TfolTheory(name="", options=opts)
        self.values: dict[str, Value] = {}
        self.split_map: dict[str, list[str]] = {}
        self.helper_count = 0
        self._fresh = 0
        self._pending: list[Formula] = []
        self._var_names: dict[str, str] = {}

    # --- naming ---------------------------------------------------------

    def split_name(self, base: str, sig: Sequence[str]) -> str:
        return base + "#" + "_".join(mangle(l) for l in sig)

    def fresh(self, sort: str) -> Var:
        self._fresh += 1
        return Var(f"_x{self._fresh}", sort)

    def var_symbol(self, name: str) -> str:
        if name not in self._var_names:
            s = mangle(name)
            taken = {d.name for d in self.theory.decls}
            while s in taken:
                s += "_"
            self._var_names[name] = s
        return self._var_names[name]

    def declare(self, name: str, args: Sequence[str], result: str) -> str:
        try:
            self.theory.declare(FuncDecl(name, tuple(args), result))
        except ValueError as exc:
            raise TranslationError(str(exc)) from None
        return name

    # --- type guards and branches ---------------------------------------

    def typeguard(self, t: Term, leaves: LeafSet) -> Formula:
        """``t`` belongs to one of ``leaves`` (untyped mode only)."""
        return disj(*(Pred(self.theory.type_predicates[l], (t,)) for l in leaves))

    def branches(self, leaves: LeafSet) -> list[Branch]:
        if self.typed:
            return [Branch(mangle(l), (l,), lambda t: TRUE) for l in leaves]
        if not leaves:
            return []
        return [Branch(UNIV, tuple(leaves), lambda t, ls=tuple(leaves): self.typeguard(t, ls))]

    def branch_tuples(self, coltypes) -> list[tuple[Branch, ...]]:
        return list(itertools.product(*(self.branches(c) for c in coltypes)))

    def sig_of(self, bts: Sequence[Branch]):
        return tuple(b.argtype[0] for b in bts) if self.typed else None

    def member(self, v: Value, args: Sequence[Term], argtypes: Sequence[LeafSet]) -> Formula:
        """Membership of ``args`` (of the given leaf types) in ``v``."""
        cols = v.coltypes
        if any(not c for c in cols):
            return FALSE
        if self.typed:
            sig = tuple(a[0] for a in argtypes)
            if any(l not in c for l, c in zip(sig, cols)):
                return FALSE
            return v.atom(sig, args)
        guards = [self.typeguard(a, c) for a, at, c in zip(args, argtypes, cols)
                  if not set(at) <= set(c)]
        return conj(*guards, v.atom(None, args))

    @staticmethod
    def _argtypes(sig, cols) -> list[LeafSet]:
        return [(l,) for l in sig] if sig is not None else list(cols)

    def colwise(self, a: Value, b: Value, op) -> tuple[LeafSet, ...]:
        return tuple(self.env.order(op(set(x), set(y))) for x, y in zip(a.coltypes, b.coltypes))

    # --- step 1: types --------------------------------------------------

    def declare_types(self) -> None:
        env = self.env
        if self.typed:
            self.theory.sorts = [mangle(l) for l in env.leaf_types]
            for t in env.type_relations:
                self.values[t] = SetVal(((t,),), lambda sig, args: TRUE)
            return
        self.theory.sorts = [UNIV]
        for l in env.leaf_types:
            name = self.declare(f"is_{mangle(l)}", (UNIV,), BOOL)
            self.theory.type_predicates[l] = name
        for t in env.type_relations:
            name = self.theory.type_predicates[t]
            self.values[t] = SetVal(((t,),), lambda sig, args, n=name: Pred(n, tuple(args)))
        x = self.fresh(UNIV)
        preds = self.theory.type_predicates
        cases = [conj(Pred(preds[l], (x,)), *(neg(Pred(preds[o], (x,)))
                                                for o in env.leaf_types if o != l))
                 for l in env.leaf_types]
        self.theory.assertions.append(forall([x], disj(*cases)))

    # --- step 2: relations ----------------------------------------------

    def declare_functions(self) -> None:
        env = self.env
        for r in self.m.relations:
            if r.name in env.type_relations:
                continue
            fn = env.total_functions.get(r.name)
            cols = env.column_types[r.name]
            base = mangle(r.name)
            as_function = (fn is not None and self.opts.functions
                           and (len(fn.range) == 1 or not self.typed))
            if as_function:
                self.values[r.name] = self._declare_function(r.name, base, fn)
            else:
                self.values[r.name] = self._declare_predicate(r.name, base, cols)
                if fn is not None:
                    self._multiplicity_axiom(self.values[r.name], fn)

    def _declare_predicate(self, rel: str, base: str, cols) -> Value:
        names: dict = {}
        if self.typed:
            for sig in itertools.product(*cols):
                name = self.declare(self.split_name(base, sig), [mangle(l) for l in sig], BOOL)
                names[sig] = name
                self.theory.rel_symbols.append(RelSymbol(rel, name, sig, False))
            self.split_map[rel] = list(names.values())
            return SetVal(cols, lambda sig, args: Pred(names[sig], tuple(args)))
        name = self.declare(base, [UNIV] * len(cols), BOOL)
        self.theory.rel_symbols.append(RelSymbol(rel, name, None, False))
        self.split_map[rel] = [name]
        return SetVal(cols, lambda sig, args: Pred(name, tuple(args)))

    def _declare_function(self, rel: str, base: str, fn: TotalFunction) -> FuncVal:
        names: dict = {}
        if self.typed:
            (ran,) = fn.range
            for dsig in itertools.product(*fn.domain):
                name = self.declare(self.split_name(base, dsig), [mangle(l) for l in dsig],
                                    mangle(ran))
                names[dsig] = name
                self.theory.rel_symbols.append(RelSymbol(rel, name, dsig + (ran,), True))
        else:
            name = self.declare(base, [UNIV] * len(fn.domain), UNIV)
            names[None] = name
            self.theory.rel_symbols.append(RelSymbol(rel, name, None, True))
            xs = [self.fresh(UNIV) for _ in fn.domain]
            guard = conj(*(self.typeguard(x, d) for x, d in zip(xs, fn.domain)))
            self.theory.assertions.append(
                forall(xs, implies(guard, self.typeguard(Apply(name, tuple(xs)), fn.range))))
        self.split_map[rel] = list(names.values())
        return FuncVal(fn, names)

    def _multiplicity_axiom(self, v: Value, fn: TotalFunction) -> None:
        """Totality of a recovered function kept in predicate form."""
        for bts in self.branch_tuples(fn.domain):
            xs = [self.fresh(b.sort) for b in bts]
            prefix = self.sig_of(bts)

            def row_atom(sig, args, xs=xs, prefix=prefix):
                return v.atom(None if sig is None else prefix + tuple(sig), list(xs) + list(args))

            guard = conj(*(b.guard(x) for b, x in zip(bts, xs)))
            row = SetVal((fn.range,), row_atom)
            self.theory.assertions.append(forall(xs, implies(guard, self.mult("one", row))))

    # --- step 3: expressions --------------------------------------------

    def helper(self, e: rl.RelExpr, ctx: dict[str, Binding], coltypes,
               body: Callable[[Sequence[Term], Sequence[LeafSet]], Formula]) -> Value:
        if any(not c for c in coltypes):
            return empty(coltypes)
        fvs = [ctx[v] for v in ctx if v in rl.free_vars(e)]
        fv_terms = tuple(b.var for b in fvs)
        base = f"_h{self.helper_count}"
        self.helper_count += 1
        if self.typed:
            names = {}
            for sig in itertools.product(*coltypes):
                sorts = [mangle(l) for l in sig]
                name = self.declare(self.split_name(base, sig),
                                    [b.var.sort for b in fvs] + sorts, BOOL)
                names[sig] = name
                xs = [self.fresh(s) for s in sorts]
                self._define(list(fv_terms) + xs, TRUE, Pred(name, fv_terms + tuple(xs)),
                             body(xs, [(l,) for l in sig]))
            return SetVal(tuple(coltypes), lambda sig, args: Pred(names[sig], fv_terms + tuple(args)))
        name = self.declare(base, [UNIV] * (len(fvs) + len(coltypes)), BOOL)
        xs = [self.fresh(UNIV) for _ in coltypes]
        guard = conj(*(self.typeguard(b.var, b.argtype) for b in fvs),
                     *(self.typeguard(x, c) for x, c in zip(xs, coltypes)))
        self._define(list(fv_terms) + xs, guard, Pred(name, fv_terms + tuple(xs)),
                     body(xs, list(coltypes)))
        return SetVal(tuple(coltypes), lambda sig, args: Pred(name, fv_terms + tuple(args)))

    def _define(self, xs: list[Var], guard: Formula, head: Formula, body: Formula) -> None:
        """State ``forall xs. guard => (head <=> body)`` as separate implications.

        The "only if" half is one axiom. The "if" half is split per disjunct
        of ``body`` with its leading existentials turned into universals of
        the axiom, which e-matching solvers handle far better than an
        existential under a biconditional.
        """
        self._pending.append(forall(xs, implies(conj(guard, head), body)))
        for extra, case in _if_cases(body):
            self._pending.append(forall(xs + extra, implies(conj(guard, case), head)))

    def expr(self, e: rl.RelExpr, ctx: dict[str, Binding]) -> Value:
        match e:
            case rl.VarRef(name):
                b = ctx[name]
                return Tup((b.var,), (b.argtype,))
            case rl.RelRef(name):
                return self.values[name]
            case rl.Union_(l, r) | rl.Inter(l, r) | rl.Diff(l, r):
                a, b = self.expr(l, ctx), self.expr(r, ctx)
                if isinstance(e, rl.Union_):
                    cols = self.colwise(a, b, set.union)
                    body = lambda xs, ats: disj(self.member(a, xs, ats), self.member(b, xs, ats))
                elif isinstance(e, rl.Inter):
                    cols = self.colwise(a, b, set.intersection)
                    body = lambda xs, ats: conj(self.member(a, xs, ats), self.member(b, xs, ats))
                else:
                    cols = a.coltypes
                    body = lambda xs, ats: conj(self.member(a, xs, ats),
                                                neg(self.member(b, xs, ats)))
                return self.helper(e, ctx, cols, body)
            case rl.Transpose(x):
                a = self.expr(x, ctx)
                return self.helper(e, ctx, a.coltypes[::-1],
                                   lambda xs, ats: self.member(a, xs[::-1], ats[::-1]))
            case rl.Product(l, r):
                a, b = self.expr(l, ctx), self.expr(r, ctx)
                if isinstance(a, Tup) and isinstance(b, Tup):
                    return Tup(a.terms + b.terms, a.argtypes + b.argtypes)
                k = a.arity
                return self.helper(e, ctx, a.coltypes + b.coltypes,
                                   lambda xs, ats: conj(self.member(a, xs[:k], ats[:k]),
                                                        self.member(b, xs[k:], ats[k:])))
            case rl.Join(l, r):
                return self.join(e, self.expr(l, ctx), self.expr(r, ctx), ctx)
        raise TypeError(f"not a relational expression: {e!r}")

    def join(self, e, a: Value, b: Value, ctx) -> Value:
        middle = self.env.order(set(a.coltypes[-1]) & set(b.coltypes[0]))
        cols = a.coltypes[:-1] + b.coltypes[1:]
        if isinstance(a, Tup) and a.arity == 1 and isinstance(b, FuncVal) and middle:
            (t,), (at,) = a.terms, a.argtypes
            if set(at) <= set(b.coltypes[0]):
                return self.apply_function(b, t, at)
        if not middle:
            return empty(cols)
        ka = a.arity
        # Joining with a single element only fixes one column: substitute it
        # in place instead of naming the result.
        if isinstance(a, Tup) and ka == 1:
            t, at = a.terms[0], a.argtypes[0]
            return SetVal(tuple(cols), lambda sig, args: self.member(
                b, [t] + list(args), [at] + self._argtypes(sig, cols)))
        if isinstance(b, Tup) and b.arity == 1:
            t, bt = b.terms[0], b.argtypes[0]
            return SetVal(tuple(cols), lambda sig, args: self.member(
                a, list(args) + [t], self._argtypes(sig, cols) + [bt]))

        def body(xs, ats):
            xa, xb = list(xs[:ka - 1]), list(xs[ka - 1:])
            aa, ab = list(ats[:ka - 1]), list(ats[ka - 1:])
            out = []
            for br in self.branches(middle):
                z = self.fresh(br.sort)
                out.append(exists([z], conj(br.guard(z),
                                            self.member(a, xa + [z], aa + [br.argtype]),
                                            self.member(b, [z] + xb, [br.argtype] + ab))))
            return disj(*out)

        return self.helper(e, ctx, cols, body)

    def apply_function(self, f: FuncVal, t: Term, at: LeafSet) -> Value:
        prefix = f.prefix + (t,)
        leaves = f.prefix_leaves + (at,)
        if len(prefix) < len(f.fn.domain):
            return FuncVal(f.fn, f.names, prefix, leaves)
        key = tuple(l[0] for l in leaves) if self.typed else None
        return Tup((Apply(f.symbol(key), prefix),), (f.fn.range,))

    # --- step 3: formulas -----------------------------------------------

    def formula(self, f: rl.RelFormula, ctx: dict[str, Binding]) -> Formula:
        match f:
            case rl.TrueF():
                return TRUE
            case rl.FalseF():
                return FALSE
            case rl.Not(b):
                return neg(self.formula(b, ctx))
            case rl.And(args):
                return conj(*(self.formula(a, ctx) for a in args))
            case rl.Or(args):
                return disj(*(self.formula(a, ctx) for a in args))
            case rl.Implies(l, r):
                return implies(self.formula(l, ctx), self.formula(r, ctx))
            case rl.Iff(l, r):
                return iff(self.formula(l, ctx), self.formula(r, ctx))
            case rl.Equal(l, r):
                return self.equal(self.expr(l, ctx), self.expr(r, ctx))
            case rl.Subset(l, r) | rl.In(l, r):
                return self.subset(self.expr(l, ctx), self.expr(r, ctx))
            case rl.Forall(decls, body):
                return self.quant(decls, body, ctx, True)
            case rl.Exists(decls, body):
                return self.quant(decls, body, ctx, False)
            case rl.Mult(kind, e):
                return self.mult(kind, self.expr(e, ctx))
        raise TypeError(f"not a relational formula: {f!r}")

    def quant(self, decls, body, ctx, universal: bool) -> Formula:
        if not decls:
            return self.formula(body, ctx)
        (v, bexpr), rest = decls[0], decls[1:]
        leaves = _bound_leaves(bexpr, self.env)
        bound_val = None
        if leaves is None:
            bound_val = self.expr(bexpr, ctx)
            leaves = bound_val.coltypes[0]
        parts = []
        for br in self.branches(leaves):
            x = Var(self.var_symbol(v), br.sort)
            g = br.guard(x)
            if bound_val is not None:
                g = conj(g, self.member(bound_val, [x], [br.argtype]))
            inner = self.quant(rest, body, {**ctx, v: Binding(x, br.argtype)}, universal)
            if universal:
                parts.append(forall([x], implies(g, inner)))
            else:
                parts.append(exists([x], conj(g, inner)))
        return conj(*parts) if universal else disj(*parts)

    def equal(self, a: Value, b: Value) -> Formula:
        if a.arity != b.arity:
            raise TranslationError("arity mismatch in equality")
        if isinstance(a, Tup) and isinstance(b, Tup):
            eqs = []
            for s, t, sa, sb in zip(a.terms, b.terms, a.argtypes, b.argtypes):
                if self.typed and sa != sb:
                    return FALSE  # distinct leaf types are disjoint
                eqs.append(Eq(s, t))
            return conj(*eqs)
        cols = self.colwise(a, b, set.union)
        return self._each(cols, lambda xs, ats: iff(self.member(a, xs, ats),
                                                    self.member(b, xs, ats)))

    def subset(self, a: Value, b: Value) -> Formula:
        if a.arity != b.arity:
            raise TranslationError("arity mismatch in subset")
        if isinstance(a, Tup):
            return self.member(b, a.terms, a.argtypes)
        return self._each(a.coltypes, lambda xs, ats: implies(self.member(a, xs, ats),
                                                              self.member(b, xs, ats)))

    def _each(self, coltypes, body) -> Formula:
        """Conjunction over leaf signatures of ``forall xs. guard => body``."""
        parts = []
        for bts in self.branch_tuples(coltypes):
            xs = [self.fresh(b.sort) for b in bts]
            ats = [b.argtype for b in bts]
            guard = conj(*(b.guard(x) for b, x in zip(bts, xs)))
            parts.append(forall(xs, implies(guard, body(xs, ats))))
        return conj(*parts)

    def mult(self, kind: str, v: Value) -> Formula:
        if isinstance(v, Tup):
            return FALSE if kind == "no" else TRUE
        if kind == "no":
            return self._each(v.coltypes, lambda xs, ats: neg(self.member(v, xs, ats)))
        some = lone = TRUE
        bts_all = self.branch_tuples(v.coltypes)
        if kind in ("some", "one"):
            alts = []
            for bts in bts_all:
                xs = [self.fresh(b.sort) for b in bts]
                ats = [b.argtype for b in bts]
                alts.append(exists(xs, conj(*(b.guard(x) for b, x in zip(bts, xs)),
                                            self.member(v, xs, ats))))
            some = disj(*alts)
        if kind in ("lone", "one"):
            parts = []
            for bx, by in itertools.product(bts_all, repeat=2):
                xs = [self.fresh(b.sort) for b in bx]
                ys = [self.fresh(b.sort) for b in by]
                both = conj(*(b.guard(x) for b, x in zip(bx, xs)),
                            *(b.guard(y) for b, y in zip(by, ys)),
                            self.member(v, xs, [b.argtype for b in bx]),
                            self.member(v, ys, [b.argtype for b in by]))
                if self.typed and self.sig_of(bx) != self.sig_of(by):
                    parts.append(forall(xs + ys, neg(both)))
                else:
                    same = conj(*(Eq(x, y) for x, y in zip(xs, ys)))
                    parts.append(forall(xs + ys, implies(both, same)))
            lone = conj(*parts)
        return conj(some, lone)

    # --- driver ---------------------------------------------------------

    def run(self) -> TransResult:
        self.declare_types()
        self.declare_functions()
        for c in residual_conjuncts(self.m, self.env):
            self._pending = []
            f = self.formula(c, {})
            self.theory.assertions.extend(self._pending)
            if f != TRUE:
                self.theory.assertions.append(f)
        return TransResult(self.theory, self.env, self.helper_count, self.split_map)


def translate(m: rl.RelModel, opts: Options, name: str = "") -> TransResult:
    """Translate ``m`` to an unscoped TFOL theory under ``opts``."""
    res = Translator(m, opts).run()
    res.theory.name = name
    return res
