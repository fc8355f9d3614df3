"""Relational-logic IR and the KKIR text format.

A model is the triple Kodkod hands to a back end: an ordered atom universe,
upper bounds for every relation, and one conjoined formula. KKIR is a small
S-expression serialization of that triple::

    (univ B$0 B$1 ID$0)
    (rel B 1 ((B$0)(B$1)))
    (rel id 2 ((B$0 ID$0)(B$1 ID$0)))
    (formula (all ((b B)) (one (join b id))))

Atoms are ``prefix$index``; the prefix names the leaf type the atom belongs
to. A unary relation whose name equals a prefix and whose bound is exactly
the atoms of that prefix is pinned to that bound (Alloy's ``exactly`` scope)
unless the prefix is listed in a ``(nonexact ...)`` item.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Sequence, Union

__all__ = [
    "Atom", "RelDecl", "RelModel", "KKIRError",
    "RelRef", "VarRef", "Union_", "Inter", "Diff", "Transpose", "Join", "Product",
    "TrueF", "FalseF", "Not", "And", "Or", "Implies", "Iff", "Equal", "Subset", "In",
    "Forall", "Exists", "Mult", "TRUE", "FALSE", "MULT_KINDS",
    "parse_model", "render_model", "expr_arity", "free_vars", "conjuncts",
]


class KKIRError(ValueError):
    """Malformed KKIR input. Carries an optional (line, column)."""

    def __init__(self, msg: str, loc: tuple[int, int] | None = None):
        self.msg = msg
        self.loc = loc
        if loc is not None:
            msg = f"{msg} (at {loc[0]}:{loc[1]})"
        super().__init__(msg)


# --- atoms and declarations -------------------------------------------------

_IDENT = r"[A-Za-z_'][A-Za-z0-9_'./\-]*"
_ATOM_RE = re.compile(rf"^({_IDENT})\$([0-9]+)$")
_NAME_RE = re.compile(rf"^{_IDENT}$")


@dataclass(frozen=True, order=True)
class Atom:
    prefix: str
    index: int

    def __post_init__(self):
        if not _NAME_RE.match(self.prefix):
            raise KKIRError(f"malformed atom prefix {self.prefix!r}")
        if self.index < 0:
            raise KKIRError(f"negative atom index in {self.prefix}${self.index}")

    def __str__(self) -> str:
        return f"{self.prefix}${self.index}"

    @classmethod
    def parse(cls, token: str) -> Atom:
        m = _ATOM_RE.match(token)
        if m is None:
            raise KKIRError(f"malformed atom {token!r}")
        return cls(m.group(1), int(m.group(2)))


@dataclass(frozen=True)
class RelDecl:
    name: str
    arity: int
    upper_bound: tuple[tuple[Atom, ...], ...]


# --- expressions ------------------------------------------------------------

@dataclass(frozen=True)
class RelRef:
    name: str


@dataclass(frozen=True)
class VarRef:
    name: str


@dataclass(frozen=True)
class Union_:
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class Inter:
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class Diff:
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class Transpose:
    expr: RelExpr


@dataclass(frozen=True)
class Join:
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class Product:
    left: RelExpr
    right: RelExpr


RelExpr = Union[RelRef, VarRef, Union_, Inter, Diff, Transpose, Join, Product]
_BINARY_EXPRS = {"union": Union_, "inter": Inter, "diff": Diff, "join": Join, "prod": Product}
_BINARY_EXPR_NAMES = {v: k for k, v in _BINARY_EXPRS.items()}


# --- formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class TrueF:
    pass


@dataclass(frozen=True)
class FalseF:
    pass


TRUE = TrueF()
FALSE = FalseF()


@dataclass(frozen=True)
class Not:
    body: RelFormula


@dataclass(frozen=True)
class And:
    args: tuple[RelFormula, ...]


@dataclass(frozen=True)
class Or:
    args: tuple[RelFormula, ...]


@dataclass(frozen=True)
class Implies:
    left: RelFormula
    right: RelFormula


@dataclass(frozen=True)
class Iff:
    left: RelFormula
    right: RelFormula


@dataclass(frozen=True)
class Equal:
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class Subset:
    left: RelExpr
    right: RelExpr


@dataclass(frozen=True)
class In:
    left: RelExpr
    right: RelExpr


Decl = tuple[str, RelExpr]


@dataclass(frozen=True)
class Forall:
    decls: tuple[Decl, ...]
    body: RelFormula


@dataclass(frozen=True)
class Exists:
    decls: tuple[Decl, ...]
    body: RelFormula


MULT_KINDS = ("one", "lone", "some", "no")
# "some" is spelled someof in KKIR
_MULT_TOKENS = {"one": "one", "lone": "lone", "someof": "some", "no": "no"}
_MULT_NAMES = {v: k for k, v in _MULT_TOKENS.items()}


@dataclass(frozen=True)
class Mult:
    kind: str
    expr: RelExpr

    def __post_init__(self):
        if self.kind not in MULT_KINDS:
            raise ValueError(f"unknown multiplicity {self.kind!r}")


RelFormula = Union[TrueF, FalseF, Not, And, Or, Implies, Iff, Equal, Subset, In,
                   Forall, Exists, Mult]


# --- model ------------------------------------------------------------------

@dataclass(frozen=True)
class RelModel:
    universe: tuple[Atom, ...]
    relations: tuple[RelDecl, ...]
    formulas: tuple[RelFormula, ...] = ()
    goal: str = "run"
    nonexact: frozenset[str] = field(default_factory=frozenset)

    @property
    def formula(self) -> RelFormula:
        """All formula items as one conjunction."""
        if len(self.formulas) == 1:
            return self.formulas[0]
        return And(self.formulas)

    def relation(self, name: str) -> RelDecl:
        for r in self.relations:
            if r.name == name:
                return r
        raise KeyError(name)

    def prefixes(self) -> tuple[str, ...]:
        seen: dict[str, None] = {}
        for a in self.universe:
            seen.setdefault(a.prefix, None)
        return tuple(seen)

    def atoms_of(self, prefix: str) -> tuple[Atom, ...]:
        return tuple(a for a in self.universe if a.prefix == prefix)

    def lower_bound(self, name: str) -> tuple[tuple[Atom, ...], ...]:
        """Tuples the relation is forced to contain.

        Only exact type relations have a nonempty lower bound, and it equals
        their upper bound.
        """
        r = self.relation(name)
        if r.arity != 1 or r.name in self.nonexact:
            return ()
        atoms = self.atoms_of(r.name)
        if atoms and set(r.upper_bound) == {(a,) for a in atoms}:
            return r.upper_bound
        return ()


# --- structural helpers -----------------------------------------------------

def expr_arity(e: RelExpr, arities: dict[str, int]) -> int:
    """Arity of ``e``; ``arities`` maps relation names to their arity."""
    match e:
        case RelRef(name):
            return arities[name]
        case VarRef():
            return 1
        case Union_(l, r) | Inter(l, r) | Diff(l, r):
            return expr_arity(l, arities)
        case Transpose():
            return 2
        case Join(l, r):
            return expr_arity(l, arities) + expr_arity(r, arities) - 2
        case Product(l, r):
            return expr_arity(l, arities) + expr_arity(r, arities)
    raise TypeError(f"not a relational expression: {e!r}")


def free_vars(e: RelExpr) -> set[str]:
    match e:
        case VarRef(name):
            return {name}
        case RelRef():
            return set()
        case Transpose(x):
            return free_vars(x)
        case Union_(l, r) | Inter(l, r) | Diff(l, r) | Join(l, r) | Product(l, r):
            return free_vars(l) | free_vars(r)
    raise TypeError(f"not a relational expression: {e!r}")


def conjuncts(f: RelFormula) -> Iterator[RelFormula]:
    """Top-level conjuncts of ``f`` with nested ``And`` flattened."""
    if isinstance(f, And):
        for g in f.args:
            yield from conjuncts(g)
    else:
        yield f


# --- S-expression reader ----------------------------------------------------

@dataclass
class _Tok:
    text: str
    loc: tuple[int, int]


@dataclass
class _List:
    items: list
    loc: tuple[int, int]


_TOKEN_RE = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


def _read_sexprs(text: str) -> list:
    stack: list[_List] = [_List([], (1, 1))]
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        assert m is not None  # the regex matches every character class
        tok = m.group()
        loc = (line, col)
        if tok == "(":
            stack.append(_List([], loc))
        elif tok == ")":
            if len(stack) == 1:
                raise KKIRError("unbalanced ')'", loc)
            done = stack.pop()
            stack[-1].items.append(done)
        elif not tok[0].isspace() and tok[0] != ";":
            stack[-1].items.append(_Tok(tok, loc))
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    if len(stack) != 1:
        raise KKIRError("unclosed '('", stack[-1].loc)
    return stack[0].items


# --- parser -----------------------------------------------------------------

class _Parser:
    def __init__(self, arities: dict[str, int]):
        self.arities = arities

    def name(self, node, what: str) -> str:
        if not isinstance(node, _Tok) or not _NAME_RE.match(node.text):
            raise KKIRError(f"expected {what}", _loc(node))
        return node.text

    def expr(self, node, scope: tuple[str, ...]) -> tuple[RelExpr, int]:
        if isinstance(node, _Tok):
            n = node.text
            if n in scope:
                return VarRef(n), 1
            if n in self.arities:
                return RelRef(n), self.arities[n]
            raise KKIRError(f"unknown relation or variable {n!r}", node.loc)
        head, args = _head(node)
        if head == "transpose":
            _expect_len(node, args, 1)
            e, k = self.expr(args[0], scope)
            if k != 2:
                raise KKIRError(f"arity mismatch: transpose of arity-{k} expression", node.loc)
            return Transpose(e), 2
        if head in _BINARY_EXPRS:
            _expect_len(node, args, 2)
            (l, kl), (r, kr) = self.expr(args[0], scope), self.expr(args[1], scope)
            cls = _BINARY_EXPRS[head]
            if cls is Join:
                if kl + kr - 2 < 1:
                    raise KKIRError("arity mismatch: join of two unary expressions", node.loc)
                return Join(l, r), kl + kr - 2
            if cls is Product:
                return Product(l, r), kl + kr
            if kl != kr:
                raise KKIRError(f"arity mismatch: {head} of arities {kl} and {kr}", node.loc)
            return cls(l, r), kl
        raise KKIRError(f"unknown expression operator {head!r}", node.loc)

    def formula(self, node, scope: tuple[str, ...]) -> RelFormula:
        if isinstance(node, _Tok):
            if node.text == "true":
                return TRUE
            if node.text == "false":
                return FALSE
            raise KKIRError(f"expected formula, got {node.text!r}", node.loc)
        head, args = _head(node)
        if head == "not":
            _expect_len(node, args, 1)
            return Not(self.formula(args[0], scope))
        if head in ("and", "or"):
            fs = tuple(self.formula(a, scope) for a in args)
            return And(fs) if head == "and" else Or(fs)
        if head in ("=>", "<=>"):
            _expect_len(node, args, 2)
            l, r = self.formula(args[0], scope), self.formula(args[1], scope)
            return Implies(l, r) if head == "=>" else Iff(l, r)
        if head in ("=", "subset", "in"):
            _expect_len(node, args, 2)
            (l, kl), (r, kr) = self.expr(args[0], scope), self.expr(args[1], scope)
            if kl != kr:
                raise KKIRError(f"arity mismatch: {head} of arities {kl} and {kr}", node.loc)
            return {"=": Equal, "subset": Subset, "in": In}[head](l, r)
        if head in ("all", "exists"):
            _expect_len(node, args, 2)
            decls_node = args[0]
            if not isinstance(decls_node, _List) or not decls_node.items:
                raise KKIRError("expected nonempty declaration list", _loc(decls_node))
            decls = []
            inner = scope
            for d in decls_node.items:
                if not isinstance(d, _List) or len(d.items) != 2:
                    raise KKIRError("expected (VAR EXPR) declaration", _loc(d))
                v = self.name(d.items[0], "variable name")
                if v in inner:
                    raise KKIRError(f"variable {v!r} shadows an enclosing variable", d.loc)
                if v in self.arities:
                    raise KKIRError(f"variable {v!r} shadows a relation", d.loc)
                bound, k = self.expr(d.items[1], inner)
                if k != 1:
                    raise KKIRError(f"arity mismatch: bound of {v!r} has arity {k}", d.loc)
                decls.append((v, bound))
                inner = inner + (v,)
            body = self.formula(args[1], inner)
            return (Forall if head == "all" else Exists)(tuple(decls), body)
        if head in _MULT_TOKENS:
            _expect_len(node, args, 1)
            e, _ = self.expr(args[0], scope)
            return Mult(_MULT_TOKENS[head], e)
        raise KKIRError(f"unknown formula operator {head!r}", node.loc)


def _loc(node) -> tuple[int, int] | None:
    return getattr(node, "loc", None)


def _head(node: _List) -> tuple[str, list]:
    if not node.items or not isinstance(node.items[0], _Tok):
        raise KKIRError("expected operator", node.loc)
    return node.items[0].text, node.items[1:]


def _expect_len(node: _List, args: list, n: int) -> None:
    if len(args) != n:
        raise KKIRError(f"{node.items[0].text} expects {n} argument(s), got {len(args)}",
                        node.loc)


def parse_model(text: str) -> RelModel:
    """Parse KKIR text into a validated :class:`RelModel`."""
    universe: list[Atom] = []
    rel_nodes: list[tuple[RelDecl, _List]] = []
    formula_nodes: list = []
    goal = "run"
    nonexact: set[str] = set()

    for item in _read_sexprs(text):
        if not isinstance(item, _List):
            raise KKIRError(f"unexpected token {item.text!r} at top level", item.loc)
        head, args = _head(item)
        if head == "univ":
            if not args:
                raise KKIRError("univ needs at least one atom", item.loc)
            for a in args:
                universe.append(_atom(a))
        elif head == "rel":
            _expect_len(item, args, 3)
            name = _Parser({}).name(args[0], "relation name")
            if not isinstance(args[1], _Tok) or not args[1].text.isdigit() \
                    or int(args[1].text) < 1:
                raise KKIRError("relation arity must be a positive integer", _loc(args[1]))
            arity = int(args[1].text)
            if not isinstance(args[2], _List):
                raise KKIRError("expected tuple list", _loc(args[2]))
            tuples = []
            for t in args[2].items:
                if not isinstance(t, _List) or not t.items:
                    raise KKIRError("expected (ATOM+) tuple", _loc(t))
                tup = tuple(_atom(a) for a in t.items)
                if len(tup) != arity:
                    raise KKIRError(
                        f"arity mismatch: tuple of length {len(tup)} in relation "
                        f"{name!r} of arity {arity}", t.loc)
                tuples.append(tup)
            rel_nodes.append((RelDecl(name, arity, tuple(tuples)), item))
        elif head == "formula":
            _expect_len(item, args, 1)
            formula_nodes.append(args[0])
        elif head == "goal":
            _expect_len(item, args, 1)
            if not isinstance(args[0], _Tok) or args[0].text not in ("run", "check"):
                raise KKIRError("goal must be run or check", _loc(args[0]))
            goal = args[0].text
        elif head == "nonexact":
            for a in args:
                nonexact.add(_Parser({}).name(a, "atom prefix"))
        else:
            raise KKIRError(f"unknown item {head!r}", item.loc)

    if not universe:
        raise KKIRError("empty universe")
    if len(set(universe)) != len(universe):
        raise KKIRError("duplicate atom in universe")
    known = set(universe)
    arities: dict[str, int] = {}
    for r, node in rel_nodes:
        if r.name in arities:
            raise KKIRError(f"duplicate relation name {r.name!r}", node.loc)
        arities[r.name] = r.arity
        if len(set(r.upper_bound)) != len(r.upper_bound):
            raise KKIRError(f"duplicate tuple in bound of {r.name!r}", node.loc)
        for t in r.upper_bound:
            for a in t:
                if a not in known:
                    raise KKIRError(f"unknown atom {a} in bound of {r.name!r}", node.loc)

    p = _Parser(arities)
    formulas = tuple(p.formula(f, ()) for f in formula_nodes)
    return RelModel(tuple(universe), tuple(r for r, _ in rel_nodes), formulas, goal,
                    frozenset(nonexact))


def _atom(node) -> Atom:
    if not isinstance(node, _Tok):
        raise KKIRError("expected atom", _loc(node))
    try:
        return Atom.parse(node.text)
    except KKIRError as exc:
        raise KKIRError(exc.msg, node.loc) from None


# --- renderer ---------------------------------------------------------------

def _render_expr(e: RelExpr) -> str:
    match e:
        case RelRef(name) | VarRef(name):
            return name
        case Transpose(x):
            return f"(transpose {_render_expr(x)})"
    return f"({_BINARY_EXPR_NAMES[type(e)]} {_render_expr(e.left)} {_render_expr(e.right)})"


def _render_decls(decls: Sequence[Decl]) -> str:
    return "(" + " ".join(f"({v} {_render_expr(b)})" for v, b in decls) + ")"


def _render_formula(f: RelFormula) -> str:
    match f:
        case TrueF():
            return "true"
        case FalseF():
            return "false"
        case Not(b):
            return f"(not {_render_formula(b)})"
        case And(args) | Or(args):
            op = "and" if isinstance(f, And) else "or"
            return "(" + " ".join([op, *map(_render_formula, args)]) + ")"
        case Implies(l, r):
            return f"(=> {_render_formula(l)} {_render_formula(r)})"
        case Iff(l, r):
            return f"(<=> {_render_formula(l)} {_render_formula(r)})"
        case Equal(l, r):
            return f"(= {_render_expr(l)} {_render_expr(r)})"
        case Subset(l, r):
            return f"(subset {_render_expr(l)} {_render_expr(r)})"
        case In(l, r):
            return f"(in {_render_expr(l)} {_render_expr(r)})"
        case Forall(decls, body):
            return f"(all {_render_decls(decls)} {_render_formula(body)})"
        case Exists(decls, body):
            return f"(exists {_render_decls(decls)} {_render_formula(body)})"
        case Mult(kind, e):
            return f"({_MULT_NAMES[kind]} {_render_expr(e)})"
    raise TypeError(f"not a relational formula: {f!r}")


def render_model(m: RelModel) -> str:
    """Canonical KKIR text; ``parse_model(render_model(m)) == m``."""
    lines = ["(univ " + " ".join(map(str, m.universe)) + ")"]
    for r in m.relations:
        tuples = "".join("(" + " ".join(map(str, t)) + ")" for t in r.upper_bound)
        lines.append(f"(rel {r.name} {r.arity} ({tuples}))")
    if m.nonexact:
        lines.append("(nonexact " + " ".join(sorted(m.nonexact)) + ")")
    for f in m.formulas:
        lines.append(f"(formula {_render_formula(f)})")
    lines.append(f"(goal {m.goal})")
    return "\n".join(lines) + "\n"
