"""Typed first-order logic IR and its SMT-LIB2 emitter."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union

BOOL = "Bool"


@dataclass(frozen=True)
class FuncDecl:
    name: str
    arg_sorts: tuple[str, ...]
    result: str  # a declared sort or BOOL

    @property
    def is_predicate(self) -> bool:
        return self.result == BOOL


# --- terms ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    sort: str


@dataclass(frozen=True)
class Const:
    """A declared 0-ary constant. Distinct names denote distinct elements."""
    name: str
    sort: str


@dataclass(frozen=True)
class Apply:
    fn: str
    args: tuple[Term, ...]


Term = Union[Var, Const, Apply]


# --- formulas ---------------------------------------------------------------

@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


TRUE = Top()
FALSE = Bot()


@dataclass(frozen=True)
class Not:
    body: Formula


@dataclass(frozen=True)
class And:
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Or:
    args: tuple[Formula, ...]


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Pred:
    fn: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Forall:
    vars: tuple[Var, ...]
    body: Formula


@dataclass(frozen=True)
class Exists:
    vars: tuple[Var, ...]
    body: Formula


@dataclass(frozen=True)
class Distinct:
    terms: tuple[Term, ...]


Formula = Union[Top, Bot, Not, And, Or, Implies, Iff, Eq, Pred, Forall, Exists, Distinct]


# --- constant-folding constructors ------------------------------------------
# Used by the translator so that trivially empty sets do not leave
# `(exists ((x S)) false)` debris in the output.

def conj(*args: Formula) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Bot):
            return FALSE
        if isinstance(a, Top):
            continue
        out.extend(a.args if isinstance(a, And) else (a,))
    out = list(dict.fromkeys(out))
    if not out:
        return TRUE
    return out[0] if len(out) == 1 else And(tuple(out))


def disj(*args: Formula) -> Formula:
    out = []
    for a in args:
        if isinstance(a, Top):
            return TRUE
        if isinstance(a, Bot):
            continue
        out.extend(a.args if isinstance(a, Or) else (a,))
    out = list(dict.fromkeys(out))
    if not out:
        return FALSE
    return out[0] if len(out) == 1 else Or(tuple(out))


def neg(a: Formula) -> Formula:
    if isinstance(a, Top):
        return FALSE
    if isinstance(a, Bot):
        return TRUE
    if isinstance(a, Not):
        return a.body
    return Not(a)


def implies(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Bot) or isinstance(b, Top):
        return TRUE
    if isinstance(a, Top):
        return b
    if isinstance(b, Bot):
        return neg(a)
    return Implies(a, b)


def iff(a: Formula, b: Formula) -> Formula:
    if isinstance(a, Top):
        return b
    if isinstance(b, Top):
        return a
    if isinstance(a, Bot):
        return neg(b)
    if isinstance(b, Bot):
        return neg(a)
    return Iff(a, b)


def forall(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    if not vs or isinstance(body, (Top, Bot)):
        return body
    return Forall(vs, body)


def exists(vs: Iterable[Var], body: Formula) -> Formula:
    vs = tuple(vs)
    if not vs or isinstance(body, (Top, Bot)):
        return body
    return Exists(vs, body)


# --- theory -----------------------------------------------------------------

@dataclass(frozen=True)
class RelSymbol:
    """Provenance of one declared symbol that encodes (part of) a relation.

    ``leaves`` is the leaf signature of a typed split, or None in untyped
    mode. Function symbols encode all columns but the last as arguments.
    """
    relation: str
    symbol: str
    leaves: tuple[str, ...] | None
    is_function: bool


@dataclass
class TfolTheory:
    sorts: list[str] = field(default_factory=list)
    decls: list[FuncDecl] = field(default_factory=list)
    assertions: list[Formula] = field(default_factory=list)
    name: str = ""
    options: object = None
    type_predicates: dict[str, str] = field(default_factory=dict)
    rel_symbols: list[RelSymbol] = field(default_factory=list)

    def decl(self, name: str) -> FuncDecl | None:
        for d in self.decls:
            if d.name == name:
                return d
        return None

    def declare(self, d: FuncDecl) -> FuncDecl:
        if any(x.name == d.name for x in self.decls):
            raise ValueError(f"symbol {d.name!r} declared twice")
        self.decls.append(d)
        return d

    def copy(self) -> TfolTheory:
        return TfolTheory(list(self.sorts), list(self.decls), list(self.assertions),
                          self.name, self.options, dict(self.type_predicates),
                          list(self.rel_symbols))


# --- well-sortedness --------------------------------------------------------

def _term_sort(t: Term, decls: dict[str, FuncDecl], bound: dict[str, str],
               diags: list[str]) -> str | None:
    match t:
        case Var(name, sort):
            if name not in bound:
                diags.append(f"unbound variable {name}")
            elif bound[name] != sort:
                diags.append(f"variable {name} used at sort {sort}, bound at {bound[name]}")
            return sort
        case Const(name, sort):
            d = decls.get(name)
            if d is None:
                diags.append(f"undeclared constant {name}")
            elif d.arg_sorts or d.result != sort:
                diags.append(f"constant {name} does not match its declaration")
            return sort
        case Apply(fn, args):
            d = decls.get(fn)
            if d is None:
                diags.append(f"undeclared function {fn}")
                return None
            if d.is_predicate:
                diags.append(f"predicate {fn} used as a term")
            _check_args(fn, d, args, decls, bound, diags)
            return d.result
    raise TypeError(f"not a term: {t!r}")


def _check_args(fn, d: FuncDecl, args, decls, bound, diags) -> None:
    if len(args) != len(d.arg_sorts):
        diags.append(f"{fn} expects {len(d.arg_sorts)} argument(s), got {len(args)}")
    for i, (a, want) in enumerate(zip(args, d.arg_sorts)):
        got = _term_sort(a, decls, bound, diags)
        if got is not None and got != want:
            diags.append(f"argument {i} of {fn} has sort {got}, expected {want}")


def _check_formula(f: Formula, decls, sorts, bound, diags) -> None:
    match f:
        case Top() | Bot():
            return
        case Not(b):
            _check_formula(b, decls, sorts, bound, diags)
        case And(args) | Or(args):
            for a in args:
                _check_formula(a, decls, sorts, bound, diags)
        case Implies(l, r) | Iff(l, r):
            _check_formula(l, decls, sorts, bound, diags)
            _check_formula(r, decls, sorts, bound, diags)
        case Eq(l, r):
            a = _term_sort(l, decls, bound, diags)
            b = _term_sort(r, decls, bound, diags)
            if a is not None and b is not None and a != b:
                diags.append(f"equality between sorts {a} and {b}")
        case Distinct(terms):
            ss = {_term_sort(t, decls, bound, diags) for t in terms}
            if len(ss - {None}) > 1:
                diags.append(f"distinct over mixed sorts {sorted(ss - {None})}")
        case Pred(fn, args):
            d = decls.get(fn)
            if d is None:
                diags.append(f"undeclared predicate {fn}")
                return
            if not d.is_predicate:
                diags.append(f"function {fn} used as a predicate")
            _check_args(fn, d, args, decls, bound, diags)
        case Forall(vs, body) | Exists(vs, body):
            inner = dict(bound)
            for v in vs:
                if v.sort not in sorts:
                    diags.append(f"quantified variable {v.name} has undeclared sort {v.sort}")
                inner[v.name] = v.sort
            _check_formula(body, decls, sorts, inner, diags)
        case _:
            raise TypeError(f"not a formula: {f!r}")


def check_well_sorted(t: TfolTheory) -> list[str]:
    """Diagnostics for every ill-sorted or undeclared use; empty if clean."""
    diags: list[str] = []
    sorts = set(t.sorts)
    decls: dict[str, FuncDecl] = {}
    for d in t.decls:
        if d.name in decls:
            diags.append(f"symbol {d.name} declared twice")
        decls[d.name] = d
        for s in (*d.arg_sorts, d.result):
            if s != BOOL and s not in sorts:
                diags.append(f"{d.name} mentions undeclared sort {s}")
    for f in t.assertions:
        _check_formula(f, decls, sorts, {}, diags)
    return diags


# --- SMT-LIB2 emission ------------------------------------------------------

RESERVED = frozenset({
    "par", "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL", "_", "!", "as",
    "let", "exists", "forall", "match", "assert", "check-sat", "declare-fun",
    "declare-const", "declare-sort", "define-fun", "define-sort", "set-logic",
    "set-option", "set-info", "push", "pop", "exit", "true", "false", "not", "and",
    "or", "xor", "=>", "=", "distinct", "ite", "Bool",
})

_PLAIN = re.compile(r"^[A-Za-z][A-Za-z0-9_]*$")
_SIMPLE_SYMBOL = re.compile(r"^[A-Za-z~!@$%^&*_+=<>.?/\-][A-Za-z0-9~!@$%^&*_+=<>.?/\-]*$")


def mangle(name: str) -> str:
    """Make a source identifier a plain SMT-LIB symbol, deterministically."""
    if not _PLAIN.match(name):
        out = []
        for i, ch in enumerate(name):
            ok = ch.isascii() and (ch.isalpha() or (i > 0 and (ch.isdigit() or ch == "_")))
            out.append(ch if ok else f"_u{ord(ch):x}_")
        name = "".join(out)
    if name in RESERVED:
        name += "_"
    return name


def symbol(name: str) -> str:
    if name in RESERVED:
        raise ValueError(f"reserved word {name!r} used as a symbol")
    if _SIMPLE_SYMBOL.match(name):
        return name
    if "|" in name or "\\" in name:
        raise ValueError(f"symbol {name!r} cannot be quoted")
    return f"|{name}|"


def _sort(s: str) -> str:
    return s if s == BOOL else symbol(s)


def _emit_term(t: Term) -> str:
    match t:
        case Var(name) | Const(name):
            return symbol(name)
        case Apply(fn, args):
            if not args:
                return symbol(fn)
            return "(" + symbol(fn) + " " + " ".join(map(_emit_term, args)) + ")"
    raise TypeError(f"not a term: {t!r}")


def emit_formula(f: Formula) -> str:
    match f:
        case Top():
            return "true"
        case Bot():
            return "false"
        case Not(b):
            return f"(not {emit_formula(b)})"
        case And(args) | Or(args):
            if not args:
                return "true" if isinstance(f, And) else "false"
            if len(args) == 1:
                return emit_formula(args[0])
            op = "and" if isinstance(f, And) else "or"
            return f"({op} " + " ".join(map(emit_formula, args)) + ")"
        case Implies(l, r):
            return f"(=> {emit_formula(l)} {emit_formula(r)})"
        case Iff(l, r):
            return f"(= {emit_formula(l)} {emit_formula(r)})"
        case Eq(l, r):
            return f"(= {_emit_term(l)} {_emit_term(r)})"
        case Distinct(terms):
            if len(terms) < 2:
                return "true"
            return "(distinct " + " ".join(map(_emit_term, terms)) + ")"
        case Pred(fn, args):
            if not args:
                return symbol(fn)
            return "(" + symbol(fn) + " " + " ".join(map(_emit_term, args)) + ")"
        case Forall(vs, body) | Exists(vs, body):
            q = "forall" if isinstance(f, Forall) else "exists"
            bs = " ".join(f"({symbol(v.name)} {symbol(v.sort)})" for v in vs)
            return f"({q} ({bs}) {emit_formula(body)})"
    raise TypeError(f"not a formula: {f!r}")


class EmitError(ValueError):
    pass


def emit_smtlib(t: TfolTheory, check: bool = True) -> str:
    """Render ``t`` as SMT-LIB2 text. Raises EmitError on ill-sorted input."""
    if check:
        diags = check_well_sorted(t)
        if diags:
            raise EmitError("ill-sorted theory: " + "; ".join(diags[:5]))
    lines = ["(set-logic UF)"]
    for s in t.sorts:
        lines.append(f"(declare-sort {symbol(s)} 0)")
    for d in t.decls:
        if not d.arg_sorts:
            lines.append(f"(declare-const {symbol(d.name)} {_sort(d.result)})")
        else:
            args = " ".join(symbol(s) for s in d.arg_sorts)
            lines.append(f"(declare-fun {symbol(d.name)} ({args}) {_sort(d.result)})")
    for f in t.assertions:
        lines.append(f"(assert {emit_formula(f)})")
    lines.append("(check-sat)")
    return "\n".join(lines) + "\n"
