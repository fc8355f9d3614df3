"""Brute-force model finder working directly on the relational IR.

Nothing here touches the translator: the formula is evaluated under plain
relational semantics so the verdicts can be used to check every translation.

The search assigns the undecided tuples of each relation (upper bound minus
lower bound) one at a time, depth first, trying "absent" before "present".
After every assignment the formula is evaluated three-valued over the partial
interpretation: each expression is known only as an interval ``lo ⊆ value ⊆
hi``. A definite FALSE prunes the branch; a definite TRUE ends the search
since every completion is then a model. Top-level conjuncts that share no
undecided relation are solved independently.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..relational import (And, Diff, Equal, Exists, FalseF, Forall, Iff, Implies, In,
                          Inter, Join, Mult, Not, Or, Product, RelExpr, RelFormula, RelModel,
                          RelRef, Subset, Transpose, TrueF, Union_, VarRef, conjuncts,
                          free_vars)

DEFAULT_ORACLE_BUDGET = 2 ** 24

# Inside the search atoms are replaced by their position in the universe.
Tuples = frozenset  # frozenset[tuple[int, ...]]


class OracleBudgetError(RuntimeError):
    pass


@dataclass
class OracleResult:
    verdict: str  # "SAT" or "UNSAT"
    witness: dict[str, frozenset] | None = None
    nodes: int = 0

    def __post_init__(self):
        if self.verdict == "SAT" and self.witness is None:
            raise ValueError("a SAT verdict needs a witness")


# --- three-valued evaluation -------------------------------------------------

def _join(a: Tuples, b: Tuples) -> Tuples:
    if not a or not b:
        return frozenset()
    index: dict[int, list[tuple]] = {}
    for t in b:
        index.setdefault(t[0], []).append(t[1:])
    return frozenset(s[:-1] + rest for s in a for rest in index.get(s[-1], ()))


def _join_indexed(a: Tuples, index: dict) -> Tuples:
    return frozenset(s[:-1] + rest for s in a for rest in index.get(s[-1], ()))


def _product(a: Tuples, b: Tuples) -> Tuples:
    return frozenset(s + t for s in a for t in b)


def _not3(x):
    return None if x is None else not x


def _and3(xs):
    out = True
    for x in xs:
        if x is False:
            return False
        if x is None:
            out = None
    return out


def _or3(xs):
    out = False
    for x in xs:
        if x is True:
            return True
        if x is None:
            out = None
    return out


class _Eval:
    """Interval evaluator; ``lo``/``hi`` map relation names to tuple sets."""

    def __init__(self, lo: dict[str, Tuples], hi: dict[str, Tuples], free: dict | None = None):
        self.lo = lo
        self.hi = hi
        self._free = {} if free is None else free
        self._index: dict[tuple[str, bool], dict] = {}
        self._memo: dict = {}

    def index(self, name: str, upper: bool) -> dict:
        key = (name, upper)
        if key not in self._index:
            idx: dict[int, list[tuple]] = {}
            for t in (self.hi if upper else self.lo)[name]:
                idx.setdefault(t[0], []).append(t[1:])
            self._index[key] = idx
        return self._index[key]

    def expr(self, e: RelExpr, env: dict) -> tuple[Tuples, Tuples]:
        # keyed by identity: hashing a frozen expression tree walks all of it
        fv = self._free.get(id(e))
        if fv is None:
            fv = self._free[id(e)] = (e, tuple(sorted(free_vars(e))))
        key = (id(e), tuple(env[v] for v in fv[1]))
        hit = self._memo.get(key)
        if hit is None:
            hit = self._memo[key] = self._expr(e, env)
        return hit

    def _expr(self, e: RelExpr, env: dict) -> tuple[Tuples, Tuples]:
        match e:
            case RelRef(name):
                return self.lo[name], self.hi[name]
            case VarRef(name):
                v = frozenset({(env[name],)})
                return v, v
            case Union_(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                return a | c, b | d
            case Inter(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                return a & c, b & d
            case Diff(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                return a - d, b - c
            case Transpose(x):
                a, b = self.expr(x, env)
                return (frozenset((t[1], t[0]) for t in a),
                        frozenset((t[1], t[0]) for t in b))
            case Join(l, RelRef(name)):
                a, b = self.expr(l, env)
                return (_join_indexed(a, self.index(name, False)),
                        _join_indexed(b, self.index(name, True)))
            case Join(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                return _join(a, c), _join(b, d)
            case Product(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                return _product(a, c), _product(b, d)
        raise TypeError(f"not a relational expression: {e!r}")

    def formula(self, f: RelFormula, env: dict[str, int]):
        """True, False, or None when the partial interpretation leaves it open."""
        match f:
            case TrueF():
                return True
            case FalseF():
                return False
            case Not(b):
                return _not3(self.formula(b, env))
            case And(args):
                out = True
                for a in args:
                    x = self.formula(a, env)
                    if x is False:
                        return False
                    if x is None:
                        out = None
                return out
            case Or(args):
                out = False
                for a in args:
                    x = self.formula(a, env)
                    if x is True:
                        return True
                    if x is None:
                        out = None
                return out
            case Implies(l, r):
                a = self.formula(l, env)
                if a is False:
                    return True
                return _or3([_not3(a), self.formula(r, env)])
            case Iff(l, r):
                a, b = self.formula(l, env), self.formula(r, env)
                if a is None or b is None:
                    return None
                return a == b
            case Equal(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                if not a <= d or not c <= b:
                    return False
                if a == b == c == d:
                    return True
                return None
            case Subset(l, r) | In(l, r):
                (a, b), (c, d) = self.expr(l, env), self.expr(r, env)
                if b <= c:
                    return True
                if not a <= d:
                    return False
                return None
            case Mult(kind, e):
                a, b = self.expr(e, env)
                return _count3(kind, len(a), len(b))
            case Forall(decls, body):
                return self._quant(decls, body, env, True)
            case Exists(decls, body):
                return self._quant(decls, body, env, False)
        raise TypeError(f"not a formula: {f!r}")

    def _quant(self, decls, body, env, universal: bool):
        if not decls:
            return self.formula(body, env)
        (name, bound), rest = decls[0], decls[1:]
        lo, hi = self.expr(bound, env)
        out = True if universal else False
        for (atom,) in sorted(hi):
            inner = dict(env)
            inner[name] = atom
            x = self._quant(rest, body, inner, universal)
            if (atom,) not in lo:
                # membership undecided: x only counts when the atom is present
                if universal:
                    x = True if x is True else None
                else:
                    x = False if x is False else None
            if universal:
                if x is False:
                    return False
                if x is None:
                    out = None
            else:
                if x is True:
                    return True
                if x is None:
                    out = None
        return out


def _count3(kind: str, lo: int, hi: int):
    if kind == "one":
        if lo > 1 or hi == 0:
            return False
        return True if lo == 1 and hi == 1 else None
    if kind == "lone":
        if lo > 1:
            return False
        return True if hi <= 1 else None
    if kind == "some":
        if lo >= 1:
            return True
        return False if hi == 0 else None
    if kind == "no":
        if lo >= 1:
            return False
        return True if hi == 0 else None
    raise ValueError(kind)


def _encode(m: RelModel, tuples) -> Tuples:
    pos = {a: i for i, a in enumerate(m.universe)}
    return frozenset(tuple(pos[a] for a in t) for t in tuples)


def _decode(m: RelModel, tuples: Tuples) -> frozenset:
    return frozenset(tuple(m.universe[i] for i in t) for t in tuples)


def evaluate(m: RelModel, interp: dict[str, frozenset]) -> bool:
    """Truth value of the model's formula under a complete interpretation."""
    full = {r.name: _encode(m, interp.get(r.name, ())) for r in m.relations}
    return _Eval(full, full).formula(m.formula, {}) is True


def within_bounds(m: RelModel, interp: dict[str, frozenset]) -> bool:
    for r in m.relations:
        v = frozenset(interp.get(r.name, ()))
        if not set(m.lower_bound(r.name)) <= v <= set(r.upper_bound):
            return False
    return True


# --- search ------------------------------------------------------------------

def _relations_in(f, out: set[str]) -> set[str]:
    match f:
        case RelRef(name):
            out.add(name)
        case VarRef() | TrueF() | FalseF():
            pass
        case Transpose(x) | Not(x) | Mult(_, x):
            _relations_in(x, out)
        case (Union_(l, r) | Inter(l, r) | Diff(l, r) | Join(l, r) | Product(l, r)
              | Implies(l, r) | Iff(l, r) | Equal(l, r) | Subset(l, r) | In(l, r)):
            _relations_in(l, out)
            _relations_in(r, out)
        case And(args) | Or(args):
            for a in args:
                _relations_in(a, out)
        case Forall(decls, body) | Exists(decls, body):
            for _, b in decls:
                _relations_in(b, out)
            _relations_in(body, out)
        case _:
            raise TypeError(f"unexpected node {f!r}")
    return out


def _components(parts: list[RelFormula], undecided: set[str]) -> list[list[int]]:
    """Group conjunct indices that (transitively) share an undecided relation."""
    parent = list(range(len(parts)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[str, int] = {}
    for i, p in enumerate(parts):
        for r in sorted(_relations_in(p, set()) & undecided):
            if r in owner:
                parent[find(i)] = find(owner[r])
            else:
                owner[r] = i
    groups: dict[int, list[int]] = {}
    for i in range(len(parts)):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


class _Search:
    def __init__(self, parts: list[RelFormula], lo: dict, hi: dict, slots: list, budget: int):
        self.parts = parts
        self.lo = lo
        self.hi = hi
        self.slots = slots  # (relation, tuple) pairs in decision order
        self.budget = budget
        self.nodes = 0
        self.free: dict = {}

    def status(self, settled: frozenset):
        """Overall verdict plus the conjuncts now definitely true.

        A conjunct that is true stays true in every refinement, so it is not
        evaluated again further down the branch.
        """
        ev = _Eval(self.lo, self.hi, self.free)
        out = True
        done = set(settled)
        for i, p in enumerate(self.parts):
            if i in settled:
                continue
            x = ev.formula(p, {})
            if x is False:
                return False, settled
            if x is None:
                out = None
            else:
                done.add(i)
        return out, frozenset(done)

    def run(self, k: int = 0, settled: frozenset = frozenset()) -> bool:
        self.nodes += 1
        if self.nodes > self.budget:
            raise OracleBudgetError(f"oracle search exceeds the budget of {self.budget} nodes")
        s, settled = self.status(settled)
        if s is True:
            return True
        if s is False or k == len(self.slots):
            return False
        rel, tup = self.slots[k]
        lo, hi = self.lo[rel], self.hi[rel]
        self.hi[rel] = hi - {tup}
        if self.run(k + 1, settled):
            return True
        self.hi[rel] = hi
        self.lo[rel] = lo | {tup}
        if self.run(k + 1, settled):
            return True
        self.lo[rel] = lo
        return False


def brute_force_solve(m: RelModel, budget: int = DEFAULT_ORACLE_BUDGET) -> OracleResult:
    """Decide the model by exhaustive search over its bounds.

    ``budget`` caps the number of search nodes visited; the search is
    deterministic, so the same model always yields the same witness.
    """
    lo = {r.name: _encode(m, m.lower_bound(r.name)) for r in m.relations}
    hi = {r.name: _encode(m, r.upper_bound) for r in m.relations}
    undecided = {n for n in lo if lo[n] != hi[n]}
    parts = list(conjuncts(m.formula))
    witness_lo = dict(lo)
    nodes = 0
    for group in _components(parts, undecided):
        group_parts = [parts[i] for i in group]
        used = _relations_in(And(tuple(group_parts)), set()) & undecided
        slots = [(r.name, t) for r in m.relations if r.name in used
                 for t in sorted(hi[r.name] - lo[r.name])]
        search = _Search(group_parts, dict(lo), dict(hi), slots, budget - nodes)
        found = search.run()
        nodes += search.nodes
        if not found:
            return OracleResult("UNSAT", None, nodes)
        for r in used:
            witness_lo[r] = search.lo[r]
    witness = {r.name: _decode(m, witness_lo[r.name]) for r in m.relations}
    if not evaluate(m, witness):  # the search only stops on a definite TRUE
        raise AssertionError("oracle produced a witness that does not satisfy the formula")
    return OracleResult("SAT", witness, nodes)
