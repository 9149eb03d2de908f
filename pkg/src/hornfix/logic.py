"""First-order syntax with predicate variables and a least-fixed-point former.

Terms and formulas are immutable trees.  On top of plain first-order
syntax the grammar admits:

* predicate-variable atoms ``X(t1, ..., tk)`` standing for an unknown
  relation, and
* ``LfpAtom`` nodes, each embedding a whole :class:`FixpointSystem` and
  denoting one component of its simultaneous least fixed point.

The module also provides the three syntactic workhorses everything else
builds on: polarity analysis of predicate variables, capture-avoiding
substitution (of individual variables by terms and of predicate
variables by parameterised formulas), and free-variable computation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .errors import ArityError, SignatureError

# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not self.name:
            raise ValueError("variable names must be non-empty")


@dataclass(frozen=True)
class Fn:
    """A function symbol applied to argument terms (constants have no args)."""

    name: str
    args: tuple["Term", ...] = ()


Term = Union[Var, Fn]


def term_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    out: set[str] = set()
    for a in t.args:
        out |= term_vars(a)
    return frozenset(out)


def term_subst(t: Term, mapping: Mapping[str, Term]) -> Term:
    if isinstance(t, Var):
        return mapping.get(t.name, t)
    if not t.args:
        return t
    return Fn(t.name, tuple(term_subst(a, mapping) for a in t.args))


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class PredicateVariable:
    """A named relation unknown with a fixed arity."""

    name: str
    arity: int

    def __post_init__(self):
        if not self.name:
            raise ValueError("predicate variable names must be non-empty")
        if self.arity < 0:
            raise ValueError("arity must be non-negative")

    def __call__(self, *args: Term) -> "VarAtom":
        return VarAtom(self, tuple(args))


@dataclass(frozen=True)
class Atom:
    """A base (interpreted) predicate applied to terms."""

    pred: str
    args: tuple[Term, ...] = ()


@dataclass(frozen=True)
class VarAtom:
    """A predicate-variable atom X(t1,...,tk)."""

    pvar: PredicateVariable
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        if len(self.args) != self.pvar.arity:
            raise ArityError(
                f"{self.pvar.name} has arity {self.pvar.arity}, got {len(self.args)} arguments"
            )


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    subs: tuple["Formula", ...]


@dataclass(frozen=True)
class Or:
    subs: tuple["Formula", ...]


@dataclass(frozen=True)
class Implies:
    premise: "Formula"
    conclusion: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class LfpAtom:
    """Membership in one component of a simultaneous least fixed point.

    ``system`` is closed with respect to predicate variables, so an
    LfpAtom behaves like a base atom from the outside: only its argument
    terms contribute free variables.
    """

    system: "FixpointSystem"
    index: int
    args: tuple[Term, ...]

    def __post_init__(self):
        if not 0 <= self.index < len(self.system.variables):
            raise ArityError(f"no component {self.index} in the fixpoint system")
        k = self.system.variables[self.index].arity
        if len(self.args) != k:
            raise ArityError(f"component {self.index} has arity {k}, got {len(self.args)} arguments")


Formula = Union[Atom, VarAtom, Eq, Top, Bot, Not, And, Or, Implies, Forall, Exists, LfpAtom]

TOP = Top()
BOT = Bot()


def conj(parts: Iterable[Formula]) -> Formula:
    """Conjunction with the obvious simplifications (drops ⊤, absorbs ⊥)."""
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Top):
            continue
        if isinstance(p, Bot):
            return BOT
        if isinstance(p, And):
            flat.extend(p.subs)
        else:
            flat.append(p)
    if not flat:
        return TOP
    if len(flat) == 1:
        return flat[0]
    return And(tuple(flat))


def disj(parts: Iterable[Formula]) -> Formula:
    """Disjunction with the obvious simplifications (drops ⊥, absorbs ⊤)."""
    flat: list[Formula] = []
    for p in parts:
        if isinstance(p, Bot):
            continue
        if isinstance(p, Top):
            return TOP
        if isinstance(p, Or):
            flat.extend(p.subs)
        else:
            flat.append(p)
    if not flat:
        return BOT
    if len(flat) == 1:
        return flat[0]
    return Or(tuple(flat))


def exists_all(names: Iterable[str], body: Formula) -> Formula:
    out = body
    for n in reversed(tuple(names)):
        out = Exists(n, out)
    return out


def forall_all(names: Iterable[str], body: Formula) -> Formula:
    out = body
    for n in reversed(tuple(names)):
        out = Forall(n, out)
    return out


# ---------------------------------------------------------------------------
# Signatures


@dataclass(frozen=True)
class Signature:
    """Declared function and base-predicate symbols with their arities."""

    functions: Mapping[str, int] = field(default_factory=dict)
    predicates: Mapping[str, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "functions", dict(self.functions))
        object.__setattr__(self, "predicates", dict(self.predicates))
        overlap = set(self.functions) & set(self.predicates)
        if overlap:
            raise SignatureError(f"symbols declared both function and predicate: {sorted(overlap)}")

    def check_term(self, t: Term) -> None:
        if isinstance(t, Var):
            return
        if t.name not in self.functions:
            raise SignatureError(f"undeclared function symbol {t.name!r}")
        if len(t.args) != self.functions[t.name]:
            raise ArityError(
                f"function {t.name!r} has arity {self.functions[t.name]}, got {len(t.args)}"
            )
        for a in t.args:
            self.check_term(a)

    def check_formula(self, phi: Formula) -> None:
        for node in walk(phi):
            if isinstance(node, Atom):
                if node.pred not in self.predicates:
                    raise SignatureError(f"undeclared predicate symbol {node.pred!r}")
                if len(node.args) != self.predicates[node.pred]:
                    raise ArityError(
                        f"predicate {node.pred!r} has arity {self.predicates[node.pred]},"
                        f" got {len(node.args)}"
                    )
                for a in node.args:
                    self.check_term(a)
            elif isinstance(node, (VarAtom, LfpAtom)):
                for a in node.args:
                    self.check_term(a)
            elif isinstance(node, Eq):
                self.check_term(node.left)
                self.check_term(node.right)


def walk(phi: Formula):
    """Yield every formula node, not descending into LfpAtom systems."""
    yield phi
    if isinstance(phi, Not):
        yield from walk(phi.sub)
    elif isinstance(phi, (And, Or)):
        for s in phi.subs:
            yield from walk(s)
    elif isinstance(phi, Implies):
        yield from walk(phi.premise)
        yield from walk(phi.conclusion)
    elif isinstance(phi, (Forall, Exists)):
        yield from walk(phi.body)


# ---------------------------------------------------------------------------
# Free variables and predicate variables


def free_individual_variables(phi: Formula) -> frozenset[str]:
    """Free individual variables; an LfpAtom contributes only its argument terms."""
    if isinstance(phi, (Top, Bot)):
        return frozenset()
    if isinstance(phi, (Atom, VarAtom, LfpAtom)):
        out: set[str] = set()
        for a in phi.args:
            out |= term_vars(a)
        return frozenset(out)
    if isinstance(phi, Eq):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Not):
        return free_individual_variables(phi.sub)
    if isinstance(phi, (And, Or)):
        out = set()
        for s in phi.subs:
            out |= free_individual_variables(s)
        return frozenset(out)
    if isinstance(phi, Implies):
        return free_individual_variables(phi.premise) | free_individual_variables(phi.conclusion)
    if isinstance(phi, (Forall, Exists)):
        return free_individual_variables(phi.body) - {phi.var}
    raise TypeError(f"not a formula: {phi!r}")


def predicate_variables(phi: Formula) -> frozenset[PredicateVariable]:
    """Predicate variables with a free occurrence (LfpAtom systems are closed)."""
    return frozenset(n.pvar for n in walk(phi) if isinstance(n, VarAtom))


def ordered_free_variables(phi: Formula) -> tuple[str, ...]:
    """Free individual variables in first-occurrence order (left to right)."""
    out: list[str] = []
    _ordered_free(phi, frozenset(), out)
    return tuple(out)


def _ordered_term_vars(t: Term, bound: frozenset, out: list[str]) -> None:
    if isinstance(t, Var):
        if t.name not in bound and t.name not in out:
            out.append(t.name)
        return
    for a in t.args:
        _ordered_term_vars(a, bound, out)


def _ordered_free(phi: Formula, bound: frozenset, out: list[str]) -> None:
    if isinstance(phi, (Top, Bot)):
        return
    if isinstance(phi, (Atom, VarAtom, LfpAtom)):
        for a in phi.args:
            _ordered_term_vars(a, bound, out)
    elif isinstance(phi, Eq):
        _ordered_term_vars(phi.left, bound, out)
        _ordered_term_vars(phi.right, bound, out)
    elif isinstance(phi, Not):
        _ordered_free(phi.sub, bound, out)
    elif isinstance(phi, (And, Or)):
        for s in phi.subs:
            _ordered_free(s, bound, out)
    elif isinstance(phi, Implies):
        _ordered_free(phi.premise, bound, out)
        _ordered_free(phi.conclusion, bound, out)
    elif isinstance(phi, (Forall, Exists)):
        _ordered_free(phi.body, bound | {phi.var}, out)
    else:
        raise TypeError(f"not a formula: {phi!r}")


# ---------------------------------------------------------------------------
# Polarity


class Polarity(enum.Enum):
    POSITIVE_ONLY = "positive-only"
    NEGATIVE_ONLY = "negative-only"
    BOTH = "both"
    ABSENT = "absent"


def _occurrences(x: PredicateVariable, phi: Formula) -> tuple[bool, bool]:
    """(occurs positively, occurs negatively) by structural recursion."""
    if isinstance(phi, VarAtom):
        return (phi.pvar == x, False)
    if isinstance(phi, (Atom, Eq, Top, Bot, LfpAtom)):
        return (False, False)
    if isinstance(phi, Not):
        p, n = _occurrences(x, phi.sub)
        return (n, p)
    if isinstance(phi, (And, Or)):
        p = n = False
        for s in phi.subs:
            sp, sn = _occurrences(x, s)
            p, n = p or sp, n or sn
        return (p, n)
    if isinstance(phi, Implies):
        pp, pn = _occurrences(x, phi.premise)
        cp, cn = _occurrences(x, phi.conclusion)
        return (cp or pn, cn or pp)
    if isinstance(phi, (Forall, Exists)):
        return _occurrences(x, phi.body)
    raise TypeError(f"not a formula: {phi!r}")


def polarity(x: PredicateVariable, phi: Formula) -> Polarity:
    p, n = _occurrences(x, phi)
    if p and n:
        return Polarity.BOTH
    if p:
        return Polarity.POSITIVE_ONLY
    if n:
        return Polarity.NEGATIVE_ONLY
    return Polarity.ABSENT


# ---------------------------------------------------------------------------
# Fixpoint systems


@dataclass(frozen=True)
class FixpointSystem:
    """A simultaneous fixpoint definition X_j(params_j) := formulas_j.

    Every component formula may mention only the system's own predicate
    variables, each positively, and no individual variables beyond its
    own parameter tuple.  These conditions make the induced operator on
    relation tuples monotone, so the least fixed point exists.
    """

    variables: tuple[PredicateVariable, ...]
    params: tuple[tuple[str, ...], ...]
    formulas: tuple[Formula, ...]

    def __post_init__(self):
        n = len(self.variables)
        if len(self.params) != n or len(self.formulas) != n:
            raise ArityError("variables, params and formulas must align")
        names = [v.name for v in self.variables]
        if len(set(names)) != n:
            raise SignatureError(f"duplicate predicate variables: {names}")
        own = set(self.variables)
        for v, ps, phi in zip(self.variables, self.params, self.formulas):
            if len(ps) != v.arity:
                raise ArityError(f"{v.name}: parameter tuple must have length {v.arity}")
            if len(set(ps)) != len(ps):
                raise ArityError(f"{v.name}: parameter names must be distinct")
            foreign = predicate_variables(phi) - own
            if foreign:
                raise SignatureError(
                    f"{v.name}: foreign predicate variables {sorted(f.name for f in foreign)}"
                )
            stray = free_individual_variables(phi) - set(ps)
            if stray:
                raise SignatureError(f"{v.name}: free variables {sorted(stray)} outside parameters")
        for phi in self.formulas:
            for v in self.variables:
                if polarity(v, phi) in (Polarity.NEGATIVE_ONLY, Polarity.BOTH):
                    raise SignatureError(f"{v.name} occurs negatively in a component formula")

    def index_of(self, x: PredicateVariable) -> int:
        return self.variables.index(x)

    def atom(self, index: int, args: tuple[Term, ...]) -> LfpAtom:
        return LfpAtom(self, index, args)


# ---------------------------------------------------------------------------
# Substitution

# Deterministic fresh names: base, base_1, base_2, ... first one not taken.


def fresh_name(base: str, taken: Iterable[str]) -> str:
    taken = set(taken)
    if base not in taken:
        return base
    i = 1
    while f"{base}_{i}" in taken:
        i += 1
    return f"{base}_{i}"


def substitute_terms(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    """Replace free individual variables by terms, renaming binders to avoid capture."""
    mapping = {k: v for k, v in mapping.items() if v != Var(k)}
    if not mapping:
        return phi
    return _subst_terms(phi, mapping)


def _subst_terms(phi: Formula, mapping: Mapping[str, Term]) -> Formula:
    if isinstance(phi, (Top, Bot)):
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(term_subst(a, mapping) for a in phi.args))
    if isinstance(phi, VarAtom):
        return VarAtom(phi.pvar, tuple(term_subst(a, mapping) for a in phi.args))
    if isinstance(phi, LfpAtom):
        return LfpAtom(phi.system, phi.index, tuple(term_subst(a, mapping) for a in phi.args))
    if isinstance(phi, Eq):
        return Eq(term_subst(phi.left, mapping), term_subst(phi.right, mapping))
    if isinstance(phi, Not):
        return Not(_subst_terms(phi.sub, mapping))
    if isinstance(phi, And):
        return And(tuple(_subst_terms(s, mapping) for s in phi.subs))
    if isinstance(phi, Or):
        return Or(tuple(_subst_terms(s, mapping) for s in phi.subs))
    if isinstance(phi, Implies):
        return Implies(_subst_terms(phi.premise, mapping), _subst_terms(phi.conclusion, mapping))
    if isinstance(phi, (Forall, Exists)):
        ctor = Forall if isinstance(phi, Forall) else Exists
        inner = {k: v for k, v in mapping.items() if k != phi.var}
        relevant = {k: v for k, v in inner.items() if k in free_individual_variables(phi.body)}
        if not relevant:
            return ctor(phi.var, phi.body)
        incoming: set[str] = set()
        for v in relevant.values():
            incoming |= term_vars(v)
        if phi.var in incoming:
            taken = incoming | free_individual_variables(phi.body) | set(relevant)
            new = fresh_name(phi.var, taken)
            body = _subst_terms(phi.body, {phi.var: Var(new)})
            return ctor(new, _subst_terms(body, relevant))
        return ctor(phi.var, _subst_terms(phi.body, relevant))
    raise TypeError(f"not a formula: {phi!r}")


PredicateSubstitution = Mapping[PredicateVariable, tuple[tuple[str, ...], Formula]]


def substitute(phi: Formula, sigma: PredicateSubstitution) -> Formula:
    """Simultaneously replace predicate-variable atoms by parameterised formulas.

    Each entry maps X to a pair (parameter tuple, body); an atom
    X(t1,...,tk) becomes the body with parameters replaced by the
    argument terms.  Bodies are not re-scanned for substituted
    variables, and binders in ``phi`` that would capture a body's free
    variables are renamed first.
    """
    for x, (ps, _) in sigma.items():
        if len(ps) != x.arity:
            raise ArityError(f"{x.name}: expected {x.arity} parameters, got {len(ps)}")
    # Variables that may enter free via a substituted body.
    loose: set[str] = set()
    for _, (ps, body) in sigma.items():
        loose |= free_individual_variables(body) - set(ps)
    return _subst_pred(phi, dict(sigma), frozenset(loose))


def _subst_pred(phi: Formula, sigma: dict, loose: frozenset[str]) -> Formula:
    if isinstance(phi, (Top, Bot, Atom, Eq, LfpAtom)):
        return phi
    if isinstance(phi, VarAtom):
        entry = sigma.get(phi.pvar)
        if entry is None:
            return phi
        params, body = entry
        return substitute_terms(body, dict(zip(params, phi.args)))
    if isinstance(phi, Not):
        return Not(_subst_pred(phi.sub, sigma, loose))
    if isinstance(phi, And):
        return And(tuple(_subst_pred(s, sigma, loose) for s in phi.subs))
    if isinstance(phi, Or):
        return Or(tuple(_subst_pred(s, sigma, loose) for s in phi.subs))
    if isinstance(phi, Implies):
        return Implies(
            _subst_pred(phi.premise, sigma, loose), _subst_pred(phi.conclusion, sigma, loose)
        )
    if isinstance(phi, (Forall, Exists)):
        ctor = Forall if isinstance(phi, Forall) else Exists
        if phi.var in loose and any(
            n.pvar in sigma for n in walk(phi.body) if isinstance(n, VarAtom)
        ):
            taken = loose | free_individual_variables(phi.body)
            new = fresh_name(phi.var, taken)
            body = substitute_terms(phi.body, {phi.var: Var(new)})
            return ctor(new, _subst_pred(body, sigma, loose))
        return ctor(phi.var, _subst_pred(phi.body, sigma, loose))
    raise TypeError(f"not a formula: {phi!r}")


def dual_substitution(variables: Iterable[PredicateVariable]) -> dict:
    """The substitution sending every X to the negation of a fresh-parameter atom of X."""
    sigma = {}
    for x in variables:
        params = tuple(f"_d{i}" for i in range(x.arity))
        sigma[x] = (params, Not(VarAtom(x, tuple(Var(p) for p in params))))
    return sigma


# ---------------------------------------------------------------------------
# Alpha equivalence


def alpha_equal(a: Formula, b: Formula) -> bool:
    """Structural equality up to renaming of bound individual variables."""
    return _alpha(a, b, {}, {}, 0)


def _alpha_term(s: Term, t: Term, la: dict, lb: dict) -> bool:
    if isinstance(s, Var) and isinstance(t, Var):
        sa, sb = la.get(s.name), lb.get(t.name)
        if sa is None and sb is None:
            return s.name == t.name
        return sa is not None and sa == sb
    if isinstance(s, Fn) and isinstance(t, Fn):
        return (
            s.name == t.name
            and len(s.args) == len(t.args)
            and all(_alpha_term(x, y, la, lb) for x, y in zip(s.args, t.args))
        )
    return False


def _alpha(a: Formula, b: Formula, la: dict, lb: dict, depth: int) -> bool:
    if type(a) is not type(b):
        return False
    if isinstance(a, (Top, Bot)):
        return True
    if isinstance(a, Atom):
        return a.pred == b.pred and len(a.args) == len(b.args) and all(
            _alpha_term(x, y, la, lb) for x, y in zip(a.args, b.args)
        )
    if isinstance(a, VarAtom):
        return a.pvar == b.pvar and all(_alpha_term(x, y, la, lb) for x, y in zip(a.args, b.args))
    if isinstance(a, LfpAtom):
        return (
            a.system == b.system
            and a.index == b.index
            and all(_alpha_term(x, y, la, lb) for x, y in zip(a.args, b.args))
        )
    if isinstance(a, Eq):
        return _alpha_term(a.left, b.left, la, lb) and _alpha_term(a.right, b.right, la, lb)
    if isinstance(a, Not):
        return _alpha(a.sub, b.sub, la, lb, depth)
    if isinstance(a, (And, Or)):
        return len(a.subs) == len(b.subs) and all(
            _alpha(x, y, la, lb, depth) for x, y in zip(a.subs, b.subs)
        )
    if isinstance(a, Implies):
        return _alpha(a.premise, b.premise, la, lb, depth) and _alpha(
            a.conclusion, b.conclusion, la, lb, depth
        )
    if isinstance(a, (Forall, Exists)):
        la2 = dict(la)
        lb2 = dict(lb)
        la2[a.var] = depth
        lb2[b.var] = depth
        return _alpha(a.body, b.body, la2, lb2, depth + 1)
    raise TypeError(f"not a formula: {a!r}")
