"""Finite structures and Tarski semantics, including simultaneous least fixed points.

A :class:`FiniteStructure` is an explicit interpretation: an ordered
finite domain, total function tables, and base relation tables.
Formulas are evaluated by structural recursion with quantifiers ranging
over the domain; ``LfpAtom`` nodes are evaluated by solving their
embedded fixpoint system with :func:`lfp_solve` (memoized per
structure/system pair) and testing tuple membership.

``lfp_solve`` iterates the induced operator simultaneously from the
empty tuple (Jacobi-style: every component is recomputed from the
previous stage) and stops when a stage repeats.  The chain is ascending
in a finite lattice, so termination is guaranteed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Any, Iterable, Mapping

from .errors import ArityError, EvalError, SignatureError
from .logic import (
    And,
    Atom,
    Bot,
    Eq,
    Exists,
    FixpointSystem,
    Fn,
    Forall,
    Formula,
    Implies,
    LfpAtom,
    Not,
    Or,
    PredicateVariable,
    Signature,
    Term,
    Top,
    Var,
    VarAtom,
)

Valuation = dict  # individual variable name -> domain element


@dataclass(frozen=True)
class RelationTable:
    """A finite k-ary relation: a set of k-tuples over some domain."""

    arity: int
    tuples: frozenset

    def __post_init__(self):
        for t in self.tuples:
            if len(t) != self.arity:
                raise ArityError(f"tuple {t!r} does not have arity {self.arity}")

    @staticmethod
    def empty(arity: int) -> "RelationTable":
        return RelationTable(arity, frozenset())

    @staticmethod
    def of(arity: int, tuples: Iterable) -> "RelationTable":
        return RelationTable(arity, frozenset(tuple(t) for t in tuples))

    def __contains__(self, t) -> bool:
        return tuple(t) in self.tuples

    def __len__(self) -> int:
        return len(self.tuples)

    def issubset(self, other: "RelationTable") -> bool:
        return self.tuples <= other.tuples

    def union(self, other: "RelationTable") -> "RelationTable":
        return RelationTable(self.arity, self.tuples | other.tuples)


class FiniteStructure:
    """An explicit finite interpretation of a signature.

    ``domain`` is an ordered tuple of distinct, opaque elements;
    ``functions`` maps each function symbol to a total table from
    argument tuples to elements; ``relations`` maps each base predicate
    to a :class:`RelationTable`.
    """

    def __init__(self, domain: Iterable, functions: Mapping = (), relations: Mapping = ()):
        self.domain = tuple(domain)
        if not self.domain:
            raise SignatureError("the domain must be non-empty")
        if len(set(self.domain)) != len(self.domain):
            raise SignatureError("domain elements must be distinct")
        self._index = {e: i for i, e in enumerate(self.domain)}
        self.functions: dict[str, dict[tuple, Any]] = {}
        for name, table in dict(functions).items():
            table = {tuple(k): v for k, v in dict(table).items()}
            arities = {len(k) for k in table}
            if len(arities) > 1:
                raise ArityError(f"function {name!r} has mixed-arity entries")
            arity = arities.pop() if arities else 0
            expected = len(self.domain) ** arity
            if len(table) != expected:
                raise SignatureError(f"function table for {name!r} is not total")
            for k, v in table.items():
                if any(e not in self._index for e in k) or v not in self._index:
                    raise SignatureError(f"function {name!r} mentions elements outside the domain")
            self.functions[name] = table
        self.relations: dict[str, RelationTable] = {}
        for name, rel in dict(relations).items():
            if not isinstance(rel, RelationTable):
                tuples = [tuple(t) for t in rel]
                arities = {len(t) for t in tuples}
                if len(arities) > 1:
                    raise ArityError(f"relation {name!r} has mixed-arity tuples")
                rel = RelationTable(arities.pop() if arities else 0, frozenset(tuples))
            for t in rel.tuples:
                if any(e not in self._index for e in t):
                    raise SignatureError(f"relation {name!r} mentions elements outside the domain")
            self.relations[name] = rel
        self._lfp_cache: dict[FixpointSystem, LfpResult] = {}

    @property
    def signature(self) -> Signature:
        return Signature(
            functions={n: (len(next(iter(t))) if t else 0) for n, t in self.functions.items()},
            predicates={n: r.arity for n, r in self.relations.items()},
        )

    def index(self, element) -> int:
        return self._index[element]

    def sort_tuples(self, tuples: Iterable) -> list:
        return sorted(tuples, key=lambda t: tuple(self._index[e] for e in t))

    def all_tuples(self, arity: int):
        return itertools.product(self.domain, repeat=arity)

    def full_table(self, arity: int) -> RelationTable:
        return RelationTable(arity, frozenset(self.all_tuples(arity)))

    def complement(self, table: RelationTable) -> RelationTable:
        return RelationTable(table.arity, frozenset(self.all_tuples(table.arity)) - table.tuples)


# ---------------------------------------------------------------------------
# Evaluation


def term_value(structure: FiniteStructure, valuation: Mapping, t: Term):
    if isinstance(t, Var):
        try:
            return valuation[t.name]
        except KeyError:
            raise EvalError(f"unbound variable {t.name!r}") from None
    table = structure.functions.get(t.name)
    if table is None:
        raise EvalError(f"no table for function symbol {t.name!r}")
    args = tuple(term_value(structure, valuation, a) for a in t.args)
    try:
        return table[args]
    except KeyError:
        raise EvalError(f"function {t.name!r} undefined on {args!r}") from None


def evaluate(
    structure: FiniteStructure,
    valuation: Mapping,
    rho: Mapping[PredicateVariable, RelationTable],
    phi: Formula,
) -> bool:
    """Satisfaction of ``phi`` under the valuation and relation assignment."""
    return _eval(structure, dict(valuation), dict(rho), phi)


def _eval(structure, valuation, rho, phi) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Bot):
        return False
    if isinstance(phi, Atom):
        rel = structure.relations.get(phi.pred)
        if rel is None:
            raise EvalError(f"no table for predicate symbol {phi.pred!r}")
        if rel.arity != len(phi.args):
            raise ArityError(f"predicate {phi.pred!r} arity mismatch")
        return tuple(term_value(structure, valuation, a) for a in phi.args) in rel
    if isinstance(phi, VarAtom):
        rel = rho.get(phi.pvar)
        if rel is None:
            raise EvalError(f"unbound predicate variable {phi.pvar.name!r}")
        if rel.arity != phi.pvar.arity:
            raise ArityError(f"assignment for {phi.pvar.name!r} has the wrong arity")
        return tuple(term_value(structure, valuation, a) for a in phi.args) in rel
    if isinstance(phi, LfpAtom):
        result = lfp_solve(structure, phi.system)
        args = tuple(term_value(structure, valuation, a) for a in phi.args)
        return args in result.tables[phi.index]
    if isinstance(phi, Eq):
        return term_value(structure, valuation, phi.left) == term_value(
            structure, valuation, phi.right
        )
    if isinstance(phi, Not):
        return not _eval(structure, valuation, rho, phi.sub)
    if isinstance(phi, And):
        return all(_eval(structure, valuation, rho, s) for s in phi.subs)
    if isinstance(phi, Or):
        return any(_eval(structure, valuation, rho, s) for s in phi.subs)
    if isinstance(phi, Implies):
        return (not _eval(structure, valuation, rho, phi.premise)) or _eval(
            structure, valuation, rho, phi.conclusion
        )
    if isinstance(phi, (Forall, Exists)):
        want_all = isinstance(phi, Forall)
        saved = valuation.get(phi.var, _MISSING)
        try:
            for e in structure.domain:
                valuation[phi.var] = e
                holds = _eval(structure, valuation, rho, phi.body)
                if want_all and not holds:
                    return False
                if not want_all and holds:
                    return True
            return want_all
        finally:
            if saved is _MISSING:
                valuation.pop(phi.var, None)
            else:
                valuation[phi.var] = saved
    raise TypeError(f"not a formula: {phi!r}")


_MISSING = object()


# ---------------------------------------------------------------------------
# The induced operator and its least fixed point


@dataclass(frozen=True)
class LfpResult:
    tables: tuple[RelationTable, ...]
    iterations: int


def apply_F(
    structure: FiniteStructure,
    system: FixpointSystem,
    tables: tuple[RelationTable, ...],
) -> tuple[RelationTable, ...]:
    """One simultaneous application of the operator induced by the system."""
    if len(tables) != len(system.variables):
        raise ArityError("relation tuple does not match the system")
    for v, t in zip(system.variables, tables):
        if t.arity != v.arity:
            raise ArityError(f"assignment for {v.name!r} has the wrong arity")
    rho = dict(zip(system.variables, tables))
    out = []
    for j, v in enumerate(system.variables):
        out.append(_component_image(structure, system, j, rho))
    return tuple(out)


def _component_image(structure, system, j, rho) -> RelationTable:
    params = system.params[j]
    phi = system.formulas[j]
    arity = system.variables[j].arity
    plan = _head_shape(phi, params)
    if plan is not None and arity > 0:
        ys, disjuncts = plan
        found: set[tuple] = set()
        valuation: Valuation = {}
        for assignment in itertools.product(structure.domain, repeat=len(ys)):
            for name, e in zip(ys, assignment):
                valuation[name] = e
            for rest, heads in disjuncts:
                if all(_eval(structure, valuation, rho, r) for r in rest):
                    found.add(tuple(term_value(structure, valuation, s) for s in heads))
        return RelationTable(arity, frozenset(found))
    found = set()
    valuation = {}
    for candidate in structure.all_tuples(arity):
        for name, e in zip(params, candidate):
            valuation[name] = e
        if _eval(structure, valuation, rho, phi):
            found.add(candidate)
    return RelationTable(arity, frozenset(found))


def _head_shape(phi: Formula, params: tuple[str, ...]):
    """Detect the head-defining shape ∃ys (... ∨ (rest ∧ params = s̄) ∨ ...).

    When each disjunct ends in one equality per parameter (in order,
    parameters appearing nowhere else), the component image can be
    computed by enumerating the existential variables once and
    collecting head tuples, instead of testing every candidate tuple.
    Returns (ys, [(rest-conjuncts, head-terms), ...]) or None.
    """
    from .logic import free_individual_variables, term_vars

    pset = set(params)
    ys: list[str] = []
    while isinstance(phi, Exists):
        if phi.var in pset:
            return None
        ys.append(phi.var)
        phi = phi.body
    disjuncts = phi.subs if isinstance(phi, Or) else (phi,)
    plan = []
    for d in disjuncts:
        parts = list(d.subs) if isinstance(d, And) else [d]
        if len(parts) < len(params):
            return None
        rest, eqs = parts[: len(parts) - len(params)], parts[len(parts) - len(params) :]
        heads = []
        for p, eq in zip(params, eqs):
            if not (isinstance(eq, Eq) and eq.left == Var(p)):
                return None
            if term_vars(eq.right) & pset:
                return None
            heads.append(eq.right)
        for r in rest:
            if free_individual_variables(r) & pset:
                return None
        plan.append((tuple(rest), tuple(heads)))
    return (tuple(ys), tuple(plan))


def lfp_solve(structure: FiniteStructure, system: FixpointSystem) -> LfpResult:
    """Least fixed point by the ascending Kleene chain from the empty tuple.

    The reported iteration count is the number of applications that
    changed the stage; the bound 1 + Σ_j |domain|^{k_j} always holds.
    """
    cached = structure._lfp_cache.get(system)
    if cached is not None:
        return cached
    tables = tuple(RelationTable.empty(v.arity) for v in system.variables)
    iterations = 0
    while True:
        nxt = apply_F(structure, system, tables)
        if nxt == tables:
            break
        tables = nxt
        iterations += 1
    result = LfpResult(tables, iterations)
    structure._lfp_cache[system] = result
    return result


# ---------------------------------------------------------------------------
# JSON interchange

# Schema: {"domain": [...],
#          "functions": {name: nested array indexed by domain position, or scalar},
#          "relations": {name: [[elem, ...], ...]}}


def _nest_to_table(domain, nested, name: str) -> dict:
    def depth(x) -> int:
        d = 0
        while isinstance(x, list):
            if not x:
                raise SignatureError(f"function {name!r}: empty table row")
            d += 1
            x = x[0]
        return d

    arity = depth(nested)
    table = {}

    def fill(prefix: tuple, sub, remaining: int):
        if remaining == 0:
            table[prefix] = sub
            return
        if not isinstance(sub, list) or len(sub) != len(domain):
            raise SignatureError(f"function {name!r}: table shape does not match the domain")
        for e, branch in zip(domain, sub):
            fill(prefix + (e,), branch, remaining - 1)

    fill((), nested, arity)
    return table


def _table_to_nest(domain, table: dict):
    if not table:
        return None
    arity = len(next(iter(table)))
    if arity == 0:
        return table[()]

    def build(prefix: tuple, remaining: int):
        if remaining == 0:
            return table[prefix]
        return [build(prefix + (e,), remaining - 1) for e in domain]

    return build((), arity)


def structure_to_dict(structure: FiniteStructure) -> dict:
    return {
        "domain": list(structure.domain),
        "functions": {
            name: _table_to_nest(structure.domain, table)
            for name, table in sorted(structure.functions.items())
        },
        "relations": {
            name: [list(t) for t in structure.sort_tuples(rel.tuples)]
            for name, rel in sorted(structure.relations.items())
        },
    }


def structure_from_dict(data: Mapping) -> FiniteStructure:
    domain = data.get("domain")
    if not isinstance(domain, list) or not domain:
        raise SignatureError("structure JSON needs a non-empty 'domain' list")
    functions = {
        name: _nest_to_table(domain, nested, name)
        for name, nested in dict(data.get("functions", {})).items()
    }
    return FiniteStructure(domain, functions, dict(data.get("relations", {})))


def load_structure(path: str) -> FiniteStructure:
    with open(path, "r", encoding="utf-8") as fh:
        return structure_from_dict(json.load(fh))


def dump_structure(structure: FiniteStructure, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(structure_to_dict(structure), fh, indent=2, sort_keys=False)
        fh.write("\n")
