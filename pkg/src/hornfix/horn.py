"""Constrained Horn clause systems and their canonical extremal solutions.

A clause is kept in the normal form ``constraint ∧ body → heads`` where
the body and heads are predicate-variable atoms and the constraint is a
predicate-variable-free formula.  Horn clauses have at most one head
atom, dual Horn clauses at most one body atom, linear clauses both.
The three Horn clause kinds are

* base (B): empty body, one head atom,
* induction (I): non-empty body, one head atom,
* end (E): no head (the conclusion is falsum).

``build_phi`` turns the base and induction clauses of a system into a
simultaneous fixpoint definition; its least fixed point is the minimal
solution, and complementing the least fixed point of the dualized
system gives the maximal solution of a dual Horn system.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

from .errors import ArityError, NotDualizable, NotHorn, NotLinear, SignatureError
from .logic import (
    BOT,
    TOP,
    And,
    Bot,
    Eq,
    FixpointSystem,
    Formula,
    Implies,
    LfpAtom,
    Not,
    Or,
    PredicateVariable,
    Top,
    Var,
    VarAtom,
    conj,
    disj,
    exists_all,
    ordered_free_variables,
    predicate_variables,
    walk,
)
from .structures import FiniteStructure, RelationTable, evaluate, lfp_solve
from .sexpr import formula_to_sexpr


@dataclass(frozen=True)
class Clause:
    """``constraint ∧ body → heads``; an empty head tuple means falsum."""

    constraint: Formula
    body: tuple[VarAtom, ...] = ()
    heads: tuple[VarAtom, ...] = ()

    def __post_init__(self):
        for node in walk(self.constraint):
            if isinstance(node, VarAtom):
                raise NotHorn("predicate variable inside the constraint")

    @property
    def kind(self) -> str:
        """'B', 'I' or 'E' (meaningful for Horn clauses)."""
        if not self.heads:
            return "E"
        return "I" if self.body else "B"

    def free_variables(self) -> tuple[str, ...]:
        out: list[str] = []
        for name in ordered_free_variables(self.constraint):
            if name not in out:
                out.append(name)
        for atom in self.body + self.heads:
            for name in ordered_free_variables(atom):
                if name not in out:
                    out.append(name)
        return tuple(out)

    def variables_used(self) -> tuple[PredicateVariable, ...]:
        seen: list[PredicateVariable] = []
        for atom in self.body + self.heads:
            if atom.pvar not in seen:
                seen.append(atom.pvar)
        return tuple(seen)

    def to_formula(self) -> Formula:
        premise = conj([self.constraint, *self.body])
        conclusion = disj(list(self.heads))
        if isinstance(premise, Top):
            return conclusion
        return Implies(premise, conclusion)

    def render(self) -> str:
        return formula_to_sexpr(self.to_formula())


def normalize_clause(phi: Union[Formula, Clause]) -> Clause:
    """Normalize an implication (or bare fact) into clause form.

    Conjunctive premises are flattened, predicate atoms split from the
    constraint, and a first-order (sub)conclusion is folded into the
    constraint by negation, so ``φ → ψ`` with first-order ψ becomes the
    end clause ``φ ∧ ¬ψ → ⊥``.
    """
    if isinstance(phi, Clause):
        return phi
    if isinstance(phi, Implies):
        premise, conclusion = phi.premise, phi.conclusion
    else:
        premise, conclusion = TOP, phi

    body: list[VarAtom] = []
    constraint_parts: list[Formula] = []
    for part in _conjuncts(premise):
        if isinstance(part, VarAtom):
            body.append(part)
        elif isinstance(part, Not) and isinstance(part.sub, VarAtom):
            raise NotHorn("negated predicate atom in the body")
        elif predicate_variables(part):
            raise NotHorn("predicate variable inside the constraint")
        else:
            constraint_parts.append(part)

    heads: list[VarAtom] = []
    for part in _disjuncts(conclusion):
        if isinstance(part, VarAtom):
            heads.append(part)
        elif isinstance(part, Bot):
            continue
        elif predicate_variables(part):
            raise NotHorn("conclusion mixes predicate variables into a compound formula")
        else:
            constraint_parts.append(Not(part))
    return Clause(conj(constraint_parts), tuple(body), tuple(heads))


def _conjuncts(phi: Formula) -> list[Formula]:
    if isinstance(phi, And):
        out: list[Formula] = []
        for s in phi.subs:
            out.extend(_conjuncts(s))
        return out
    if isinstance(phi, Top):
        return []
    return [phi]


def _disjuncts(phi: Formula) -> list[Formula]:
    if isinstance(phi, Or):
        out: list[Formula] = []
        for s in phi.subs:
            out.extend(_disjuncts(s))
        return out
    if isinstance(phi, Bot):
        return []
    return [phi]


def _collect_variables(clauses: Iterable[Clause]) -> tuple[PredicateVariable, ...]:
    seen: list[PredicateVariable] = []
    for c in clauses:
        for pv in c.variables_used():
            if pv not in seen:
                seen.append(pv)
    return tuple(seen)


@dataclass(frozen=True)
class HornSystem:
    """A Horn clause set partitioned into base/induction/end clauses."""

    variables: tuple[PredicateVariable, ...]
    clauses: tuple[Clause, ...]

    def __post_init__(self):
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise SignatureError(f"duplicate predicate variables: {names}")
        declared = set(self.variables)
        for i, c in enumerate(self.clauses):
            if len(c.heads) > 1:
                raise NotHorn(f"clause {i} has a disjunctive head")
            for atom in c.body + c.heads:
                if atom.pvar not in declared:
                    raise SignatureError(f"clause {i}: undeclared predicate variable {atom.pvar.name!r}")

    def base_indices(self, j: int) -> tuple[int, ...]:
        v = self.variables[j]
        return tuple(
            i for i, c in enumerate(self.clauses) if c.kind == "B" and c.heads[0].pvar == v
        )

    def induction_indices(self, j: int) -> tuple[int, ...]:
        v = self.variables[j]
        return tuple(
            i for i, c in enumerate(self.clauses) if c.kind == "I" and c.heads[0].pvar == v
        )

    def end_indices(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.clauses) if c.kind == "E")


def classify(
    clauses: Sequence[Union[Formula, Clause]],
    variables: Optional[Sequence[PredicateVariable]] = None,
) -> HornSystem:
    """Normalize and partition a clause list into a Horn system.

    Raises :class:`NotHorn` for disjunctive heads, negated body atoms,
    or predicate variables inside constraints.  When ``variables`` is
    omitted the declaration list is collected from the clauses in first
    occurrence order.
    """
    normal = tuple(normalize_clause(c) for c in clauses)
    if variables is None:
        variables = _collect_variables(normal)
    return HornSystem(tuple(variables), normal)


def is_linear(system: Union[HornSystem, Sequence[Union[Formula, Clause]]]) -> bool:
    """True iff every clause has at most one body atom and at most one head atom."""
    clauses = system.clauses if isinstance(system, HornSystem) else [normalize_clause(c) for c in system]
    return all(len(c.body) <= 1 and len(c.heads) <= 1 for c in clauses)


# ---------------------------------------------------------------------------
# The canonical fixpoint system


def build_phi(system: HornSystem) -> FixpointSystem:
    """The simultaneous fixpoint definition extracted from base/induction clauses.

    For each variable the defining formula is an existential closure
    (over the union of the contributing clauses' free variables) of one
    disjunct per clause: its constraint, its body atoms, and one
    equality per argument position binding the fresh parameter tuple to
    the clause's head arguments.  No contributing clauses yields falsum.
    """
    params_per_var: list[tuple[str, ...]] = []
    formulas: list[Formula] = []
    for j, v in enumerate(system.variables):
        indices = list(system.base_indices(j)) + list(system.induction_indices(j))
        ys: list[str] = []
        for i in indices:
            for name in system.clauses[i].free_variables():
                if name not in ys:
                    ys.append(name)
        taken = set(ys)
        params: list[str] = []
        counter = 0
        while len(params) < v.arity:
            cand = f"_arg{counter}"
            counter += 1
            if cand not in taken:
                params.append(cand)
        disjuncts: list[Formula] = []
        for i in indices:
            c = system.clauses[i]
            eqs = [Eq(Var(p), s) for p, s in zip(params, c.heads[0].args)]
            disjuncts.append(conj([c.constraint, *c.body, *eqs]))
        body = disj(disjuncts)
        formulas.append(exists_all(ys, body) if disjuncts else BOT)
        params_per_var.append(tuple(params))
    return FixpointSystem(system.variables, tuple(params_per_var), tuple(formulas))


# ---------------------------------------------------------------------------
# Dualization


def dualize(
    system: Union[HornSystem, Sequence[Union[Formula, Clause]]],
) -> tuple[Clause, ...]:
    """Swap body and head atoms of every clause.

    Substituting the negation of every predicate variable and
    renormalizing into implication form interchanges the two atom
    lists, so a Horn clause list becomes dual Horn and vice versa with
    base and end clauses trading places.
    """
    clauses = (
        system.clauses
        if isinstance(system, HornSystem)
        else tuple(normalize_clause(c) for c in system)
    )
    horn = all(len(c.heads) <= 1 for c in clauses)
    dual = all(len(c.body) <= 1 for c in clauses)
    if not (horn or dual):
        raise NotDualizable("clause set is neither Horn nor dual Horn")
    return tuple(Clause(c.constraint, c.heads, c.body) for c in clauses)


# ---------------------------------------------------------------------------
# Clause satisfaction and solution reports


def clause_violation(
    structure: FiniteStructure,
    clause: Clause,
    tables: dict,
) -> Optional[dict]:
    """A valuation witnessing failure of the clause under the assignment, or None."""
    import itertools

    free = clause.free_variables()
    rho = tables
    for values in itertools.product(structure.domain, repeat=len(free)):
        valuation = dict(zip(free, values))
        if not evaluate(structure, valuation, rho, clause.constraint):
            continue
        if not all(
            evaluate(structure, valuation, rho, atom) for atom in clause.body
        ):
            continue
        if not any(evaluate(structure, valuation, rho, atom) for atom in clause.heads):
            return valuation
    return None


class InterpolantVerdict(enum.Enum):
    INSIDE = "inside"
    BELOW_MU = "below-mu-violation"
    ABOVE_NU = "above-nu-violation"


@dataclass(frozen=True)
class SolutionReport:
    """Canonical extremal solution of a clause set over one structure."""

    kind: str  # "min" or "max"
    variables: tuple[PredicateVariable, ...]
    tables: tuple[RelationTable, ...]
    system: FixpointSystem  # formula-level witness (of the dual system for "max")
    clauses: tuple[Clause, ...]
    satisfied: tuple[bool, ...]
    violations: tuple[tuple[int, dict], ...]
    iterations: int

    @property
    def satisfies_all(self) -> bool:
        return all(self.satisfied)

    @property
    def violated_indices(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.violations)

    def table(self, name: str) -> RelationTable:
        for v, t in zip(self.variables, self.tables):
            if v.name == name:
                return t
        raise KeyError(name)

    def assignment(self) -> dict:
        return dict(zip(self.variables, self.tables))

    def witness(self, j: int) -> tuple[tuple[str, ...], Formula]:
        """The j-th solution component as a parameterised fixpoint formula."""
        v = self.variables[j]
        params = tuple(f"v{i}" for i in range(v.arity))
        atom = LfpAtom(self.system, j, tuple(Var(p) for p in params))
        return (params, atom if self.kind == "min" else Not(atom))


def _check_clauses(structure, clauses, assignment):
    satisfied = []
    violations = []
    for i, c in enumerate(clauses):
        witness = clause_violation(structure, c, assignment)
        satisfied.append(witness is None)
        if witness is not None:
            violations.append((i, witness))
    return tuple(satisfied), tuple(violations)


def solve_min(structure: FiniteStructure, system: HornSystem) -> SolutionReport:
    """Minimal solution: the least fixed point of the extracted system.

    The equation holds in the structure iff the returned assignment
    satisfies every clause; base and induction clauses always hold, so
    only end clauses can appear among the violations.
    """
    phi = build_phi(system)
    result = lfp_solve(structure, phi)
    assignment = dict(zip(system.variables, result.tables))
    satisfied, violations = _check_clauses(structure, system.clauses, assignment)
    return SolutionReport(
        kind="min",
        variables=system.variables,
        tables=result.tables,
        system=phi,
        clauses=system.clauses,
        satisfied=satisfied,
        violations=violations,
        iterations=result.iterations,
    )


def solve_max(
    structure: FiniteStructure,
    clauses: Sequence[Union[Formula, Clause]],
    variables: Optional[Sequence[PredicateVariable]] = None,
) -> SolutionReport:
    """Maximal solution of a dual Horn clause set.

    Dualizes to a Horn system, solves for its least fixed point, and
    complements each component; the input clauses are then checked
    under that assignment.
    """
    normal = tuple(normalize_clause(c) for c in clauses)
    if any(len(c.body) > 1 for c in normal):
        raise NotDualizable("a clause has more than one body atom; not dual Horn")
    if variables is None:
        variables = _collect_variables(normal)
    dual_system = HornSystem(tuple(variables), dualize(normal))
    phi = build_phi(dual_system)
    result = lfp_solve(structure, phi)
    tables = tuple(structure.complement(t) for t in result.tables)
    assignment = dict(zip(dual_system.variables, tables))
    satisfied, violations = _check_clauses(structure, normal, assignment)
    return SolutionReport(
        kind="max",
        variables=dual_system.variables,
        tables=tables,
        system=phi,
        clauses=normal,
        satisfied=satisfied,
        violations=violations,
        iterations=result.iterations,
    )


# ---------------------------------------------------------------------------
# Interpolation checking for linear systems


@dataclass(frozen=True)
class InterpolantReport:
    verdict: InterpolantVerdict
    mu: tuple[RelationTable, ...]
    nu: tuple[RelationTable, ...]
    chi: tuple[RelationTable, ...]
    below_failures: tuple[str, ...]  # variables where mu ⊈ chi
    above_failures: tuple[str, ...]  # variables where chi ⊈ nu
    fixpoint_free: tuple[Optional[bool], ...]  # per candidate; None for extensional tables


def check_interpolant(
    structure: FiniteStructure,
    system: HornSystem,
    candidates: Sequence,
) -> InterpolantReport:
    """Check the sandwich μ_j ⊆ [χ_j] ⊆ ν_j on a linear Horn system.

    Each candidate is either a :class:`RelationTable` (used
    extensionally) or a pair ``(params, formula)`` evaluated over the
    structure.  Fixpoint-freeness of formula candidates is reported,
    not enforced.
    """
    if not is_linear(system):
        raise NotLinear("interpolant checking needs a linear Horn system")
    if len(candidates) != len(system.variables):
        raise ArityError("one candidate per predicate variable is required")

    # A linear system is dual Horn as well, so its maximal solution comes
    # from solve_max applied to the very same clause set.
    mu = solve_min(structure, system).tables
    nu = solve_max(structure, system.clauses, system.variables).tables

    chi_tables: list[RelationTable] = []
    fixpoint_free: list[Optional[bool]] = []
    for v, cand in zip(system.variables, candidates):
        if isinstance(cand, RelationTable):
            if cand.arity != v.arity:
                raise ArityError(f"candidate for {v.name!r} has the wrong arity")
            chi_tables.append(cand)
            fixpoint_free.append(None)
        else:
            params, formula = cand
            if len(params) != v.arity:
                raise ArityError(f"candidate for {v.name!r} has the wrong arity")
            tuples = frozenset(
                t
                for t in structure.all_tuples(v.arity)
                if evaluate(structure, dict(zip(params, t)), {}, formula)
            )
            chi_tables.append(RelationTable(v.arity, tuples))
            fixpoint_free.append(not any(isinstance(n, LfpAtom) for n in walk(formula)))

    below = tuple(
        v.name for v, m, c in zip(system.variables, mu, chi_tables) if not m.issubset(c)
    )
    above = tuple(
        v.name for v, c, n in zip(system.variables, chi_tables, nu) if not c.issubset(n)
    )
    if below:
        verdict = InterpolantVerdict.BELOW_MU
    elif above:
        verdict = InterpolantVerdict.ABOVE_NU
    else:
        verdict = InterpolantVerdict.INSIDE
    return InterpolantReport(
        verdict=verdict,
        mu=mu,
        nu=nu,
        chi=tuple(chi_tables),
        below_failures=below,
        above_failures=above,
        fixpoint_free=tuple(fixpoint_free),
    )
