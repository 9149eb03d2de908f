"""Affine-equality abstract domain over exact rationals.

The lattice elements are affine subspaces of Q^k, each kept in a
canonical form: the reduced row echelon form of its constraint system
[A | b], with the inconsistent system collapsed to the single row
(0 ... 0 | 1).  Canonical forms make equality and inclusion exact, and
every strictly increasing chain has length at most k + 2 (EMPTY, then
one step per dimension from 0 to k), so abstract fixpoint iteration
terminates without widening.

The abstraction maps a finite set of rational points to its affine
hull; concretization is the identity embedding, realized as a
membership test.  On clause sets whose constraints are conjunctions of
affine equalities and whose atom arguments are affine expressions, the
composition "abstract, apply the clause operator, re-abstract" is
computed in closed form by meets, affine preimages/images, and joins.
Inequality guards are abstracted to true, which only enlarges the
result (the standard over-approximation for equality analyses).
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import ArityError, NonAffine, NotHorn
from .horn import Clause, HornSystem, normalize_clause, _collect_variables
from .logic import (
    And,
    Atom,
    Bot,
    Eq,
    Fn,
    Formula,
    LfpAtom,
    Not,
    PredicateVariable,
    Term,
    Top,
    Var,
)

Row = tuple[Fraction, ...]


def _rref(rows: Iterable[Sequence[Fraction]]) -> tuple[Row, ...]:
    """Reduced row echelon form; zero rows dropped, pivots normalized to 1."""
    mat = [list(map(Fraction, r)) for r in rows]
    if not mat:
        return ()
    ncols = len(mat[0])
    pivot_row = 0
    for col in range(ncols):
        found = None
        for r in range(pivot_row, len(mat)):
            if mat[r][col] != 0:
                found = r
                break
        if found is None:
            continue
        mat[pivot_row], mat[found] = mat[found], mat[pivot_row]
        lead = mat[pivot_row][col]
        mat[pivot_row] = [x / lead for x in mat[pivot_row]]
        for r in range(len(mat)):
            if r != pivot_row and mat[r][col] != 0:
                factor = mat[r][col]
                mat[r] = [x - factor * y for x, y in zip(mat[r], mat[pivot_row])]
        pivot_row += 1
        if pivot_row == len(mat):
            break
    out = [tuple(r) for r in mat if any(x != 0 for x in r)]
    return tuple(out)


def _nullspace(vectors: Sequence[Row], n: int) -> list[Row]:
    """A basis of {a in Q^n : v · a = 0 for every v}."""
    reduced = _rref(vectors)
    pivots = []
    for row in reduced:
        for col, x in enumerate(row):
            if x != 0:
                pivots.append(col)
                break
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * n
        vec[f] = Fraction(1)
        for row, p in zip(reduced, pivots):
            vec[p] = -row[f]
        basis.append(tuple(vec))
    return basis


@dataclass(frozen=True)
class AffineSubspace:
    """An affine subset of Q^arity in canonical constraint form.

    ``rows`` is the RREF of [A | b] (row length arity + 1); the empty
    subspace is exactly the single row (0, ..., 0, 1) and the full
    space has no rows.
    """

    arity: int
    rows: tuple[Row, ...]

    @staticmethod
    def full(arity: int) -> "AffineSubspace":
        return AffineSubspace(arity, ())

    @staticmethod
    def empty(arity: int) -> "AffineSubspace":
        return AffineSubspace(arity, (tuple([Fraction(0)] * arity + [Fraction(1)]),))

    @staticmethod
    def from_rows(arity: int, rows: Iterable[Sequence[Fraction]]) -> "AffineSubspace":
        reduced = _rref(rows)
        for row in reduced:
            if all(x == 0 for x in row[:arity]) and row[arity] != 0:
                return AffineSubspace.empty(arity)
        return AffineSubspace(arity, reduced)

    @staticmethod
    def from_points(arity: int, points: Iterable[Sequence[Fraction]]) -> "AffineSubspace":
        """The affine hull of a finite point set (the abstraction map)."""
        pts = [tuple(map(Fraction, p)) for p in points]
        for p in pts:
            if len(p) != arity:
                raise ArityError(f"point {p!r} does not have arity {arity}")
        if not pts:
            return AffineSubspace.empty(arity)
        base = pts[0]
        span = [tuple(x - b for x, b in zip(p, base)) for p in pts[1:]]
        return AffineSubspace._from_point_and_span(arity, base, span)

    @staticmethod
    def _from_point_and_span(arity, point, span) -> "AffineSubspace":
        rows = []
        for a in _nullspace([v for v in span if any(x != 0 for x in v)], arity):
            b = sum(x * p for x, p in zip(a, point))
            rows.append(tuple(list(a) + [b]))
        return AffineSubspace.from_rows(arity, rows)

    # -- structure ---------------------------------------------------------

    @property
    def is_empty(self) -> bool:
        return any(
            all(x == 0 for x in row[: self.arity]) and row[self.arity] != 0
            for row in self.rows
        )

    @property
    def dim(self) -> int:
        """Affine dimension; -1 for the empty subspace."""
        if self.is_empty:
            return -1
        return self.arity - len(self.rows)

    def generators(self) -> tuple[tuple[Fraction, ...], list[Row]]:
        """A point of the subspace and a basis of its direction space."""
        if self.is_empty:
            raise ValueError("the empty subspace has no points")
        pivots = []
        for row in self.rows:
            for col in range(self.arity):
                if row[col] != 0:
                    pivots.append(col)
                    break
        point = [Fraction(0)] * self.arity
        for row, p in zip(self.rows, pivots):
            point[p] = row[self.arity]
        free = [c for c in range(self.arity) if c not in pivots]
        basis = []
        for f in free:
            vec = [Fraction(0)] * self.arity
            vec[f] = Fraction(1)
            for row, p in zip(self.rows, pivots):
                vec[p] = -row[f]
            basis.append(tuple(vec))
        return tuple(point), basis

    def sample_points(self) -> list[tuple[Fraction, ...]]:
        """Finitely many points whose affine hull is the whole subspace."""
        if self.is_empty:
            return []
        point, basis = self.generators()
        return [point] + [tuple(p + v for p, v in zip(point, vec)) for vec in basis]

    def contains(self, point: Sequence) -> bool:
        point = tuple(map(Fraction, point))
        if len(point) != self.arity:
            raise ArityError(f"point {point!r} does not have arity {self.arity}")
        return all(
            sum(a * x for a, x in zip(row, point)) == row[self.arity] for row in self.rows
        )

    # -- lattice -----------------------------------------------------------

    def leq(self, other: "AffineSubspace") -> bool:
        """Inclusion, decided by a rank argument on the stacked systems."""
        if self.arity != other.arity:
            raise ArityError("subspace arities differ")
        if self.is_empty:
            return True
        if other.is_empty:
            return False
        return _rref(self.rows + other.rows) == self.rows

    def join(self, other: "AffineSubspace") -> "AffineSubspace":
        """Affine hull of the union; the empty subspace is the identity."""
        if self.arity != other.arity:
            raise ArityError("subspace arities differ")
        if self.is_empty:
            return other
        if other.is_empty:
            return self
        p1, b1 = self.generators()
        p2, b2 = other.generators()
        diff = tuple(x - y for x, y in zip(p2, p1))
        return AffineSubspace._from_point_and_span(self.arity, p1, b1 + b2 + [diff])

    def meet_rows(self, rows: Iterable[Sequence[Fraction]]) -> "AffineSubspace":
        """Intersection with additional affine equalities."""
        return AffineSubspace.from_rows(self.arity, list(self.rows) + [tuple(r) for r in rows])

    def image(self, matrix: Sequence[Row], offset: Sequence[Fraction]) -> "AffineSubspace":
        """Image under the affine map x -> matrix·x + offset."""
        k_out = len(offset)
        if self.is_empty:
            return AffineSubspace.empty(k_out)
        point, basis = self.generators()
        new_point = tuple(
            sum(m * x for m, x in zip(mrow, point)) + c for mrow, c in zip(matrix, offset)
        )
        new_span = [
            tuple(sum(m * x for m, x in zip(mrow, vec)) for mrow in matrix) for vec in basis
        ]
        return AffineSubspace._from_point_and_span(k_out, new_point, new_span)

    def preimage(self, matrix: Sequence[Row], offset: Sequence[Fraction], k_in: int) -> "AffineSubspace":
        """Preimage under the affine map Q^k_in -> Q^arity given by (matrix, offset)."""
        rows = []
        for row in self.rows:
            a, b = row[: self.arity], row[self.arity]
            new_a = [
                sum(a[i] * matrix[i][c] for i in range(self.arity)) for c in range(k_in)
            ]
            new_b = b - sum(a[i] * offset[i] for i in range(self.arity))
            rows.append(tuple(new_a + [new_b]))
        return AffineSubspace.from_rows(k_in, rows)

    # -- rendering ---------------------------------------------------------

    def equations(self, names: Optional[Sequence[str]] = None) -> list[str]:
        if names is None:
            names = [f"x{i}" for i in range(self.arity)]
        if self.is_empty:
            return ["0 = 1"]
        out = []
        for row in self.rows:
            terms = []
            for coeff, name in zip(row[: self.arity], names):
                if coeff == 0:
                    continue
                if coeff == 1:
                    terms.append(f"+ {name}")
                elif coeff == -1:
                    terms.append(f"- {name}")
                elif coeff > 0:
                    terms.append(f"+ {coeff} {name}")
                else:
                    terms.append(f"- {-coeff} {name}")
            lhs = " ".join(terms).lstrip("+ ") if terms else "0"
            out.append(f"{lhs} = {row[self.arity]}")
        return out

    def to_json(self) -> dict:
        return {
            "arity": self.arity,
            "empty": self.is_empty,
            "dim": self.dim,
            "rows": [[[x.numerator, x.denominator] for x in row] for row in self.rows],
        }


def affine_join(s: AffineSubspace, t: AffineSubspace) -> AffineSubspace:
    return s.join(t)


def affine_leq(s: AffineSubspace, t: AffineSubspace) -> bool:
    return s.leq(t)


def affine_hull(arity: int, points: Iterable) -> AffineSubspace:
    return AffineSubspace.from_points(arity, points)


# ---------------------------------------------------------------------------
# Galois domains


class GaloisDomain(ABC):
    """A per-arity family of complete lattices Galois-connected to power sets.

    Only the affine instance ships; the contract exists so law checking
    and the abstract engine stay generic over the lattice operations.
    """

    @abstractmethod
    def bottom(self, arity: int): ...

    @abstractmethod
    def top(self, arity: int): ...

    @abstractmethod
    def leq(self, a, b) -> bool: ...

    @abstractmethod
    def join(self, a, b): ...

    @abstractmethod
    def alpha(self, arity: int, points: Iterable): ...

    @abstractmethod
    def gamma_contains(self, a, point) -> bool: ...

    @abstractmethod
    def gamma_sample(self, a) -> list:
        """Finitely many concrete points abstracting back onto ``a``."""

    def chain_bound(self, arity: int) -> Optional[int]:
        """Maximal length of a strictly increasing chain, when finite."""
        return None


class AffineDomain(GaloisDomain):
    """Affine subspaces of Q^k with hull abstraction and identity concretization."""

    def bottom(self, arity: int) -> AffineSubspace:
        return AffineSubspace.empty(arity)

    def top(self, arity: int) -> AffineSubspace:
        return AffineSubspace.full(arity)

    def leq(self, a: AffineSubspace, b: AffineSubspace) -> bool:
        return a.leq(b)

    def join(self, a: AffineSubspace, b: AffineSubspace) -> AffineSubspace:
        return a.join(b)

    def alpha(self, arity: int, points: Iterable) -> AffineSubspace:
        return AffineSubspace.from_points(arity, points)

    def gamma_contains(self, a: AffineSubspace, point) -> bool:
        return a.contains(point)

    def gamma_sample(self, a: AffineSubspace) -> list:
        return a.sample_points()

    def chain_bound(self, arity: int) -> int:
        return arity + 2


@dataclass(frozen=True)
class ModelAbstraction:
    """A concrete structure identifier paired with a Galois domain family."""

    structure: str
    domain: GaloisDomain


RATIONALS_AFFINE = ModelAbstraction("Q", AffineDomain())


# ---------------------------------------------------------------------------
# Galois law checking


@dataclass(frozen=True)
class GaloisLawReport:
    pairs_checked: int
    failures: tuple[dict, ...]

    @property
    def passed(self) -> bool:
        return not self.failures


def galois_law_check(domain: GaloisDomain, samples: Sequence[tuple]) -> GaloisLawReport:
    """Verify the adjunction on sample pairs plus the two closure laws.

    Each sample is a pair (X, Y) of a finite point set and a lattice
    element of matching arity.  Checked per pair: X ⊆ γ(Y) ⇔ α(X) ⊑ Y
    (both directions via the boolean equivalence), X ⊆ γ(α(X))
    (extensivity), and α over a spanning sample of γ(Y) returning Y
    (the identity law, exact for the affine instance since γ embeds).
    """
    failures = []
    for i, (points, element) in enumerate(samples):
        points = [tuple(map(Fraction, p)) for p in points]
        arities = {len(p) for p in points}
        arity = arities.pop() if arities else element.arity
        subset = all(domain.gamma_contains(element, p) for p in points)
        abstracted = domain.alpha(arity, points)
        adjoint = domain.leq(abstracted, element)
        if subset != adjoint:
            failures.append(
                {"sample": i, "law": "adjunction", "subset": subset, "alpha_leq": adjoint}
            )
        if not all(domain.gamma_contains(abstracted, p) for p in points):
            failures.append({"sample": i, "law": "extensivity"})
        round_trip = domain.alpha(arity, domain.gamma_sample(element))
        if round_trip != element:
            failures.append({"sample": i, "law": "alpha-gamma-identity"})
    return GaloisLawReport(len(samples), tuple(failures))


def sample_pairs(arity: int, count: int, rng) -> list[tuple]:
    """Deterministic random (point set, subspace) pairs for law checking."""
    pairs = []
    for _ in range(count):
        npts = rng.randrange(0, 4)
        points = [
            tuple(Fraction(rng.randrange(-4, 5), rng.randrange(1, 4)) for _ in range(arity))
            for _ in range(npts)
        ]
        shape = rng.randrange(0, 4)
        if shape == 0:
            element = AffineSubspace.empty(arity)
        elif shape == 1:
            element = AffineSubspace.full(arity)
        else:
            anchors = [
                tuple(Fraction(rng.randrange(-3, 4)) for _ in range(arity))
                for _ in range(rng.randrange(1, arity + 2))
            ]
            element = AffineSubspace.from_points(arity, anchors)
        pairs.append((points, element))
    return pairs


# ---------------------------------------------------------------------------
# Affine expressions and clauses


def linear_expression(term: Term, variables: Sequence[str]) -> tuple[Row, Fraction]:
    """Coefficient row over ``variables`` plus constant, or :class:`NonAffine`."""
    coeffs = {v: Fraction(0) for v in variables}
    const = Fraction(0)

    def walk_term(t: Term, scale: Fraction):
        nonlocal const
        if isinstance(t, Var):
            if t.name not in coeffs:
                raise NonAffine(f"unknown variable {t.name!r} in an affine expression")
            coeffs[t.name] += scale
            return
        if isinstance(t, Fn):
            if not t.args:
                try:
                    const += scale * Fraction(t.name)
                except ValueError:
                    raise NonAffine(f"symbol {t.name!r} is not a rational constant") from None
                return
            if t.name == "+":
                for a in t.args:
                    walk_term(a, scale)
                return
            if t.name == "-" and len(t.args) == 1:
                walk_term(t.args[0], -scale)
                return
            if t.name == "-" and len(t.args) == 2:
                walk_term(t.args[0], scale)
                walk_term(t.args[1], -scale)
                return
            if t.name == "*" and len(t.args) == 2:
                left, right = t.args
                q = _constant_value(left)
                if q is not None:
                    walk_term(right, scale * q)
                    return
                q = _constant_value(right)
                if q is not None:
                    walk_term(left, scale * q)
                    return
                raise NonAffine("nonlinear product of variables")
            raise NonAffine(f"function {t.name!r} outside the affine vocabulary")
        raise NonAffine(f"not a term: {t!r}")

    walk_term(term, Fraction(1))
    return tuple(coeffs[v] for v in variables), const


def _constant_value(t: Term) -> Optional[Fraction]:
    try:
        row, const = linear_expression(t, ())
    except NonAffine:
        return None
    return const


@dataclass(frozen=True)
class AffineAtomMap:
    """A predicate atom whose arguments are affine maps of the clause variables."""

    pvar: PredicateVariable
    matrix: tuple[Row, ...]  # arity x len(clause variables)
    offset: tuple[Fraction, ...]


@dataclass(frozen=True)
class AffineClause:
    variables: tuple[str, ...]
    constraint: AffineSubspace  # subset of Q^len(variables)
    body: tuple[AffineAtomMap, ...]
    head: Optional[AffineAtomMap]  # None for an end clause
    dropped_guards: int  # non-equality conjuncts abstracted to true


def compile_affine_clause(clause: Clause) -> AffineClause:
    """Restrict a clause to the affine-equality fragment.

    Equality conjuncts become constraint rows; <=-atoms and negated
    atomic guards are abstracted to true (sound over-approximation);
    anything else is rejected.
    """
    if len(clause.heads) > 1:
        raise NotHorn("affine systems must be Horn (at most one head atom)")
    variables = clause.free_variables()
    rows = []
    dropped = 0
    inconsistent = False

    def visit(phi: Formula):
        nonlocal dropped, inconsistent
        if isinstance(phi, Top):
            return
        if isinstance(phi, Bot):
            inconsistent = True
            return
        if isinstance(phi, And):
            for s in phi.subs:
                visit(s)
            return
        if isinstance(phi, Eq):
            lrow, lconst = linear_expression(phi.left, variables)
            rrow, rconst = linear_expression(phi.right, variables)
            rows.append(tuple(a - b for a, b in zip(lrow, rrow)) + (rconst - lconst,))
            return
        if isinstance(phi, Atom) and phi.pred == "<=":
            dropped += 1
            return
        if isinstance(phi, Not) and isinstance(phi.sub, (Atom, Eq)):
            dropped += 1
            return
        if isinstance(phi, LfpAtom):
            raise NonAffine("fixpoint atoms are not supported in affine mode")
        raise NonAffine(f"constraint outside the affine fragment: {phi!r}")

    visit(clause.constraint)
    constraint = (
        AffineSubspace.empty(len(variables))
        if inconsistent
        else AffineSubspace.from_rows(len(variables), rows)
    )

    def atom_map(atom) -> AffineAtomMap:
        matrix = []
        offset = []
        for arg in atom.args:
            row, const = linear_expression(arg, variables)
            matrix.append(row)
            offset.append(const)
        return AffineAtomMap(atom.pvar, tuple(matrix), tuple(offset))

    return AffineClause(
        variables=variables,
        constraint=constraint,
        body=tuple(atom_map(a) for a in clause.body),
        head=atom_map(clause.heads[0]) if clause.heads else None,
        dropped_guards=dropped,
    )


@dataclass(frozen=True)
class AffineSystem:
    variables: tuple[PredicateVariable, ...]
    clauses: tuple[AffineClause, ...]
    source: tuple[Clause, ...]

    def head_clauses(self, j: int) -> tuple[int, ...]:
        v = self.variables[j]
        return tuple(
            i for i, c in enumerate(self.clauses) if c.head is not None and c.head.pvar == v
        )

    def end_clauses(self) -> tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.clauses) if c.head is None)


def compile_affine_system(
    clauses: Union[HornSystem, Sequence],
    variables: Optional[Sequence[PredicateVariable]] = None,
) -> AffineSystem:
    if isinstance(clauses, HornSystem):
        normal = clauses.clauses
        variables = clauses.variables if variables is None else tuple(variables)
    else:
        normal = tuple(normalize_clause(c) for c in clauses)
        if variables is None:
            variables = _collect_variables(normal)
    return AffineSystem(tuple(variables), tuple(compile_affine_clause(c) for c in normal), normal)


# ---------------------------------------------------------------------------
# Abstract operator and fixpoint


def _clause_input_space(clause: AffineClause, values: dict) -> AffineSubspace:
    """Constraint meet the preimages of the body subspaces, over the clause variables."""
    k = len(clause.variables)
    space = clause.constraint
    for atom in clause.body:
        if space.is_empty:
            break
        pre = values[atom.pvar].preimage(atom.matrix, atom.offset, k)
        space = space.meet_rows(pre.rows)
    return space


def abstract_apply_F(
    system: AffineSystem, values: tuple[AffineSubspace, ...]
) -> tuple[AffineSubspace, ...]:
    """One application of the abstracted clause operator.

    Per head variable: join over its clauses of the image, under the
    head's affine map, of the clause constraint met with the preimages
    of the body subspaces.  On affine inputs this equals abstracting
    the concrete operator applied to the concretizations.
    """
    if len(values) != len(system.variables):
        raise ArityError("value tuple does not match the system")
    env = dict(zip(system.variables, values))
    out = []
    for j, v in enumerate(system.variables):
        acc = AffineSubspace.empty(v.arity)
        for i in system.head_clauses(j):
            clause = system.clauses[i]
            space = _clause_input_space(clause, env)
            if space.is_empty:
                continue
            acc = acc.join(space.image(clause.head.matrix, clause.head.offset))
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class AbstractLfpResult:
    variables: tuple[PredicateVariable, ...]
    values: tuple[AffineSubspace, ...]
    iterations: int
    trace: tuple[tuple[int, ...], ...]  # per stage, per component dimension (-1 = empty)
    strict_steps: tuple[int, ...]  # per component, number of strict increases

    def value(self, name: str) -> AffineSubspace:
        for v, s in zip(self.variables, self.values):
            if v.name == name:
                return s
        raise KeyError(name)


def abstract_lfp(system: AffineSystem) -> AbstractLfpResult:
    """Kleene iteration of the abstract operator from the empty tuple.

    Termination is guaranteed by finite lattice height and asserted
    within sum(arity_j + 2) strictly increasing steps; exceeding the
    bound signals an implementation bug, not an input condition.
    """
    values = tuple(AffineSubspace.empty(v.arity) for v in system.variables)
    trace = [tuple(s.dim for s in values)]
    strict = [0] * len(values)
    bound = sum(v.arity + 2 for v in system.variables) + 2
    iterations = 0
    while True:
        nxt = abstract_apply_F(system, values)
        if nxt == values:
            break
        for i, (old, new) in enumerate(zip(values, nxt)):
            if old != new:
                strict[i] += 1
        values = nxt
        iterations += 1
        trace.append(tuple(s.dim for s in values))
        if iterations > bound:
            raise RuntimeError("abstract iteration exceeded the finite-height bound; this is a bug")
    return AbstractLfpResult(system.variables, values, iterations, tuple(trace), tuple(strict))


@dataclass(frozen=True)
class EndClauseReport:
    satisfied: bool
    violations: tuple[tuple[int, tuple], ...]  # (clause index, witness point)


def check_end_clauses_abstract(
    system: AffineSystem, values: tuple[AffineSubspace, ...]
) -> EndClauseReport:
    """An end clause holds under the concretized values iff its input space is empty.

    The meet of the constraint with the body preimages is an affine
    subspace computed exactly; a violation reports one of its points.
    """
    env = dict(zip(system.variables, values))
    violations = []
    for i in system.end_clauses():
        space = _clause_input_space(system.clauses[i], env)
        if not space.is_empty:
            point, _ = space.generators()
            violations.append((i, point))
    return EndClauseReport(not violations, tuple(violations))
