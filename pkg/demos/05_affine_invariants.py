"""Affine-equality invariants by abstract fixpoint iteration.

The counting loop

    x := 0; y := 0;
    while * do { x := x + 1; y := y + 2 }

becomes two affine clauses: a ground fact X(0, 0) and a step
X(x, y) → X(x+1, y+2).  Iterating the abstracted clause operator on
affine subspaces of Q^2 climbs EMPTY -> point -> line and stops: the
invariant y = 2x, found without any widening because strictly
ascending chains of affine subspaces have length at most arity + 2.
End clauses are decided exactly: a parallel line cannot meet the
invariant, a crossing line meets it in a witness point.
"""

from fractions import Fraction

from hornfix import (
    PredicateVariable,
    abstract_lfp,
    check_end_clauses_abstract,
    compile_affine_system,
    normalize_clause,
    parse_formula,
)
from hornfix.affine import AffineSubspace

X = PredicateVariable("X", 2)
pv = {"X": X}
clauses = [
    normalize_clause(parse_formula("(X 0 0)", None, pv)),
    normalize_clause(parse_formula("(=> (X x y) (X (+ x 1) (+ y 2)))", None, pv)),
]
system = compile_affine_system(clauses)

result = abstract_lfp(system)
print("dimension trace (-1 is empty):", [t[0] for t in result.trace])
print("iterations:", result.iterations)
print("invariant for X:", result.values[0].equations(["x", "y"]))
print("canonical rows:", result.values[0].rows)

# Concrete sanity: unrolled points lie on the line.
point = (Fraction(4), Fraction(8))
print(f"contains {point}:", result.values[0].contains(point))

parallel = normalize_clause(
    parse_formula("(=> (and (X x y) (aff= y (+ (* 2 x) 1))) false)", None, pv)
)
crossing = normalize_clause(
    parse_formula("(=> (and (X x y) (aff= x 1)) false)", None, pv)
)

for name, end in (("y = 2x + 1 forbidden", parallel), ("x = 1 forbidden", crossing)):
    extended = compile_affine_system(clauses + [end])
    verdict = check_end_clauses_abstract(extended, abstract_lfp(extended).values)
    if verdict.satisfied:
        print(f"\n{name}: satisfied (empty intersection with the invariant)")
    else:
        ((idx, witness),) = verdict.violations
        print(f"\n{name}: violated, witness point {tuple(map(str, witness))}")

# The lattice has finite height, so no chain outruns arity + 2 steps.
print("\nstrict increases per component:", result.strict_steps)
assert all(s <= v.arity + 2 for v, s in zip(system.variables, result.strict_steps))
print("EMPTY is the bottom element:", AffineSubspace.empty(2).leq(result.values[0]))
