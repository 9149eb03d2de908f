"""Dualization: swapping clause roles to get maximal solutions.

Substituting the negation of every unknown into a Horn clause set and
renormalizing swaps the body and head atoms of every clause, so facts
become end clauses and vice versa.  Solving the dualized system for
its least solution and complementing gives the greatest solution of
the original dual-Horn system.  On a linear system (at most one atom
on each side) both constructions apply and every solution is wedged
between the least and the greatest one.
"""

from hornfix import (
    BOT,
    And,
    Atom,
    FiniteStructure,
    Fn,
    Implies,
    InterpolantVerdict,
    PredicateVariable,
    RelationTable,
    Var,
    VarAtom,
    check_interpolant,
    classify,
    dualize,
    solve_max,
    solve_min,
)

X = PredicateVariable("X", 1)
Y = PredicateVariable("Y", 1)
u, v, w = Var("u"), Var("v"), Var("w")

clauses = [
    VarAtom(X, (Fn("a"),)),
    Implies(And((VarAtom(X, (u,)), VarAtom(X, (v,)))), VarAtom(Y, (Fn("f", (u, v)),))),
    Implies(VarAtom(Y, (w,)), BOT),
]
system = classify(clauses, [X, Y])
print("a Horn clause set:")
for cl in system.clauses:
    print("  ", cl.render())
print("\nits dual (facts <-> end clauses, bodies <-> heads):")
for cl in dualize(system):
    print("  ", cl.render())

# A linear system: reachability with an unreachable-target end clause.
X2 = PredicateVariable("R", 2)
linear = classify(
    [
        VarAtom(X2, (u, u)),
        Implies(And((VarAtom(X2, (u, w)), Atom("E", (w, v)))), VarAtom(X2, (u, v))),
        Implies(VarAtom(X2, (Fn("a"), Fn("c"))), BOT),
    ],
    [X2],
)
m = FiniteStructure(
    ["a", "b", "c"], {"a": {(): "a"}, "c": {(): "c"}}, {"E": [("a", "b")]}
)

mu = solve_min(m, linear).tables[0]
nu = solve_max(m, linear.clauses, linear.variables).tables[0]
print("\nleast solution  :", sorted(mu.tuples))
print("greatest solution:", sorted(nu.tuples))
print("mu inside nu:", mu.issubset(nu))

inside = check_interpolant(m, linear, [mu])
print("checking mu as a candidate:", inside.verdict.value)

# Remove one tuple from the least solution: no longer a solution.
broken = RelationTable(2, mu.tuples - {("a", "a")})
print(
    "after dropping (a, a):",
    check_interpolant(m, linear, [broken]).verdict.value,
)
assert check_interpolant(m, linear, [nu]).verdict is InterpolantVerdict.INSIDE
