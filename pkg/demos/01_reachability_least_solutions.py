"""Least solutions of a Horn clause system, shown on graph reachability.

The two clauses

    X(u, u)
    X(u, w) ∧ E(w, v)  →  X(u, v)

say that X contains the diagonal and is closed under following edges.
Extracting their fixpoint definition and iterating it over a finite
graph yields the reflexive-transitive closure of the edge relation --
the least relation satisfying both clauses.  Adding an end clause
X(a, c) → ⊥ turns the system into a query: it stays solvable exactly
when c is unreachable from a.
"""

from hornfix import (
    BOT,
    And,
    Atom,
    FiniteStructure,
    Fn,
    Implies,
    PredicateVariable,
    Var,
    VarAtom,
    build_phi,
    classify,
    formula_to_sexpr,
    solve_min,
)

X = PredicateVariable("X", 2)
u, v, w = Var("u"), Var("v"), Var("w")
a, c = Fn("a"), Fn("c")

clauses = [
    VarAtom(X, (u, u)),
    Implies(And((VarAtom(X, (u, w)), Atom("E", (w, v)))), VarAtom(X, (u, v))),
    Implies(VarAtom(X, (a, c)), BOT),
]

system = classify(clauses, [X])
print("clause kinds:", [cl.kind for cl in system.clauses])

phi = build_phi(system)
print("\nextracted fixpoint definition for X:")
print(" ", formula_to_sexpr(phi.formulas[0]))


def solve_on(name, edges):
    m = FiniteStructure(
        ["a", "b", "c"],
        {"a": {(): "a"}, "c": {(): "c"}},
        {"E": edges},
    )
    report = solve_min(m, system)
    print(f"\n{name}: edges {sorted(edges)}")
    print("  least X:", sorted(report.tables[0].tuples))
    print("  iterations:", report.iterations)
    if report.satisfies_all:
        print("  all clauses hold: the equation is solvable here")
    else:
        for idx, witness in report.violations:
            print(f"  violated clause {idx}: {report.clauses[idx].render()}")


# c unreachable from a: the end clause holds.
solve_on("sparse graph", [("a", "b")])

# a path a -> b -> c: the closure reaches (a, c) and the end clause fails.
solve_on("path graph", [("a", "b"), ("b", "c")])
