"""Verification conditions and Hoare-triple checking over modular arithmetic.

A triple {pre} program {post} compiles into a linear Horn clause set
with one fresh invariant predicate per loop and per sequencing point.
The triple is provable exactly when the structure models the clause
set, which the least solution decides, and the least solution's table
for each invariant predicate is a concrete loop invariant witness.
"""

from hornfix import (
    HoareTriple,
    arith_structure,
    check_hoare,
    parse_formula,
    parse_program,
    vcgen,
)

program = parse_program(
    """
vars x;
while (x <= 5) && !(x = 6) do {
  x := x + 1
}
"""
)
triple = HoareTriple(parse_formula("(= x 0)"), program, parse_formula("(= x 6)"))
structure = arith_structure(10, triple)

system = vcgen(triple)
print("verification conditions (a linear Horn system):")
for cl in system.clauses:
    print("  ", cl.kind, cl.render())

report = check_hoare(triple, structure)
print("\nprovable:", report.provable)
for name, table in sorted(report.invariants.items()):
    print(f"invariant {name}:", sorted(t[0] for t in table.tuples))

# A triple that fails: a single state refutes it.
bad = HoareTriple(parse_formula("true"), parse_program("vars x;\nx := 0\n"), parse_formula("(= x 1)"))
bad_structure = arith_structure(10, bad)
bad_report = check_hoare(bad, bad_structure)
print("\n{true} x := 0 {x = 1} provable:", bad_report.provable)
for idx, witness in bad_report.solution.violations:
    print("  refuting clause:", bad_report.solution.clauses[idx].render(), "at", witness)
