"""The Galois connection behind the affine domain, checked on samples.

Abstraction maps a set of rational points to its affine hull;
concretization is the identity embedding.  The two maps form a Galois
connection: a point set lies inside a subspace exactly when its hull
does.  The law check verifies that adjunction on sampled pairs, plus
extensivity (every set sits inside the hull's concretization) and the
round trip (re-abstracting a spanning sample of a subspace returns
the subspace).
"""

import random
from fractions import Fraction

from hornfix import AffineDomain, galois_law_check
from hornfix.affine import AffineSubspace, sample_pairs

domain = AffineDomain()

# The textbook pair: two points and the line through them.
points = [(Fraction(0), Fraction(0)), (Fraction(1), Fraction(2))]
line = domain.alpha(2, points)
print("alpha({(0,0), (1,2)}) =", line.equations(["x", "y"]))
print("points inside gamma(line):", all(domain.gamma_contains(line, p) for p in points))
print("alpha(points) below line :", domain.leq(domain.alpha(2, points), line))

# A pair where both sides of the adjunction are false.
empty = AffineSubspace.empty(2)
print("\n{(0,0)} inside gamma(EMPTY):", domain.gamma_contains(empty, points[0]))
print("alpha({(0,0)}) below EMPTY :", domain.leq(domain.alpha(2, [points[0]]), empty))

# Bulk check with a seeded sampler, as the CLI's galois-check does.
rng = random.Random(0)
total = 0
for arity in (1, 2, 3):
    report = galois_law_check(domain, sample_pairs(arity, 150, rng))
    total += report.pairs_checked
    print(f"\narity {arity}: {report.pairs_checked} pairs, failures: {len(report.failures)}")
print(f"\nchecked {total} pairs overall, all laws exact (rational arithmetic)")
