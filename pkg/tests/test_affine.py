"""Affine subspace lattice, abstract operator, Galois laws."""

import random
from fractions import Fraction as Fr

import pytest

from hornfix.affine import (
    AffineDomain,
    AffineSubspace,
    abstract_apply_F,
    abstract_lfp,
    affine_hull,
    check_end_clauses_abstract,
    compile_affine_clause,
    compile_affine_system,
    galois_law_check,
    linear_expression,
    sample_pairs,
)
from hornfix.errors import NonAffine
from hornfix.horn import Clause, normalize_clause
from hornfix.logic import (
    BOT,
    TOP,
    And,
    Atom,
    Eq,
    Fn,
    Implies,
    Not,
    PredicateVariable,
    Var,
    VarAtom,
)
from hornfix.sexpr import parse_formula

from oracles import concrete_unroll

x, y = Var("x"), Var("y")
X2 = PredicateVariable("X", 2)


def pt(*vals):
    return tuple(Fr(v) for v in vals)


def karr_clauses():
    zero, one, two = Fn("0"), Fn("1"), Fn("2")
    return [
        normalize_clause(VarAtom(X2, (zero, zero))),
        normalize_clause(
            Implies(
                VarAtom(X2, (x, y)),
                VarAtom(X2, (Fn("+", (x, one)), Fn("+", (y, two)))),
            )
        ),
    ]


LINE_Y_EQUALS_2X = AffineSubspace(2, ((Fr(1), Fr(-1, 2), Fr(0)),))


# ---------------------------------------------------------------------------
# Subspace construction and canonical forms


def test_canonical_empty_and_full():
    assert AffineSubspace.empty(2).rows == ((Fr(0), Fr(0), Fr(1)),)
    assert AffineSubspace.empty(2).is_empty
    assert AffineSubspace.full(2).rows == ()
    assert AffineSubspace.full(2).dim == 2
    assert AffineSubspace.empty(2).dim == -1


def test_inconsistent_rows_collapse():
    s = AffineSubspace.from_rows(2, [(Fr(1), Fr(0), Fr(0)), (Fr(1), Fr(0), Fr(1))])
    assert s == AffineSubspace.empty(2)


def test_hull_of_two_points_is_the_line():
    s = affine_hull(2, [pt(0, 0), pt(1, 2)])
    assert s == LINE_Y_EQUALS_2X
    assert s.dim == 1
    assert s.contains(pt(3, 6))
    assert not s.contains(pt(1, 1))


def test_join_examples():
    s = affine_hull(2, [pt(1, 1)])
    assert AffineSubspace.empty(2).join(s) == s
    assert s.join(AffineSubspace.empty(2)) == s
    assert s.join(s) == s
    assert affine_hull(2, [pt(0, 0)]).join(affine_hull(2, [pt(1, 2)])) == LINE_Y_EQUALS_2X


def test_meet_plane_with_axis():
    s = AffineSubspace.full(2).meet_rows([(Fr(1), Fr(0), Fr(0))])
    assert s.rows == ((Fr(1), Fr(0), Fr(0)),)
    assert s.contains(pt(0, 5))
    assert not s.contains(pt(1, 0))


def test_leq_point_inside_line():
    point = affine_hull(2, [pt(1, 2)])
    assert point.leq(LINE_Y_EQUALS_2X)
    assert not LINE_Y_EQUALS_2X.leq(point)


def test_image_of_line_under_shift_is_fixed():
    identity = ((Fr(1), Fr(0)), (Fr(0), Fr(1)))
    shifted = LINE_Y_EQUALS_2X.image(identity, (Fr(1), Fr(2)))
    assert shifted == LINE_Y_EQUALS_2X


def test_preimage_of_empty_is_empty():
    identity = ((Fr(1), Fr(0)), (Fr(0), Fr(1)))
    pre = AffineSubspace.empty(2).preimage(identity, (Fr(0), Fr(0)), 2)
    assert pre.is_empty


def test_sample_points_span_the_subspace():
    rng = random.Random(41)
    for _ in range(100):
        points = [pt(rng.randint(-3, 3), rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(1, 4))]
        s = affine_hull(3, points)
        assert affine_hull(3, s.sample_points()) == s


def test_lattice_laws_randomized():
    rng = random.Random(42)
    def random_subspace(k):
        roll = rng.random()
        if roll < 0.15:
            return AffineSubspace.empty(k)
        if roll < 0.3:
            return AffineSubspace.full(k)
        pts = [tuple(Fr(rng.randint(-3, 3)) for _ in range(k)) for _ in range(rng.randint(1, k + 1))]
        return affine_hull(k, pts)

    for _ in range(150):
        k = rng.randint(1, 3)
        s, t, r = (random_subspace(k) for _ in range(3))
        assert s.join(t) == t.join(s)
        assert s.join(s) == s
        assert s.join(t.join(r)) == s.join(t).join(r)
        assert AffineSubspace.empty(k).join(s) == s
        assert s.leq(AffineSubspace.full(k))
        assert AffineSubspace.empty(k).leq(s)
        assert s.leq(s.join(t)) and t.leq(s.join(t))
        if s.leq(t) and t.leq(s):
            assert s == t
        if s.leq(t) and t.leq(r):
            assert s.leq(r)


def test_hull_is_least_upper_bound_of_points():
    rng = random.Random(43)
    for _ in range(80):
        k = rng.randint(1, 3)
        points = [tuple(Fr(rng.randint(-2, 2)) for _ in range(k)) for _ in range(rng.randint(0, 4))]
        hull = affine_hull(k, points)
        assert all(hull.contains(p) for p in points)
        anchors = [tuple(Fr(rng.randint(-2, 2)) for _ in range(k)) for _ in range(rng.randint(1, 3))]
        candidate = affine_hull(k, anchors)
        if all(candidate.contains(p) for p in points):
            assert hull.leq(candidate)


def test_strict_chains_are_short():
    # dim strictly increases along any strictly ascending chain, so the
    # chain EMPTY < S_1 < ... has at most k + 2 members.
    rng = random.Random(44)
    for _ in range(50):
        k = rng.randint(1, 3)
        current = AffineSubspace.empty(k)
        length = 1
        for _ in range(40):
            nxt = current.join(affine_hull(k, [tuple(Fr(rng.randint(-5, 5)) for _ in range(k))]))
            if nxt != current:
                assert nxt.dim > current.dim
                length += 1
                current = nxt
        assert length <= k + 2


# ---------------------------------------------------------------------------
# Affine expressions and clause compilation


def test_linear_expression_basics():
    row, const = linear_expression(parse_formula("(aff= (+ x 1) y)").left, ("x", "y"))
    assert row == (Fr(1), Fr(0)) and const == Fr(1)
    row, const = linear_expression(Fn("*", (Fn("3/2"), x)), ("x",))
    assert row == (Fr(3, 2),) and const == 0


def test_linear_expression_rejects_products_of_variables():
    with pytest.raises(NonAffine):
        linear_expression(Fn("*", (x, y)), ("x", "y"))


def test_compile_drops_inequality_guards():
    clause = normalize_clause(
        Implies(And((VarAtom(X2, (x, y)), Atom("<=", (x, y)), Not(Eq(x, y)))), VarAtom(X2, (x, y)))
    )
    compiled = compile_affine_clause(clause)
    assert compiled.dropped_guards == 2
    assert compiled.constraint == AffineSubspace.full(2)


def test_compile_rejects_disjunctive_constraint():
    from hornfix.logic import Or

    clause = Clause(Or((Eq(x, Fn("0")), Eq(x, Fn("1")))), (), (VarAtom(X2, (x, y)),))
    with pytest.raises(NonAffine):
        compile_affine_clause(clause)


def test_compile_rejects_fixpoint_constraints():
    from hornfix.logic import FixpointSystem, LfpAtom

    X1 = PredicateVariable("Z", 1)
    system = FixpointSystem((X1,), (("p",),), (Eq(Var("p"), Var("p")),))
    clause = Clause(LfpAtom(system, 0, (x,)), (), (VarAtom(X2, (x, y)),))
    with pytest.raises(NonAffine):
        compile_affine_clause(clause)


def test_compile_from_parsed_affine_text():
    clause = parse_formula("(=> (and (X x y) (aff= y (* 2 x))) (X (+ x 1) (+ y 2)))", None, {"X": X2})
    compiled = compile_affine_clause(normalize_clause(clause))
    # Constraint rows live over the clause's own variable order.
    assert compiled.variables == ("y", "x")
    assert compiled.constraint == AffineSubspace.from_rows(2, [(Fr(1), Fr(-2), Fr(0))])
    assert compiled.head is not None
    # Restricting the loop to its own invariant line keeps the fixpoint there.
    system = compile_affine_system([karr_clauses()[0], normalize_clause(clause)])
    assert abstract_lfp(system).values[0] == LINE_Y_EQUALS_2X


# ---------------------------------------------------------------------------
# Abstract operator and fixpoint


def test_abstract_apply_base_fact_from_bottom():
    system = compile_affine_system(karr_clauses())
    out = abstract_apply_F(system, (AffineSubspace.empty(2),))
    assert out[0] == affine_hull(2, [pt(0, 0)])


def test_abstract_apply_second_step_reaches_line():
    system = compile_affine_system(karr_clauses())
    step1 = abstract_apply_F(system, (AffineSubspace.empty(2),))
    step2 = abstract_apply_F(system, step1)
    assert step2[0] == LINE_Y_EQUALS_2X
    assert abstract_apply_F(system, step2)[0] == LINE_Y_EQUALS_2X


def test_abstract_lfp_karr_line():
    system = compile_affine_system(karr_clauses())
    result = abstract_lfp(system)
    assert result.values[0] == LINE_Y_EQUALS_2X
    assert result.iterations <= 4
    assert result.trace[0] == (-1,)


def test_abstract_lfp_end_clauses_only():
    X1 = PredicateVariable("X", 1)
    clause = Clause(TOP, (VarAtom(X1, (x,)),), ())
    result = abstract_lfp(compile_affine_system([clause], [X1]))
    assert result.values[0].is_empty


def test_abstract_lfp_mutual_system_reaches_full_lines():
    X1 = PredicateVariable("X", 1)
    Y1 = PredicateVariable("Y", 1)
    one = Fn("1")
    clauses = [
        normalize_clause(VarAtom(X1, (Fn("0"),))),
        normalize_clause(Implies(VarAtom(X1, (x,)), VarAtom(Y1, (Fn("+", (x, one)),)))),
        normalize_clause(Implies(VarAtom(Y1, (x,)), VarAtom(X1, (Fn("+", (x, one)),)))),
    ]
    result = abstract_lfp(compile_affine_system(clauses, [X1, Y1]))
    assert result.values[0] == AffineSubspace.full(1)
    assert result.values[1] == AffineSubspace.full(1)


def test_end_clause_check_parallel_line_is_satisfied():
    clauses = karr_clauses() + [
        normalize_clause(
            Implies(
                And((VarAtom(X2, (x, y)), Eq(y, Fn("+", (Fn("*", (Fn("2"), x)), Fn("1")))))),
                BOT,
            )
        )
    ]
    system = compile_affine_system(clauses)
    result = abstract_lfp(system)
    report = check_end_clauses_abstract(system, result.values)
    assert report.satisfied


def test_end_clause_check_crossing_line_is_violated_with_witness():
    clauses = karr_clauses() + [
        normalize_clause(Implies(And((VarAtom(X2, (x, y)), Eq(x, Fn("1")))), BOT))
    ]
    system = compile_affine_system(clauses)
    result = abstract_lfp(system)
    report = check_end_clauses_abstract(system, result.values)
    assert not report.satisfied
    ((index, witness),) = report.violations
    assert system.clauses[index].head is None
    assert witness == pt(1, 2)


def test_empty_value_satisfies_every_end_clause():
    clauses = karr_clauses() + [
        normalize_clause(Implies(And((VarAtom(X2, (x, y)), Eq(x, Fn("1")))), BOT))
    ]
    system = compile_affine_system(clauses)
    bottom = (AffineSubspace.empty(2),)
    assert check_end_clauses_abstract(system, bottom).satisfied


# ---------------------------------------------------------------------------
# Galois connection laws


def test_galois_example_pair_holds():
    domain = AffineDomain()
    report = galois_law_check(domain, [([pt(0, 0), pt(1, 2)], LINE_Y_EQUALS_2X)])
    assert report.passed


def test_galois_example_pair_false_on_both_sides():
    domain = AffineDomain()
    points = [pt(0, 0)]
    empty = AffineSubspace.empty(2)
    assert not all(domain.gamma_contains(empty, p) for p in points)
    assert not domain.leq(domain.alpha(2, points), empty)
    # The adjunction still holds (both sides false), so the check passes.
    assert galois_law_check(domain, [(points, empty)]).passed


def test_galois_alpha_gamma_identity_random_subspaces():
    rng = random.Random(45)
    domain = AffineDomain()
    for _ in range(100):
        k = rng.randint(1, 3)
        pts = [tuple(Fr(rng.randint(-3, 3)) for _ in range(k)) for _ in range(rng.randint(0, 4))]
        s = affine_hull(k, pts)
        assert domain.alpha(k, domain.gamma_sample(s)) == s


def test_galois_law_check_random_pairs():
    rng = random.Random(46)
    domain = AffineDomain()
    for k in (1, 2, 3):
        report = galois_law_check(domain, sample_pairs(k, 120, rng))
        assert report.passed
        assert report.pairs_checked == 120


# ---------------------------------------------------------------------------
# Soundness against concrete unrolling


def test_karr_unrolling_contained_in_gamma():
    clauses = karr_clauses()
    system = compile_affine_system(clauses)
    result = abstract_lfp(system)
    reached = concrete_unroll(clauses, system.variables, 6)
    points = reached[X2]
    assert pt(0, 0) in points and pt(1, 2) in points and pt(5, 10) in points
    assert all(result.values[0].contains(p) for p in points)
    assert affine_hull(2, sorted(points)) == LINE_Y_EQUALS_2X


def test_abstract_prefixed_samples_bound_the_lfp():
    system = compile_affine_system(karr_clauses())
    lfp = abstract_lfp(system).values
    rng = random.Random(47)
    for _ in range(60):
        pts = [pt(rng.randint(-4, 4), rng.randint(-4, 4)) for _ in range(rng.randint(0, 3))]
        candidate = (affine_hull(2, pts).join(LINE_Y_EQUALS_2X if rng.random() < 0.4 else AffineSubspace.empty(2)),)
        image = abstract_apply_F(system, candidate)
        if all(i.leq(c) for i, c in zip(image, candidate)):
            assert all(l.leq(c) for l, c in zip(lfp, candidate))


def test_abstract_apply_is_monotone_sampled():
    rng = random.Random(48)
    system = compile_affine_system(karr_clauses())
    for _ in range(60):
        pts = [pt(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(rng.randint(0, 3))]
        small = affine_hull(2, pts)
        big = small.join(affine_hull(2, [pt(rng.randint(-3, 3), rng.randint(-3, 3))]))
        out_small = abstract_apply_F(system, (small,))
        out_big = abstract_apply_F(system, (big,))
        assert all(s.leq(b) for s, b in zip(out_small, out_big))
