"""Mini-language semantics, verification conditions, sp/wp, Hoare checking."""

import random

import pytest

from hornfix.errors import ParseError, SignatureError
from hornfix.horn import is_linear, solve_max, solve_min
from hornfix.imp import (
    Assign,
    HoareTriple,
    If,
    Seq,
    While,
    arith_structure,
    check_hoare,
    formula_states,
    parse_program,
    run,
    sp_lfp,
    sp_oracle,
    vcgen,
    verification_conditions,
    wp_dual,
    wp_oracle,
)
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
    predicate_variables,
)
from hornfix.sexpr import parse_formula

from generators import PROGRAM_CORPUS, corpus_triple, random_program_text
from oracles import GroundSystem

x, y = Var("x"), Var("y")


# ---------------------------------------------------------------------------
# Parsing


def test_parse_simple_program():
    prog = parse_program("vars x, y;\nx := 0;\ny := x + 1\n")
    assert prog.variables == ("x", "y")
    assert prog.body == Seq(Assign("x", Fn("0")), Assign("y", Fn("+", (x, Fn("1")))))


def test_parse_while_and_if():
    prog = parse_program(
        "vars x;\nwhile !(x = 0) do { if x <= 2 then { x := x - 1 } else { skip } }\n"
    )
    loop = prog.body
    assert isinstance(loop, While)
    assert loop.guard == Not(Eq(x, Fn("0")))
    assert isinstance(loop.body, If)
    assert loop.body.guard == Atom("<=", (x, Fn("2")))


def test_parse_precedence_and_parens():
    prog = parse_program("vars x, y;\nx := x + 1 * y\n")
    assert prog.body == Assign("x", Fn("+", (x, Fn("*", (Fn("1"), y)))))
    prog2 = parse_program("vars x, y;\nx := (x + 1) * y\n")
    assert prog2.body == Assign("x", Fn("*", (Fn("+", (x, Fn("1"))), y)))


def test_parse_error_carries_position():
    with pytest.raises(ParseError) as err:
        parse_program("vars x;\nx := ;\n")
    assert err.value.line == 2


def test_parse_trailing_semicolon_tolerated():
    prog = parse_program("vars x;\nx := 0;\n")
    assert prog.body == Assign("x", Fn("0"))


def test_undeclared_variable_rejected():
    with pytest.raises(SignatureError):
        parse_program("vars x;\ny := 0\n")


def test_predicate_variables_banned_from_guards():
    from hornfix.imp import Program, While

    unknown = VarAtom(PredicateVariable("G", 1), (x,))
    with pytest.raises(SignatureError):
        Program(("x",), While(unknown, Assign("x", Fn("0"))))


# ---------------------------------------------------------------------------
# Operational semantics


def test_run_skip_is_identity():
    prog = parse_program("vars x;\nskip\n")
    st = arith_structure(5, prog)
    assert run(prog, {"x": 3}, 10, st) == {"x": 3}


def test_run_two_increments():
    prog = parse_program("vars x;\nx := x + 1; x := x + 1\n")
    st = arith_structure(5, prog)
    assert run(prog, {"x": 0}, 10, st) == {"x": 2}


def test_run_countdown_with_enough_fuel():
    prog = parse_program("vars x;\nwhile !(x = 0) do { x := x - 1 }\n")
    st = arith_structure(7, prog)
    assert run(prog, {"x": 5}, 5, st) == {"x": 0}
    assert run(prog, {"x": 5}, 4, st) is None


def test_run_modular_wraparound():
    prog = parse_program("vars x;\nx := x + 1\n")
    st = arith_structure(5, prog)
    assert run(prog, {"x": 4}, 10, st) == {"x": 0}


# ---------------------------------------------------------------------------
# Verification conditions


def _triple(pre_text, prog_text, post_text):
    prog = parse_program(prog_text)
    return HoareTriple(parse_formula(pre_text), prog, parse_formula(post_text))


def test_vc_skip_is_single_implication():
    triple = _triple("(= x 0)", "vars x;\nskip\n", "(= x 0)")
    assert verification_conditions(triple) == (Implies(Eq(x, Fn("0")), Eq(x, Fn("0"))),)


def test_vc_assignment_substitutes():
    triple = _triple("true", "vars x;\nx := x + 1\n", "(= x 1)")
    assert verification_conditions(triple) == (
        Implies(TOP, Eq(Fn("+", (x, Fn("1"))), Fn("1"))),
    )


def test_vc_while_has_entry_body_exit():
    prog = parse_program("vars x;\nwhile !(x = 0) do { x := x - 1 }\n")
    pre, post = parse_formula("(= x 3)"), parse_formula("(= x 0)")
    vcs = verification_conditions(HoareTriple(pre, prog, post))
    inv = PredicateVariable("I1", 1)
    guard = Not(Eq(x, Fn("0")))
    assert vcs == (
        Implies(And((VarAtom(inv, (x,)), guard)), VarAtom(inv, (Fn("-", (x, Fn("1"))),))),
        Implies(pre, VarAtom(inv, (x,))),
        Implies(And((VarAtom(inv, (x,)), Not(guard))), post),
    )


def test_vc_sequencing_introduces_midpoint():
    triple = _triple("true", "vars x;\nx := 1; x := x + 1\n", "(= x 2)")
    vcs = verification_conditions(triple)
    mid = PredicateVariable("I1", 1)
    assert vcs == (
        Implies(TOP, VarAtom(mid, (Fn("1"),))),
        Implies(VarAtom(mid, (x,)), Eq(Fn("+", (x, Fn("1"))), Fn("2"))),
    )


def test_vc_fresh_names_skip_reserved():
    inv = PredicateVariable("I1", 1)
    prog = parse_program("vars x;\nx := 0; x := 1\n")
    triple = HoareTriple(VarAtom(inv, (x,)), prog, TOP)
    vcs = verification_conditions(triple)
    introduced = {
        pv.name for vc in vcs for pv in predicate_variables(vc) if pv.name != "I1"
    }
    assert introduced == {"I2"}


def test_vcgen_is_linear_on_random_programs():
    rng = random.Random(31)
    for _ in range(30):
        prog = parse_program(random_program_text(rng))
        triple = HoareTriple(parse_formula("(= x 0)"), prog, parse_formula("(= y 0)"))
        system = vcgen(triple)
        assert is_linear(system)
        names = [v.name for v in system.variables]
        assert len(names) == len(set(names))


# ---------------------------------------------------------------------------
# sp / wp oracles and fixpoint routes


def test_sp_oracle_skip_is_precondition_states():
    prog = parse_program("vars x;\nskip\n")
    pre = parse_formula("(<= x 2)")
    st = arith_structure(5, prog, pre)
    res = sp_oracle(prog, pre, st, 10)
    assert res.complete
    assert res.table == formula_states(prog, pre, st)


def test_sp_oracle_constant_assignment():
    prog = parse_program("vars x;\nx := 0\n")
    st = arith_structure(5, prog)
    res = sp_oracle(prog, TOP, st, 10)
    assert res.table.tuples == frozenset({(0,)})


def test_wp_oracle_diverging_loop_is_liberal():
    prog = parse_program("vars x;\nwhile true do { skip }\n")
    st = arith_structure(5, prog)
    res = wp_oracle(prog, BOT, st, 50)
    assert res.table.tuples == frozenset((e,) for e in st.domain)
    assert not res.complete


def test_sp_lfp_matches_oracle_on_examples():
    prog = parse_program("vars x;\nx := 0\n")
    st = arith_structure(5, prog)
    assert sp_lfp(prog, TOP, st) == sp_oracle(prog, TOP, st, 50).table

    countdown = parse_program("vars x;\nwhile !(x = 0) do { x := x - 1 }\n")
    pre = parse_formula("(= x 3)")
    st2 = arith_structure(5, countdown, pre)
    assert sp_lfp(countdown, pre, st2).tuples == frozenset({(0,)})
    assert sp_lfp(countdown, pre, st2) == sp_oracle(countdown, pre, st2, 200).table


def test_wp_dual_matches_oracle_on_examples():
    prog = parse_program("vars x;\nx := x + 1\n")
    post = parse_formula("(= x 1)")
    st = arith_structure(5, prog, post)
    assert wp_dual(prog, post, st).tuples == frozenset({(0,)})
    assert wp_dual(prog, post, st) == wp_oracle(prog, post, st, 50).table


def test_wp_dual_diverging_loop_is_everything():
    prog = parse_program("vars x;\nwhile true do { skip }\n")
    st = arith_structure(5, prog)
    assert wp_dual(prog, BOT, st).tuples == frozenset((e,) for e in st.domain)
    assert sp_lfp(prog, TOP, st).tuples == frozenset()


# ---------------------------------------------------------------------------
# Hoare checking


def test_check_hoare_skip():
    triple = _triple("true", "vars x;\nskip\n", "true")
    st = arith_structure(5, triple.prog)
    assert check_hoare(triple, st).provable


def test_check_hoare_loop_with_invariant_table():
    prog = parse_program(
        "vars x;\nwhile (x <= 5) && !(x = 6) do { x := x + 1 }\n"
    )
    triple = HoareTriple(parse_formula("(= x 0)"), prog, parse_formula("(= x 6)"))
    st = arith_structure(10, triple)
    report = check_hoare(triple, st)
    assert report.provable
    assert report.invariants["I1"].tuples == frozenset((i,) for i in range(7))


def test_check_hoare_single_state_counterexample():
    triple = _triple("true", "vars x;\nx := 0\n", "(= x 1)")
    st = arith_structure(5, triple.prog, triple.post)
    report = check_hoare(triple, st)
    assert not report.provable


def test_invariant_sandwich_on_enumerated_solutions():
    # One loop, one invariant variable, tiny modulus: every relation
    # assignment solving the verification conditions lies between the
    # least and the greatest solution.
    prog = parse_program("vars x;\nwhile !(x = 0) do { x := x - 1 }\n")
    triple = HoareTriple(parse_formula("(= x 2)"), prog, parse_formula("(= x 0)"))
    st = arith_structure(3, triple)
    system = vcgen(triple)
    assert [v.name for v in system.variables] == ["I1"]
    mu = solve_min(st, system).tables
    nu = solve_max(st, system.clauses, system.variables).tables
    ground = GroundSystem(st, system.clauses, system.variables)
    mu_mask = ground.tables_to_mask(mu)
    nu_mask = ground.tables_to_mask(nu)
    solutions = list(ground.solutions())
    assert solutions
    for sol in solutions:
        assert sol & mu_mask == mu_mask
        assert sol | nu_mask == nu_mask


def test_corpus_shapes_parse_and_classify():
    for entry in PROGRAM_CORPUS:
        program, triple, structure = corpus_triple(entry, 5)
        system = vcgen(triple)
        assert is_linear(system)
