"""Problem file parsing, report determinism, CLI dispatch and exit codes."""

import json

import pytest

from hornfix.cli import cli_dispatch
from hornfix.errors import ParseError
from hornfix.problem import parse_problem, print_problem, render_text

REACH = """\
; reflexive-transitive reachability
(declare-fun a 0)
(declare-fun c 0)
(declare-pred E 2)
(declare-var X 2)
(clause (X u u))
(clause (=> (and (X u w) (E w v)) (X u v)))
"""

REACH_UNSAT = REACH + "(clause (=> (X a c) false))\n"

KARR = """\
(mode affine)
(declare-var X 2)
(clause (X 0 0))
(clause (=> (X x y) (X (+ x 1) (+ y 2))))
(clause (=> (and (X x y) (aff= y (+ (* 2 x) 1))) false))
"""

PATH3 = {
    "domain": ["a", "b", "c"],
    "functions": {"a": "a", "c": "c"},
    "relations": {"E": [["a", "b"], ["b", "c"]]},
}

G3 = {
    "domain": ["a", "b", "c"],
    "functions": {"a": "a", "c": "c"},
    "relations": {"E": [["a", "b"]]},
}


@pytest.fixture
def workdir(tmp_path):
    (tmp_path / "reach.horn").write_text(REACH)
    (tmp_path / "reach_unsat.horn").write_text(REACH_UNSAT)
    (tmp_path / "karr.horn").write_text(KARR)
    (tmp_path / "path3.json").write_text(json.dumps(PATH3))
    (tmp_path / "g3.json").write_text(json.dumps(G3))
    (tmp_path / "notahorn.horn").write_text(
        "(declare-var X 1)\n(declare-var Y 1)\n(clause (=> (X u) (or (X u) (Y u))))\n"
    )
    (tmp_path / "countdown.imp").write_text(
        "vars x;\nwhile !(x = 0) do { x := x - 1 }\n"
    )
    return tmp_path


# ---------------------------------------------------------------------------
# Problem files


def test_parse_problem_reachability():
    prob = parse_problem(REACH)
    assert prob.mode == "concrete"
    assert [v.name for v in prob.variables] == ["X"]
    assert len(prob.clauses) == 2
    assert prob.signature.predicates == {"E": 2}


def test_parse_problem_round_trip():
    for text in (REACH, REACH_UNSAT, KARR):
        prob = parse_problem(text)
        assert parse_problem(print_problem(prob)) == prob


def test_parse_problem_empty_file_is_valid():
    prob = parse_problem("")
    assert prob.clauses == ()
    assert prob.variables == ()


def test_parse_problem_arity_error_located():
    bad = "(declare-var X 2)\n(clause (X u v w))\n"
    with pytest.raises(ParseError) as err:
        parse_problem(bad)
    assert err.value.line == 2


def test_parse_problem_one_mode_per_file():
    with pytest.raises(ParseError):
        parse_problem("(mode affine)\n(mode concrete)\n")


def test_render_text_deterministic():
    report = {"a": 1, "tables": {"X": [[0, 1], [1, 2]]}, "flag": True, "none": None}
    assert render_text(report) == render_text(report)
    assert "yes" in render_text(report)


# ---------------------------------------------------------------------------
# CLI dispatch and exit codes


def run_cli(*argv):
    return cli_dispatch(list(argv))


def test_cli_solve_satisfiable(workdir):
    code, report = run_cli("solve", str(workdir / "reach.horn"), "--structure", str(workdir / "g3.json"))
    assert code == 0
    assert report["solution"]["satisfies_all"] is True
    assert report["solution"]["tables"]["X"] == [
        ["a", "a"], ["a", "b"], ["b", "b"], ["c", "c"],
    ]


def test_cli_solve_violated_end_clause(workdir):
    code, report = run_cli(
        "solve", str(workdir / "reach_unsat.horn"), "--structure", str(workdir / "path3.json")
    )
    assert code == 1
    assert report["solution"]["violations"][0]["clause"] == 2


def test_cli_solve_unsat_on_g3_is_fine(workdir):
    code, report = run_cli(
        "solve", str(workdir / "reach_unsat.horn"), "--structure", str(workdir / "g3.json")
    )
    assert code == 0


def test_cli_classify_not_horn_is_input_error(workdir, capsys):
    code, report = run_cli("classify", str(workdir / "notahorn.horn"))
    assert code == 2
    assert report is None
    assert "error" in capsys.readouterr().err


def test_cli_missing_file_is_input_error(workdir, capsys):
    code, report = run_cli("solve", str(workdir / "nope.horn"), "--structure", str(workdir / "g3.json"))
    assert code == 2


def test_cli_classify_and_phi(workdir):
    code, report = run_cli("classify", str(workdir / "reach_unsat.horn"))
    assert code == 0
    assert report["counts"] == {"B": 1, "I": 1, "E": 1}
    assert report["linear"] is True
    code, report = run_cli("phi", str(workdir / "reach.horn"))
    assert code == 0
    assert "X" in report["definitions"]


def test_cli_dualize(workdir):
    code, report = run_cli("dualize", str(workdir / "reach_unsat.horn"))
    assert code == 0
    assert report["clauses"][0] == "(=> (X u u) false)"


def test_cli_structure_reference_in_file(tmp_path):
    (tmp_path / "g.json").write_text(json.dumps(G3))
    text = REACH + '(structure "g.json")\n'
    (tmp_path / "reach_ref.horn").write_text(text)
    code, report = run_cli("solve", str(tmp_path / "reach_ref.horn"))
    assert code == 0


def test_cli_interpolate(workdir):
    candidates = workdir / "cand.sexpr"
    candidates.write_text("(define X (p q) (or (= p q) (E p q)))\n")
    code, report = run_cli(
        "interpolate",
        str(workdir / "reach.horn"),
        "--structure",
        str(workdir / "g3.json"),
        "--candidates",
        str(candidates),
    )
    assert code == 0
    assert report["verdict"] == "inside"
    candidates.write_text("(define X (p q) false)\n")
    code, report = run_cli(
        "interpolate",
        str(workdir / "reach.horn"),
        "--structure",
        str(workdir / "g3.json"),
        "--candidates",
        str(candidates),
    )
    assert code == 1
    assert report["verdict"] == "below-mu-violation"


def test_cli_vcgen_and_hoare(workdir):
    code, report = run_cli(
        "vcgen", str(workdir / "countdown.imp"),
        "--pre", "(= x 3)", "--post", "(= x 0)", "--modulus", "7",
    )
    assert code == 0
    assert report["solution"]["satisfies_all"] is True
    code, report = run_cli(
        "hoare", str(workdir / "countdown.imp"),
        "--pre", "(= x 3)", "--post", "(= x 1)", "--modulus", "7",
    )
    assert code == 1
    assert report["provable"] is False


def test_cli_sp_wp_routes_agree(workdir):
    args = ["sp", str(workdir / "countdown.imp"), "--pre", "(= x 3)", "--modulus", "7"]
    code, lfp_report = run_cli(*args)
    code2, oracle_report = run_cli(*args, "--oracle")
    assert code == code2 == 0
    assert lfp_report["states"] == oracle_report["states"] == [[0]]
    assert oracle_report["complete"] is True

    argsw = ["wp", str(workdir / "countdown.imp"), "--post", "(= x 0)", "--modulus", "7"]
    code, wp_report = run_cli(*argsw)
    code2, wp_oracle_report = run_cli(*argsw, "--oracle")
    assert code == code2 == 0
    assert wp_report["states"] == wp_oracle_report["states"]


def test_cli_affine_solve(workdir):
    code, report = run_cli("affine-solve", str(workdir / "karr.horn"))
    assert code == 0
    assert report["solution"]["X"]["equations"] == ["x0 - 1/2 x1 = 0"]
    assert report["end_clauses"]["satisfied"] is True
    assert report["iterations"] <= 4


def test_cli_affine_solve_violation(tmp_path):
    text = KARR.replace("(+ (* 2 x) 1)", "(* 2 x)")
    (tmp_path / "bad.horn").write_text(text)
    code, report = run_cli("affine-solve", str(tmp_path / "bad.horn"))
    assert code == 1
    assert report["end_clauses"]["violations"]


def test_cli_galois_check():
    code, report = run_cli("galois-check", "--arity", "2", "--samples", "50", "--seed", "3")
    assert code == 0
    assert report["passed"] is True


def test_cli_reports_byte_identical_and_json_clean(workdir, capsys):
    argv = ["solve", str(workdir / "reach.horn"), "--structure", str(workdir / "g3.json"), "--json"]
    import hornfix.cli as cli

    with pytest.raises(SystemExit) as exit1:
        cli.main(argv)
    first = capsys.readouterr().out
    with pytest.raises(SystemExit) as exit2:
        cli.main(argv)
    second = capsys.readouterr().out
    assert exit1.value.code == exit2.value.code == 0
    assert first == second
    parsed = json.loads(first)
    assert parsed["command"] == "solve"


def test_cli_unknown_subcommand_exits_2():
    with pytest.raises(SystemExit) as err:
        cli_dispatch(["frobnicate"])
    assert err.value.code == 2


def test_cli_mode_override_routes_solve_to_affine(tmp_path):
    text = KARR.replace("(mode affine)\n", "")
    (tmp_path / "karr_nomode.horn").write_text(text)
    code, report = run_cli("solve", str(tmp_path / "karr_nomode.horn"), "--mode", "affine")
    assert code == 0
    assert report["solution"]["X"]["equations"] == ["x0 - 1/2 x1 = 0"]


def test_cli_text_flag_is_accepted(workdir):
    code, report = run_cli("classify", str(workdir / "reach.horn"), "--text")
    assert code == 0 and report is not None
