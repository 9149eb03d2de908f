"""The file formats and the command-line entry points, end to end.

Problems live in s-expression files, finite structures in JSON files.
This script writes both, drives the CLI dispatcher programmatically,
and shows the exit-code convention: 0 for success, 1 when a checked
property fails (here: a violated end clause), 2 for input errors.
"""

import json
import pathlib
import tempfile

from hornfix.cli import cli_dispatch
from hornfix.problem import parse_problem, print_problem, render_text

PROBLEM = """\
; can node c be avoided from node a?
(declare-fun a 0)
(declare-fun c 0)
(declare-pred E 2)
(declare-var X 2)
(clause (X u u))
(clause (=> (and (X u w) (E w v)) (X u v)))
(clause (=> (X a c) false))
"""

GRAPH = {
    "domain": ["a", "b", "c"],
    "functions": {"a": "a", "c": "c"},
    "relations": {"E": [["a", "b"], ["b", "c"]]},
}

with tempfile.TemporaryDirectory() as tmp:
    root = pathlib.Path(tmp)
    problem_path = root / "avoid.horn"
    graph_path = root / "path.json"
    problem_path.write_text(PROBLEM)
    graph_path.write_text(json.dumps(GRAPH))

    # Parsing is lossless up to formatting: parse(print(parse(text))) fixes.
    parsed = parse_problem(PROBLEM)
    assert parse_problem(print_problem(parsed)) == parsed
    print("problem file round-trips; clauses:", len(parsed.clauses))

    code, report = cli_dispatch(
        ["solve", str(problem_path), "--structure", str(graph_path)]
    )
    report.pop("_json", None)
    print(f"\n$ hornfix solve avoid.horn --structure path.json   (exit {code})")
    print(render_text(report["solution"]))

    code2, report2 = cli_dispatch(["dualize", str(problem_path)])
    report2.pop("_json", None)
    print(f"\n$ hornfix dualize avoid.horn   (exit {code2})")
    print(render_text(report2))

    code3, _ = cli_dispatch(["solve", str(root / "missing.horn")])
    print(f"\n$ hornfix solve missing.horn   (exit {code3}, input error)")
