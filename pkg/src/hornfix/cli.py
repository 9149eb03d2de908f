"""Command-line interface.

Exit codes: 0 on success, 1 when a checked property is violated (an end
clause fails, a triple is not provable, an interpolant falls outside
the sandwich, a Galois law fails), 2 on input errors.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction
from typing import Optional

from . import affine as aff
from . import horn, imp, problem as problem_mod
from .errors import HornfixError
from .sexpr import FormulaReader, SAtom, SList, formula_to_sexpr, read_all
from .structures import FiniteStructure, load_structure


def main(argv: Optional[list[str]] = None) -> None:
    code, report = cli_dispatch(sys.argv[1:] if argv is None else argv)
    if report is not None:
        if report.pop("_json", False):
            print(json.dumps(report, indent=2))
        else:
            print(problem_mod.render_text(report))
    sys.exit(code)


def cli_dispatch(argv) -> tuple[int, Optional[dict]]:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        code, report = args.handler(args)
    except HornfixError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2, None
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2, None
    if report is not None:
        report["_json"] = bool(args.json)
    return code, report


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hornfix",
        description="Solve Horn clause systems by explicit least fixed points.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, handler, **kwargs):
        p = sub.add_parser(name, **kwargs)
        fmt = p.add_mutually_exclusive_group()
        fmt.add_argument("--json", action="store_true", help="emit the JSON report")
        fmt.add_argument("--text", action="store_false", dest="json", help="emit the text report (default)")
        p.set_defaults(handler=handler)
        return p

    def add_mode(p):
        p.add_argument("--mode", choices=("concrete", "affine"), help="override the file's mode")

    p = add("classify", _cmd_classify, help="partition a clause file into base/induction/end clauses")
    p.add_argument("file")
    add_mode(p)

    p = add("phi", _cmd_phi, help="print the extracted fixpoint definitions")
    p.add_argument("file")
    add_mode(p)

    p = add("solve", _cmd_solve, help="minimal solution over a finite structure")
    p.add_argument("file")
    p.add_argument("--structure", help="structure JSON path (overrides the file reference)")
    add_mode(p)

    p = add("dualize", _cmd_dualize, help="swap body and head atoms of every clause")
    p.add_argument("file")
    add_mode(p)

    p = add("interpolate", _cmd_interpolate, help="check candidate solutions against the mu/nu sandwich")
    p.add_argument("file")
    p.add_argument("--structure", help="structure JSON path")
    p.add_argument("--candidates", required=True, help="file of (define X (vars) formula) forms")

    p = add("vcgen", _cmd_vcgen, help="verification conditions of a Hoare triple")
    p.add_argument("file", help="program file")
    p.add_argument("--pre", default="true", help="precondition (s-expression)")
    p.add_argument("--post", default="true", help="postcondition (s-expression)")
    p.add_argument("--modulus", type=int, default=5)

    for name, handler in (("sp", _cmd_sp), ("wp", _cmd_wp)):
        p = add(name, handler, help=f"{name} state table of a program")
        p.add_argument("file", help="program file")
        p.add_argument("--pre" if name == "sp" else "--post", default="true")
        p.add_argument("--modulus", type=int, default=5)
        p.add_argument("--fuel", type=int, default=200)
        p.add_argument("--oracle", action="store_true", help="use the state-enumeration oracle")

    p = add("hoare", _cmd_hoare, help="decide provability of a Hoare triple")
    p.add_argument("file", help="program file")
    p.add_argument("--pre", default="true")
    p.add_argument("--post", default="true")
    p.add_argument("--modulus", type=int, default=5)

    p = add("affine-solve", _cmd_affine_solve, help="abstract least solution over affine equalities")
    p.add_argument("file")

    p = add("galois-check", _cmd_galois, help="sample-check the Galois connection laws")
    p.add_argument("--arity", type=int, default=2)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)

    return parser


# ---------------------------------------------------------------------------
# Shared helpers


def _read(path: str) -> str:
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _load_problem(path: str, args=None) -> problem_mod.ProblemFile:
    override = getattr(args, "mode", None) if args is not None else None
    return problem_mod.parse_problem(_read(path), mode_override=override)


def _structure_for(args, prob, path: str) -> FiniteStructure:
    ref = getattr(args, "structure", None) or prob.structure_path
    if ref is None:
        raise HornfixError("no structure given; pass --structure or add (structure ...) to the file")
    if not os.path.isabs(ref) and not os.path.exists(ref):
        candidate = os.path.join(os.path.dirname(os.path.abspath(path)), ref)
        if os.path.exists(candidate):
            ref = candidate
    return load_structure(ref)


def _table_json(structure: FiniteStructure, table) -> list:
    return [list(t) for t in structure.sort_tuples(table.tuples)]


def _clause_dicts(system: horn.HornSystem) -> list[dict]:
    out = []
    for i, c in enumerate(system.clauses):
        out.append(
            {
                "index": i,
                "kind": c.kind,
                "clause": c.render(),
                "constraint": formula_to_sexpr(c.constraint),
                "body": [formula_to_sexpr(a) for a in c.body],
                "heads": [formula_to_sexpr(a) for a in c.heads],
            }
        )
    return out


def _solution_dict(structure: FiniteStructure, report: horn.SolutionReport) -> dict:
    return {
        "kind": report.kind,
        "iterations": report.iterations,
        "tables": {
            v.name: _table_json(structure, t) for v, t in zip(report.variables, report.tables)
        },
        "satisfies_all": report.satisfies_all,
        "violations": [
            {
                "clause": i,
                "rendered": report.clauses[i].render(),
                "witness": {k: witness[k] for k in sorted(witness)},
            }
            for i, witness in report.violations
        ],
    }


def _phi_dict(system: horn.HornSystem) -> dict:
    phi = horn.build_phi(system)
    return {
        v.name: {"params": list(ps), "formula": formula_to_sexpr(f)}
        for v, ps, f in zip(phi.variables, phi.params, phi.formulas)
    }


def _triple(args) -> tuple[imp.Program, imp.HoareTriple, imp.ArithStructure]:
    program = imp.parse_program(_read(args.file))
    pre = FormulaReader(None).formula(read_all(args.pre)[0])
    post = FormulaReader(None).formula(read_all(args.post)[0])
    triple = imp.HoareTriple(pre, program, post)
    structure = imp.arith_structure(args.modulus, triple)
    return program, triple, structure


# ---------------------------------------------------------------------------
# Handlers


def _cmd_classify(args) -> tuple[int, dict]:
    prob = _load_problem(args.file, args)
    system = horn.classify(prob.clauses, prob.variables)
    clauses = _clause_dicts(system)
    counts = {"B": 0, "I": 0, "E": 0}
    for c in clauses:
        counts[c["kind"]] += 1
    return 0, {
        "command": "classify",
        "mode": prob.mode,
        "variables": [{"name": v.name, "arity": v.arity} for v in system.variables],
        "clauses": clauses,
        "counts": counts,
        "linear": horn.is_linear(system),
    }


def _cmd_phi(args) -> tuple[int, dict]:
    prob = _load_problem(args.file, args)
    system = horn.classify(prob.clauses, prob.variables)
    return 0, {"command": "phi", "definitions": _phi_dict(system)}


def _cmd_solve(args) -> tuple[int, dict]:
    prob = _load_problem(args.file, args)
    if prob.mode == "affine":
        code, out = _affine_report(prob)
        out["command"] = "solve"
        return code, out
    structure = _structure_for(args, prob, args.file)
    system = horn.classify(prob.clauses, prob.variables)
    report = horn.solve_min(structure, system)
    out = {
        "command": "solve",
        "clauses": _clause_dicts(system),
        "phi": _phi_dict(system),
        "solution": _solution_dict(structure, report),
    }
    return (0 if report.satisfies_all else 1), out


def _cmd_dualize(args) -> tuple[int, dict]:
    prob = _load_problem(args.file, args)
    dual = horn.dualize([horn.normalize_clause(c) for c in prob.clauses])
    return 0, {"command": "dualize", "clauses": [c.render() for c in dual]}


def _cmd_interpolate(args) -> tuple[int, dict]:
    prob = _load_problem(args.file)
    structure = _structure_for(args, prob, args.file)
    system = horn.classify(prob.clauses, prob.variables)
    reader = FormulaReader(prob.signature, prob.pvar_map())
    defines = {}
    for form in read_all(_read(args.candidates)):
        shaped = (
            isinstance(form, SList)
            and len(form.items) == 4
            and isinstance(form.items[0], SAtom)
            and form.items[0].text == "define"
            and isinstance(form.items[1], SAtom)
            and isinstance(form.items[2], SList)
            and all(isinstance(p, SAtom) for p in form.items[2].items)
        )
        if not shaped:
            raise HornfixError("candidates file expects (define X (vars) formula) forms")
        name = form.items[1].text
        params = tuple(p.text for p in form.items[2].items)
        defines[name] = (params, reader.formula(form.items[3]))
    candidates = []
    for v in system.variables:
        if v.name not in defines:
            raise HornfixError(f"no candidate defined for {v.name!r}")
        candidates.append(defines[v.name])
    report = horn.check_interpolant(structure, system, candidates)
    out = {
        "command": "interpolate",
        "verdict": report.verdict.value,
        "below_failures": list(report.below_failures),
        "above_failures": list(report.above_failures),
        "mu": {v.name: _table_json(structure, t) for v, t in zip(system.variables, report.mu)},
        "nu": {v.name: _table_json(structure, t) for v, t in zip(system.variables, report.nu)},
        "chi": {v.name: _table_json(structure, t) for v, t in zip(system.variables, report.chi)},
        "fixpoint_free": {
            v.name: flag for v, flag in zip(system.variables, report.fixpoint_free)
        },
    }
    code = 0 if report.verdict is horn.InterpolantVerdict.INSIDE else 1
    return code, out


def _cmd_vcgen(args) -> tuple[int, dict]:
    program, triple, structure = _triple(args)
    system = imp.vcgen(triple)
    report = horn.solve_min(structure, system)
    out = {
        "command": "vcgen",
        "modulus": args.modulus,
        "program_variables": list(program.variables),
        "clauses": _clause_dicts(system),
        "solution": _solution_dict(structure, report),
    }
    return (0 if report.satisfies_all else 1), out


def _cmd_sp(args) -> tuple[int, dict]:
    program, triple, structure = _triple_one_sided(args, pre=args.pre, post="true")
    if args.oracle:
        res = imp.sp_oracle(program, triple.pre, structure, args.fuel)
        table, complete = res.table, res.complete
    else:
        table, complete = imp.sp_lfp(program, triple.pre, structure), None
    return 0, {
        "command": "sp",
        "route": "oracle" if args.oracle else "lfp",
        "modulus": args.modulus,
        "variables": list(program.variables),
        "states": _table_json(structure, table),
        "complete": complete,
    }


def _cmd_wp(args) -> tuple[int, dict]:
    program, triple, structure = _triple_one_sided(args, pre="true", post=args.post)
    if args.oracle:
        res = imp.wp_oracle(program, triple.post, structure, args.fuel)
        table, complete = res.table, res.complete
    else:
        table, complete = imp.wp_dual(program, triple.post, structure), None
    return 0, {
        "command": "wp",
        "route": "oracle" if args.oracle else "dual",
        "modulus": args.modulus,
        "variables": list(program.variables),
        "states": _table_json(structure, table),
        "complete": complete,
    }


def _triple_one_sided(args, pre: str, post: str):
    program = imp.parse_program(_read(args.file))
    pre_f = FormulaReader(None).formula(read_all(pre)[0])
    post_f = FormulaReader(None).formula(read_all(post)[0])
    triple = imp.HoareTriple(pre_f, program, post_f)
    structure = imp.arith_structure(args.modulus, triple)
    return program, triple, structure


def _cmd_hoare(args) -> tuple[int, dict]:
    program, triple, structure = _triple(args)
    report = imp.check_hoare(triple, structure)
    out = {
        "command": "hoare",
        "modulus": args.modulus,
        "provable": report.provable,
        "invariants": {
            name: _table_json(structure, table) for name, table in sorted(report.invariants.items())
        },
        "violations": _solution_dict(structure, report.solution)["violations"],
    }
    return (0 if report.provable else 1), out


def _cmd_affine_solve(args) -> tuple[int, dict]:
    return _affine_report(_load_problem(args.file))


def _affine_report(prob) -> tuple[int, dict]:
    system = aff.compile_affine_system(
        [horn.normalize_clause(c) for c in prob.clauses],
        prob.variables if prob.variables else None,
    )
    result = aff.abstract_lfp(system)
    ends = aff.check_end_clauses_abstract(system, result.values)
    out = {
        "command": "affine-solve",
        "iterations": result.iterations,
        "trace": [list(t) for t in result.trace],
        "strict_steps": list(result.strict_steps),
        "solution": {
            v.name: {"equations": s.equations(), **s.to_json()}
            for v, s in zip(system.variables, result.values)
        },
        "end_clauses": {
            "satisfied": ends.satisfied,
            "violations": [
                {"clause": i, "witness": [str(Fraction(x)) for x in point]}
                for i, point in ends.violations
            ],
        },
    }
    return (0 if ends.satisfied else 1), out


def _cmd_galois(args) -> tuple[int, dict]:
    rng = random.Random(args.seed)
    domain = aff.AffineDomain()
    pairs = aff.sample_pairs(args.arity, args.samples, rng)
    report = aff.galois_law_check(domain, pairs)
    out = {
        "command": "galois-check",
        "arity": args.arity,
        "samples": args.samples,
        "seed": args.seed,
        "checked": report.pairs_checked,
        "failures": list(report.failures),
        "passed": report.passed,
    }
    return (0 if report.passed else 1), out


if __name__ == "__main__":
    main()
