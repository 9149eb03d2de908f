"""Problem files: declarations plus clauses, with reports for the CLI.

A problem file is a sequence of top-level s-expression forms::

    (mode concrete)                 ; or affine; optional, concrete by default
    (declare-fun f 2)               ; function symbol with arity
    (declare-pred E 2)              ; base predicate symbol
    (declare-var X 2)               ; predicate variable (the unknown)
    (clause (=> (and (X u w) (E w v)) (X u v)))
    (structure "graph.json")        ; optional default structure reference

Declarations precede uses.  In affine mode the signature is implicit
(affine expressions over rational literals with ``aff=`` equalities),
so declared functions and predicates are not consulted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .errors import ParseError
from .logic import Formula, PredicateVariable, Signature
from .sexpr import (
    FormulaReader,
    SAtom,
    SList,
    formula_to_sexpr,
    normalize_numeral,
    read_all,
)


@dataclass(frozen=True)
class ProblemFile:
    signature: Signature
    variables: tuple[PredicateVariable, ...]
    clauses: tuple[Formula, ...]
    mode: str = "concrete"
    structure_path: Optional[str] = None

    def pvar_map(self) -> dict:
        return {v.name: v for v in self.variables}


def parse_problem(text: str, mode_override: Optional[str] = None) -> ProblemFile:
    forms = read_all(text)
    mode = None
    for form in forms:
        if isinstance(form, SList) and form.items and isinstance(form.items[0], SAtom):
            if form.items[0].text == "mode":
                if mode is not None:
                    raise ParseError("one mode per file", form.line, form.col)
                if len(form.items) != 2 or not isinstance(form.items[1], SAtom):
                    raise ParseError("mode expects one of: concrete, affine", form.line, form.col)
                mode = form.items[1].text
                if mode not in ("concrete", "affine"):
                    raise ParseError(f"unknown mode {mode!r}", form.line, form.col)
    mode = mode_override or mode or "concrete"

    functions: dict[str, int] = {}
    predicates: dict[str, int] = {}
    variables: list[PredicateVariable] = []
    clauses: list[Formula] = []
    structure_path: Optional[str] = None

    def arity_of(form: SList, what: str) -> tuple[str, int]:
        if (
            len(form.items) != 3
            or not isinstance(form.items[1], SAtom)
            or not isinstance(form.items[2], SAtom)
        ):
            raise ParseError(f"{what} expects a name and an arity", form.line, form.col)
        name = form.items[1].text
        try:
            arity = int(form.items[2].text)
        except ValueError:
            raise ParseError(f"{what}: arity must be an integer", form.items[2].line, form.items[2].col)
        if arity < 0:
            raise ParseError(f"{what}: arity must be non-negative", form.items[2].line, form.items[2].col)
        return name, arity

    for form in forms:
        if not isinstance(form, SList) or not form.items or not isinstance(form.items[0], SAtom):
            line = getattr(form, "line", 1)
            col = getattr(form, "col", 1)
            raise ParseError("expected a (keyword ...) form", line, col)
        head = form.items[0].text
        if head == "mode":
            continue
        if head == "declare-fun":
            name, arity = arity_of(form, "declare-fun")
            if normalize_numeral(name) is not None and arity != 0:
                raise ParseError("numeric constants must have arity 0", form.line, form.col)
            functions[name] = arity
        elif head == "declare-pred":
            name, arity = arity_of(form, "declare-pred")
            predicates[name] = arity
        elif head == "declare-var":
            name, arity = arity_of(form, "declare-var")
            if any(v.name == name for v in variables):
                raise ParseError(f"predicate variable {name!r} declared twice", form.line, form.col)
            variables.append(PredicateVariable(name, arity))
        elif head == "clause":
            if len(form.items) != 2:
                raise ParseError("clause expects one formula", form.line, form.col)
            signature = None if mode == "affine" else Signature(functions, predicates)
            reader = FormulaReader(signature, {v.name: v for v in variables})
            clauses.append(reader.formula(form.items[1]))
        elif head == "structure":
            if len(form.items) != 2 or not isinstance(form.items[1], SAtom):
                raise ParseError("structure expects a quoted path", form.line, form.col)
            raw = form.items[1].text
            structure_path = raw[1:-1] if raw.startswith('"') else raw
        else:
            raise ParseError(f"unknown form {head!r}", form.line, form.col)

    return ProblemFile(
        signature=Signature(functions, predicates),
        variables=tuple(variables),
        clauses=tuple(clauses),
        mode=mode,
        structure_path=structure_path,
    )


def print_problem(problem: ProblemFile) -> str:
    lines = []
    if problem.mode != "concrete":
        lines.append(f"(mode {problem.mode})")
    for name in sorted(problem.signature.functions):
        lines.append(f"(declare-fun {name} {problem.signature.functions[name]})")
    for name in sorted(problem.signature.predicates):
        lines.append(f"(declare-pred {name} {problem.signature.predicates[name]})")
    for v in problem.variables:
        lines.append(f"(declare-var {v.name} {v.arity})")
    if problem.structure_path is not None:
        lines.append(f'(structure "{problem.structure_path}")')
    for c in problem.clauses:
        lines.append(f"(clause {formula_to_sexpr(c)})")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Text rendering of reports (derived from the JSON-able dict only)


def render_text(data, indent: int = 0) -> str:
    """Deterministic human-readable rendering of a report dictionary."""
    return "\n".join(_render_lines(data, indent))


def _render_lines(data, indent: int) -> list[str]:
    pad = "  " * indent
    lines: list[str] = []
    if isinstance(data, dict):
        for key, value in data.items():
            if isinstance(value, (dict, list)) and value:
                lines.append(f"{pad}{key}:")
                lines.extend(_render_lines(value, indent + 1))
            else:
                lines.append(f"{pad}{key}: {_scalar(value)}")
    elif isinstance(data, list):
        for item in data:
            if isinstance(item, list) and all(not isinstance(x, (dict, list)) for x in item):
                lines.append(f"{pad}- [{', '.join(_scalar(x) for x in item)}]")
            elif isinstance(item, (dict, list)) and item:
                lines.append(f"{pad}-")
                lines.extend(_render_lines(item, indent + 1))
            else:
                lines.append(f"{pad}- {_scalar(item)}")
    else:
        lines.append(f"{pad}{_scalar(data)}")
    return lines


def _scalar(value) -> str:
    if value is True:
        return "yes"
    if value is False:
        return "no"
    if value is None:
        return "-"
    if isinstance(value, (dict, list)) and not value:
        return "(none)"
    return str(value)
