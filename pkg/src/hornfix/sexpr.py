"""S-expression reader and printer for terms and formulas.

Concrete syntax::

    (forall (u) (=> (P u) (X u)))
    (exists (w) (and (X u w) (E w v)))
    (or (= t s) (not (Q t)) false true)

Predicate variables are declared by the caller, never inferred; any
undeclared lowercase-style symbol in term position is an individual
variable, while declared nullary function symbols and numeric literals
are constants.  ``aff=`` is accepted as an alias for ``=`` (used by the
affine clause files).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Union

from .errors import ParseError
from .logic import (
    BOT,
    TOP,
    And,
    Atom,
    Eq,
    Exists,
    Fn,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    PredicateVariable,
    Signature,
    Term,
    Var,
    VarAtom,
)

_NUMERAL = re.compile(r"-?\d+(/\d+)?\Z")

_CONNECTIVES = frozenset(
    {"and", "or", "not", "=>", "forall", "exists", "=", "aff=", "true", "false"}
)


@dataclass(frozen=True)
class SAtom:
    text: str
    line: int
    col: int


@dataclass(frozen=True)
class SList:
    items: tuple["SNode", ...]
    line: int
    col: int


SNode = Union[SAtom, SList]


def tokenize(text: str):
    """Yield (token, line, col); tokens are '(', ')', strings, and symbols."""
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            col += 1
            i += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield (c, line, col)
            col += 1
            i += 1
        elif c == '"':
            start_line, start_col = line, col
            j = i + 1
            while j < n and text[j] != '"':
                if text[j] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                j += 1
            if j >= n:
                raise ParseError("unterminated string", start_line, start_col)
            yield (text[i : j + 1], line, col)
            col += j + 1 - i
            i = j + 1
        else:
            j = i
            while j < n and text[j] not in ' \t\r\n();"':
                j += 1
            yield (text[i:j], line, col)
            col += j - i
            i = j


def read_all(text: str) -> list[SNode]:
    """Read every top-level s-expression in the text."""
    stack: list[tuple[list[SNode], int, int]] = []
    top: list[SNode] = []
    last_line = last_col = 1
    for tok, line, col in tokenize(text):
        last_line, last_col = line, col
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
        else:
            node = SAtom(tok, line, col)
            (stack[-1][0] if stack else top).append(node)
    if stack:
        _, l0, c0 = stack[-1]
        raise ParseError("unclosed '('", l0, c0)
    return top


def read_one(text: str) -> SNode:
    nodes = read_all(text)
    if len(nodes) != 1:
        raise ParseError(f"expected exactly one expression, found {len(nodes)}", 1, 1)
    return nodes[0]


def normalize_numeral(text: str) -> Optional[str]:
    """Canonical spelling of an integer or rational literal, or None."""
    if not _NUMERAL.match(text):
        return None
    return str(Fraction(text))


class FormulaReader:
    """Builds terms and formulas from s-expression nodes.

    A ``signature`` of None disables symbol checking (affine mode);
    numeric literals then become nullary function symbols directly.
    """

    def __init__(
        self,
        signature: Optional[Signature],
        pvars: Mapping[str, PredicateVariable] = (),
    ):
        self.signature = signature
        self.pvars = dict(pvars)

    def _err(self, msg: str, node: SNode) -> ParseError:
        return ParseError(msg, node.line, node.col)

    def term(self, node: SNode) -> Term:
        if isinstance(node, SAtom):
            num = normalize_numeral(node.text)
            if num is not None:
                if self.signature is not None and num not in self.signature.functions:
                    raise self._err(f"undeclared constant {num!r}", node)
                return Fn(num)
            if node.text in self.pvars:
                raise self._err(f"predicate variable {node.text!r} used as a term", node)
            if self.signature is not None and node.text in self.signature.functions:
                if self.signature.functions[node.text] != 0:
                    raise self._err(f"function {node.text!r} needs arguments", node)
                return Fn(node.text)
            return Var(node.text)
        if not node.items or not isinstance(node.items[0], SAtom):
            raise self._err("expected a function application", node)
        head = node.items[0]
        args = tuple(self.term(item) for item in node.items[1:])
        if self.signature is not None:
            arity = self.signature.functions.get(head.text)
            if arity is None:
                raise self._err(f"undeclared function symbol {head.text!r}", head)
            if arity != len(args):
                raise self._err(
                    f"function {head.text!r} expects {arity} arguments, got {len(args)}", head
                )
        return Fn(head.text, args)

    def formula(self, node: SNode) -> Formula:
        if isinstance(node, SAtom):
            if node.text == "true":
                return TOP
            if node.text == "false":
                return BOT
            return self._atom(node, ())
        if not node.items:
            raise self._err("empty list is not a formula", node)
        head = node.items[0]
        if not isinstance(head, SAtom):
            raise self._err("expected a connective or predicate symbol", node)
        rest = node.items[1:]
        name = head.text
        if name == "and":
            return And(tuple(self.formula(x) for x in rest)) if rest else TOP
        if name == "or":
            return Or(tuple(self.formula(x) for x in rest)) if rest else BOT
        if name == "not":
            if len(rest) != 1:
                raise self._err("'not' takes one argument", node)
            return Not(self.formula(rest[0]))
        if name == "=>":
            if len(rest) != 2:
                raise self._err("'=>' takes two arguments", node)
            return Implies(self.formula(rest[0]), self.formula(rest[1]))
        if name in ("=", "aff="):
            if len(rest) != 2:
                raise self._err(f"{name!r} takes two arguments", node)
            return Eq(self.term(rest[0]), self.term(rest[1]))
        if name in ("forall", "exists"):
            if len(rest) != 2 or not isinstance(rest[0], SList):
                raise self._err(f"{name!r} takes a variable list and a body", node)
            names: list[str] = []
            for item in rest[0].items:
                if not isinstance(item, SAtom) or normalize_numeral(item.text) is not None:
                    raise self._err("binder expects variable names", item)
                names.append(item.text)
            if not names:
                raise self._err("binder needs at least one variable", rest[0])
            body = self.formula(rest[1])
            ctor = Forall if name == "forall" else Exists
            for v in reversed(names):
                body = ctor(v, body)
            return body
        return self._atom(head, rest)

    def _atom(self, head: SAtom, rest: tuple[SNode, ...]) -> Formula:
        name = head.text
        args = tuple(self.term(x) for x in rest)
        if name in self.pvars:
            pv = self.pvars[name]
            if pv.arity != len(args):
                raise self._err(
                    f"predicate variable {name!r} expects {pv.arity} arguments, got {len(args)}",
                    head,
                )
            return VarAtom(pv, args)
        if self.signature is not None:
            arity = self.signature.predicates.get(name)
            if arity is None:
                raise self._err(f"undeclared predicate symbol {name!r}", head)
            if arity != len(args):
                raise self._err(
                    f"predicate {name!r} expects {arity} arguments, got {len(args)}", head
                )
        return Atom(name, args)


def parse_formula(
    text: str,
    signature: Optional[Signature] = None,
    pvars: Mapping[str, PredicateVariable] = (),
) -> Formula:
    return FormulaReader(signature, pvars).formula(read_one(text))


def parse_term(text: str, signature: Optional[Signature] = None) -> Term:
    return FormulaReader(signature).term(read_one(text))


# ---------------------------------------------------------------------------
# Printing


def term_to_sexpr(t: Term) -> str:
    if isinstance(t, Var):
        return t.name
    if not t.args:
        return t.name
    return "(" + " ".join([t.name] + [term_to_sexpr(a) for a in t.args]) + ")"


def formula_to_sexpr(phi: Formula) -> str:
    from .logic import Bot, LfpAtom, Top  # local to avoid re-export confusion

    if isinstance(phi, Top):
        return "true"
    if isinstance(phi, Bot):
        return "false"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.pred
        return "(" + " ".join([phi.pred] + [term_to_sexpr(a) for a in phi.args]) + ")"
    if isinstance(phi, VarAtom):
        if not phi.args:
            return phi.pvar.name
        return "(" + " ".join([phi.pvar.name] + [term_to_sexpr(a) for a in phi.args]) + ")"
    if isinstance(phi, Eq):
        return f"(= {term_to_sexpr(phi.left)} {term_to_sexpr(phi.right)})"
    if isinstance(phi, Not):
        return f"(not {formula_to_sexpr(phi.sub)})"
    if isinstance(phi, And):
        return "(and " + " ".join(formula_to_sexpr(s) for s in phi.subs) + ")"
    if isinstance(phi, Or):
        return "(or " + " ".join(formula_to_sexpr(s) for s in phi.subs) + ")"
    if isinstance(phi, Implies):
        return f"(=> {formula_to_sexpr(phi.premise)} {formula_to_sexpr(phi.conclusion)})"
    if isinstance(phi, Forall):
        return f"(forall ({phi.var}) {formula_to_sexpr(phi.body)})"
    if isinstance(phi, Exists):
        return f"(exists ({phi.var}) {formula_to_sexpr(phi.body)})"
    if isinstance(phi, LfpAtom):
        vs = " ".join(v.name for v in phi.system.variables)
        args = " ".join(term_to_sexpr(a) for a in phi.args)
        return f"(lfp {phi.system.variables[phi.index].name} ({vs}) {args})".rstrip()
    raise TypeError(f"not a formula: {phi!r}")
