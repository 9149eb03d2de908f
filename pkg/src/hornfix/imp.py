"""A mini imperative language: semantics, verification conditions, sp and wp.

Programs are built from skip, assignment, sequencing, conditionals and
while loops over the arithmetic vocabulary {0, 1, +, -, *, <=}.  To
keep every check decidable, programs run over a finite modular
arithmetic structure: the domain is {0, ..., m-1} with +, -, *
computed mod m and <= the order on representatives.  This diverges
from unbounded integers at the wraparound seam; test programs stay
clear of the seam unless they exercise it deliberately.

``verification_conditions`` generates one implication per program path
segment by structural recursion, introducing a fresh loop-invariant
predicate variable per sequencing point and per loop; the resulting
clause set always classifies as a linear Horn system.  The strongest
postcondition is the least solution of the system for ``{pre} p {X0}``
and the weakest (liberal) precondition is the complement-of-dual
maximal solution for ``{X0} p {post}``; both are cross-checked against
brute-force state enumeration oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import EvalError, NotLinear, ParseError, SignatureError
from .logic import (
    And,
    Atom,
    Bot,
    Eq,
    Fn,
    Formula,
    Implies,
    Not,
    Or,
    PredicateVariable,
    Term,
    Top,
    Var,
    VarAtom,
    conj,
    free_individual_variables,
    predicate_variables,
    substitute_terms,
    term_vars,
    walk,
)
from .horn import HornSystem, SolutionReport, classify, is_linear, solve_max, solve_min
from .structures import FiniteStructure, RelationTable, evaluate, term_value

# ---------------------------------------------------------------------------
# Abstract syntax


@dataclass(frozen=True)
class Skip:
    pass


@dataclass(frozen=True)
class Assign:
    var: str
    expr: Term


@dataclass(frozen=True)
class Seq:
    first: "Stmt"
    second: "Stmt"


@dataclass(frozen=True)
class If:
    guard: Formula
    then_branch: "Stmt"
    else_branch: "Stmt"


@dataclass(frozen=True)
class While:
    guard: Formula
    body: "Stmt"


Stmt = Union[Skip, Assign, Seq, If, While]


@dataclass(frozen=True)
class Program:
    """A statement together with its declared variable list."""

    variables: tuple[str, ...]
    body: Stmt

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise SignatureError("duplicate program variables")
        declared = set(self.variables)
        for v in _assigned_and_read(self.body):
            if v not in declared:
                raise SignatureError(f"undeclared program variable {v!r}")
        for guard in _guards(self.body):
            if predicate_variables(guard):
                raise SignatureError("guards must not contain predicate variables")


@dataclass(frozen=True)
class HoareTriple:
    pre: Formula
    prog: Program
    post: Formula

    def __post_init__(self):
        declared = set(self.prog.variables)
        for phi in (self.pre, self.post):
            stray = free_individual_variables(phi) - declared
            if stray:
                raise SignatureError(
                    f"condition mentions non-program variables {sorted(stray)}"
                )


def _assigned_and_read(stmt: Stmt) -> set[str]:
    if isinstance(stmt, Skip):
        return set()
    if isinstance(stmt, Assign):
        return {stmt.var} | set(term_vars(stmt.expr))
    if isinstance(stmt, Seq):
        return _assigned_and_read(stmt.first) | _assigned_and_read(stmt.second)
    if isinstance(stmt, If):
        return (
            set(free_individual_variables(stmt.guard))
            | _assigned_and_read(stmt.then_branch)
            | _assigned_and_read(stmt.else_branch)
        )
    if isinstance(stmt, While):
        return set(free_individual_variables(stmt.guard)) | _assigned_and_read(stmt.body)
    raise TypeError(f"not a statement: {stmt!r}")


def _guards(stmt: Stmt):
    if isinstance(stmt, Seq):
        yield from _guards(stmt.first)
        yield from _guards(stmt.second)
    elif isinstance(stmt, If):
        yield stmt.guard
        yield from _guards(stmt.then_branch)
        yield from _guards(stmt.else_branch)
    elif isinstance(stmt, While):
        yield stmt.guard
        yield from _guards(stmt.body)


# ---------------------------------------------------------------------------
# Modular arithmetic structures


class ArithStructure(FiniteStructure):
    """{0,...,m-1} with modular +, -, * and <= on representatives."""

    def __init__(self, modulus: int, literals: Iterable[int] = ()):
        if modulus < 1:
            raise SignatureError("the modulus must be positive")
        domain = tuple(range(modulus))
        functions: dict = {}
        for name, op in (("+", lambda a, b: a + b), ("-", lambda a, b: a - b), ("*", lambda a, b: a * b)):
            functions[name] = {
                (a, b): op(a, b) % modulus for a in domain for b in domain
            }
        for lit in {0, 1} | {int(x) for x in literals}:
            functions[str(lit)] = {(): lit % modulus}
        relations = {"<=": RelationTable(2, frozenset((a, b) for a in domain for b in domain if a <= b))}
        super().__init__(domain, functions, relations)
        self.modulus = modulus


def integer_literals(*objects) -> set[int]:
    """Collect integer literals from programs, terms and formulas."""
    out: set[int] = set()

    def from_term(t: Term):
        if isinstance(t, Fn):
            if not t.args:
                try:
                    out.add(int(t.name))
                except ValueError:
                    pass
            for a in t.args:
                from_term(a)

    def from_formula(phi: Formula):
        from .logic import LfpAtom

        for node in walk(phi):
            if isinstance(node, (Atom, VarAtom, LfpAtom)):
                for a in node.args:
                    from_term(a)
            elif isinstance(node, Eq):
                from_term(node.left)
                from_term(node.right)

    def from_stmt(s: Stmt):
        if isinstance(s, Assign):
            from_term(s.expr)
        elif isinstance(s, Seq):
            from_stmt(s.first)
            from_stmt(s.second)
        elif isinstance(s, If):
            from_formula(s.guard)
            from_stmt(s.then_branch)
            from_stmt(s.else_branch)
        elif isinstance(s, While):
            from_formula(s.guard)
            from_stmt(s.body)

    for obj in objects:
        if isinstance(obj, Program):
            from_stmt(obj.body)
        elif isinstance(obj, HoareTriple):
            from_formula(obj.pre)
            from_formula(obj.post)
            from_stmt(obj.prog.body)
        elif isinstance(obj, (Skip, Assign, Seq, If, While)):
            from_stmt(obj)
        elif isinstance(obj, (Var, Fn)):
            from_term(obj)
        else:
            from_formula(obj)
    return out


def arith_structure(modulus: int, *objects) -> ArithStructure:
    """An :class:`ArithStructure` covering every literal the objects mention."""
    return ArithStructure(modulus, integer_literals(*objects))


# ---------------------------------------------------------------------------
# Operational semantics

State = dict  # program variable -> domain element


def run(
    program: Program,
    state: Mapping,
    fuel: int,
    structure: FiniteStructure,
) -> Optional[State]:
    """Big-step execution; None is the did-not-terminate-within-fuel verdict.

    Each while-loop iteration consumes one unit of fuel.  Arithmetic is
    total (modular), so fuel exhaustion is the only way not to return a
    state.
    """
    sigma = dict(state)
    for v in program.variables:
        if v not in sigma:
            raise EvalError(f"state misses program variable {v!r}")
    budget = [fuel]
    return _exec(program.body, sigma, structure, budget)


def _exec(stmt: Stmt, sigma: State, structure, budget) -> Optional[State]:
    if isinstance(stmt, Skip):
        return sigma
    if isinstance(stmt, Assign):
        sigma[stmt.var] = term_value(structure, sigma, stmt.expr)
        return sigma
    if isinstance(stmt, Seq):
        out = _exec(stmt.first, sigma, structure, budget)
        if out is None:
            return None
        return _exec(stmt.second, out, structure, budget)
    if isinstance(stmt, If):
        if evaluate(structure, sigma, {}, stmt.guard):
            return _exec(stmt.then_branch, sigma, structure, budget)
        return _exec(stmt.else_branch, sigma, structure, budget)
    if isinstance(stmt, While):
        while evaluate(structure, sigma, {}, stmt.guard):
            if budget[0] <= 0:
                return None
            budget[0] -= 1
            out = _exec(stmt.body, sigma, structure, budget)
            if out is None:
                return None
            sigma = out
        return sigma
    raise TypeError(f"not a statement: {stmt!r}")


# ---------------------------------------------------------------------------
# Verification conditions


def verification_conditions(triple: HoareTriple) -> tuple[Formula, ...]:
    """The implication list generated by structural recursion on the program.

    skip and assignment produce a single implication (the latter
    substitutes the assigned term into the postcondition), sequencing
    splits on a fresh midpoint predicate, conditionals split on the
    guard, and loops produce the body conditions plus entry and exit
    implications for a fresh invariant predicate.  Fresh predicates are
    named I1, I2, ... in recursion order, skipping names already used
    by the pre- or postcondition.
    """
    prog = triple.prog
    xs = tuple(Var(v) for v in prog.variables)
    used = {pv.name for pv in predicate_variables(triple.pre) | predicate_variables(triple.post)}
    counter = [0]

    def fresh_invariant() -> VarAtom:
        while True:
            counter[0] += 1
            name = f"I{counter[0]}"
            if name not in used:
                used.add(name)
                return VarAtom(PredicateVariable(name, len(xs)), xs)

    def vc(pre: Formula, stmt: Stmt, post: Formula) -> list[Formula]:
        if isinstance(stmt, Skip):
            return [Implies(pre, post)]
        if isinstance(stmt, Assign):
            return [Implies(pre, substitute_terms(post, {stmt.var: stmt.expr}))]
        if isinstance(stmt, Seq):
            mid = fresh_invariant()
            return vc(pre, stmt.first, mid) + vc(mid, stmt.second, post)
        if isinstance(stmt, If):
            return vc(conj([pre, stmt.guard]), stmt.then_branch, post) + vc(
                conj([pre, Not(stmt.guard)]), stmt.else_branch, post
            )
        if isinstance(stmt, While):
            inv = fresh_invariant()
            return (
                vc(conj([inv, stmt.guard]), stmt.body, inv)
                + [Implies(pre, inv), Implies(conj([inv, Not(stmt.guard)]), post)]
            )
        raise TypeError(f"not a statement: {stmt!r}")

    return tuple(vc(triple.pre, prog.body, triple.post))


def vcgen(triple: HoareTriple) -> HornSystem:
    """The verification condition as a linear Horn system."""
    system = classify(verification_conditions(triple))
    if not is_linear(system):
        raise NotLinear("verification conditions should be linear; this is a bug")
    return system


# ---------------------------------------------------------------------------
# State sets, oracles, and the two fixpoint routes


def formula_states(
    program: Program, phi: Formula, structure: FiniteStructure
) -> RelationTable:
    """The set of states satisfying a first-order condition, as a table."""
    k = len(program.variables)
    tuples = frozenset(
        t
        for t in structure.all_tuples(k)
        if evaluate(structure, dict(zip(program.variables, t)), {}, phi)
    )
    return RelationTable(k, tuples)


@dataclass(frozen=True)
class OracleResult:
    table: RelationTable
    complete: bool  # False when some enumerated run exhausted its fuel


def sp_oracle(
    program: Program, pre: Formula, structure: FiniteStructure, fuel: int
) -> OracleResult:
    """Strongest postcondition by running every pre-state to completion.

    Runs that exhaust fuel contribute nothing to the image (only
    terminating runs have a final state) but clear the complete flag.
    """
    k = len(program.variables)
    images = set()
    complete = True
    for t in structure.all_tuples(k):
        sigma = dict(zip(program.variables, t))
        if not evaluate(structure, sigma, {}, pre):
            continue
        out = run(program, sigma, fuel, structure)
        if out is None:
            complete = False
        else:
            images.add(tuple(out[v] for v in program.variables))
    return OracleResult(RelationTable(k, frozenset(images)), complete)


def wp_oracle(
    program: Program, post: Formula, structure: FiniteStructure, fuel: int
) -> OracleResult:
    """Weakest liberal precondition by running every state.

    A state whose run terminates is kept iff the final state satisfies
    the postcondition; a state whose run exhausts fuel is treated as
    diverging and kept (liberal convention), clearing the complete flag.
    """
    k = len(program.variables)
    kept = set()
    complete = True
    for t in structure.all_tuples(k):
        sigma = dict(zip(program.variables, t))
        out = run(program, sigma, fuel, structure)
        if out is None:
            complete = False
            kept.add(t)
        elif evaluate(structure, {v: out[v] for v in program.variables}, {}, post):
            kept.add(t)
    return OracleResult(RelationTable(k, frozenset(kept)), complete)


def _fresh_pvar(name: str, taken, arity: int) -> PredicateVariable:
    candidate = name
    i = 0
    while candidate in taken:
        i += 1
        candidate = f"{name}_{i}"
    return PredicateVariable(candidate, arity)


def sp_lfp(program: Program, pre: Formula, structure: FiniteStructure) -> RelationTable:
    """Strongest postcondition as the least solution for ``{pre} p {X0}``."""
    if predicate_variables(pre):
        raise SignatureError("the precondition must be first-order")
    x0 = _fresh_pvar("X0", set(), len(program.variables))
    post = VarAtom(x0, tuple(Var(v) for v in program.variables))
    system = vcgen(HoareTriple(pre, program, post))
    return solve_min(structure, system).table(x0.name)


def wp_dual(program: Program, post: Formula, structure: FiniteStructure) -> RelationTable:
    """Weakest liberal precondition as the maximal solution for ``{X0} p {post}``."""
    if predicate_variables(post):
        raise SignatureError("the postcondition must be first-order")
    x0 = _fresh_pvar("X0", set(), len(program.variables))
    pre = VarAtom(x0, tuple(Var(v) for v in program.variables))
    system = vcgen(HoareTriple(pre, program, post))
    report = solve_max(structure, system.clauses, system.variables)
    return report.table(x0.name)


@dataclass(frozen=True)
class HoareReport:
    provable: bool
    invariants: dict  # invariant predicate name -> RelationTable
    solution: SolutionReport


def check_hoare(triple: HoareTriple, structure: FiniteStructure) -> HoareReport:
    """Decide provability of a Hoare triple over the finite structure.

    The triple is provable iff the structure models its verification
    condition, which the minimal solution decides; the least-solution
    tables for the introduced invariant predicates are the witnesses.
    """
    if predicate_variables(triple.pre) or predicate_variables(triple.post):
        raise SignatureError("pre- and postcondition must be first-order")
    system = vcgen(triple)
    report = solve_min(structure, system)
    invariants = {v.name: t for v, t in zip(report.variables, report.tables)}
    return HoareReport(report.satisfies_all, invariants, report)


# ---------------------------------------------------------------------------
# Concrete syntax
#
#   vars x, y;
#   x := 0;
#   while !(x = 5) do {
#     x := x + 1;
#     y := y + 2
#   }
#
# Guards:  true | false | t = t | t <= t | !g | g && g | g || g | (g)
# Terms:   variable | integer | t + t | t - t | t * t | (t)

_KEYWORDS = {"vars", "skip", "if", "then", "else", "while", "do", "true", "false"}


@dataclass(frozen=True)
class _Token:
    kind: str  # 'ident', 'int', 'punct', 'eof'
    text: str
    line: int
    col: int


def _tokenize_imp(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col, i, n = 1, 1, 0, len(text)
    two_char = {":=", "<=", "&&", "||"}
    while i < n:
        c = text[i]
        if c == "\n":
            line, col, i = line + 1, 1, i + 1
        elif c in " \t\r":
            col, i = col + 1, i + 1
        elif c == "#":
            while i < n and text[i] != "\n":
                i += 1
        elif text[i : i + 2] in two_char:
            tokens.append(_Token("punct", text[i : i + 2], line, col))
            col, i = col + 2, i + 2
        elif c in "();{}=+-*!,":
            tokens.append(_Token("punct", c, line, col))
            col, i = col + 1, i + 1
        elif c.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("int", text[i:j], line, col))
            col, i = col + (j - i), j
        elif c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(_Token("ident", text[i:j], line, col))
            col, i = col + (j - i), j
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    tokens.append(_Token("eof", "", line, col))
    return tokens


class _ImpParser:
    def __init__(self, text: str):
        self.tokens = _tokenize_imp(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.next()
        if tok.text != text:
            raise ParseError(f"expected {text!r}, found {tok.text or 'end of input'!r}", tok.line, tok.col)
        return tok

    def fail(self, msg: str) -> ParseError:
        tok = self.peek()
        return ParseError(msg, tok.line, tok.col)

    def program(self) -> Program:
        self.expect("vars")
        names = [self.ident()]
        while self.peek().text == ",":
            self.next()
            names.append(self.ident())
        self.expect(";")
        body = self.statements()
        tok = self.peek()
        if tok.kind != "eof":
            raise ParseError(f"unexpected {tok.text!r} after program", tok.line, tok.col)
        return Program(tuple(names), body)

    def ident(self) -> str:
        tok = self.next()
        if tok.kind != "ident" or tok.text in _KEYWORDS:
            raise ParseError("expected a variable name", tok.line, tok.col)
        return tok.text

    def statements(self) -> Stmt:
        parts = [self.statement()]
        while self.peek().text == ";":
            self.next()
            if self.peek().text in ("}", "") :
                break  # tolerate a trailing semicolon
            parts.append(self.statement())
        stmt = parts[-1]
        for p in reversed(parts[:-1]):
            stmt = Seq(p, stmt)
        return stmt

    def statement(self) -> Stmt:
        tok = self.peek()
        if tok.text == "skip":
            self.next()
            return Skip()
        if tok.text == "if":
            self.next()
            guard = self.guard()
            self.expect("then")
            then_branch = self.block()
            self.expect("else")
            else_branch = self.block()
            return If(guard, then_branch, else_branch)
        if tok.text == "while":
            self.next()
            guard = self.guard()
            self.expect("do")
            return While(guard, self.block())
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            name = self.ident()
            self.expect(":=")
            return Assign(name, self.term())
        raise self.fail("expected a statement")

    def block(self) -> Stmt:
        self.expect("{")
        body = self.statements()
        self.expect("}")
        return body

    def guard(self) -> Formula:
        left = self.guard_and()
        parts = [left]
        while self.peek().text == "||":
            self.next()
            parts.append(self.guard_and())
        return parts[0] if len(parts) == 1 else Or(tuple(parts))

    def guard_and(self) -> Formula:
        parts = [self.guard_atom()]
        while self.peek().text == "&&":
            self.next()
            parts.append(self.guard_atom())
        return parts[0] if len(parts) == 1 else And(tuple(parts))

    def guard_atom(self) -> Formula:
        tok = self.peek()
        if tok.text == "!":
            self.next()
            return Not(self.guard_atom())
        if tok.text == "true":
            self.next()
            return Top()
        if tok.text == "false":
            self.next()
            return Bot()
        if tok.text == "(":
            # Could open a guard or a term; try a guard first.
            saved = self.pos
            self.next()
            try:
                inner = self.guard()
                self.expect(")")
                return inner
            except ParseError:
                self.pos = saved
        left = self.term()
        op = self.next()
        if op.text == "=":
            return Eq(left, self.term())
        if op.text == "<=":
            return Atom("<=", (left, self.term()))
        raise ParseError("expected '=' or '<=' in a guard", op.line, op.col)

    def term(self) -> Term:
        left = self.term_product()
        while self.peek().text in ("+", "-"):
            op = self.next().text
            left = Fn(op, (left, self.term_product()))
        return left

    def term_product(self) -> Term:
        left = self.term_atom()
        while self.peek().text == "*":
            self.next()
            left = Fn("*", (left, self.term_atom()))
        return left

    def term_atom(self) -> Term:
        tok = self.next()
        if tok.kind == "int":
            return Fn(str(int(tok.text)))
        if tok.kind == "ident" and tok.text not in _KEYWORDS:
            return Var(tok.text)
        if tok.text == "(":
            inner = self.term()
            self.expect(")")
            return inner
        raise ParseError("expected a term", tok.line, tok.col)


def parse_program(text: str) -> Program:
    return _ImpParser(text).program()
