"""Exception types shared across the package."""

from __future__ import annotations


class HornfixError(Exception):
    """Base class for all errors raised by this package."""


class SignatureError(HornfixError):
    """A symbol is undeclared or used at the wrong arity."""


class ArityError(HornfixError):
    """An atom or substitution does not match the declared arity."""


class EvalError(HornfixError):
    """Evaluation hit an unbound variable or an unknown symbol."""


class NotHorn(HornfixError):
    """A clause set is not in constrained Horn shape."""


class NotDualizable(HornfixError):
    """A clause set is neither Horn nor dual Horn."""


class NotLinear(HornfixError):
    """An operation requires a linear system (at most one body atom and one head atom per clause)."""


class NonAffine(HornfixError):
    """A clause or formula falls outside the affine-equality fragment."""


class ParseError(HornfixError):
    """Input text could not be parsed; carries a source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
