"""Exception types shared across the reasoner."""


class ReasonerError(Exception):
    """Base class for every error this package raises deliberately."""


class ParseError(ReasonerError):
    """Malformed problem or formula text; always carries a source position."""

    def __init__(self, message: str, line: int, col: int):
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: {message}")


class _LocatedError(ReasonerError):
    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class ArityError(_LocatedError):
    """A symbol was used with a different arity than it was declared with."""


class UndeclaredSymbolError(_LocatedError):
    """A symbol in a strict-mode formula is not in the problem's signature."""


class TimeOrderError(_LocatedError):
    """A time symbol was declared more than once."""


class FreeVariableError(ReasonerError):
    """A formula with free variables reached a context that requires it closed
    (atomizing a modal subformula would silently change what is provable)."""

    def __init__(self, variables, context: str = ""):
        self.variables = sorted(variables)
        suffix = f" in {context}" if context else ""
        super().__init__(f"free variable(s) {', '.join(self.variables)}{suffix}")


class ModalNodeError(ReasonerError):
    """A modal node leaked past shadowing into the first-order layer."""


class TimeError(ReasonerError):
    """A belief promotion targeted an earlier time than its premise."""


class UsageError(ReasonerError):
    """Invalid use of the public API or CLI (bad flags, unsupported query)."""
