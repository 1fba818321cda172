"""
Exception hierarchy for mpstab

Every error raised by the library derives from MpsError and from the
builtin exception callers would expect for the same situation, so
``except ValueError`` keeps working for bad input.
"""

from typing import Optional


class MpsError(Exception):
    """Base class for all mpstab errors"""


class DimensionMismatch(MpsError, ValueError):
    """Shapes or ambient dimensions of two operands disagree"""


class ContractViolation(MpsError, ValueError):
    """An input does not satisfy an operation's precondition"""


class NotProperSubspace(MpsError, ValueError):
    """S_ell(A) fills the whole local space, so no parent Hamiltonian exists"""


class DenseCapExceeded(MpsError, RuntimeError):
    """A dense vector or operator would exceed the configured size cap"""

    def __init__(self, size: int, cap: int, what: str = "vector"):
        self.size = size
        self.cap = cap
        super().__init__(f"dense {what} of size {size} exceeds cap {cap}")


class NumericalFailure(MpsError, RuntimeError):
    """A LAPACK routine failed to converge"""


class ConstructionFailure(MpsError, RuntimeError):
    """A derived object could not be built to tolerance"""


class TensorFormatError(MpsError, ValueError):
    """
    A tensor, witness or report file could not be parsed.

    Carries either a line/column position (JSON syntax errors) or a
    JSON path such as ``matrices[1][0]`` (structural errors).
    """

    def __init__(self, message: str, lineno: Optional[int] = None,
                 colno: Optional[int] = None, path: Optional[str] = None):
        self.lineno = lineno
        self.colno = colno
        self.path = path
        location = ""
        if lineno is not None:
            location = f" (line {lineno}, column {colno})"
        elif path:
            location = f" (at {path})"
        super().__init__(f"{message}{location}")
