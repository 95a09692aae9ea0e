# weyl_closure/errors.py
from typing import Any, Dict, List, Optional


class WeylClosureError(Exception):
    """Base class for all errors raised by the engine"""


class SignatureMismatchError(WeylClosureError, ValueError):
    """Operands live in different rings, algebras or orders"""


class UnknownVariableError(WeylClosureError, ValueError):
    """A variable name is not declared in the relevant ring"""


class ZeroElementError(WeylClosureError, ValueError):
    """An operation that is undefined on the zero element received it"""


class NotReducedError(WeylClosureError):
    """A reduced Gröbner basis was required"""


class NotFiniteRankError(WeylClosureError):
    """The input module is not of finite rank"""


class CertificationError(WeylClosureError):
    """A sandwich inclusion S ⊆ ⟨G'⟩ ⊆ S : (f)^∞ could not be certified"""

    def __init__(self, message: str, failures: Optional[List[str]] = None):
        super().__init__(message)
        self.failures = failures or []


class BudgetExceededError(WeylClosureError):
    """A Gröbner basis computation ran past one of its configured caps"""

    def __init__(self, message: str, partial: Optional[List[Any]] = None,
                 stats: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.partial = partial or []
        self.stats = stats or {}
        self.result = None


class TruncationCapError(WeylClosureError):
    """The closure loop reached max_T_degree without its stopping criterion firing"""

    def __init__(self, message: str, result: Any = None):
        super().__init__(message)
        self.result = result


class ProblemParseError(WeylClosureError):
    """Syntax or declaration error in a problem file or an expression"""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message
