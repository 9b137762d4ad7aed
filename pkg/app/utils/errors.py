from typing import Any, Dict, Optional


class LclabError(Exception):
    """
    Base error for every lclab operation.

    Each subclass carries a stable ``code`` that ends up in error documents,
    and an ``exit_code`` the command driver returns.
    """

    code = "LCLAB_ERROR"
    exit_code = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> Dict[str, Any]:
        return {"error": self.code, "message": self.message, "details": self.details}


class BudgetExhausted(LclabError):
    code = "BUDGET_EXHAUSTED"


class PromiseViolation(LclabError):
    code = "PROMISE_VIOLATION"


class IsInfinity(LclabError):
    code = "IS_INFINITY"


class UndecidedAtMargin(LclabError):
    code = "UNDECIDED_AT_MARGIN"


class OracleInstability(LclabError):
    code = "ORACLE_INSTABILITY"


class PreservationViolation(LclabError):
    code = "PRESERVATION_VIOLATION"


class NotSatisfied(LclabError):
    code = "NOT_SATISFIED"


class NotIdempotent(LclabError):
    code = "NOT_IDEMPOTENT"


class PreconditionFailed(LclabError):
    code = "PRECONDITION_FAILED"


class Mismatch(LclabError):
    code = "MISMATCH"


class UsageError(LclabError):
    code = "USAGE_ERROR"
    exit_code = 2
