"""Exception hierarchy shared by the library, the CLI and the HTTP service.

Every error carries a stable ``code`` (machine readable) and an optional
``context`` dict so adapters can render ``{error_code, message, context}``
payloads without string parsing.
"""

from __future__ import annotations

from typing import Any


class ChunkSelectError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message: str, **context: Any):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_payload(self) -> dict[str, Any]:
        return {"error_code": self.code, "message": self.message, "context": self.context}


class DuplicateIdError(ChunkSelectError):
    code = "duplicate-id"


class UnknownIdError(ChunkSelectError):
    code = "unknown-id"


class InvalidValueError(ChunkSelectError):
    """A value falls outside the domain or scale that was declared for it."""

    code = "invalid-value"


class InvalidValuationError(ChunkSelectError):
    """A chunk valuation does not fit the characteristic it references."""

    code = "invalid-valuation"


class UndescribedCellError(ChunkSelectError):
    """An alternative carries no valuation at all for a requested criterion."""

    code = "undescribed-cell"


class MissingCellError(ChunkSelectError):
    """An operation that requires complete data met a missing cell."""

    code = "missing-cell"


class HeterogeneousScaleError(ChunkSelectError):
    """Simple addition over criteria that neither share a scale nor are normalized."""

    code = "heterogeneous-scales"


class WeightMismatchError(ChunkSelectError):
    """Weight ids do not cover the criteria exactly."""

    code = "weight-mismatch"


class DisconnectedJudgmentsError(ChunkSelectError):
    """The trade-off judgment graph does not connect all criteria."""

    code = "disconnected-judgments"


class MalformedAnswerError(ChunkSelectError):
    """An elicitation answer does not match the pending question's shape."""

    code = "malformed-answer"


class SessionCompleteError(ChunkSelectError):
    """An answer was posted to an already complete elicitation session."""

    code = "session-complete"


class InvalidTransitionError(ChunkSelectError):
    """A service session operation arrived in the wrong state."""

    code = "invalid-transition"


class StrategyNotImplementedError(ChunkSelectError):
    """A strategy named by the process model but deliberately out of scope."""

    code = "strategy-not-implemented"


class ParseError(ChunkSelectError):
    """A persisted document could not be decoded."""

    code = "parse-error"
