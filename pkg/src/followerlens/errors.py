"""Exception hierarchy shared across the package.

Every error raised by followerlens derives from FollowerLensError and carries
a short machine-parseable ``code`` used by the CLI's diagnostic stream.
"""

from __future__ import annotations


class FollowerLensError(Exception):
    """Base class for all followerlens errors."""

    code = "E_GENERIC"


class CorpusLoadError(FollowerLensError):
    """Corpus file unreadable, or its header is missing/incompatible."""

    code = "E_IO"


class CorpusConflictError(FollowerLensError):
    """Two records in one corpus claim the same user_id."""

    code = "E_CONFLICT"


class RecordInvalidError(FollowerLensError):
    """A single record violates a type invariant.

    Carries the offending field name; the loader attaches the line number
    when it turns this into a reported rejection.
    """

    code = "E_VALIDATION"

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
        self.reason = message


class InsufficientDataError(FollowerLensError):
    """An operation received fewer inputs than its contract requires."""

    code = "E_INSUFFICIENT"


class ShapeMismatchError(FollowerLensError):
    """Vector dimension does not match what an index or model was built with."""

    code = "E_SHAPE"


class NoNeighborsError(FollowerLensError):
    """Prediction was asked for an empty neighbor set."""

    code = "E_NO_NEIGHBORS"


class MissingLabelError(FollowerLensError):
    """Ground-truth label missing for a user during evaluation."""

    code = "E_LABEL"

    def __init__(self, user_id: str):
        super().__init__(f"no ground-truth label for user {user_id!r}")
        self.user_id = user_id
