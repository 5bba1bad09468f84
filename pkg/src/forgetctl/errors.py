"""Error types shared across the store, cleansing, policy, and lifecycle layers."""

from __future__ import annotations


class StoreError(Exception):
    """Base class for every error raised by this package."""


# ---- engine ----

class UntaggedPersonalData(StoreError):
    """A field known to carry personal data was indexed without a tag."""


class DuplicateId(StoreError):
    """A document with this id is already indexed."""


class MalformedQuery(StoreError):
    """Query parameters do not satisfy the requirements of its kind."""


class MergeInProgress(StoreError):
    """A maintenance operation already holds the exclusive barrier."""


class EngineUnavailable(StoreError):
    """The benchmark was pointed at an engine that is not serving the track."""


class IoFailure(StoreError):
    """An underlying file operation failed."""


# ---- auxiliary surfaces ----

class SnapshotNotFound(StoreError):
    """No snapshot with the given id exists."""


class RewriteIncomplete(StoreError):
    """Snapshot rewrite failed before the atomic swap; the old snapshot is intact."""


class ReplicaUnreachable(StoreError):
    """Strict replication refused a primary mutation: the replica cannot be reached."""


# ---- cleansing ----

class StepFailed(StoreError):
    """A cleansing step failed; the receipt preserves partial progress."""

    def __init__(self, step: str, side: str, reason: str) -> None:
        super().__init__(f"{step}[{side}]: {reason}")
        self.step = step
        self.side = side
        self.reason = reason


class DeadlineExceeded(StoreError):
    """A cleansing run finished after its deadline (warning, not a rollback)."""


class NotFound(StoreError):
    """The requested record (receipt, request, case) does not exist."""


class ResidueDetected(StoreError):
    """Absence verification found leftover content; completion is blocked."""

    def __init__(self, matches: object) -> None:
        super().__init__(f"residue found: {matches}")
        self.matches = matches


# ---- policy / lifecycle ----

class VerificationFailed(StoreError):
    """Submitted credentials do not meet the configured proof level."""


class DisproportionateVerificationConfig(StoreError):
    """Erasure-request verification demands stronger proof than registration did."""


class UnknownSubject(StoreError):
    """Data exists for the subject but no credential mapping does; request parked."""

    def __init__(self, message: str, request_id: str | None = None) -> None:
        super().__init__(message)
        self.request_id = request_id


class MissingExplanation(StoreError):
    """A rejection was produced without citing any exemption or failed ground."""


class WrongState(StoreError):
    """The operation is not legal in the request's current lifecycle state."""


class ConfigUnparseable(StoreError):
    """The configuration snapshot could not be parsed against the schema."""
