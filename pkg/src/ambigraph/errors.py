"""Exception types shared across the engine."""


class AmbigraphError(Exception):
    """Base class for all engine errors."""


class ZeroNorm(AmbigraphError):
    """State construction or normalization attempted on an all-zero vector."""


class BasisMismatch(AmbigraphError):
    """Two objects expected to share a node basis do not."""


class ZeroProjection(AmbigraphError):
    """Projection onto a subspace carrying (numerically) no amplitude."""


class EmptyWindow(AmbigraphError):
    """A rolling window contains no qualifying divergence samples."""


class UnknownNode(AmbigraphError):
    """An operation referenced a node id absent from the snapshot."""


class TimeOrderViolation(AmbigraphError):
    """A signal event carried a time index earlier than the snapshot's."""


class AlreadySuspended(AmbigraphError):
    """suspend() called while a clarification request is already pending."""


class NotSuspended(AmbigraphError):
    """resolve() called while the engine is autonomous."""


class UnknownRequest(AmbigraphError):
    """An answer referenced a request id that is not the pending one."""


class DuplicateEpisode(AmbigraphError):
    """An episode id was recorded twice."""
