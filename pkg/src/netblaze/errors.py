"""Exception hierarchy.

Every error carries a stable ``code`` string so the CLI can emit it in its
machine-readable error document.
"""

from __future__ import annotations


class NetblazeError(Exception):
    code = "NetblazeError"

    def to_dict(self) -> dict:
        return {"error": self.code, "message": str(self)}


# -- input / schema ---------------------------------------------------------


class SchemaError(NetblazeError, ValueError):
    """Malformed input document. ``path`` locates the offending field."""

    code = "SchemaError"

    def __init__(self, message: str, path: str = ""):
        self.path = path
        self.message = message
        super().__init__(f"{path}: {message}" if path else message)

    def to_dict(self) -> dict:
        d = super().to_dict()
        d["path"] = self.path
        return d


class NonPositiveSlowness(SchemaError):
    code = "NonPositiveSlowness"


# -- network ----------------------------------------------------------------


class NetworkError(NetblazeError, ValueError):
    code = "NetworkError"


class DanglingEdgeEndpoint(NetworkError):
    code = "DanglingEdgeEndpoint"


class NonPositiveLength(NetworkError):
    code = "NonPositiveLength"


class DisconnectedGraph(NetworkError):
    code = "DisconnectedGraph"


class SelfLoop(NetworkError):
    code = "SelfLoop"


class InvalidLocation(NetblazeError, ValueError):
    code = "InvalidLocation"


# -- solvers ----------------------------------------------------------------


class EmptySourceSet(NetblazeError, ValueError):
    code = "EmptySourceSet"


class BlockedSource(NetblazeError, ValueError):
    code = "BlockedSource"


class GridMismatch(NetblazeError, ValueError):
    code = "GridMismatch"


class NonConvergence(NetblazeError, RuntimeError):
    code = "NonConvergence"


class NonMonotoneTheta(NetblazeError, ValueError):
    code = "NonMonotoneTheta"


# -- blocking ---------------------------------------------------------------


class InadmissibleStrategy(NetblazeError, ValueError):
    code = "InadmissibleStrategy"


class TooManyAdmissibleVertices(NetblazeError, ValueError):
    code = "TooManyAdmissibleVertices"
