"""Exception types shared across the package.

Every error raised on a user-facing path derives from :class:`NetcensusError`,
split into two families so the CLI / service can map them onto exit codes and
HTTP statuses: configuration problems (bad inputs, impossible requests) and
resource-cap violations (requests that are well-formed but too large).
"""


class NetcensusError(Exception):
    """Base class for all package errors."""


class ConfigError(NetcensusError):
    """Malformed or inconsistent user input (config file, flags, request body)."""


class InvalidGraph(ConfigError):
    """Graph with self-loops, duplicate edges, or out-of-range vertices."""


class InvalidPartition(ConfigError):
    """Node partition that is not a disjoint cover of the vertex set."""


class InvalidMatrix(ConfigError):
    """Matrix input that violates a structural precondition (e.g. not Hermitian)."""


class InvalidState(ConfigError):
    """State vector or ensemble violating normalization or shape requirements."""


class UnsupportedBipartition(ConfigError):
    """Bipartition whose Schmidt rank is outside what the operation supports."""


class UndefinedSignificance(ConfigError):
    """Significance requested for an estimate with zero standard error."""


class ResourceCapExceeded(NetcensusError):
    """Request exceeds a documented size cap (qubit counts, enumeration sizes)."""
