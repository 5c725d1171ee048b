"""Exception hierarchy shared across the package."""


class CondorLabError(Exception):
    """Base class for all condorlab errors."""


class EmbeddingNotNonnegative(CondorLabError):
    """Circulant embedding produced a significantly negative eigenvalue."""


class SizeExceeded(CondorLabError):
    """Requested size is too large for the dense oracle path."""


class InvalidHorizon(CondorLabError):
    """Simulation grid has no time steps."""


class NonpositiveSpot(CondorLabError):
    """Initial spot must be strictly positive."""


class IndexOutOfRange(CondorLabError):
    """Path or step index outside the simulated grid."""


class CapacityExceeded(CondorLabError):
    """Pricing workload exceeds the configured budget."""


class StrikeOrderViolation(CondorLabError):
    """Strikes do not satisfy k1 < k2 <= k3 < k4."""


class StrikeNotOnGrid(CondorLabError):
    """Requested strike is not present in the pricing grid."""


class NonpositiveCredit(CondorLabError):
    """Entry credit is zero or negative; normalization is undefined."""


class NoBreakeven(CondorLabError):
    """Credit exceeds a spread width; a side has no breakeven."""


class EmptySubset(CondorLabError):
    """Metric requested on an empty path subset."""


class StrikeStructureViolation(CondorLabError):
    """Strikes do not match the bounded-martingale theorem structure."""


class SchemaViolation(CondorLabError):
    """Option-chain CSV row violates the input schema."""


class EmptyDirectory(CondorLabError):
    """No chain files found in the input directory."""


class NoMatchingStrikes(CondorLabError):
    """Chain does not list enough strikes to build the portfolio."""


class ConfigError(CondorLabError):
    """Experiment configuration is missing or malformed."""
