"""Exception types shared across the package."""


class MutualCoverError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(MutualCoverError):
    """Invalid schema definition or a value outside its declared domain."""


class DataError(MutualCoverError):
    """Malformed input data; message carries row/column location."""


class InfeasiblePartitionError(MutualCoverError):
    """The table as a whole cannot satisfy the diversity principle."""


class LpError(MutualCoverError):
    """Malformed linear program or a solver contract violation."""


class ConfigError(MutualCoverError):
    """Invalid run configuration."""
