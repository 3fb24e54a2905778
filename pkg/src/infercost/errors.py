"""Exception types shared across the toolkit."""


class InfercostError(Exception):
    """Base class for all domain errors raised by this package."""


class RegistryError(InfercostError):
    """Registry file is malformed or a lookup failed."""


class UnknownFormatError(InfercostError):
    """A data format name is not recognized or lacks required metadata."""


class MissingDataError(InfercostError):
    """A hardware figure needed by the computation was not supplied."""


class BenchParseError(InfercostError):
    """A benchmark record file failed validation."""
