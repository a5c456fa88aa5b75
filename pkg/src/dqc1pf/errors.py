"""Exception types shared across the package."""


class ModelFormatError(ValueError):
    """A model file or model definition is malformed."""


class CapacityError(RuntimeError):
    """A requested enumeration or state vector exceeds the configured size cap."""
