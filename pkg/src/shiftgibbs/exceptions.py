"""Exception types shared across the package."""


class ValidationError(ValueError):
    """A precondition on inputs was violated."""


class VolumeGuardError(RuntimeError):
    """A brute-force enumeration would exceed the configured cap."""


class EmptyCylinderWarning(UserWarning):
    """Raised as a warning when a cylinder word is not in the shift language."""
