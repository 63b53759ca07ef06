"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid run configuration (bad mesh, parameters, or source spec)."""


class CFLError(RuntimeError):
    """A time-step restriction was violated; the step is rejected."""
