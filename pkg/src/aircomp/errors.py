"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or malformed experiment configuration."""


class PlacementInfeasibleError(RuntimeError):
    """The requested number of antennas cannot be placed in the region."""


class FeasibilityError(RuntimeError):
    """An optimization step was started from an infeasible point."""
