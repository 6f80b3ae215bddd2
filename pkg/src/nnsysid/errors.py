"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or inconsistent user-supplied data (CSV, channel counts, ...)."""


class SolverError(Exception):
    """Optimization could not proceed (singular normal equations, bad start)."""
