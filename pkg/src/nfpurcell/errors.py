"""Exception types shared across the package.

Each maps to a distinct CLI exit code (see cli.EXIT_CODES).
"""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class BracketError(ValueError):
    """Root bracket does not enclose a sign change."""


class ConvergenceError(RuntimeError):
    """Iterative procedure failed to reach its tolerance."""


class FitDegenerateError(RuntimeError):
    """Least-squares normal equations are singular or the model collapsed."""


class NoModeError(RuntimeError):
    """No guided-mode root found in the physical bracket."""


class RangeError(ValueError):
    """Query outside tabulated bounds."""


class GridError(ValueError):
    """Incompatible or invalid sampling grids."""


class CourantError(RuntimeError):
    """FDTD fields diverged (stability violation)."""


class AccuracyError(RuntimeError):
    """FDTD result failed an internal accuracy check (e.g. flux closure)."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class InversionError(RuntimeError):
    """Radius inference found no crossing in the tabulated range."""


class ConfigError(ValueError):
    """Run configuration failed schema validation."""


class CacheError(RuntimeError):
    """Cache entry corrupted or inconsistent with its recorded hash."""
