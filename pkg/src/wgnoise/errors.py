"""Exception hierarchy.

Validation errors (bad shapes, malformed files, out-of-range arguments) are
distinct from numerical failures (degenerate projections, diverging runs,
failed verification) so the command-line layer can map them to stable exit
codes: 1 for validation, 2 for numerical failure.
"""


class WgnoiseError(Exception):
    """Base class for all package errors."""


class DimensionError(WgnoiseError, ValueError):
    """A vector length or layout does not satisfy a structural precondition."""


class ValidationError(WgnoiseError, ValueError):
    """An argument, file, or configuration value is malformed."""


class SingularInputError(WgnoiseError, ValueError):
    """An input at which the requested quantity is undefined (e.g. zero vector)."""


class DegenerateInputError(WgnoiseError, RuntimeError):
    """Exact magnitude ties or zeros survived the perturbation retry budget."""


class OracleFailureError(WgnoiseError, RuntimeError):
    """The dense-scan reference solver could not bracket a root."""


class DivergenceError(WgnoiseError, RuntimeError):
    """An optimization run produced non-finite or runaway values.

    Carries the partial trajectory recorded up to the failing iteration.
    """

    def __init__(self, message, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
