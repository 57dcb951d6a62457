"""Exception types; the CLI maps each family to an exit code."""


class CausalHierError(Exception):
    pass


class ModelError(CausalHierError, ValueError):
    """Malformed input: unknown variable, unknown unit, bad file contents."""


class ValidationError(ModelError):
    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class InfeasibleError(CausalHierError):
    """No distribution satisfies the constraints.

    ``certificate`` maps constraint labels to Farkas multipliers ``y`` with
    ``A^T y <= 0`` and ``b^T y > 0`` when the LP produced one.
    """

    def __init__(self, message, certificate=None, violated=()):
        self.certificate = certificate or {}
        self.violated = list(violated)
        super().__init__(message)


class PreconditionError(CausalHierError):
    """Input is well formed but outside an operation's domain (e.g. not Y-good)."""
