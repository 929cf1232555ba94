"""Exception hierarchy.

Validation problems (bad files, bad parameters) derive from
:class:`SceneValidationError`; planning failures derive from
:class:`PlannerError`. The CLI maps the two families to exit codes 1 and 2.
"""


class DeclutterError(Exception):
    pass


class SceneValidationError(DeclutterError):
    pass


class SchemaError(SceneValidationError):
    pass


class OverlapError(SceneValidationError):
    pass


class OutOfBoundsError(SceneValidationError):
    pass


class NoTargetError(SceneValidationError):
    pass


class MultipleTargetsError(SceneValidationError):
    pass


class InstanceGenerationError(SceneValidationError):
    def __init__(self, seed, message):
        super().__init__(f"seed {seed}: {message}")
        self.seed = seed


class PlannerError(DeclutterError):
    """Raised when a planner cannot produce a plan.

    ``trace`` carries the partial execution trace when the failure happens
    mid-run.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NoAccessibleObject(PlannerError):
    pass


class TargetUnknown(PlannerError):
    pass


class Disconnected(PlannerError):
    pass


class TargetNeverFound(PlannerError):
    pass
