"""
Exception hierarchy for pathgauge.

The CLI maps ScenarioError to exit code 2 and every other PathGaugeError to 3.
"""


class PathGaugeError(Exception):
    """Base class for all pathgauge failures."""


class SingularityError(PathGaugeError):
    """A field was evaluated inside the guard zone of a singular locus."""


class QuadratureError(PathGaugeError):
    """Adaptive quadrature did not reach its tolerance at maximum depth."""


class PathError(PathGaugeError):
    """Invalid path family, junction evaluation or string clearance violation."""


class StencilError(PathGaugeError):
    """A finite-difference stencil straddles a field discontinuity."""


class ShootingError(PathGaugeError):
    """Boundary-value shooting failed to converge or hit a conjugate point."""


class IntegrationError(PathGaugeError):
    """The world-line ODE integrator failed."""


class ActionError(PathGaugeError):
    """A spacelike stretch was found where proper time is required."""


class GeometryError(PathGaugeError):
    """Invalid (1+1)D world line or pair polygon."""


class ScenarioError(PathGaugeError):
    """Scenario configuration failed validation."""


class TaskFailed(PathGaugeError):
    """A numerical failure inside a scenario task, tagged with the task name."""

    def __init__(self, task: str, cause: Exception):
        super().__init__(f"{task}: {cause}")
        self.task = task
        self.cause = cause
