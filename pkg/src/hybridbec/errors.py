"""Exception types shared across the simulator.

The CLI maps these onto exit codes: config problems -> 2, solver
non-convergence -> 3, physical instability (collapse) -> 4, anything
else -> 5.
"""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(SimulationError):
    """Invalid configuration or parameter record."""


class ResonanceSingularityError(SimulationError):
    """Applied field too close to the resonant field to evaluate the
    field-dependent scattering length or conversion amplitude."""


class ConvergenceError(SimulationError):
    """Iterative solver failed to reach tolerance.

    Carries the last residual and iteration count so callers can report
    a meaningful diagnostic.
    """

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class CollapseError(SimulationError):
    """Attractive interaction drove the condensate width to the grid
    floor; no stable ground state at this particle number."""

    def __init__(self, message, width=None, iterations=None):
        super().__init__(message)
        self.width = width
        self.iterations = iterations


class DomainError(SimulationError):
    """Input outside the mathematical domain of a formula (wrong-sign
    scattering length, nonpositive trial frequency, nonpositive mode
    energy in a Bose factor, ...)."""


class BoundaryMinimumError(SimulationError):
    """Variational minimizer landed on the search-box boundary.

    Carries the offending point so the caller can widen the box.
    """

    def __init__(self, message, v=None, omega=None, energy=None):
        super().__init__(message)
        self.v = v
        self.omega = omega
        self.energy = energy
