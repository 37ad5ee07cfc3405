#!/usr/bin/env python3
"""
Simulation Error Types
Exception hierarchy shared by the builders, solvers, sweeps and the CLI
"""


class SimulationError(Exception):
    """Base class for every failure raised by the simulator"""

    component = "Simulator"
    operation = "General"


class ParameterError(SimulationError, ValueError):
    """Physical inputs outside their admissible range"""

    component = "ModelCore"
    operation = "Validate"


class UnphysicalRatesError(SimulationError):
    """Rate matrix is not positive semidefinite"""

    component = "Liouvillian"
    operation = "Dissipator"


class ResonanceError(SimulationError):
    """Resonant secular variant requested while Omega != Delta"""

    component = "Liouvillian"
    operation = "Secular"


class GeneratorError(SimulationError):
    """Generator does not annihilate the trace"""

    component = "Solver"
    operation = "CheckGenerator"


class DegenerateSteadyStateError(SimulationError):
    """Bordered steady-state system is ill-conditioned"""

    component = "Solver"
    operation = "SteadyState"

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class NonPhysicalStateError(SimulationError):
    """A produced state violates positivity, hermiticity or normalization"""

    component = "Solver"
    operation = "Physicality"


class DegenerateBlockError(SimulationError):
    """Central 2x2 block has no preferred entangled basis (G = 0)"""

    component = "Entanglement"
    operation = "Decompose"


class IntegrationError(SimulationError):
    """Time integration stopped before t_final"""

    component = "Solver"
    operation = "Evolve"


class SweepRowError(SimulationError):
    """A sweep grid point failed; carries the offending parameter set"""

    component = "Sweep"
    operation = "Row"

    def __init__(self, message, row_index, params):
        super().__init__(f"row {row_index}: {message} | params={params}")
        self.row_index = row_index
        self.params = params
