"""Trapped hybrid atom/molecule condensate simulator.

Ground states of the coupled condensate equations on a radial grid,
quasiparticle spectra (closed-form, block-diagonalized and direct
grid diagonalization), finite-temperature density profiles, variational
low-lying collective modes, and uniform-gas estimates near a magnetic
resonance.  Natural units hbar = M = omega_a = 1 throughout.
"""

from .errors import (
    SimulationError,
    ConfigError,
    ResonanceSingularityError,
    ConvergenceError,
    CollapseError,
    DomainError,
    BoundaryMinimumError,
)
from .params import (
    PhysicalParams,
    FeshbachResonance,
    UnitScales,
    effective_scattering_length,
    conversion_amplitude,
    natural_units,
    from_natural,
)
from .grid import RadialGrid, build_grid, harmonic_potential
from .gpe import CondensateState, SolverOptions, gaussian_ansatz, solve_coupled_gpe
from .bdg import (
    Mode,
    ModeSet,
    block_2x2_spectrum,
    direct_grid_spectrum,
    paper_literal_spectrum,
)
from .thermal import DensityProfile, bose_occupation, density_profile, total_numbers
from .variational import SearchBox, VariationalResult, minimize_mode, sweep_spectrum
from .uniform import (
    UniformGasPoint,
    critical_number,
    depletion_number,
    dispersion,
    figure3_curve,
    uniform_mu,
)
from .config import RunConfig, load_config

__version__ = "0.1.0"

__all__ = [
    "SimulationError",
    "ConfigError",
    "ResonanceSingularityError",
    "ConvergenceError",
    "CollapseError",
    "DomainError",
    "BoundaryMinimumError",
    "PhysicalParams",
    "FeshbachResonance",
    "UnitScales",
    "effective_scattering_length",
    "conversion_amplitude",
    "natural_units",
    "from_natural",
    "RadialGrid",
    "build_grid",
    "harmonic_potential",
    "CondensateState",
    "SolverOptions",
    "gaussian_ansatz",
    "solve_coupled_gpe",
    "Mode",
    "ModeSet",
    "block_2x2_spectrum",
    "direct_grid_spectrum",
    "paper_literal_spectrum",
    "DensityProfile",
    "bose_occupation",
    "density_profile",
    "total_numbers",
    "SearchBox",
    "VariationalResult",
    "minimize_mode",
    "sweep_spectrum",
    "UniformGasPoint",
    "critical_number",
    "depletion_number",
    "dispersion",
    "figure3_curve",
    "uniform_mu",
    "RunConfig",
    "load_config",
    "__version__",
]
