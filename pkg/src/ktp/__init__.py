"""Two-species BGK mixtures with truncated Maxwellians.

Submodules: ``mixture`` (species, equilibria, entropies), ``moments``
(grids, quadrature, entropy functionals), ``oracles`` (closed-form test
identities), ``kinetic`` (IMEX-RK solver), ``euler`` (limit system),
``diagnostics``, ``config`` and ``cli``.
"""
from .euler import EulerState, run_euler
from .kinetic import ARS232, ImexTableau, InitialData, SimConfig, imex_step, run_kinetic
from .mixture import Equilibrium, SpeciesParams
from .moments import PhaseGrid, discrete_moments

__version__ = "0.1.0"

__all__ = [
    "ARS232", "Equilibrium", "EulerState", "ImexTableau", "InitialData", "PhaseGrid", "SimConfig",
    "SpeciesParams", "discrete_moments", "imex_step", "run_euler", "run_kinetic",
]
