"""Exact Markovian dynamics of two coupled lossy bosonic modes.

The Lindblad equation is mapped to a jump-free, non-Hermitian evolution by
``exp(+-(J_a + J_b)/2)``; the effective Hamiltonian is then diagonalized by a
non-unitary ``exp(eta Jy)``.  RK4 and quantum-trajectory oracles check the
result.
"""

from .analytic import coincidence_closed_form, coincidence_from_density, hom_minimum
from .errors import ConfigurationError, ExceptionalPointError, NumericalFailure
from .fock import FockSpace
from .params import ModelParams, Phase, Regime
from .propagator import PropagationPlan, evolve_exact, evolve_pure_nonhermitian, u_z

__all__ = [
    "ConfigurationError",
    "ExceptionalPointError",
    "FockSpace",
    "ModelParams",
    "NumericalFailure",
    "Phase",
    "PropagationPlan",
    "Regime",
    "coincidence_closed_form",
    "coincidence_from_density",
    "evolve_exact",
    "evolve_pure_nonhermitian",
    "hom_minimum",
    "u_z",
]
