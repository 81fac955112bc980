"""Exact Lindblad evolution through the jump-free picture.

The pipeline is::

    varrho(0) = exp_jump(+1, rho(0))
    varrho(z) = U(z) varrho(0) U(z)^dagger,   U(z) = R exp(-i H_diag z) R^-1
    rho(z)    = exp_jump(-1, varrho(z))

``R = exp(eta Jy)`` has condition number ``exp(|Re eta| * N)`` on the
``N``-photon sector, which diverges at the exceptional point.  Whenever that
exceeds ``MAX_CONDITION`` on the physical sectors (``N <= n_max``) the
propagator is built as ``expm(-i H_eff z)`` instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .effective import eta, h_diag, h_eff, r_inverse, r_transform
from .fock import FockSpace, expm, trace_deviation
from .params import ModelParams, Phase
from .superop import exp_jump

__all__ = [
    "MAX_CONDITION",
    "PropagationPlan",
    "evolve_exact",
    "evolve_pure_nonhermitian",
    "needs_fallback",
    "u_z",
]

MAX_CONDITION = 1e6


def needs_fallback(params: ModelParams, space: FockSpace) -> bool:
    """True at (or numerically too close to) the exceptional point."""
    if params.regime.tag is Phase.AT_EP:
        return True
    return abs(eta(params).real) * max(space.n_max, 1) > math.log(MAX_CONDITION)


@dataclass
class PropagationPlan:
    """Evaluates ``U(z)`` and ``rho(z)`` for one parameter set over a z-grid.

    The similarity factors are computed once; ``U`` itself is rebuilt from
    them for every ``z`` so errors do not accumulate along the grid.
    """

    params: ModelParams
    space: FockSpace
    z_grid: np.ndarray = field(default_factory=lambda: np.zeros(1))
    ep_fallback: bool | None = None

    def __post_init__(self):
        self.z_grid = np.atleast_1d(np.asarray(self.z_grid, dtype=float))
        if np.any(self.z_grid < 0) or np.any(np.diff(self.z_grid) <= 0):
            raise ValueError("z_grid must be non-negative and strictly increasing")
        if self.ep_fallback is None:
            self.ep_fallback = needs_fallback(self.params, self.space)
        self._h = h_eff(self.params, self.space)
        if not self.ep_fallback:
            e = eta(self.params)
            self._r = r_transform(e, self.space)
            self._r_inv = r_inverse(e, self.space)
            self._lam = np.diag(h_diag(self.params, self.space)).copy()

    def u(self, z: float) -> np.ndarray:
        if z == 0:
            return np.eye(self.space.dim, dtype=complex)
        if self.ep_fallback:
            return expm(-1j * z * self._h)
        return (self._r * np.exp(-1j * self._lam * z)) @ self._r_inv

    def evolve(self, rho0: np.ndarray, z: float) -> np.ndarray:
        _check_physical_input(rho0, self.space)
        varrho = exp_jump(1, rho0)
        u = self.u(z)
        return exp_jump(-1, u @ varrho @ u.conj().T)

    def run(self, rho0: np.ndarray) -> list[np.ndarray]:
        """``rho(z)`` for every point of the grid."""
        _check_physical_input(rho0, self.space)
        varrho = exp_jump(1, rho0)
        out = []
        for z in self.z_grid:
            u = self.u(float(z))
            out.append(exp_jump(-1, u @ varrho @ u.conj().T))
        return out


def _check_physical_input(rho0: np.ndarray, space: FockSpace) -> None:
    space.check_operator(np.asarray(rho0), "initial density matrix")
    dev = trace_deviation(rho0)
    if dev > 1e-6:
        raise ValueError(f"initial state is not normalized: |tr(rho) - 1| = {dev:.3g}")
    outside = space.total_number > space.n_max
    if np.any(np.abs(rho0[outside, :]) > 1e-12) or np.any(np.abs(rho0[:, outside]) > 1e-12):
        raise ValueError(f"initial state has support above {space.n_max} total photons")


def u_z(params: ModelParams, space: FockSpace, z: float, fallback: bool | None = None) -> np.ndarray:
    """Non-unitary propagator ``exp(-i H_eff z)`` of the jump-free picture.

    ``fallback`` forces (``True``) or forbids (``False``) the direct
    exponential; by default it is chosen by :func:`needs_fallback`.  The two
    constructions agree on the sectors with at most ``n_max`` photons; above
    that the truncated ``R`` is not a similarity and the blocks differ.
    """
    return PropagationPlan(params, space, ep_fallback=fallback).u(z)


def evolve_exact(rho0: np.ndarray, params: ModelParams, space: FockSpace, z: float) -> np.ndarray:
    """Solution ``rho(z)`` of the Lindblad equation started from ``rho0``."""
    return PropagationPlan(params, space).evolve(np.asarray(rho0, dtype=complex), z)


def evolve_pure_nonhermitian(psi0: np.ndarray, params: ModelParams, space: FockSpace, z: float) -> np.ndarray:
    """``U(z) psi0``, left unnormalized: the norm loss is the no-jump probability."""
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (space.dim,):
        raise ValueError(f"state of shape {psi0.shape} does not match dimension {space.dim}")
    return u_z(params, space, z) @ psi0
