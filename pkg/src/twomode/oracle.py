"""Reference solvers used to validate the exact propagator.

Two independent routes to ``rho(z)``:

* ``integrate_lindblad``: classical fixed-step RK4 on the master equation.
* ``mc_trajectories``: first-order Monte-Carlo wave-function unraveling.
  Each step either applies a quantum jump ``psi -> c psi / |c psi|`` with
  probability ``2 gamma_c |c psi|^2 dz`` or takes an explicit Euler step with
  ``H_eff`` followed by renormalization.

Neither route touches the matrix exponential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .effective import h_eff
from .errors import ConfigurationError, NumericalFailure
from .fock import FockSpace, ladder, trace_distance
from .params import ModelParams
from .superop import lindblad_rhs

__all__ = [
    "IntegratorConfig",
    "RNG_ALGORITHM",
    "TrajectoryStats",
    "default_mc_step",
    "integrate_lindblad",
    "integrate_lindblad_grid",
    "mc_trajectories",
    "mc_trajectories_grid",
]

RNG_ALGORITHM = "PCG64 (numpy SeedSequence.spawn per block)"
MC_BLOCK = 5000
MAX_JUMP_PROBABILITY = 0.1
REFINE_TOL = 1e-9


@dataclass(frozen=True)
class IntegratorConfig:
    """RK4 settings.  ``step=None`` picks ``0.01 / max(g, gamma_a, gamma_b)``."""

    step: float | None = None
    refine: bool = False

    def resolve_step(self, params: ModelParams) -> float:
        limit = 0.01 / max(params.max_rate, 1e-30)
        if self.step is None:
            return limit
        if not self.step > 0:
            raise ConfigurationError(f"RK4 step must be positive, got {self.step}")
        if self.step > limit * (1 + 1e-12):
            raise ConfigurationError(f"RK4 step {self.step} exceeds 0.01/max rate = {limit}")
        return self.step


def _rk4_span(rho: np.ndarray, params: ModelParams, length: float, step: float) -> np.ndarray:
    if length == 0:
        return rho
    n = max(1, math.ceil(length / step - 1e-9))
    h = length / n
    f = lindblad_rhs
    for _ in range(n):
        k1 = f(params, rho)
        k2 = f(params, rho + 0.5 * h * k1)
        k3 = f(params, rho + 0.5 * h * k2)
        k4 = f(params, rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return rho


def _rk4_grid(rho0: np.ndarray, params: ModelParams, z_grid: np.ndarray, step: float) -> list[np.ndarray]:
    out = []
    rho, z_prev = rho0, 0.0
    for z in z_grid:
        rho = _rk4_span(rho, params, float(z) - z_prev, step)
        z_prev = float(z)
        out.append(rho)
    return out


def integrate_lindblad_grid(
    rho0: np.ndarray,
    params: ModelParams,
    space: FockSpace,
    z_grid,
    config: IntegratorConfig = IntegratorConfig(),
) -> list[np.ndarray]:
    """RK4 solution at each point of a non-decreasing, non-negative grid."""
    rho0 = np.asarray(rho0, dtype=complex)
    space.check_operator(rho0, "initial density matrix")
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=float))
    if np.any(z_grid < 0) or np.any(np.diff(z_grid) < 0):
        raise ValueError("z_grid must be non-negative and non-decreasing")
    step = config.resolve_step(params)
    result = _rk4_grid(rho0, params, z_grid, step)
    if not config.refine:
        return result
    floor = 1e-8 / (params.g if params.g > 0 else max(params.max_rate, 1e-30))
    while True:
        step /= 2.0
        if step < floor:
            raise NumericalFailure(f"RK4 step halving reached {step:.3g} without convergence")
        finer = _rk4_grid(rho0, params, z_grid, step)
        change = max(trace_distance(x, y) for x, y in zip(result, finer))
        result = finer
        if change < REFINE_TOL:
            return result


def integrate_lindblad(
    rho0: np.ndarray,
    params: ModelParams,
    space: FockSpace,
    z: float,
    config: IntegratorConfig = IntegratorConfig(),
) -> np.ndarray:
    if z < 0:
        raise ValueError(f"z must be non-negative, got {z}")
    return integrate_lindblad_grid(rho0, params, space, [z], config)[0]


@dataclass(frozen=True)
class TrajectoryStats:
    n_traj: int
    mean: float
    std_error: float
    seed: int
    z: float = 0.0
    algorithm: str = RNG_ALGORITHM


def default_mc_step(params: ModelParams) -> float:
    # the unraveling is first order; this keeps its bias well below the
    # statistical error of 2e4 trajectories
    return min(0.001, 0.005 / max(params.max_rate, 1e-30))


def _block_values(psi0, h, ops, rates, z_grid, dz, observable, n, rng):
    """Observable along ``n`` trajectories; shape ``(n, len(z_grid))``."""
    psi = np.tile(psi0, (n, 1))
    ops_t = [c.T for c in ops]
    values = np.empty((n, len(z_grid)))
    z_prev = 0.0
    for col, z in enumerate(z_grid):
        span = float(z) - z_prev
        z_prev = float(z)
        n_steps = math.ceil(span / dz - 1e-9) if span > 0 else 0
        if n_steps:
            h_step = span / n_steps
            euler_t = (np.eye(len(psi0)) - 1j * h_step * h).T
            for _ in range(n_steps):
                jumped = [psi @ c_t for c_t in ops_t]
                probs = [2.0 * r * h_step * np.einsum("ij,ij->i", v.conj(), v).real for r, v in zip(rates, jumped)]
                total = probs[0] + probs[1]
                if np.max(total) > MAX_JUMP_PROBABILITY:
                    raise ConfigurationError(
                        f"jump probability {np.max(total):.3g} per step exceeds {MAX_JUMP_PROBABILITY}; reduce dz"
                    )
                u = rng.random(n)
                jump_a = u < probs[0]
                jump_b = ~jump_a & (u < total)
                stay = ~(jump_a | jump_b)
                new = np.empty_like(psi)
                new[stay] = psi[stay] @ euler_t
                new[jump_a] = jumped[0][jump_a]
                new[jump_b] = jumped[1][jump_b]
                psi = new / np.linalg.norm(new, axis=1)[:, None]
        values[:, col] = np.einsum("ij,jk,ik->i", psi.conj(), observable, psi).real
    return values


def mc_trajectories_grid(
    psi0: np.ndarray,
    params: ModelParams,
    space: FockSpace,
    z_grid,
    observable: np.ndarray,
    n_traj: int,
    seed: int,
    dz: float | None = None,
) -> list[TrajectoryStats]:
    """Trajectory estimates of ``tr(rho(z) observable)`` along a z-grid.

    Trajectories run in blocks of ``MC_BLOCK``, each with its own generator
    spawned from ``seed``, so results depend only on ``seed`` and ``n_traj``.
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (space.dim,):
        raise ValueError(f"state of shape {psi0.shape} does not match dimension {space.dim}")
    if abs(np.linalg.norm(psi0) - 1.0) > 1e-12:
        raise ValueError("initial trajectory state must be normalized")
    space.check_operator(np.asarray(observable), "observable")
    if n_traj < 2:
        raise ConfigurationError(f"need at least 2 trajectories, got {n_traj}")
    if not 0 <= seed < 2**64:
        raise ConfigurationError(f"seed must be a 64-bit unsigned integer, got {seed}")
    z_grid = np.atleast_1d(np.asarray(z_grid, dtype=float))
    if np.any(z_grid < 0) or np.any(np.diff(z_grid) < 0):
        raise ValueError("z_grid must be non-negative and non-decreasing")
    dz = default_mc_step(params) if dz is None else dz
    if not dz > 0:
        raise ConfigurationError(f"trajectory step must be positive, got {dz}")

    # dynamics never raises the photon number: keep only reachable sectors
    top = int(np.max(space.total_number[np.abs(psi0) > 0]))
    keep = np.flatnonzero(space.total_number <= top)
    sub = np.ix_(keep, keep)
    h = h_eff(params, space)[sub]
    ops = [ladder("a", space.n_max)[sub], ladder("b", space.n_max)[sub]]
    observable = np.asarray(observable)[sub]
    psi0 = psi0[keep]
    rates = [params.gamma_a, params.gamma_b]
    n_blocks = -(-n_traj // MC_BLOCK)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    blocks = []
    for i, child in enumerate(children):
        n = min(MC_BLOCK, n_traj - i * MC_BLOCK)
        rng = np.random.Generator(np.random.PCG64(child))
        blocks.append(_block_values(psi0, h, ops, rates, z_grid, dz, observable, n, rng))
    values = np.concatenate(blocks, axis=0)

    stats = []
    for col, z in enumerate(z_grid):
        column = values[:, col]
        mean = math.fsum(column) / n_traj
        var = math.fsum((column - mean) ** 2) / (n_traj - 1)
        stats.append(TrajectoryStats(n_traj, mean, math.sqrt(var / n_traj), seed, float(z)))
    return stats


def mc_trajectories(
    psi0: np.ndarray,
    params: ModelParams,
    space: FockSpace,
    z: float,
    observable: np.ndarray,
    n_traj: int,
    seed: int,
    dz: float | None = None,
) -> TrajectoryStats:
    return mc_trajectories_grid(psi0, params, space, [z], observable, n_traj, seed, dz)[0]
