"""Initial states and random test inputs on the truncated space."""

from __future__ import annotations

import numpy as np

from .fock import FockSpace, basis_state

__all__ = [
    "dm",
    "random_density",
    "random_operator",
    "standard_initial_states",
]


def dm(psi: np.ndarray) -> np.ndarray:
    """Projector onto a (normalized) state vector."""
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def _support(space: FockSpace, max_total: int | None) -> np.ndarray:
    top = space.n_max if max_total is None else max_total
    return np.flatnonzero(space.total_number <= top)


def random_operator(space: FockSpace, rng: np.random.Generator, max_total: int | None = None) -> np.ndarray:
    """Complex Gaussian matrix supported on states with at most ``max_total`` photons."""
    idx = _support(space, max_total)
    m = np.zeros((space.dim, space.dim), dtype=complex)
    block = rng.normal(size=(len(idx), len(idx))) + 1j * rng.normal(size=(len(idx), len(idx)))
    m[np.ix_(idx, idx)] = block
    return m


def random_density(
    space: FockSpace,
    rng: np.random.Generator,
    rank: int = 2,
    max_total: int | None = None,
) -> np.ndarray:
    """Random unit-trace positive matrix of the given rank."""
    idx = _support(space, max_total)
    vecs = np.zeros((space.dim, rank), dtype=complex)
    vecs[idx] = rng.normal(size=(len(idx), rank)) + 1j * rng.normal(size=(len(idx), rank))
    rho = vecs @ vecs.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def standard_initial_states(space: FockSpace, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """The validation set: |1,1>, |2,0>, (|1,0> + |0,1>)/sqrt 2, random rank 2."""
    if space.n_max < 2:
        raise ValueError("the standard initial states need n_max >= 2")
    return {
        "|1,1>": dm(basis_state(1, 1, space)),
        "|2,0>": dm(basis_state(2, 0, space)),
        "(|1,0>+|0,1>)/sqrt2": dm((basis_state(1, 0, space) + basis_state(0, 1, space)) / np.sqrt(2.0)),
        "random rank-2": random_density(space, rng, rank=2, max_total=2),
    }
