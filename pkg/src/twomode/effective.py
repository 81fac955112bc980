"""Effective non-Hermitian Hamiltonian and its analytic diagonalization.

With the Schwinger-boson operators ``N, Jx, Jy, Jz`` the jump-free
Hamiltonian reads::

    H_eff = -i (gamma/2) N - i delta Jz + 2 g Jx

The similarity transformation ``R = exp(eta Jy)`` with ``tanh(eta) = 2g/delta``
removes the ``Jx`` term and leaves a Hamiltonian that is diagonal in the Fock
basis.  ``R`` is not unitary, so right and left eigenvectors of ``H_eff`` are
the columns of ``R`` and the rows of ``R^-1`` and form a bi-orthogonal pair.

Below the exceptional point ``eta`` is complex.  The branch is fixed so that
``R^-1 H_eff R`` is the diagonal form whose ``b^dagger b - a^dagger a``
coefficient is ``+omega_I/2`` (below) or ``-i omega_II/2`` (above); the naive
branches put the opposite sign there and swap the labels ``(j, k)``.
"""

from __future__ import annotations

import cmath
import math
from typing import NamedTuple

import numpy as np

from .fock import FockSpace, expm, ladder
from .params import ExceptionalPointError, ModelParams, Phase

__all__ = [
    "SchwingerOps",
    "eigenvalue",
    "eta",
    "h_diag",
    "h_eff",
    "h_eff_rewritten",
    "jordan_block_order",
    "left_eigenvector",
    "r_inverse",
    "r_transform",
    "right_eigenvector",
    "schwinger_ops",
    "sector_block",
]


class SchwingerOps(NamedTuple):
    N: np.ndarray
    Jx: np.ndarray
    Jy: np.ndarray
    Jz: np.ndarray


def schwinger_ops(space: FockSpace) -> SchwingerOps:
    a = ladder("a", space.n_max)
    b = ladder("b", space.n_max)
    ad, bd = a.conj().T, b.conj().T
    na, nb = ad @ a, bd @ b
    return SchwingerOps(
        N=na + nb,
        Jx=0.5 * (a @ bd + ad @ b),
        Jy=0.5j * (ad @ b - a @ bd),
        Jz=0.5 * (nb - na),
    )


def h_eff(params: ModelParams, space: FockSpace) -> np.ndarray:
    """``-i gamma_a a^dagger a - i gamma_b b^dagger b + g (a b^dagger + a^dagger b)``."""
    a = ladder("a", space.n_max)
    b = ladder("b", space.n_max)
    ad, bd = a.conj().T, b.conj().T
    return (
        -1j * params.gamma_a * (ad @ a)
        - 1j * params.gamma_b * (bd @ b)
        + params.g * (a @ bd + ad @ b)
    )


def h_eff_rewritten(params: ModelParams, space: FockSpace) -> np.ndarray:
    """Same operator assembled from the total loss and the loss imbalance."""
    ops = schwinger_ops(space)
    return (
        -1j * (0.5 * params.gamma * ops.N + params.delta * ops.Jz)
        + 2.0 * params.g * ops.Jx
    )


def eta(params: ModelParams) -> complex:
    """Rapidity of the diagonalizing transformation.

    Satisfies ``2 g cosh(eta) = delta sinh(eta)``.  Real only for
    ``delta > 2g``; raises :class:`ExceptionalPointError` at the EP.
    """
    g, d = params.g, params.delta
    tag = params.regime.tag
    if tag is Phase.AT_EP:
        raise ExceptionalPointError()
    if tag is Phase.BELOW_EP:
        return complex(math.atanh(d / (2.0 * g)), -0.5 * math.pi)
    x = math.atanh(2.0 * g / d)
    return complex(x, 0.0) if d > 0 else complex(x, math.pi)


def r_transform(eta_value: complex, space: FockSpace) -> np.ndarray:
    """``R = exp(eta Jy)``."""
    return expm(eta_value * schwinger_ops(space).Jy)


def r_inverse(eta_value: complex, space: FockSpace) -> np.ndarray:
    return expm(-eta_value * schwinger_ops(space).Jy)


def eigenvalue(j: int, k: int, params: ModelParams) -> complex:
    """Eigenvalue attached to the transformed basis state ``|j, k>``."""
    regime = params.regime
    gamma = params.gamma
    if regime.tag is Phase.BELOW_EP:
        return 0.5 * complex(regime.omega * (k - j), -gamma * (j + k))
    if regime.tag is Phase.ABOVE_EP:
        return -0.5j * (gamma * (j + k) + regime.omega * (k - j))
    return -0.5j * gamma * (j + k)


def h_diag(params: ModelParams, space: FockSpace) -> np.ndarray:
    if params.regime.tag is Phase.AT_EP:
        raise ExceptionalPointError()
    diag = [eigenvalue(*space.occupations(i), params) for i in range(space.dim)]
    return np.diag(np.array(diag, dtype=complex))


def right_eigenvector(j: int, k: int, params: ModelParams, space: FockSpace) -> np.ndarray:
    """Column ``R |j, k>``; satisfies ``H_eff v = lambda_jk v``."""
    _check_sector(j, k, space)
    r = r_transform(eta(params), space)
    return r[:, space.index(j, k)].copy()


def left_eigenvector(j: int, k: int, params: ModelParams, space: FockSpace) -> np.ndarray:
    """Row ``<j, k| R^-1`` as bra components (no conjugation).

    ``left @ H_eff == lambda_jk * left`` and ``left(j, k) @ right(l, m)`` is
    ``delta_jl delta_km``.
    """
    _check_sector(j, k, space)
    r_inv = r_inverse(eta(params), space)
    return r_inv[space.index(j, k), :].copy()


def _check_sector(j: int, k: int, space: FockSpace) -> None:
    if j < 0 or k < 0 or j + k > space.n_max:
        raise ValueError(f"need 0 <= j, k and j + k <= {space.n_max}, got ({j}, {k})")


def sector_block(m: np.ndarray, n_total: int, space: FockSpace) -> np.ndarray:
    """Restriction of ``m`` to the states with exactly ``n_total`` photons."""
    idx = np.flatnonzero(space.total_number == n_total)
    return m[np.ix_(idx, idx)]


def jordan_block_order(params: ModelParams, space: FockSpace, n_total: int, rtol: float = 1e-9) -> int:
    """Nilpotency index of ``H_eff - lambda`` on the ``n_total``-photon sector.

    ``lambda`` is the coalesced eigenvalue ``-i gamma n_total / 2``.  At the
    exceptional point the sector is a single Jordan block of size
    ``n_total + 1``; away from it the result is not meaningful.
    """
    if not 0 <= n_total <= space.n_max:
        raise ValueError(f"sector {n_total} outside [0, {space.n_max}]")
    block = sector_block(h_eff(params, space), n_total, space)
    m = block + 0.5j * params.gamma * n_total * np.eye(len(block))
    scale = max(np.linalg.norm(block, 2), 1e-300)
    power = np.eye(len(block), dtype=complex)
    for order in range(1, len(block) + 1):
        power = power @ m
        if np.linalg.norm(power, 2) <= rtol * scale**order:
            return order
    return len(block) + 1


def eta_balance_residual(eta_value: complex, params: ModelParams) -> float:
    """``|2g cosh(eta) - delta sinh(eta)|``."""
    return abs(2.0 * params.g * cmath.cosh(eta_value) - params.delta * cmath.sinh(eta_value))
