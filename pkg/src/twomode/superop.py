"""Superoperators of the lossy two-mode problem.

All maps act on dense density matrices directly; nothing is vectorized into a
``dim**2 x dim**2`` Liouvillian.

``jump_super`` is the sandwich part ``2 c rho c^dagger`` of the dissipator,
``anticomm_super`` the anticommutator part, and ``exp_jump`` the finite series
``exp(+-(J_a + J_b) / 2)`` that removes the jump terms from the master
equation.  Under ``varrho = exp_jump(+1, rho)`` the Lindblad equation becomes
``d varrho / dz = -i (H_eff varrho - varrho H_eff^dagger)``.
"""

from __future__ import annotations

import math

import numpy as np

from .fock import FockSpace, ladder
from .params import ModelParams

__all__ = [
    "ModelParams",
    "anticomm_super",
    "exp_jump",
    "interaction_super",
    "jump_super",
    "lindblad_rhs",
    "total_jump",
    "vn_rhs",
]

_ZERO = 1e-300


def _space_of(rho: np.ndarray) -> FockSpace:
    dim = rho.shape[0]
    n = math.isqrt(dim)
    if rho.ndim != 2 or rho.shape != (dim, dim) or n * n != dim:
        raise ValueError(f"density matrix of shape {rho.shape} is not on a two-mode Fock space")
    return FockSpace(n - 1)


def _lowering(mode: str, rho: np.ndarray) -> np.ndarray:
    return ladder(mode, _space_of(rho).n_max)


def jump_super(mode: str, rho: np.ndarray) -> np.ndarray:
    """``2 c rho c^dagger`` for ``c`` the lowering operator of ``mode``."""
    c = _lowering(mode, rho)
    return 2.0 * c @ rho @ c.conj().T


def anticomm_super(mode: str, rho: np.ndarray) -> np.ndarray:
    """``c^dagger c rho + rho c^dagger c``."""
    c = _lowering(mode, rho)
    n = c.conj().T @ c
    return n @ rho + rho @ n


def _hopping(space: FockSpace) -> np.ndarray:
    a = ladder("a", space.n_max)
    b = ladder("b", space.n_max)
    x = a @ b.conj().T
    return x + x.conj().T


def interaction_super(rho: np.ndarray) -> np.ndarray:
    """Commutator ``[a b^dagger + a^dagger b, rho]`` (coupling strength not included)."""
    x = _hopping(_space_of(rho))
    return x @ rho - rho @ x


def lindblad_rhs(params: ModelParams, rho: np.ndarray) -> np.ndarray:
    """Right-hand side of the two-mode Lindblad master equation."""
    space = _space_of(rho)
    a = ladder("a", space.n_max)
    b = ladder("b", space.n_max)
    x = _hopping(space)
    out = -1j * params.g * (x @ rho - rho @ x)
    for rate, c in ((params.gamma_a, a), (params.gamma_b, b)):
        if rate == 0.0:
            continue
        cd = c.conj().T
        n = cd @ c
        out += rate * (2.0 * c @ rho @ cd - n @ rho - rho @ n)
    return out


def vn_rhs(h_eff: np.ndarray, varrho: np.ndarray) -> np.ndarray:
    """``-i (H varrho - varrho H^dagger)``: the jump-free generator."""
    return -1j * (h_eff @ varrho - varrho @ h_eff.conj().T)


def total_jump(rho: np.ndarray) -> np.ndarray:
    """``(J_a + J_b) rho``."""
    space = _space_of(rho)
    out = np.zeros_like(rho, dtype=complex)
    for mode in ("a", "b"):
        c = ladder(mode, space.n_max)
        out += 2.0 * c @ rho @ c.conj().T
    return out


def exp_jump(sign: int, rho: np.ndarray) -> np.ndarray:
    """``exp(sign * (J_a + J_b) / 2) rho`` summed as a terminating series.

    Every application of ``J_a + J_b`` removes one photon from both sides of
    ``rho``, so on the truncated space the series ends with an exactly zero
    term after at most ``2 * n_max + 1`` terms.  The result is not trace
    preserving.
    """
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    rho = np.asarray(rho, dtype=complex)
    space = _space_of(rho)
    cs = [ladder(mode, space.n_max) for mode in ("a", "b")]
    # one step of (sign/2)(J_a + J_b) is sign * sum_c c rho c^dagger
    total = rho.copy()
    term = rho
    k = 0
    while True:
        k += 1
        term = sign * sum(c @ term @ c.conj().T for c in cs) / k
        if np.max(np.abs(term)) < _ZERO:
            break
        if k > 2 * space.n_max + 1:
            raise RuntimeError("jump series failed to terminate on a truncated space")
        total += term
    return total
