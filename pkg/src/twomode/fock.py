"""Truncated two-mode Fock space and the dense complex matrix kernel.

Operators, density matrices and state vectors are plain ``numpy`` arrays of
dtype ``complex128``.  The basis ordering is row-major with mode ``a`` major,
i.e. ``|n_a, n_b>`` sits at flat index ``n_a * (n_max + 1) + n_b``.

Truncation is exact for the dynamics handled by this package: the coupling
conserves the total photon number and the losses only lower it, so a state
supported on ``n_a + n_b <= n_max`` never reaches the discarded sector.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
import scipy.linalg

__all__ = [
    "FockSpace",
    "adjoint",
    "annihilation",
    "apply",
    "basis_index",
    "basis_state",
    "creation",
    "dump_matrix",
    "expm",
    "format_complex",
    "hermitian_eigenvalues",
    "hermiticity_defect",
    "identity",
    "ladder",
    "min_eigenvalue",
    "mul",
    "number",
    "projector",
    "sandwich",
    "trace_deviation",
    "trace_distance",
]


@dataclass(frozen=True)
class FockSpace:
    """Two bosonic modes, each truncated at ``n_max`` photons."""

    n_max: int

    def __post_init__(self):
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, (int, np.integer)):
            raise TypeError(f"n_max must be an integer, got {self.n_max!r}")
        if self.n_max < 0:
            raise ValueError(f"n_max must be non-negative, got {self.n_max}")

    @property
    def dim(self) -> int:
        return (self.n_max + 1) ** 2

    def index(self, n_a: int, n_b: int) -> int:
        return basis_index(n_a, n_b, self)

    def occupations(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`index`."""
        if not 0 <= index < self.dim:
            raise ValueError(f"flat index {index} outside [0, {self.dim})")
        return divmod(int(index), self.n_max + 1)

    @cached_property
    def total_number(self) -> np.ndarray:
        """Total photon number of every basis state, in flat order."""
        n = np.arange(self.n_max + 1)
        return (n[:, None] + n[None, :]).ravel()

    def sector_mask(self, below: int) -> np.ndarray:
        """Boolean mask of basis states with ``n_a + n_b < below``."""
        return self.total_number < below

    def check_operator(self, m: np.ndarray, name: str = "operator") -> None:
        if m.shape != (self.dim, self.dim):
            raise ValueError(f"{name} has shape {m.shape}, expected ({self.dim}, {self.dim})")


def basis_index(n_a: int, n_b: int, space: FockSpace) -> int:
    for n in (n_a, n_b):
        if not 0 <= n <= space.n_max:
            raise ValueError(f"occupation {n} outside [0, {space.n_max}]")
    return n_a * (space.n_max + 1) + n_b


def _single_mode_lowering(n_max: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_max + 1, dtype=float)), 1).astype(complex)


@lru_cache(maxsize=64)
def ladder(mode: str, n_max: int) -> np.ndarray:
    """Cached, read-only lowering operator; see :func:`annihilation`."""
    low = _single_mode_lowering(n_max)
    eye = np.eye(n_max + 1, dtype=complex)
    if mode == "a":
        out = np.kron(low, eye)
    elif mode == "b":
        out = np.kron(eye, low)
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    out.setflags(write=False)
    return out


def annihilation(mode: str, space: FockSpace) -> np.ndarray:
    """Lowering operator of mode ``"a"`` or ``"b"`` on the truncated space."""
    return ladder(mode, space.n_max).copy()


def creation(mode: str, space: FockSpace) -> np.ndarray:
    # the adjoint of the truncated lowering operator sends |n_max> to zero
    return adjoint(annihilation(mode, space))


def number(mode: str, space: FockSpace) -> np.ndarray:
    c = annihilation(mode, space)
    return adjoint(c) @ c


def identity(space: FockSpace) -> np.ndarray:
    return np.eye(space.dim, dtype=complex)


def basis_state(n_a: int, n_b: int, space: FockSpace) -> np.ndarray:
    psi = np.zeros(space.dim, dtype=complex)
    psi[basis_index(n_a, n_b, space)] = 1.0
    return psi


def projector(n_a: int, n_b: int, space: FockSpace) -> np.ndarray:
    """Density matrix ``|n_a, n_b><n_a, n_b|``."""
    psi = basis_state(n_a, n_b, space)
    return np.outer(psi, psi.conj())


def _as_square(m, name: str) -> np.ndarray:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {m.shape}")
    return m


def adjoint(m: np.ndarray) -> np.ndarray:
    return _as_square(m, "operator").conj().T


def mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = _as_square(a, "left factor")
    b = _as_square(b, "right factor")
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return a @ b


def apply(m: np.ndarray, psi: np.ndarray) -> np.ndarray:
    m = _as_square(m, "operator")
    psi = np.asarray(psi)
    if psi.shape != (m.shape[0],):
        raise ValueError(f"state of shape {psi.shape} does not match operator {m.shape}")
    return m @ psi


def sandwich(a: np.ndarray, rho: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Return ``a @ rho @ b``."""
    a = _as_square(a, "left factor")
    rho = _as_square(rho, "density matrix")
    b = _as_square(b, "right factor")
    if not a.shape == rho.shape == b.shape:
        raise ValueError(f"dimension mismatch: {a.shape}, {rho.shape}, {b.shape}")
    return a @ rho @ b


def expm(m: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling and squaring with a degree-13 Pade core)."""
    m = _as_square(m, "operator")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix exponential of a matrix with non-finite entries")
    return scipy.linalg.expm(m.astype(complex))


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of the Hermitian part ``(m + m^dagger) / 2``, ascending."""
    m = _as_square(m, "matrix")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def trace_deviation(rho: np.ndarray) -> float:
    return float(abs(np.trace(rho) - 1.0))


def hermiticity_defect(rho: np.ndarray) -> float:
    rho = _as_square(rho, "density matrix")
    return float(np.max(np.abs(rho - rho.conj().T)))


def min_eigenvalue(rho: np.ndarray) -> float:
    return float(hermitian_eigenvalues(rho)[0])


def trace_distance(rho1: np.ndarray, rho2: np.ndarray) -> float:
    """Half the trace norm of ``rho1 - rho2`` (both assumed Hermitian)."""
    rho1 = _as_square(rho1, "first density matrix")
    rho2 = _as_square(rho2, "second density matrix")
    if rho1.shape != rho2.shape:
        raise ValueError(f"dimension mismatch: {rho1.shape} vs {rho2.shape}")
    return float(0.5 * np.sum(np.abs(hermitian_eigenvalues(rho1 - rho2))))


def format_complex(z: complex) -> str:
    return f"{z.real:.17g}{z.imag:+.17g}j"


def dump_matrix(m: np.ndarray) -> str:
    """Plain-text dump: one row per line, tab-separated ``re+imj`` entries."""
    m = _as_square(m, "matrix")
    return "".join("\t".join(format_complex(complex(x)) for x in row) + "\n" for row in m)
