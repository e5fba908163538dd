"""
Truncated Hilbert space of two bosonic modes and a two-level atom.

Basis ordering is fixed: the atomic level varies fastest, then the photon
number of mode b, then mode a::

    index = atom + 2 * (n_b + (cutoff_b + 1) * n_a)

with ``atom = 0`` for the lower level ``|->`` and ``atom = 1`` for ``|+>``.
Operators are dense complex ``numpy`` arrays built as Kronecker products in
that same order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import CapacityError, DomainError, TruncationError

MINUS = 0
PLUS = 1

#: Default cap on the bytes of a single dense ``dim x dim`` complex matrix.
DEFAULT_MEMORY_BUDGET = 1 << 30

#: Largest tolerated probability mass lost when truncating a coherent state.
COHERENT_DEFICIT_TOL = 1e-6

CONVENTIONS = {"half": 0.5, "unit": 1.0}

AtomLike = Union[int, str]


def atom_index(atom: AtomLike) -> int:
    """Map ``'plus'``/``'minus'``, ``+1``/``-1`` or ``1``/``0`` to a level index."""
    if isinstance(atom, str):
        key = atom.strip().lower()
        if key in ("plus", "+", "e", "excited"):
            return PLUS
        if key in ("minus", "-", "g", "ground"):
            return MINUS
        raise DomainError(f"unknown atomic level {atom!r}")
    if atom in (1, PLUS):
        return PLUS
    if atom in (0, -1):
        return MINUS
    raise DomainError(f"unknown atomic level {atom!r}")


def branch_sign(atom: AtomLike) -> int:
    """Return ``+1`` for ``|+>`` and ``-1`` for ``|->``."""
    return 1 if atom_index(atom) == PLUS else -1


def sz_magnitude(convention: str) -> float:
    """Eigenvalue magnitude of sigma_z under ``convention`` (``half`` or ``unit``)."""
    try:
        return CONVENTIONS[convention]
    except KeyError:
        raise DomainError(
            f"convention must be one of {sorted(CONVENTIONS)}, got {convention!r}"
        ) from None


@dataclass(frozen=True)
class HilbertSpace:
    """Product space ``C^(cutoff_a+1) x C^(cutoff_b+1) x C^2``.

    Parameters
    ----------
    cutoff_a, cutoff_b : int
        Largest retained photon number (inclusive) of each mode.
    """

    cutoff_a: int
    cutoff_b: int

    @property
    def dim_a(self) -> int:
        return self.cutoff_a + 1

    @property
    def dim_b(self) -> int:
        return self.cutoff_b + 1

    @property
    def dim(self) -> int:
        return 2 * self.dim_a * self.dim_b

    def index(self, n_a: int, n_b: int, atom: AtomLike) -> int:
        """Basis index of ``|n_a, n_b, atom>``."""
        if not (0 <= n_a <= self.cutoff_a and 0 <= n_b <= self.cutoff_b):
            raise DomainError(
                f"photon numbers ({n_a}, {n_b}) outside cutoffs "
                f"({self.cutoff_a}, {self.cutoff_b})"
            )
        return atom_index(atom) + 2 * (n_b + self.dim_b * n_a)

    def unindex(self, i: int) -> Tuple[int, int, int]:
        """Inverse of :meth:`index`; returns ``(n_a, n_b, atom)``."""
        if not 0 <= i < self.dim:
            raise DomainError(f"index {i} outside [0, {self.dim})")
        atom = i % 2
        rest = i // 2
        return rest // self.dim_b, rest % self.dim_b, atom

    def labels(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Arrays ``(n_a, n_b, atom)`` over all basis indices."""
        i = np.arange(self.dim)
        rest = i // 2
        return rest // self.dim_b, rest % self.dim_b, i % 2

    def interior(self) -> np.ndarray:
        """Boolean mask of basis states below the top photon index of each mode.

        On these states ``[a, a^dagger] = 1`` holds exactly. A mode with cutoff
        zero is treated as frozen in vacuum and does not restrict the mask.
        """
        n_a, n_b, _ = self.labels()
        return (n_a < max(self.cutoff_a, 1)) & (n_b < max(self.cutoff_b, 1))

    def complete_manifolds(self) -> np.ndarray:
        """Mask of states whose total photon number ``N`` has every split retained.

        Beam-splitter operators act exactly on these states, since all of
        ``|k, N-k>`` for ``k = 0..N`` are present.
        """
        n_a, n_b, _ = self.labels()
        return (n_a + n_b) <= min(self.cutoff_a, self.cutoff_b)


def make_space(cutoff_a: int, cutoff_b: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> HilbertSpace:
    """Validate cutoffs and build a :class:`HilbertSpace`.

    Raises
    ------
    DomainError
        If a cutoff is negative or not an integer.
    CapacityError
        If one dense complex ``dim x dim`` matrix would exceed ``memory_budget`` bytes.
    """
    for name, c in (("cutoff_a", cutoff_a), ("cutoff_b", cutoff_b)):
        if int(c) != c or c < 0:
            raise DomainError(f"{name} must be a non-negative integer, got {c!r}")
    space = HilbertSpace(int(cutoff_a), int(cutoff_b))
    nbytes = 16 * space.dim ** 2
    if nbytes > memory_budget:
        raise CapacityError(
            f"dimension {space.dim} needs {nbytes} bytes per matrix, "
            f"budget is {memory_budget}"
        )
    return space


def _destroy(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


def ladder_a(space: HilbertSpace) -> np.ndarray:
    """Annihilation operator of mode a on the full space."""
    return np.kron(_destroy(space.dim_a), np.eye(2 * space.dim_b))


def ladder_b(space: HilbertSpace) -> np.ndarray:
    """Annihilation operator of mode b on the full space."""
    return np.kron(np.eye(space.dim_a), np.kron(_destroy(space.dim_b), np.eye(2)))


def number_a(space: HilbertSpace) -> np.ndarray:
    n_a, _, _ = space.labels()
    return np.diag(n_a.astype(complex))


def number_b(space: HilbertSpace) -> np.ndarray:
    _, n_b, _ = space.labels()
    return np.diag(n_b.astype(complex))


def atomic_ops(space: HilbertSpace, convention: str = "half"):
    """Return ``(sigma_z, sigma_plus, sigma_minus)`` on the full space.

    ``sigma_z`` has eigenvalues ``+-1/2`` for ``convention='half'`` and
    ``+-1`` for ``'unit'``; the ladder operators are convention independent.
    """
    m = sz_magnitude(convention)
    fields = np.eye(space.dim_a * space.dim_b)
    sz = np.kron(fields, np.diag([-m, m]).astype(complex))
    sp = np.kron(fields, np.array([[0, 0], [1, 0]], dtype=complex))
    return sz, sp, sp.conj().T


def total_excitation(space: HilbertSpace) -> np.ndarray:
    """Diagonal operator ``n_a + n_b + sigma_+ sigma_-``."""
    n_a, n_b, atom = space.labels()
    return np.diag((n_a + n_b + atom).astype(complex))


@dataclass(frozen=True)
class StateVector:
    """Normalized state plus the probability mass lost to truncation."""

    amplitudes: np.ndarray
    norm_deficit: float = 0.0

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]


def fock_state(space: HilbertSpace, n_a: int, n_b: int, atom: AtomLike) -> StateVector:
    psi = np.zeros(space.dim, dtype=complex)
    psi[space.index(n_a, n_b, atom)] = 1.0
    return StateVector(psi, 0.0)


def poisson_amplitudes(alpha: complex, cutoff: int) -> np.ndarray:
    """``exp(-|alpha|^2/2) alpha^k / sqrt(k!)`` for ``k = 0..cutoff``."""
    k = np.arange(cutoff + 1)
    log_fact = np.array([math.lgamma(j + 1) for j in k])
    alpha = complex(alpha)
    if alpha == 0:
        out = np.zeros(cutoff + 1, dtype=complex)
        out[0] = 1.0
        return out
    mag = np.exp(-abs(alpha) ** 2 / 2 + k * math.log(abs(alpha)) - 0.5 * log_fact)
    return mag * np.exp(1j * k * np.angle(alpha))


def min_cutoff(alpha: complex, tol: float = COHERENT_DEFICIT_TOL) -> int:
    """Smallest cutoff whose Poisson tail beyond it is at most ``tol``."""
    c = int(abs(complex(alpha)) ** 2)
    while 1.0 - float(np.sum(np.abs(poisson_amplitudes(alpha, c)) ** 2)) > tol:
        c += 1
    while c > 0 and 1.0 - float(np.sum(np.abs(poisson_amplitudes(alpha, c - 1)) ** 2)) <= tol:
        c -= 1
    return c


def coherent_state(
    space: HilbertSpace,
    alpha: complex,
    beta: complex,
    atom: AtomLike,
    tol: float = COHERENT_DEFICIT_TOL,
) -> StateVector:
    """Product coherent state ``|alpha, beta, atom>`` truncated and renormalized.

    Raises
    ------
    TruncationError
        If the discarded probability mass exceeds ``tol``.
    """
    pa = poisson_amplitudes(alpha, space.cutoff_a)
    pb = poisson_amplitudes(beta, space.cutoff_b)
    field = np.kron(pa, pb)
    deficit = 1.0 - float(np.vdot(field, field).real)
    if deficit > tol:
        need = max(min_cutoff(alpha, tol), min_cutoff(beta, tol))
        raise TruncationError(
            f"coherent state (alpha={complex(alpha)}, beta={complex(beta)}) loses "
            f"{deficit:.3g} of its norm at cutoffs ({space.cutoff_a}, {space.cutoff_b}); "
            f"use cutoffs of at least {need}",
            min_cutoff=need,
        )
    atomic = np.zeros(2, dtype=complex)
    atomic[atom_index(atom)] = 1.0
    psi = np.kron(field, atomic)
    psi /= np.linalg.norm(psi)
    return StateVector(psi, max(deficit, 0.0))


def expectation(op: np.ndarray, psi: np.ndarray) -> complex:
    return np.vdot(psi, op @ psi)
