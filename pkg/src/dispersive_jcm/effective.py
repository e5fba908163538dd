"""
First-order effective Hamiltonian and its geometric (beam-splitter) diagonalization.

In the atomic branch ``s = +-1`` the effective Hamiltonian is the quadratic form

    w_a n_a + w_b n_b + j (a^dag b + a b^dag),
    w_k = omega_k + s m_z chi_k,   j = s m_z J,

where ``m_z`` is the sigma_z eigenvalue magnitude. It is diagonalized by
``R(theta) = exp[theta (a^dag b - a b^dag)]`` which maps
``R^dag a R = a cos(theta) + b sin(theta)`` and
``R^dag b R = b cos(theta) - a sin(theta)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import List, Sequence, Tuple

import numpy as np

from .errors import DomainError, ResonanceError
from .hilbert import HilbertSpace, atomic_ops, ladder_a, ladder_b, number_a, number_b, PLUS
from .model import ModelParams, build_h0, derive
from .parallel import worker_count
from .schrieffer_wolff import unitary_from_antihermitian

SWEEPABLE = ("omega_a", "omega_b", "g_a", "g_b", "Omega0")


def build_heff(params: ModelParams, space: HilbertSpace | None = None) -> np.ndarray:
    """Effective Hamiltonian with dispersive shifts and the atom-mediated beam splitter."""
    space = space or params.space
    d = derive(params)
    sz, _, _ = atomic_ops(space, params.convention)
    a = ladder_a(space)
    b = ladder_b(space)
    hop = a.conj().T @ b
    hop = hop + hop.conj().T
    return (
        build_h0(params, space)
        + d.chi_a * number_a(space) @ sz
        + d.chi_b * number_b(space) @ sz
        + d.j_coupling * hop @ sz
    )


@dataclass(frozen=True)
class BranchHamiltonian:
    s: int
    omega_a_tilde: float
    omega_b_tilde: float
    j_eff: float

    @property
    def detuning(self) -> float:
        return self.omega_a_tilde - self.omega_b_tilde

    def matrix(self) -> np.ndarray:
        """Single-excitation matrix ``[[w_a, j], [j, w_b]]``."""
        return np.array([[self.omega_a_tilde, self.j_eff], [self.j_eff, self.omega_b_tilde]])


def branch_reduce(params: ModelParams, s: int) -> BranchHamiltonian:
    if s not in (1, -1):
        raise DomainError(f"branch sign must be +1 or -1, got {s!r}")
    d = derive(params)
    m = params.m_z
    return BranchHamiltonian(
        s=s,
        omega_a_tilde=params.omega_a + s * m * d.chi_a,
        omega_b_tilde=params.omega_b + s * m * d.chi_b,
        j_eff=s * m * d.j_coupling,
    )


def rotation_angle(branch: BranchHamiltonian) -> float:
    """Beam-splitter angle solving ``tan(2 theta) (w_a - w_b) = 2 j``.

    Principal branch: ``theta`` lies in ``(-pi/4, pi/4)`` away from degeneracy,
    ``sign(j) pi/4`` when ``w_a == w_b`` and ``0`` when also ``j == 0``.
    The rotated mode ``a cos(theta) + b sin(theta)`` is then always the one
    that reduces to ``a`` as ``j -> 0``.
    """
    j = branch.j_eff
    delta = branch.detuning
    if delta == 0:
        return 0.0 if j == 0 else math.copysign(math.pi / 4, j)
    return 0.5 * math.atan(2.0 * j / delta)


def normal_modes(branch: BranchHamiltonian) -> Tuple[float, float]:
    """Normal-mode frequencies ``(Omega_A, Omega_B)`` with ``Omega_A >= Omega_B``."""
    mean = 0.5 * (branch.omega_a_tilde + branch.omega_b_tilde)
    half = 0.5 * math.hypot(branch.detuning, 2.0 * branch.j_eff)
    return mean + half, mean - half


@dataclass(frozen=True)
class BranchParams:
    """Geometry of one atomic branch.

    ``omega_A >= omega_B`` always. Use :attr:`mode_frequencies` for the
    frequencies of the rotated modes ``R^dag a R`` and ``R^dag b R``, which
    swap order when ``w_a < w_b``.
    """

    s: int
    theta: float
    omega_A: float
    omega_B: float
    detuning: float

    @property
    def splitting(self) -> float:
        return self.omega_A - self.omega_B

    @property
    def tau_eff(self) -> float:
        return math.inf if self.splitting == 0 else 1.0 / self.splitting

    @property
    def degenerate(self) -> bool:
        return self.splitting == 0

    @property
    def mode_frequencies(self) -> Tuple[float, float]:
        if self.detuning >= 0:
            return self.omega_A, self.omega_B
        return self.omega_B, self.omega_A


def branch_params(params: ModelParams, s: int) -> BranchParams:
    br = branch_reduce(params, s)
    hi, lo = normal_modes(br)
    return BranchParams(s=s, theta=rotation_angle(br), omega_A=hi, omega_B=lo, detuning=br.detuning)


def _two_mode_ops(space: HilbertSpace):
    a = ladder_a(space)
    b = ladder_b(space)
    return a, b


def rotation_operator(space: HilbertSpace, theta: float) -> np.ndarray:
    """``exp[theta (a^dag b - a b^dag)]`` on the full space (acts trivially on the atom)."""
    a, b = _two_mode_ops(space)
    k = a.conj().T @ b
    return unitary_from_antihermitian(theta * (k - k.conj().T))


def hopping_pattern(space: HilbertSpace) -> np.ndarray:
    """Boolean mask of matrix entries connecting ``|n_a, n_b, x>`` to ``|n_a -+ 1, n_b +- 1, x>``."""
    n_a, n_b, atom = space.labels()
    same_atom = atom[:, None] == atom[None, :]
    da = n_a[:, None] - n_a[None, :]
    db = n_b[:, None] - n_b[None, :]
    return same_atom & (np.abs(da) == 1) & (da == -db)


def verify_diagonal(params: ModelParams, s: int, space: HilbertSpace | None = None,
                    theta: float | None = None) -> float:
    """Residual beam-splitter amplitude after rotating branch ``s`` of the effective Hamiltonian.

    Computes ``R H R^dag`` and returns the Frobenius norm of its hopping-pattern
    entries within atomic sector ``s`` on states whose total photon manifold is
    complete (see :meth:`HilbertSpace.complete_manifolds`).
    """
    space = space or params.space
    if theta is None:
        theta = branch_params(params, s).theta
    h = build_heff(params, space)
    r = rotation_operator(space, theta)
    rotated = r @ h @ r.conj().T
    _, _, atom = space.labels()
    sector = (atom == (PLUS if s == 1 else 0)) & space.complete_manifolds()
    mask = hopping_pattern(space) & sector[:, None] & sector[None, :]
    return float(np.sqrt(np.sum(np.abs(rotated[mask]) ** 2)))


@dataclass(frozen=True)
class SweepRow:
    value: float
    resonant: bool
    plus: BranchParams | None
    minus: BranchParams | None
    asymptote_plus: bool = False
    asymptote_minus: bool = False

    @property
    def asymptote(self) -> bool:
        return self.asymptote_plus or self.asymptote_minus


def _sweep_point(params: ModelParams, parameter: str, value: float) -> SweepRow:
    p = replace(params, **{parameter: value})
    try:
        return SweepRow(value, False, branch_params(p, 1), branch_params(p, -1))
    except ResonanceError:
        return SweepRow(value, True, None, None)


def _flag_crossings(rows: List[SweepRow], attr: str) -> List[bool]:
    flags = [False] * len(rows)
    live = [i for i, r in enumerate(rows) if not r.resonant]
    for i in live:
        if getattr(rows[i], attr).detuning == 0:
            flags[i] = True
    for i, k in zip(live, live[1:]):
        if k != i + 1:
            continue
        if getattr(rows[i], attr).detuning * getattr(rows[k], attr).detuning < 0:
            flags[i] = flags[k] = True
    return flags


def theta_sweep(params: ModelParams, parameter: str, grid: Sequence[float]) -> List[SweepRow]:
    """Both branches' angle and normal modes over ``grid`` values of ``parameter``.

    Rows bracketing a sign change of ``w_a - w_b`` in a branch are flagged as
    asymptotes of that branch. Exactly resonant grid points are marked
    ``resonant`` and carry no branch data; sign changes are not tracked across them.
    """
    if parameter not in SWEEPABLE:
        raise DomainError(f"cannot sweep {parameter!r}; choose one of {SWEEPABLE}")
    grid = [float(v) for v in grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("sweep grid must be strictly increasing")
    with ThreadPoolExecutor(max_workers=worker_count(len(grid))) as pool:
        rows = list(pool.map(lambda v: _sweep_point(params, parameter, v), grid))
    fp = _flag_crossings(rows, "plus")
    fm = _flag_crossings(rows, "minus")
    return [replace(r, asymptote_plus=a, asymptote_minus=b) for r, a, b in zip(rows, fp, fm)]
