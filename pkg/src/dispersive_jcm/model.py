"""
Two-mode Jaynes-Cummings model: parameters, second-order scales and
Hamiltonian builders (hbar = 1, angular frequencies).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import DomainError, ResonanceError
from .hilbert import (
    HilbertSpace,
    atomic_ops,
    ladder_a,
    ladder_b,
    number_a,
    number_b,
    sz_magnitude,
)

DISPERSIVE_THRESHOLD = 0.1


@dataclass(frozen=True)
class ModelParams:
    """Microscopic parameters of the model and its truncation.

    Parameters
    ----------
    omega_a, omega_b : float
        Mode frequencies.
    Omega0 : float
        Atomic transition frequency.
    g_a, g_b : float
        Atom-mode couplings.
    cutoff_a, cutoff_b : int
        Photon-number cutoffs.
    convention : {'half', 'unit'}
        Eigenvalues of sigma_z, ``+-1/2`` or ``+-1``.
    """

    omega_a: float
    omega_b: float
    Omega0: float
    g_a: float
    g_b: float
    cutoff_a: int = 12
    cutoff_b: int = 12
    convention: str = "half"

    def __post_init__(self):
        for name in ("omega_a", "omega_b", "Omega0"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise DomainError(f"{name} must be a positive finite number, got {v!r}")
        for name in ("g_a", "g_b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise DomainError(f"{name} must be a non-negative finite number, got {v!r}")
        for name in ("cutoff_a", "cutoff_b"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise DomainError(f"{name} must be a non-negative integer, got {v!r}")
        sz_magnitude(self.convention)

    @property
    def m_z(self) -> float:
        return sz_magnitude(self.convention)

    @property
    def space(self) -> HilbertSpace:
        return HilbertSpace(int(self.cutoff_a), int(self.cutoff_b))

    def scaled_couplings(self, scale: float) -> "ModelParams":
        return replace(self, g_a=self.g_a * scale, g_b=self.g_b * scale)

    def swapped(self) -> "ModelParams":
        """Same physics with the roles of modes a and b exchanged."""
        return replace(
            self,
            omega_a=self.omega_b,
            omega_b=self.omega_a,
            g_a=self.g_b,
            g_b=self.g_a,
            cutoff_a=self.cutoff_b,
            cutoff_b=self.cutoff_a,
        )


@dataclass(frozen=True)
class DerivedQuantities:
    delta_a: float
    delta_b: float
    inv_delta_ab: float
    eps_a: float
    eps_b: float
    chi_a: float
    chi_b: float
    j_coupling: float

    @property
    def eps_max(self) -> float:
        return max(abs(self.eps_a), abs(self.eps_b))


def _ratio(num: float, den: float) -> float:
    return 0.0 if num == 0 else num / den


def derive(params: ModelParams) -> DerivedQuantities:
    """Detunings, small parameters and second-order energy scales.

    Raises
    ------
    ResonanceError
        If a mode with nonzero coupling has zero detuning.
    """
    da = params.Omega0 - params.omega_a
    db = params.Omega0 - params.omega_b
    for mode, d, g in (("a", da, params.g_a), ("b", db, params.g_b)):
        if d == 0 and g != 0:
            raise ResonanceError(
                f"mode {mode} is resonant with the atom (Omega0 == omega_{mode}) "
                f"while g_{mode} = {g}; the dispersive expansion is undefined"
            )
    # 1/Delta_k only enters multiplied by g_k, so an uncoupled resonant mode contributes 0.
    inv_a = 0.0 if params.g_a == 0 else 1.0 / da
    inv_b = 0.0 if params.g_b == 0 else 1.0 / db
    inv_ab = inv_a + inv_b
    j = 0.0 if params.g_a * params.g_b == 0 else 2.0 * params.g_a * params.g_b * inv_ab
    return DerivedQuantities(
        delta_a=da,
        delta_b=db,
        inv_delta_ab=inv_ab,
        eps_a=_ratio(params.g_a, da),
        eps_b=_ratio(params.g_b, db),
        chi_a=_ratio(2.0 * params.g_a ** 2, da),
        chi_b=_ratio(2.0 * params.g_b ** 2, db),
        j_coupling=j,
    )


@dataclass(frozen=True)
class DispersiveReport:
    ratio_a: float
    ratio_b: float
    threshold: float = DISPERSIVE_THRESHOLD

    @property
    def pass_a(self) -> bool:
        return self.ratio_a <= self.threshold

    @property
    def pass_b(self) -> bool:
        return self.ratio_b <= self.threshold

    @property
    def ok(self) -> bool:
        return self.pass_a and self.pass_b

    def as_dict(self) -> dict:
        return {
            "ratio_a": self.ratio_a,
            "ratio_b": self.ratio_b,
            "threshold": self.threshold,
            "status_a": "pass" if self.pass_a else "warn",
            "status_b": "pass" if self.pass_b else "warn",
        }


def dispersive_check(params: ModelParams, mean_na: float = 0.0, mean_nb: float = 0.0,
                     threshold: float = DISPERSIVE_THRESHOLD) -> DispersiveReport:
    """Ratios ``g_k sqrt(<n_k> + 1) / |Delta_k|``; a ratio above ``threshold`` is a warning.

    A resonant coupled mode reports an infinite ratio instead of raising.
    """
    if mean_na < 0 or mean_nb < 0:
        raise DomainError("mean photon numbers must be non-negative")

    def ratio(g, n, omega):
        if g == 0:
            return 0.0
        d = abs(params.Omega0 - omega)
        return math.inf if d == 0 else g * math.sqrt(n + 1.0) / d

    return DispersiveReport(
        ratio(params.g_a, mean_na, params.omega_a),
        ratio(params.g_b, mean_nb, params.omega_b),
        threshold,
    )


def build_h0(params: ModelParams, space: HilbertSpace | None = None) -> np.ndarray:
    """``omega_a n_a + omega_b n_b + Omega0 sigma_z`` (diagonal)."""
    space = space or params.space
    sz, _, _ = atomic_ops(space, params.convention)
    return params.omega_a * number_a(space) + params.omega_b * number_b(space) + params.Omega0 * sz


def build_v_int(params: ModelParams, space: HilbertSpace | None = None) -> np.ndarray:
    """Exchange interaction ``g_a(a^dag s_- + a s_+) + g_b(b^dag s_- + b s_+)``."""
    space = space or params.space
    _, sp, sm = atomic_ops(space, params.convention)
    a = ladder_a(space)
    b = ladder_b(space)
    v = params.g_a * (a.conj().T @ sm) + params.g_b * (b.conj().T @ sm)
    return v + v.conj().T


def build_full(params: ModelParams, space: HilbertSpace | None = None) -> np.ndarray:
    """Full two-mode JCM Hamiltonian. Accepts resonant parameters."""
    space = space or params.space
    return build_h0(params, space) + build_v_int(params, space)


def rabi_splitting(n: int, delta: float, g: float) -> float:
    """Dressed-state splitting ``sqrt(delta^2 + 4 g^2 (n+1))`` in manifold ``n``."""
    if n < 0:
        raise DomainError("manifold index must be non-negative")
    return math.sqrt(delta ** 2 + 4.0 * g ** 2 * (n + 1))
