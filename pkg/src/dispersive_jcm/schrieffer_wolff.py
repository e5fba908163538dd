"""
Small-rotation (Schrieffer-Wolff) elimination of the atom-field exchange terms.

The generator is ``G = sign * [eps_a (a s_+ - a^dag s_-) + eps_b (b s_+ - b^dag s_-)]``
with ``eps_k = g_k / Delta_k``, and the transformed Hamiltonian is
``exp(-G) H exp(G)``. Its first-order truncation ``H + [H, G]`` cancels the
exchange block only for ``sign = -1``; :func:`calibrate_sign` finds this
numerically instead of assuming it.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, List

import numpy as np

from .errors import DomainError, NumericError
from .hilbert import HilbertSpace, atomic_ops, ladder_a, ladder_b
from .model import ModelParams, build_full, derive
from .parallel import worker_count

RESIDUAL_SCALES = (1.0, 0.5, 0.25, 0.125)


@dataclass(frozen=True)
class Generator:
    eps_a: float
    eps_b: float
    matrix: np.ndarray
    sign: int


def build_generator(params: ModelParams, space: HilbertSpace | None = None, sign: int | None = None) -> Generator:
    """Anti-Hermitian generator of the small rotation.

    ``sign=None`` picks the cancelling sign via :func:`calibrate_sign`.
    """
    space = space or params.space
    if sign is None:
        sign = calibrate_sign(params, space)
    if sign not in (1, -1):
        raise DomainError(f"sign must be +1 or -1, got {sign!r}")
    d = derive(params)
    _, sp, sm = atomic_ops(space, params.convention)
    a = ladder_a(space)
    b = ladder_b(space)
    g = d.eps_a * (a @ sp - a.conj().T @ sm) + d.eps_b * (b @ sp - b.conj().T @ sm)
    return Generator(d.eps_a, d.eps_b, sign * g, sign)


def _matrix(g) -> np.ndarray:
    return g.matrix if isinstance(g, Generator) else np.asarray(g)


def first_order_transform(h: np.ndarray, generator) -> np.ndarray:
    """``H + [H, G]``."""
    g = _matrix(generator)
    if h.shape != g.shape:
        raise DomainError(f"dimension mismatch: {h.shape} vs {g.shape}")
    return h + h @ g - g @ h


def unitary_from_antihermitian(g: np.ndarray) -> np.ndarray:
    """``exp(g)`` for anti-Hermitian ``g`` via the eigendecomposition of ``i g``."""
    try:
        w, v = np.linalg.eigh(1j * g)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"eigendecomposition failed: {exc}") from exc
    return (v * np.exp(-1j * w)) @ v.conj().T


def exact_transform(h: np.ndarray, generator) -> np.ndarray:
    """``exp(-G) H exp(G)`` to all orders in ``G``."""
    g = _matrix(generator)
    if h.shape != g.shape:
        raise DomainError(f"dimension mismatch: {h.shape} vs {g.shape}")
    u = unitary_from_antihermitian(g)
    return u.conj().T @ h @ u


def exchange_residual(h: np.ndarray, space: HilbertSpace) -> float:
    """Frobenius norm of the atom-flipping block of ``h`` on the safe interior."""
    _, _, atom = space.labels()
    inner = space.interior()
    plus = np.flatnonzero(inner & (atom == 1))
    minus = np.flatnonzero(inner & (atom == 0))
    up = h[np.ix_(plus, minus)]
    down = h[np.ix_(minus, plus)]
    return float(np.sqrt(np.sum(np.abs(up) ** 2) + np.sum(np.abs(down) ** 2)))


def calibrate_sign(params: ModelParams, space: HilbertSpace | None = None) -> int:
    """Generator sign that minimizes the first-order exchange residual (ties -> +1)."""
    space = space or params.space
    h = build_full(params, space)
    res = {}
    for s in (1, -1):
        g = build_generator(params, space, sign=s)
        res[s] = exchange_residual(first_order_transform(h, g), space)
    return -1 if res[-1] < res[1] else 1


@dataclass(frozen=True)
class ResidualPoint:
    scale: float
    eps_max: float
    reference: float
    first_order: float
    exact: float

    @property
    def relative_first_order(self) -> float:
        return 0.0 if self.reference == 0 else self.first_order / self.reference

    @property
    def relative_exact(self) -> float:
        return 0.0 if self.reference == 0 else self.exact / self.reference


def residual_point(params: ModelParams, scale: float, space: HilbertSpace | None = None) -> ResidualPoint:
    space = space or params.space
    p = params.scaled_couplings(scale)
    h = build_full(p, space)
    g = build_generator(p, space)
    return ResidualPoint(
        scale=scale,
        eps_max=derive(p).eps_max,
        reference=exchange_residual(h, space),
        first_order=exchange_residual(first_order_transform(h, g), space),
        exact=exchange_residual(exact_transform(h, g), space),
    )


def residual_scaling(params: ModelParams, scales: Iterable[float] = RESIDUAL_SCALES,
                     space: HilbertSpace | None = None) -> List[ResidualPoint]:
    """Exchange residuals over coupling scales, in input order."""
    space = space or params.space
    scales = list(scales)
    with ThreadPoolExecutor(max_workers=worker_count(len(scales))) as pool:
        return list(pool.map(lambda s: residual_point(params, s, space), scales))


def loglog_slope(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``; ``nan`` if undefined."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0)
    if keep.sum() < 2 or np.ptp(np.log(x[keep])) == 0:
        return float("nan")
    return float(np.polyfit(np.log(x[keep]), np.log(y[keep]), 1)[0])
