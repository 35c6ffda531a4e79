from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, NotConverged

CONSECUTIVE = 3
ZERO_FLOOR = 1e-13


@dataclass
class SpectralEstimate:
    eta_hat: float
    iterations: int
    converged: bool
    residual: float


def _rng(rng):
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def spectral_norm_diff(block_op, haar_proj, tol: float = 1e-6, max_iters: int = 2000,
                       rng=0, strict: bool = False) -> SpectralEstimate:
    """Largest singular value of ``block_op - haar_proj`` by power iteration on A^dagger A.

    Both operands only need ``matvec``/``rmatvec`` and ``dim``. Converged
    means the relative change of the estimate stayed below ``tol`` for three
    consecutive iterations. A non-converged run still returns its best
    estimate unless ``strict`` is set, in which case NotConverged is raised.
    """
    if block_op.dim != haar_proj.dim:
        raise DimensionMismatch("operators act on different spaces")
    gen = _rng(rng)
    dim = block_op.dim
    x = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    x /= np.linalg.norm(x)

    def apply(v):
        return block_op.matvec(v) - haar_proj.matvec(v)

    def apply_adj(v):
        return block_op.rmatvec(v) - haar_proj.rmatvec(v)

    sigma_prev = None
    streak = 0
    sigma = 0.0
    residual = np.inf
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        w = apply(x)
        sigma = float(np.linalg.norm(w))
        if sigma <= ZERO_FLOOR:
            residual = sigma
            converged = True
            break
        y = apply_adj(w)
        residual = float(np.linalg.norm(y - sigma**2 * x)) / sigma**2
        if sigma_prev is not None and abs(sigma - sigma_prev) <= tol * sigma:
            streak += 1
            if streak >= CONSECUTIVE:
                converged = True
                break
        else:
            streak = 0
        sigma_prev = sigma
        x = y / np.linalg.norm(y)

    if strict and not converged:
        raise NotConverged(sigma, residual, it)
    return SpectralEstimate(sigma, it, converged, residual)
