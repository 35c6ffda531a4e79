"""Two-qubit moment matrices E[U^{(t)} (x) conj(U)^{(t)}].

Leg convention: t forward copies, then t conjugate copies; each copy carries
the gate's two qubits in circuit order. This is exactly the Kronecker order
``kron(U, ..., U, U*, ..., U*)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce

import numpy as np

from ..errors import TooLarge, TooLargeT
from ..seeds import Seed, invertibility_ratio

MAX_T = 4
# Dense moments above this many bytes are refused (t = 4 needs 64 GiB).
MAX_DENSE_BYTES = 2 * 1024**3


@dataclass(frozen=True)
class GateMoment:
    t: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def tensor_power_tt(u: np.ndarray, t: int) -> np.ndarray:
    """U^{(x)t} (x) conj(U)^{(x)t} in the fixed leg order."""
    return reduce(np.kron, [u] * t + [u.conj()] * t)


def _check_t(t: int, gate_dim: int = 4):
    if t < 1:
        raise ValueError("t must be >= 1")
    if t > MAX_T:
        raise TooLargeT(f"t={t} exceeds the supported maximum {MAX_T}")
    side = gate_dim ** (2 * t)
    if side * side * 16 > MAX_DENSE_BYTES:
        raise TooLarge(f"a {side}x{side} dense moment exceeds the memory budget")


def gate_moment(ensemble, t: int) -> GateMoment:
    """Weighted average of U^{t,t} over ``[(probability, 4x4 matrix or Gate), ...]``."""
    _check_t(t)
    probs = np.array([p for p, _ in ensemble], dtype=float)
    if abs(probs.sum() - 1.0) > 1e-12:
        raise ValueError(f"probabilities sum to {probs.sum()}, not 1")
    side = 16**t
    out = np.zeros((side, side), dtype=complex)
    for p, g in ensemble:
        u = getattr(g, "matrix", g)
        out += p * tensor_power_tt(np.asarray(u, dtype=complex), t)
    return GateMoment(t, out)


def uniform_moment(gates, t: int) -> GateMoment:
    gates = list(gates)
    return gate_moment([(1.0 / len(gates), g) for g in gates], t)


def relaxed_gate_moment(seed: Seed, k: int, t: int) -> GateMoment:
    """Moment of the uniform ensemble over relaxed words of length k.

    All |U_B|^k words average to M_B^k and the all-u_m words to M_M^k, so
    the relaxed words average to (M_B^k - a^k M_M^k) / (1 - a^k).
    """
    m_b = uniform_moment(seed.gates, t).matrix
    m_m = uniform_moment(seed.u_m, t).matrix
    ak = invertibility_ratio(seed) ** k
    out = (np.linalg.matrix_power(m_b, k) - ak * np.linalg.matrix_power(m_m, k)) / (1.0 - ak)
    return GateMoment(t, out)
