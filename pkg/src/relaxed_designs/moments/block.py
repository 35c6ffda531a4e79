"""Matrix-free moment operator of one brickwork block.

Vectors live on 2tn qubit legs. Leg ``c * n + (q - 1)`` is copy ``c`` of
qubit ``q``; copies ``0..t-1`` are forward and ``t..2t-1`` conjugate. A
gate on pair (q, q+1) touches legs ``[c*n + q - 1, c*n + q for c in 0..2t-1]``,
which is the gate moment's own leg order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ..errors import DimensionMismatch, TooLarge
from ..layout import brickwork_layers
from .gate import GateMoment

DENSE_CAP = 2**12


@dataclass(frozen=True)
class BlockMomentOperator:
    n: int
    t: int
    gate_moment: GateMoment
    layout: list = field(default=None)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if self.gate_moment.t != self.t:
            raise ValueError("gate moment order does not match t")
        if self.layout is None:
            object.__setattr__(self, "layout", brickwork_layers(self.n))
        legs = 4 * self.t
        g = self.gate_moment.matrix
        object.__setattr__(self, "_fwd", g.reshape((2,) * (2 * legs)))
        object.__setattr__(self, "_adj", g.conj().T.reshape((2,) * (2 * legs)))

    @property
    def dim(self) -> int:
        return 2 ** (2 * self.t * self.n)

    @property
    def shape(self):
        return (self.dim, self.dim)

    def pair_axes(self, q: int) -> list:
        n = self.n
        return [c * n + q - 1 + s for c in range(2 * self.t) for s in (0, 1)]

    def _apply(self, tensor, gate, axes):
        nlegs = len(axes)
        out = np.tensordot(gate, tensor, axes=(list(range(nlegs, 2 * nlegs)), axes))
        return np.moveaxis(out, list(range(nlegs)), axes)

    def _run(self, v, gate, layers):
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.dim:
            raise DimensionMismatch(f"expected leading dimension {self.dim}, got {v.shape[0]}")
        batch = v.shape[1:]
        tensor = v.reshape((2,) * (2 * self.t * self.n) + batch)
        for layer in layers:
            for q, _ in layer:
                tensor = self._apply(tensor, gate, self.pair_axes(q))
        return tensor.reshape((self.dim,) + batch)

    def matvec(self, v):
        """Apply layer 2 after layer 1. ``v`` may carry trailing batch axes."""
        return self._run(v, self._fwd, self.layout)

    def rmatvec(self, v):
        """Apply the adjoint: conjugate-transposed gates, layers reversed."""
        return self._run(v, self._adj, self.layout[::-1])

    def layer_dense(self, layer) -> np.ndarray:
        """One layer as a dense matrix, built from Kronecker products and a leg permutation."""
        nlegs = 2 * self.t * self.n
        order = []
        for q, _ in layer:
            order.extend(self.pair_axes(q))
        idle = [ax for ax in range(nlegs) if ax not in order]
        factors = [self.gate_moment.matrix] * len(layer) + [np.eye(2 ** len(idle))]
        kron = reduce(np.kron, factors)
        perm = np.arange(self.dim).reshape((2,) * nlegs).transpose(order + idle).ravel()
        dense = np.empty_like(kron)
        dense[np.ix_(perm, perm)] = kron
        return dense

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.dim > cap:
            raise TooLarge(f"dimension {self.dim} exceeds dense cap {cap}")
        out = None
        for layer in self.layout:
            if not layer:
                continue
            dense = self.layer_dense(layer)
            out = dense if out is None else dense @ out
        return np.eye(self.dim, dtype=complex) if out is None else out
