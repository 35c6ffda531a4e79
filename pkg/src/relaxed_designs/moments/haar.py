"""Haar moment operator as the orthogonal projector onto permutation operators.

The t,t moment of the Haar measure projects onto the commutant of
U^{(x)t}, which is spanned by the vectorised permutation operators
P_pi (pi in S_t). With Gram matrix G[pi, sigma] = d^{#cycles(pi sigma^-1)},
the projection of v is sum_pi x_pi vec(P_pi) with x = G^+ c and
c_pi = <vec(P_pi), v>.
"""

from __future__ import annotations

import itertools
import string
from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionMismatch, TooLarge
from .block import DENSE_CAP


def count_cycles(perm) -> int:
    seen = [False] * len(perm)
    cycles = 0
    for start in range(len(perm)):
        if not seen[start]:
            cycles += 1
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
    return cycles


def compose(p, q):
    """(p o q)(i) = p[q[i]]."""
    return tuple(p[i] for i in q)


def inverse(p):
    out = [0] * len(p)
    for i, pi in enumerate(p):
        out[pi] = i
    return tuple(out)


def gram_matrix(t: int, d: int) -> np.ndarray:
    perms = list(itertools.permutations(range(t)))
    return np.array(
        [[float(d) ** count_cycles(compose(p, inverse(s))) for s in perms] for p in perms]
    )


@dataclass(frozen=True)
class HaarProjector:
    n: int
    t: int
    perms: tuple = field(init=False)
    gram: np.ndarray = field(init=False, repr=False)
    gram_pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        perms = tuple(itertools.permutations(range(self.t)))
        gram = gram_matrix(self.t, self.d)
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "gram", gram)
        object.__setattr__(self, "gram_pinv", np.linalg.pinv(gram, hermitian=True))
        object.__setattr__(self, "_vecs", {})

    @property
    def d(self) -> int:
        return 2**self.n

    @property
    def dim(self) -> int:
        return self.d ** (2 * self.t)

    @property
    def shape(self):
        return (self.dim, self.dim)

    def _letters(self, perm):
        j = string.ascii_lowercase[: self.t]
        fwd = "".join(j[perm[a]] for a in range(self.t))
        return fwd, j

    def overlaps(self, v) -> np.ndarray:
        """c_pi = <vec(P_pi), v> for every pi, by diagonal index walks."""
        v = np.asarray(v, dtype=complex)
        if v.shape[0] != self.dim:
            raise DimensionMismatch(f"expected leading dimension {self.dim}, got {v.shape[0]}")
        batch = v.shape[1:]
        tensor = v.reshape((self.d,) * (2 * self.t) + batch)
        out = []
        for perm in self.perms:
            fwd, conj = self._letters(perm)
            out.append(np.einsum(f"{fwd}{conj}...->...", tensor))
        return np.array(out)

    def perm_vector(self, perm) -> np.ndarray:
        """vec(P_pi) with P_pi[i, j] = prod_a delta(i_a, j_pi(a))."""
        perm = tuple(perm)
        if perm not in self._vecs:
            i_letters = string.ascii_uppercase[: self.t]
            j_letters = string.ascii_lowercase[: self.t]
            specs = [i_letters[a] + j_letters[perm[a]] for a in range(self.t)]
            eye = np.eye(self.d)
            vec = np.einsum(",".join(specs) + "->" + i_letters + j_letters, *([eye] * self.t))
            self._vecs[perm] = vec.reshape(-1)
        return self._vecs[perm]

    def matvec(self, v):
        c = self.overlaps(v)
        x = np.tensordot(self.gram_pinv, c, axes=(1, 0))
        basis = np.stack([self.perm_vector(p) for p in self.perms], axis=1)
        return np.tensordot(basis, x, axes=(1, 0))

    rmatvec = matvec

    def to_dense(self, cap: int = DENSE_CAP) -> np.ndarray:
        if self.dim > cap:
            raise TooLarge(f"dimension {self.dim} exceeds dense cap {cap}")
        basis = np.stack([self.perm_vector(p) for p in self.perms], axis=1).astype(complex)
        return basis @ self.gram_pinv @ basis.conj().T
