"""Reference constructions built without the package's moment machinery.

Everything here works from explicit unitaries and index loops, so tests can
compare the fast tensor-network paths against a slow but transparent route.
"""

import itertools
from functools import reduce

import numpy as np


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def moment_of(u, t):
    return reduce(np.kron, [u] * t + [u.conj()] * t)


def brute_relaxed_moment(matrices, n_invertible, k, t):
    """Average moment over every length-k word containing a relaxed letter."""
    acc, count = 0, 0
    for word in itertools.product(range(len(matrices)), repeat=k):
        if max(word) < n_invertible:
            continue
        u = reduce(np.matmul, [matrices[i] for i in word])
        acc = acc + moment_of(u, t)
        count += 1
    return acc / count, count


def embed(u, q, n):
    """Two-qubit gate on qubits (q, q+1), 1-based, qubit 1 most significant."""
    return np.kron(np.kron(np.eye(2 ** (q - 1)), u), np.eye(2 ** (n - q - 1)))


def brickwork_unitary(gates, n):
    """Odd pairs first, then even pairs; ``gates`` lists slots in that order."""
    pairs = list(range(1, n, 2)) + list(range(2, n, 2))
    out = np.eye(2**n, dtype=complex)
    for q, g in zip(pairs, gates):
        out = embed(g, q, n) @ out
    return out


def mixture_block_moment(unitaries, probs, n, t):
    """Exact block moment when every slot draws gate i with probability probs[i]."""
    side = (2**n) ** (2 * t)
    out = np.zeros((side, side), dtype=complex)
    for choice in itertools.product(range(len(unitaries)), repeat=n - 1):
        weight = np.prod([probs[i] for i in choice])
        out += weight * moment_of(brickwork_unitary([unitaries[i] for i in choice], n), t)
    return out


def permutation_operator(perm, d):
    """P[i, j] = 1 exactly when j_{pi(a)} = i_a for every a, built entry by entry."""
    t = len(perm)
    op = np.zeros((d**t, d**t))
    for idx in itertools.product(range(d), repeat=t):
        j = [0] * t
        for a in range(t):
            j[perm[a]] = idx[a]
        op[np.ravel_multi_index(idx, (d,) * t), np.ravel_multi_index(j, (d,) * t)] = 1.0
    return op
