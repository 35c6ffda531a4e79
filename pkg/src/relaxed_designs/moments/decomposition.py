"""Brute-force check that the full-alphabet block moment splits into the
relaxed block moment and its complement with weights (1 - a^k)^(n-1)."""

from __future__ import annotations

import itertools

import numpy as np

from ..errors import TooLarge
from ..layout import brickwork_layers, lift_pair
from ..seeds import Seed, invertibility_ratio, validate_seed, word_products
from .block import DENSE_CAP
from .gate import tensor_power_tt

DECOMPOSITION_CAP = 10**5


def block_unitary(slot_gates, n: int) -> np.ndarray:
    """Layer 2 times layer 1 for gates listed in slot order."""
    it = iter(slot_gates)
    out = np.eye(2**n, dtype=complex)
    for layer in brickwork_layers(n):
        for q, _ in layer:
            out = lift_pair(next(it), q, n) @ out
    return out


def moment_decomposition_check(seed: Seed, k: int, n: int, t: int,
                               cap: int = DECOMPOSITION_CAP) -> float:
    """Operator-norm residual of the block-moment decomposition.

    Enumerates every assignment of length-k words to the n-1 slots. The
    relaxed block uses assignments where every slot word has a relaxed
    letter; the complement block uses all remaining assignments.
    """
    validate_seed(seed)
    side = (2**n) ** (2 * t)
    if side > DENSE_CAP:
        raise TooLarge(f"moment dimension {side} exceeds dense cap {DENSE_CAP}")
    slots = n - 1
    n_words = seed.size**k
    if n_words**slots > cap:
        raise TooLarge(f"{n_words}^{slots} assignments exceed cap {cap}")

    words = np.array(list(itertools.product(range(seed.size), repeat=k)))
    products = word_products(seed, words)
    relaxed = words.max(axis=1) >= seed.n_invertible

    full = np.zeros((side, side), dtype=complex)
    m1 = np.zeros_like(full)
    m2 = np.zeros_like(full)
    n1 = n2 = 0
    for assignment in itertools.product(range(n_words), repeat=slots):
        mom = tensor_power_tt(block_unitary([products[i] for i in assignment], n), t)
        full += mom
        if all(relaxed[i] for i in assignment):
            m1 += mom
            n1 += 1
        else:
            m2 += mom
            n2 += 1
    full /= n1 + n2
    m1 /= n1
    weight = (1 - invertibility_ratio(seed) ** k) ** slots
    rhs = weight * m1
    if n2:
        rhs = rhs + (1 - weight) * (m2 / n2)
    return float(np.linalg.norm(full - rhs, 2))
