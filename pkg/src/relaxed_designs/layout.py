"""Brickwork pairing of one block (qubits numbered from 1).

Layer 1 pairs (1,2), (3,4), ...; layer 2 pairs (2,3), (4,5), ....
For odd n the last qubit idles in layer 1 and the first in layer 2, so
every block has n - 1 gate slots. For n = 2 layer 2 is empty.
"""

from __future__ import annotations

import numpy as np


def brickwork_layers(n: int) -> list:
    if n < 2:
        raise ValueError("a brickwork block needs n >= 2")
    first = [(q, q + 1) for q in range(1, n, 2)]
    second = [(q, q + 1) for q in range(2, n, 2)]
    return [first, second]


def slots_per_block(n: int) -> int:
    return sum(len(layer) for layer in brickwork_layers(n))


def lift_pair(u, q: int, n: int):
    """Embed a 4x4 gate acting on qubits (q, q+1) into the n-qubit space."""
    return np.kron(np.kron(np.eye(2 ** (q - 1)), u), np.eye(2 ** (n - q - 1)))
