"""Sampled brickwork circuits of relaxed words, their simulation, and a
Monte-Carlo frame-potential estimator."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TooManyQubits
from .layout import brickwork_layers
from .seeds import GateWord, Seed, sample_relaxed_word, word_products

MAX_DENSE_QUBITS = 12


@dataclass(frozen=True)
class CircuitDescription:
    """``layers`` is a tuple of layers; each layer a tuple of ``((q, q+1), GateWord)``.

    Layers run in time order, two per block.
    """

    n: int
    k: int
    L: int
    layers: tuple
    rng_seed: object = None

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(tuple(layer) for layer in self.layers))
        for layer in self.layers:
            touched = [q for pair, _ in layer for q in pair]
            if len(touched) != len(set(touched)):
                raise ValueError(f"gates in one layer share a qubit: {layer}")

    @property
    def slots(self) -> list:
        return [(pair, word) for layer in self.layers for pair, word in layer]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "L": self.L,
            "rng_seed": self.rng_seed,
            "layers": [[[list(pair), list(word.indices)] for pair, word in layer]
                       for layer in self.layers],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, doc: dict, seed: Seed) -> "CircuitDescription":
        layers = [
            [(tuple(pair), GateWord.from_indices(seed, idx)) for pair, idx in layer]
            for layer in doc["layers"]
        ]
        return cls(doc["n"], doc["k"], doc["L"], layers, doc.get("rng_seed"))


def _generator(rng):
    if isinstance(rng, np.random.Generator):
        return rng, None
    return np.random.default_rng(rng), rng


def _block_layers(seed, k, n, gen):
    return [[(pair, sample_relaxed_word(seed, k, gen)) for pair in layer]
            for layer in brickwork_layers(n)]


def sample_block(seed: Seed, k: int, n: int, rng) -> CircuitDescription:
    """One block with an independent relaxed word in each of its n - 1 slots."""
    gen, recorded = _generator(rng)
    return CircuitDescription(n, k, 1, _block_layers(seed, k, n, gen), recorded)


def sample_design_circuit(seed: Seed, k: int, n: int, L: int, rng) -> CircuitDescription:
    """L independent blocks concatenated in time order."""
    if L < 1:
        raise ValueError("L must be >= 1")
    gen, recorded = _generator(rng)
    layers = []
    for _ in range(L):
        layers.extend(_block_layers(seed, k, n, gen))
    return CircuitDescription(n, k, L, layers, recorded)


def _apply_pair(psi, gate, q, n):
    """Left-multiply a batch of n-qubit columns ``psi`` of shape (B, 2^n, m)."""
    b, _, m = psi.shape
    view = psi.reshape(b, 2 ** (q - 1), 4, 2 ** (n - q - 1), m)
    out = np.einsum("bxy,bayzm->baxzm", gate, view)
    return out.reshape(b, 2**n, m)


def _evolve(seed, circuits, psi):
    """Apply each circuit in ``circuits`` to its own slice of ``psi``."""
    n = circuits[0].n
    layout = [[pair for pair, _ in layer] for layer in circuits[0].layers]
    for li, layer_pairs in enumerate(layout):
        for si, (q, _) in enumerate(layer_pairs):
            idx = np.array([c.layers[li][si][1].indices for c in circuits])
            psi = _apply_pair(psi, word_products(seed, idx), q, n)
    return psi


def compose_many(seed: Seed, circuits) -> np.ndarray:
    """Unitaries of circuits sharing one layout, stacked as (B, 2^n, 2^n)."""
    circuits = list(circuits)
    n = circuits[0].n
    if n > MAX_DENSE_QUBITS:
        raise TooManyQubits(f"n={n} exceeds the dense cap {MAX_DENSE_QUBITS}")
    eye = np.broadcast_to(np.eye(2**n, dtype=complex), (len(circuits), 2**n, 2**n))
    return _evolve(seed, circuits, eye.copy())


def compose_unitary(circ: CircuitDescription, seed: Seed) -> np.ndarray:
    """The n-qubit unitary of the circuit; the first layer acts first."""
    return compose_many(seed, [circ])[0]


def apply_circuit_state(circ: CircuitDescription, state, seed: Seed) -> np.ndarray:
    state = np.asarray(state, dtype=complex)
    if state.shape != (2**circ.n,):
        raise DimensionMismatch(f"state must have shape ({2**circ.n},), got {state.shape}")
    return _evolve(seed, [circ], state.reshape(1, -1, 1))[0, :, 0]


def frame_potential_mc(seed: Seed, k: int, n: int, L: int, t: int, N: int, rng,
                       chunk: int = 2048):
    """Estimate E|tr(W^dagger W')|^(2t) over N independent circuit pairs.

    Returns ``(mean, standard_error)``. The Haar value is t! when 2^n >= t.
    """
    if N < 2:
        raise ValueError("need at least two pairs")
    gen, _ = _generator(rng)
    values = []
    for start in range(0, N, chunk):
        m = min(chunk, N - start)
        left = compose_many(seed, [sample_design_circuit(seed, k, n, L, gen) for _ in range(m)])
        right = compose_many(seed, [sample_design_circuit(seed, k, n, L, gen) for _ in range(m)])
        traces = np.einsum("bij,bij->b", left.conj(), right)
        values.append(np.abs(traces) ** (2 * t))
    values = np.concatenate(values)
    return float(values.mean()), float(values.std(ddof=1) / np.sqrt(N))
