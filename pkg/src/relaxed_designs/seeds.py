"""Two-qubit gate sets split into an inverse-closed part and a relaxed part.

A seed holds ``u_m`` (closed under inverses) and ``u_bm`` (no constraints).
The full alphabet ``U_B`` is ``u_m + u_bm`` and gate words index into it:
indices below ``len(u_m)`` are invertible-part letters, the rest relaxed.

A word ``(i_1, ..., i_k)`` resolves to the matrix product
``U_{i_1} @ U_{i_2} @ ... @ U_{i_k}``.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.linalg import expm

from .errors import EmptyPartition, NoInverse, NotUnitary, TooLarge

UNITARITY_TOL = 1e-12
INVERSE_TOL = 1e-10
PRODUCT_TOL = 1e-10
DEFAULT_ENUM_CAP = 10**6

RANDOMIZED_SEED_RNG = 20190417


class Origin(enum.Enum):
    INVERTIBLE = "InvertiblePart"
    RELAXED = "RelaxedPart"


@dataclass(frozen=True)
class Gate:
    matrix: np.ndarray
    label: str
    origin: Origin

    def __post_init__(self):
        m = np.array(self.matrix, dtype=complex)
        if m.shape != (4, 4):
            raise ValueError(f"gate {self.label!r} must be 4x4, got {m.shape}")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def unitarity_residual(self) -> float:
        m = self.matrix
        return float(np.linalg.norm(m.conj().T @ m - np.eye(4)))


@dataclass(frozen=True)
class Seed:
    u_m: tuple
    u_bm: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "u_m", tuple(self.u_m))
        object.__setattr__(self, "u_bm", tuple(self.u_bm))
        labels = self.labels
        if len(set(labels)) != len(labels):
            raise ValueError(f"gate labels must be unique, got {labels}")

    @property
    def gates(self) -> tuple:
        return self.u_m + self.u_bm

    @property
    def labels(self) -> list:
        return [g.label for g in self.gates]

    @property
    def size(self) -> int:
        return len(self.u_m) + len(self.u_bm)

    @property
    def n_invertible(self) -> int:
        return len(self.u_m)

    def matrices(self) -> np.ndarray:
        """All gates of ``U_B`` stacked as a ``(|U_B|, 4, 4)`` array."""
        return np.stack([g.matrix for g in self.gates])

    def origin_of(self, index: int) -> Origin:
        return Origin.INVERTIBLE if index < len(self.u_m) else Origin.RELAXED

    def to_json(self) -> dict:
        return {
            "u_m": [_matrix_to_pairs(g.matrix) for g in self.u_m],
            "u_bm": [_matrix_to_pairs(g.matrix) for g in self.u_bm],
            "labels": self.labels,
            "metadata": self.metadata,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Seed":
        labels = list(doc["labels"])
        n_m = len(doc["u_m"])
        if len(labels) != n_m + len(doc["u_bm"]):
            raise ValueError("labels must list u_m labels followed by u_bm labels")
        u_m = [Gate(_pairs_to_matrix(m), lab, Origin.INVERTIBLE)
               for m, lab in zip(doc["u_m"], labels[:n_m])]
        u_bm = [Gate(_pairs_to_matrix(m), lab, Origin.RELAXED)
                for m, lab in zip(doc["u_bm"], labels[n_m:])]
        return cls(u_m, u_bm, dict(doc.get("metadata", {})))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=2))

    @classmethod
    def load(cls, path) -> "Seed":
        return cls.from_json(json.loads(Path(path).read_text()))


def _matrix_to_pairs(m: np.ndarray) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(m).ravel()]


def _pairs_to_matrix(pairs) -> np.ndarray:
    arr = np.asarray(pairs, dtype=float)
    if arr.shape[-1] != 2 or arr.size != 32:
        raise ValueError("a gate must be 16 [re, im] pairs in row-major order")
    arr = arr.reshape(16, 2)
    return (arr[:, 0] + 1j * arr[:, 1]).reshape(4, 4)


@dataclass(frozen=True)
class GateWord:
    indices: tuple
    origins: tuple

    def __post_init__(self):
        object.__setattr__(self, "indices", tuple(int(i) for i in self.indices))
        object.__setattr__(self, "origins", tuple(self.origins))
        if len(self.indices) == 0 or len(self.indices) != len(self.origins):
            raise ValueError("a gate word needs one origin per index and k >= 1")
        if Origin.RELAXED not in self.origins:
            raise ValueError(f"word {self.indices} has no relaxed letter")

    @property
    def k(self) -> int:
        return len(self.indices)

    @classmethod
    def from_indices(cls, seed: Seed, indices) -> "GateWord":
        indices = tuple(int(i) for i in indices)
        return cls(indices, tuple(seed.origin_of(i) for i in indices))

    def product(self, seed: Seed) -> np.ndarray:
        gates = seed.matrices()
        out = np.eye(4, dtype=complex)
        for i in self.indices:
            out = out @ gates[i]
        return out


@dataclass
class ValidationReport:
    residuals: dict
    inverse_partners: dict
    problems: list
    tol: float

    @property
    def passed(self) -> bool:
        return not self.problems


def validate_seed(seed: Seed, tol: float = UNITARITY_TOL, strict: bool = True) -> ValidationReport:
    """Check partition sizes, per-gate unitarity and inverse closure of ``u_m``.

    With ``strict`` the first problem found is raised; otherwise every
    problem is collected on the returned report.
    """
    problems = []
    if not seed.u_m or not seed.u_bm:
        empty = "u_m" if not seed.u_m else "u_bm"
        problems.append(EmptyPartition(f"{empty} is empty"))

    residuals = {g.label: g.unitarity_residual() for g in seed.gates}
    for g in seed.gates:
        if residuals[g.label] > tol:
            problems.append(NotUnitary(g.label, residuals[g.label]))

    partners = {}
    for g in seed.u_m:
        partner = None
        for h in seed.u_m:
            if np.linalg.norm(g.matrix @ h.matrix - np.eye(4)) <= INVERSE_TOL:
                partner = h.label
                break
        partners[g.label] = partner
        if partner is None:
            problems.append(NoInverse(g.label))

    if strict and problems:
        raise problems[0]
    return ValidationReport(residuals, partners, problems, tol)


def invertibility_ratio(seed: Seed) -> float:
    """Fraction ``|u_m| / |U_B|`` of the alphabet that is inverse-closed."""
    return len(seed.u_m) / seed.size


# Gate library for the built-in seeds.
_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.diag([1, -1]).astype(complex)


def _rotation(pauli, angle):
    return expm(-0.5j * angle * pauli)


def _euler(theta, phi, lam):
    return _rotation(_Z, phi) @ _rotation(_Y, theta) @ _rotation(_Z, lam)


def default_seeds() -> list:
    """Built-in seeds.

    Seed 0 uses ``G = CZ (H x H)`` and its inverse as ``u_m`` (algebraic
    entries) and ``R = CZ (Rx(1) x Ry(1))`` as the single relaxed gate
    (transcendental entries). Seed 1 keeps the same ``u_m`` but draws the
    relaxed gate's Euler angles once from a fixed generator.
    """
    g = _CZ @ np.kron(_H, _H)
    u_m = [Gate(g, "G", Origin.INVERTIBLE), Gate(g.conj().T, "Gdg", Origin.INVERTIBLE)]
    algebraic = {"G": True, "Gdg": True}

    r = _CZ @ np.kron(_rotation(_X, 1.0), _rotation(_Y, 1.0))
    fixed = Seed(
        u_m,
        [Gate(r, "R", Origin.RELAXED)],
        {
            "name": "fixed",
            "description": "u_m = {CZ(HxH), inverse}; R = CZ(Rx(1) x Ry(1))",
            "algebraic": {**algebraic, "R": False},
        },
    )

    rng = np.random.default_rng(RANDOMIZED_SEED_RNG)
    angles = rng.uniform(0.0, 2 * np.pi, size=(2, 3))
    r_rand = _CZ @ np.kron(_euler(*angles[0]), _euler(*angles[1]))
    randomized = Seed(
        u_m,
        [Gate(r_rand, "Rrand", Origin.RELAXED)],
        {
            "name": "randomized",
            "description": "u_m = {CZ(HxH), inverse}; Rrand = CZ(E(a0) x E(a1)), ZYZ Euler angles",
            "algebraic": {**algebraic, "Rrand": False},
            "rng_seed": RANDOMIZED_SEED_RNG,
            "euler_angles": angles.tolist(),
        },
    )
    return [fixed, randomized]


def sample_relaxed_word(seed: Seed, k: int, rng: np.random.Generator) -> GateWord:
    """Uniform sample over length-``k`` sequences with at least one relaxed letter.

    Rejection: draw ``k`` letters uniformly from ``U_B`` and redraw while all
    of them fall in ``u_m`` (probability ``a**k`` per attempt).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    n_m = seed.n_invertible
    while True:
        idx = rng.integers(0, seed.size, size=k)
        if np.any(idx >= n_m):
            return GateWord.from_indices(seed, idx)


def relaxed_word_count(size: int, n_invertible: int, k: int) -> int:
    return size**k - n_invertible**k


def enumerate_relaxed_words(seed: Seed, k: int, cap: int = DEFAULT_ENUM_CAP) -> list:
    """All ``|U_B|**k - |u_m|**k`` relaxed words in lexicographic order."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if seed.size**k > cap:
        raise TooLarge(f"|U_B|^k = {seed.size}^{k} exceeds cap {cap}")
    n_m = seed.n_invertible
    return [
        GateWord.from_indices(seed, idx)
        for idx in itertools.product(range(seed.size), repeat=k)
        if max(idx) >= n_m
    ]


def word_products(seed: Seed, indices) -> np.ndarray:
    """Resolve a ``(batch, k)`` index array to ``(batch, 4, 4)`` products."""
    indices = np.asarray(indices, dtype=int)
    if indices.ndim == 1:
        indices = indices[None, :]
    gates = seed.matrices()
    out = gates[indices[:, 0]].copy()
    for j in range(1, indices.shape[1]):
        out = out @ gates[indices[:, j]]
    return out
