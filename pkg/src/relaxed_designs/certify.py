"""Strong approximate-design checks, inverse-freeness audits and Haar oracles."""

from __future__ import annotations

import itertools
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import __version__
from .errors import DimensionMismatch, RelaxedDesignError, TooLarge
from .moments import BlockMomentOperator, HaarProjector, relaxed_gate_moment, spectral_norm_diff
from .moments.gate import tensor_power_tt
from .parameters import DEFAULT_C, design_params, min_L_from_eta
from .seeds import Seed, enumerate_relaxed_words, sample_relaxed_word, validate_seed, word_products

CHOI_CAP = 2**10
MC_CAP = 2**12
PAIR_CAP = 10**8
EIG_TOL = 1e-9


@dataclass
class ChoiMatrix:
    t: int
    n: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        """Dimension D = 2^(tn) of the space the channel acts on."""
        return 2 ** (self.t * self.n)

    def apply(self, rho) -> np.ndarray:
        """Phi(rho)[a, b] = sum_{c,e} J[(a,c),(b,e)] rho[c, e]."""
        D = self.dim
        return np.einsum("acbe,ce->ab", self.matrix.reshape(D, D, D, D), rho)

    def partial_trace_output(self) -> np.ndarray:
        D = self.dim
        return np.einsum("acae->ce", self.matrix.reshape(D, D, D, D))


def dense_moment(source, n: int, t: int, power: int = 1, cap: int = CHOI_CAP) -> np.ndarray:
    """Dense t,t moment of ``source`` raised to ``power``.

    ``source`` is a dense moment matrix, a list of ``(p, unitary)`` pairs on
    n qubits, a BlockMomentOperator or a HaarProjector.
    """
    side = 4 ** (t * n)
    if side > cap:
        raise TooLarge(f"moment dimension {side} exceeds the dense cap {cap}")
    if isinstance(source, (BlockMomentOperator, HaarProjector)):
        if (source.n, source.t) != (n, t):
            raise DimensionMismatch("source acts on a different (n, t)")
        m = source.to_dense(cap=cap)
    elif isinstance(source, np.ndarray):
        m = np.asarray(source, dtype=complex)
    else:
        m = sum(p * tensor_power_tt(np.asarray(u, dtype=complex), t) for p, u in source)
    if m.shape != (side, side):
        raise DimensionMismatch(f"moment has shape {m.shape}, expected {(side, side)}")
    return np.linalg.matrix_power(m, power) if power != 1 else m


def twirl_choi(moment_source, n: int, t: int, power: int = 1, cap: int = CHOI_CAP) -> ChoiMatrix:
    """Choi matrix of rho -> sum_i p_i U_i^t rho U_i^t^dagger.

    With the moment indexed as M[(a, b), (c, e)] (forward legs a, c; conjugate
    legs b, e) the Choi matrix is J[(a, c), (b, e)] = M[(a, b), (c, e)]:
    output index first, input index second.
    """
    m = dense_moment(moment_source, n, t, power, cap)
    D = 2 ** (t * n)
    choi = m.reshape(D, D, D, D).transpose(0, 2, 1, 3).reshape(D * D, D * D)
    return ChoiMatrix(t, n, choi)


def random_density_matrix(dim: int, rng) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def _min_eig(h) -> float:
    return float(np.linalg.eigvalsh((h + h.conj().T) / 2)[0])


@dataclass
class DesignVerdict:
    passed: bool
    epsilon: float
    tol: float
    min_eig_upper: float
    min_eig_lower: float
    sampled_min_upper: float
    sampled_min_lower: float
    samples: int

    @property
    def min_eigenvalues(self):
        return (self.min_eig_upper, self.min_eig_lower)


def strong_design_check(choi: ChoiMatrix, haar_choi: ChoiMatrix, epsilon: float,
                        tol: float = EIG_TOL, samples: int = 1000, rng=0) -> DesignVerdict:
    """Both orderings (1-eps) Haar <= twirl <= (1+eps) Haar.

    The verdict comes from positivity of the two Choi differences, which
    certifies the ordering on every positive input. The sampled check on
    random density matrices is recorded alongside as a direct test.
    """
    if choi.matrix.shape != haar_choi.matrix.shape or (choi.n, choi.t) != (haar_choi.n, haar_choi.t):
        raise DimensionMismatch("Choi matrices describe different (n, t)")
    upper = _min_eig((1 + epsilon) * haar_choi.matrix - choi.matrix)
    lower = _min_eig(choi.matrix - (1 - epsilon) * haar_choi.matrix)

    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    s_up = s_low = np.inf
    for _ in range(samples):
        rho = random_density_matrix(choi.dim, gen)
        out = choi.apply(rho)
        ref = haar_choi.apply(rho)
        s_up = min(s_up, _min_eig((1 + epsilon) * ref - out))
        s_low = min(s_low, _min_eig(out - (1 - epsilon) * ref))
    passed = upper >= -tol and lower >= -tol
    return DesignVerdict(passed, epsilon, tol, upper, lower, float(s_up), float(s_low), samples)


def haar_random_unitary(d: int, rng) -> np.ndarray:
    """QR of a complex Ginibre matrix with the diagonal phases of R removed."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diag(r)
    return q * (diag / np.abs(diag))


def haar_mc_oracle(n: int, t: int, N: int, rng) -> np.ndarray:
    """Empirical average of U^{t,t} over N Haar samples on n qubits."""
    side = 4 ** (t * n)
    if side > MC_CAP:
        raise TooLarge(f"moment dimension {side} exceeds {MC_CAP}")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    acc = np.zeros((side, side), dtype=complex)
    for _ in range(N):
        acc += tensor_power_tt(haar_random_unitary(2**n, gen), t)
    return acc / N


@dataclass
class AuditReport:
    mode: str
    k: int
    pairs_checked: int
    min_distance: float
    argmin: tuple
    tol: float
    passed: bool
    note: str = ("Evidence only: a floating-point search over finitely many pairs "
                 "cannot prove that no word has its inverse among the relaxed words.")

    def to_json(self) -> dict:
        out = asdict(self)
        out["argmin"] = [list(w) for w in self.argmin]
        return out


def _pair_distances(us, vs):
    """||U V - I||_F for all pairs, via ||UV - I||^2 = 2d - 2 Re tr(UV)."""
    d = us.shape[-1]
    tr = np.einsum("iab,jba->ij", us, vs)
    return np.sqrt(np.maximum(2 * d - 2 * tr.real, 0.0))


def inverse_freeness_audit(seed: Seed, k: int, mode: str = "exhaustive", samples: int = 10**4,
                           tol: float = 1e-6, rng=0, chunk: int = 2048) -> AuditReport:
    """Smallest ||UV - I||_F over ordered pairs of relaxed-word products.

    PASS when no pair comes within ``tol`` of being mutually inverse.
    """
    eye = np.eye(4)
    if mode == "exhaustive":
        words = enumerate_relaxed_words(seed, k, cap=max(seed.size**k, 1))
        if len(words) ** 2 > PAIR_CAP:
            raise TooLarge(f"{len(words)}^2 pairs exceed the cap {PAIR_CAP}")
        idx = np.array([w.indices for w in words])
        prods = word_products(seed, idx)
        best, arg = np.inf, None
        for start in range(0, len(prods), chunk):
            dist = _pair_distances(prods[start:start + chunk], prods)
            i, j = np.unravel_index(np.argmin(dist), dist.shape)
            if dist[i, j] < best:
                best, arg = dist[i, j], (start + i, j)
        i, j = arg
        best = float(np.linalg.norm(prods[i] @ prods[j] - eye))
        argmin = (tuple(idx[i]), tuple(idx[j]))
        pairs = len(words) ** 2
    elif mode == "sampled":
        gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
        left = np.array([sample_relaxed_word(seed, k, gen).indices for _ in range(samples)])
        right = np.array([sample_relaxed_word(seed, k, gen).indices for _ in range(samples)])
        pu, pv = word_products(seed, left), word_products(seed, right)
        dist = np.linalg.norm(pu @ pv - eye, axis=(1, 2))
        i = int(np.argmin(dist))
        best = float(dist[i])
        argmin = (tuple(left[i]), tuple(right[i]))
        pairs = samples
    else:
        raise ValueError(f"unknown audit mode {mode!r}")
    argmin = tuple(tuple(int(x) for x in w) for w in argmin)
    return AuditReport(mode, k, int(pairs), best, argmin, tol, best > tol)


@dataclass
class CertifyConfig:
    seed: Seed
    t: int
    n: int
    epsilon: float
    rng_seed: int
    c_const: float = DEFAULT_C
    epsilon_prime: object = None
    k: object = None
    L: object = None
    tol: float = 1e-6
    max_iters: int = 2000
    choi_cap: int = CHOI_CAP
    eig_tol: float = EIG_TOL
    design_samples: int = 1000
    audit_samples: int = 1000
    audit_tol: float = 1e-6


@dataclass
class CertificationReport:
    params: dict = None
    eta_hat: float = None
    eta_bound: float = None
    iterations: int = None
    converged: bool = None
    L: int = None
    tpe_verdict: str = None
    design_verdict: str = None
    min_eigenvalues: tuple = None
    design: dict = None
    audit: dict = None
    wall_times: dict = field(default_factory=dict)
    tool_version: str = __version__
    rng_seeds: dict = field(default_factory=dict)
    failure_stage: str = None
    error: str = None
    skipped: dict = field(default_factory=dict)

    def consistent(self) -> bool:
        """Re-derive both verdicts from the stored numbers."""
        ok = True
        if self.eta_hat is not None and self.tpe_verdict is not None:
            ok &= self.tpe_verdict == ("PASS" if self.eta_hat < 1 else "FAIL")
        if self.design is not None and self.design_verdict in ("PASS", "FAIL"):
            tol = self.design["tol"]
            derived = min(self.min_eigenvalues) >= -tol
            ok &= self.design_verdict == ("PASS" if derived else "FAIL")
        return bool(ok)

    def to_json(self) -> dict:
        out = asdict(self)
        if out["min_eigenvalues"] is not None:
            out["min_eigenvalues"] = list(out["min_eigenvalues"])
        return out


def certify_pipeline(config: CertifyConfig) -> CertificationReport:
    """Bounds, relaxed moment, TPE estimate, L from it, then the strong-design check.

    A failing stage raises its original error with ``partial_report``
    attached, recording the stage name.
    """
    report = CertificationReport(rng_seeds={"power_iteration": config.rng_seed,
                                            "design_samples": config.rng_seed + 1,
                                            "audit": config.rng_seed + 2})
    stage = "validate"

    def clock(name, started):
        report.wall_times[name] = time.perf_counter() - started

    try:
        started = time.perf_counter()
        validate_seed(config.seed)
        clock(stage, started)

        stage = "parameters"
        started = time.perf_counter()
        a = Fraction(len(config.seed.u_m), config.seed.size)
        params = design_params(config.t, config.n, config.epsilon, a, config.c_const,
                               config.epsilon_prime, config.k, config.L)
        report.params = params.to_json()
        report.eta_bound = float(params.eta)
        clock(stage, started)

        stage = "tpe"
        started = time.perf_counter()
        gm = relaxed_gate_moment(config.seed, params.k, config.t)
        block = BlockMomentOperator(config.n, config.t, gm)
        haar = HaarProjector(config.n, config.t)
        est = spectral_norm_diff(block, haar, config.tol, config.max_iters, config.rng_seed)
        report.eta_hat = est.eta_hat
        report.iterations = est.iterations
        report.converged = est.converged
        report.tpe_verdict = "PASS" if est.eta_hat < 1 else "FAIL"
        clock(stage, started)

        stage = "audit"
        started = time.perf_counter()
        audit = inverse_freeness_audit(config.seed, params.k, "sampled", config.audit_samples,
                                       config.audit_tol, config.rng_seed + 2)
        report.audit = audit.to_json()
        clock(stage, started)

        stage = "depth"
        L = config.L if config.L is not None else min_L_from_eta(est.eta_hat, config.n,
                                                                config.t, config.epsilon)
        report.L = int(L)

        stage = "design"
        started = time.perf_counter()
        try:
            choi = twirl_choi(block, config.n, config.t, power=report.L, cap=config.choi_cap)
            haar_choi = twirl_choi(haar, config.n, config.t, cap=config.choi_cap)
        except TooLarge as exc:
            report.design_verdict = "SKIPPED"
            report.skipped["design"] = f"TooLarge: {exc}"
        else:
            verdict = strong_design_check(choi, haar_choi, config.epsilon, config.eig_tol,
                                          config.design_samples, config.rng_seed + 1)
            report.design = asdict(verdict)
            report.min_eigenvalues = verdict.min_eigenvalues
            report.design_verdict = "PASS" if verdict.passed else "FAIL"
        clock(stage, started)
    except RelaxedDesignError as exc:
        report.failure_stage = stage
        report.error = f"{type(exc).__name__}: {exc}"
        exc.partial_report = report
        raise
    return report
