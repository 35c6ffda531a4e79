"""Command-line entry point.

Exit codes: 0 on success or PASS, 1 on a FAIL verdict, 2 on errors.
Single runs emit JSON, sweeps emit CSV. Output goes to ``--output``, else
to ``$RELAXED_DESIGNS_OUTPUT_DIR/<command>.<ext>`` when that variable is
set, else to stdout.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from pathlib import Path

import mpmath as mp
import numpy as np

from . import __version__
from .certify import (CHOI_CAP, CertifyConfig, certify_pipeline, haar_mc_oracle,
                      inverse_freeness_audit)
from .circuits import CircuitDescription, apply_circuit_state, sample_design_circuit
from .errors import RelaxedDesignError
from .moments import BlockMomentOperator, HaarProjector, relaxed_gate_moment, spectral_norm_diff
from .parameters import (DEFAULT_C, correction_factor, default_epsilon_prime, design_params,
                         min_k, min_qubits, p_of_t)
from .seeds import Seed, default_seeds, validate_seed

OUTPUT_DIR_ENV = "RELAXED_DESIGNS_OUTPUT_DIR"
SWEEP_COLUMNS = ["n", "t", "c_const", "k", "L", "eta_bound", "eta_hat",
                 "tpe_verdict", "design_verdict"]


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    seed_file: str = None
    default_seed: str = "fixed"
    t: int = 1
    n: object = 2
    epsilon: float = 0.1
    c_const: float = DEFAULT_C
    epsilon_prime: float = None
    k: int = None
    L: int = None
    tol: float = 1e-6
    max_iters: int = 2000
    eig_tol: float = 1e-9
    choi_cap: int = CHOI_CAP
    rng_seed: int = None
    output: str = None

    def validate(self):
        if self.seed_file is not None and not Path(self.seed_file).is_file():
            raise UsageError(f"seed file {self.seed_file} does not exist")
        if self.t < 1:
            raise UsageError("--t must be >= 1")
        # the Haar oracle needs no brickwork, so a single qubit is fine there
        n_min = 1 if self.command == "mc-oracle" else 2
        for n in _as_list(self.n):
            if n < n_min:
                raise UsageError(f"--n must be >= {n_min}")
        if not 0 < self.epsilon < 1:
            raise UsageError("--epsilon must lie in (0, 1)")
        if not 0 < self.c_const < 1:
            raise UsageError("--c must lie in (0, 1)")
        if self.k is not None and self.k < 1:
            raise UsageError("--k must be >= 1")
        if self.L is not None and self.L < 1:
            raise UsageError("--L must be >= 1")

    def seed(self) -> Seed:
        if self.seed_file:
            seed = Seed.load(self.seed_file)
        else:
            seeds = {s.metadata["name"]: s for s in default_seeds()}
            seed = seeds[self.default_seed]
        validate_seed(seed)
        return seed


def _as_list(n):
    return list(n) if isinstance(n, (list, tuple, range)) else [n]


def parse_n_range(text: str) -> list:
    """``"2..8"`` (inclusive), ``"2,4,6"`` or ``"5"``."""
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",")]


def _common(p, n_range=False):
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override it")
    p.add_argument("--seed-file", help="seed JSON (u_m, u_bm, labels, metadata)")
    p.add_argument("--default-seed", choices=["fixed", "randomized"])
    p.add_argument("--t", type=int)
    if n_range:
        p.add_argument("--n", type=parse_n_range)
    else:
        p.add_argument("--n", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--c", dest="c_const", type=float)
    p.add_argument("--epsilon-prime", type=float)
    p.add_argument("--k", type=int)
    p.add_argument("--L", type=int)
    p.add_argument("--rng-seed", type=int)
    p.add_argument("--output")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relaxed-designs", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("params", help="evaluate every closed-form bound")
    _common(p)

    p = sub.add_parser("tpe", help="estimate the TPE distance of block(B_1)")
    _common(p)
    p.add_argument("--k-auto", action="store_true", help="take k from the word-length bound")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int)

    p = sub.add_parser("certify", help="full certification pipeline")
    _common(p)
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--eig-tol", type=float)
    p.add_argument("--choi-cap", type=int)

    p = sub.add_parser("sample", help="sample a block^L(B_1) circuit")
    _common(p)

    p = sub.add_parser("simulate", help="apply a sampled circuit to a state")
    _common(p)
    p.add_argument("--circuit", required=True, help="circuit JSON from `sample`")
    p.add_argument("--state", default="zero",
                   help="zero, plus, random, or a JSON file of [re, im] amplitudes")

    p = sub.add_parser("audit-inverses", help="search relaxed words for inverse pairs")
    _common(p)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p.add_argument("--samples", type=int, default=10**4)
    p.add_argument("--tol", type=float)

    p = sub.add_parser("sweep", help="CSV over a range of n (and C values)")
    _common(p, n_range=True)
    p.add_argument("--metric", choices=["eta", "bound"], default="eta")
    p.add_argument("--c-values", help="comma-separated C values (default: --c)")
    p.add_argument("--tol", type=float)
    p.add_argument("--max-iters", type=int)

    p = sub.add_parser("mc-oracle", help="Monte-Carlo Haar moment vs the exact projector")
    _common(p)
    p.add_argument("--N", type=int, default=20000)
    return parser


def resolve_config(args) -> RunConfig:
    merged = {}
    if getattr(args, "config", None):
        merged.update(json.loads(Path(args.config).read_text()))
    names = {f.name for f in fields(RunConfig)}
    for key, val in vars(args).items():
        if key in names and val is not None:
            merged[key] = val
    unknown = set(merged) - names
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)}")
    if "n" in merged and args.command == "sweep" and isinstance(merged["n"], str):
        merged["n"] = parse_n_range(merged["n"])
    if args.command == "sweep" and "n" in merged:
        merged["n"] = _as_list(merged["n"])
    config = RunConfig(**merged)
    config.validate()
    return config


def _envelope(config: RunConfig, body: dict) -> dict:
    return {"tool_version": __version__, "command": config.command,
            "config": asdict(config), "rng_seed": config.rng_seed, **body}


def _emit(config: RunConfig, text: str, ext: str):
    target = config.output
    if target is None and os.environ.get(OUTPUT_DIR_ENV):
        target = str(Path(os.environ[OUTPUT_DIR_ENV]) / f"{config.command}.{ext}")
    if target is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        Path(target).write_text(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, Fraction):
        return float(o)
    if isinstance(o, mp.mpf):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not JSON serialisable: {type(o)}")


def _ratio(seed: Seed) -> Fraction:
    return Fraction(len(seed.u_m), seed.size)


def _eps_prime(config):
    return default_epsilon_prime(config.t) if config.epsilon_prime is None else config.epsilon_prime


def cmd_params(config: RunConfig) -> int:
    seed = config.seed()
    a = _ratio(seed)
    params = design_params(config.t, config.n, config.epsilon, a, config.c_const,
                           config.epsilon_prime, config.k, config.L)
    t, n = config.t, config.n
    with mp.workdps(80):
        eps_p = params.epsilon_prime
        k_num = 10 * t + n * n * t - n * t + n + mp.log(1 / eps_p, 2)
        k_den = mp.log(1 / (1 + (mp.mpf(config.c_const) - 1) * mp.mpf(a.numerator) / a.denominator), 2)
        factor = correction_factor(a, params.k, n)
        intermediates = {
            "p_t_exponent": float(mp.mpf("3.1") / mp.log(2)),
            "one_minus_p_t": float(1 - params.p_t),
            "k_numerator": float(k_num),
            "k_denominator": float(k_den),
            "k_real": float(k_num / k_den),
            "a_power_k": float(mp.mpf(a.numerator) ** params.k / mp.mpf(a.denominator) ** params.k),
            "correction_factor": float(mp.mpf(factor.numerator) / factor.denominator),
            "one_minus_correction_factor": float(1 - mp.mpf(factor.numerator) / factor.denominator),
            "min_qubits": min_qubits(t),
        }
    _emit(config, _dump(_envelope(config, {"params": params.to_json(),
                                           "intermediates": intermediates})), "json")
    return 0


def _tpe_estimate(config, seed, n, k):
    gm = relaxed_gate_moment(seed, k, config.t)
    op = BlockMomentOperator(n, config.t, gm)
    hp = HaarProjector(n, config.t)
    return spectral_norm_diff(op, hp, config.tol, config.max_iters, config.rng_seed)


def cmd_tpe(config: RunConfig) -> int:
    seed = config.seed()
    if config.rng_seed is None:
        config.rng_seed = 0
    a = _ratio(seed)
    eps_p = _eps_prime(config)
    k = config.k if config.k is not None else min_k(config.t, config.n, eps_p, config.c_const, a)
    started = time.perf_counter()
    est = _tpe_estimate(config, seed, config.n, k)
    wall = time.perf_counter() - started
    params = design_params(config.t, config.n, config.epsilon, a, config.c_const,
                           config.epsilon_prime, k, with_n0=False)
    body = {"eta_hat": est.eta_hat, "eta_bound": float(params.eta), "k": k,
            "iterations": est.iterations, "converged": est.converged,
            "residual": est.residual, "wall_time": wall}
    _emit(config, _dump(_envelope(config, body)), "json")
    return 0 if est.eta_hat < 1 else 1


def _certify_config(config: RunConfig, seed: Seed, n: int, c_const: float) -> CertifyConfig:
    return CertifyConfig(seed=seed, t=config.t, n=n, epsilon=config.epsilon,
                         rng_seed=config.rng_seed, c_const=c_const,
                         epsilon_prime=config.epsilon_prime, k=config.k, L=config.L,
                         tol=config.tol, max_iters=config.max_iters,
                         choi_cap=config.choi_cap, eig_tol=config.eig_tol)


def cmd_certify(config: RunConfig) -> int:
    if config.rng_seed is None:
        raise UsageError("certification runs require --rng-seed")
    seed = config.seed()
    try:
        report = certify_pipeline(_certify_config(config, seed, config.n, config.c_const))
    except RelaxedDesignError as exc:
        partial = getattr(exc, "partial_report", None)
        if partial is not None:
            _emit(config, _dump(_envelope(config, {"report": partial.to_json()})), "json")
        raise
    _emit(config, _dump(_envelope(config, {"report": report.to_json()})), "json")
    failed = report.tpe_verdict == "FAIL" or report.design_verdict == "FAIL"
    return 1 if failed else 0


def cmd_sample(config: RunConfig) -> int:
    seed = config.seed()
    if config.rng_seed is None:
        config.rng_seed = 0
    k = config.k if config.k is not None else min_k(config.t, config.n, _eps_prime(config),
                                                    config.c_const, _ratio(seed))
    circ = sample_design_circuit(seed, k, config.n, config.L or 1, config.rng_seed)
    _emit(config, json.dumps(circ.to_json(), sort_keys=True, indent=2), "json")
    return 0


def _load_state(spec: str, n: int, rng_seed):
    dim = 2**n
    if spec == "zero":
        state = np.zeros(dim, dtype=complex)
        state[0] = 1
    elif spec == "plus":
        state = np.full(dim, 1 / math.sqrt(dim), dtype=complex)
    elif spec == "random":
        gen = np.random.default_rng(rng_seed)
        state = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
        state /= np.linalg.norm(state)
    else:
        pairs = np.asarray(json.loads(Path(spec).read_text()), dtype=float)
        state = pairs[:, 0] + 1j * pairs[:, 1]
    return state


def cmd_simulate(config: RunConfig, circuit_path: str, state_spec: str) -> int:
    seed = config.seed()
    circ = CircuitDescription.from_json(json.loads(Path(circuit_path).read_text()), seed)
    state = _load_state(state_spec, circ.n, config.rng_seed)
    out = apply_circuit_state(circ, state, seed)
    body = {"n": circ.n, "input_state": state_spec, "norm": float(np.linalg.norm(out)),
            "state": [[float(z.real), float(z.imag)] for z in out]}
    _emit(config, _dump(_envelope(config, body)), "json")
    return 0


def cmd_audit(config: RunConfig, mode: str, samples: int, tol) -> int:
    seed = config.seed()
    if config.rng_seed is None:
        config.rng_seed = 0
    k = config.k if config.k is not None else min_k(config.t, config.n, _eps_prime(config),
                                                    config.c_const, _ratio(seed))
    report = inverse_freeness_audit(seed, k, mode, samples, 1e-6 if tol is None else tol,
                                    config.rng_seed)
    _emit(config, _dump(_envelope(config, {"audit": report.to_json()})), "json")
    return 0 if report.passed else 1


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def cmd_sweep(config: RunConfig, metric: str, c_values) -> int:
    seed = config.seed()
    if metric == "eta" and config.rng_seed is None:
        raise UsageError("eta sweeps run the certification pipeline and require --rng-seed")
    cs = [float(c) for c in c_values.split(",")] if c_values else [config.c_const]
    a = _ratio(seed)
    rows = []
    for c_const in cs:
        for n in config.n:
            row = {"n": n, "t": config.t, "c_const": c_const}
            if metric == "bound":
                params = design_params(config.t, n, config.epsilon, a, c_const,
                                       config.epsilon_prime, config.k, config.L, with_n0=False)
                row.update(k=params.k, L=params.L, eta_bound=float(params.eta))
            else:
                report = certify_pipeline(_certify_config(config, seed, n, c_const))
                row.update(k=report.params["k"], L=report.L, eta_bound=report.eta_bound,
                           eta_hat=report.eta_hat, tpe_verdict=report.tpe_verdict,
                           design_verdict=report.design_verdict)
            rows.append(row)

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in SWEEP_COLUMNS])
    _emit(config, buf.getvalue(), "csv")

    if metric == "eta":
        for c_const in cs:
            etas = [r["eta_hat"] for r in rows if r["c_const"] == c_const]
            trend = all(b <= a_ for a_, b in zip(etas, etas[1:]))
            print(f"summary: C={c_const} eta_hat over n={config.n[0]}..{config.n[-1]} is "
                  f"{'nonincreasing' if trend else 'not monotone'}", file=sys.stderr)
        if any(r["tpe_verdict"] == "FAIL" or r["design_verdict"] == "FAIL" for r in rows):
            return 1
    return 0


def cmd_mc_oracle(config: RunConfig, N: int) -> int:
    if config.rng_seed is None:
        config.rng_seed = 0
    emp = haar_mc_oracle(config.n, config.t, N, config.rng_seed)
    exact = HaarProjector(config.n, config.t).to_dense(cap=emp.shape[0])
    dist = float(np.linalg.norm(emp - exact, 2))
    threshold = 5 / math.sqrt(N)
    body = {"n": config.n, "t": config.t, "N": N, "distance": dist,
            "threshold": threshold, "passed": dist <= threshold}
    _emit(config, _dump(_envelope(config, body)), "json")
    return 0 if dist <= threshold else 1


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        config = resolve_config(args)
        cmd = args.command
        if cmd == "params":
            return cmd_params(config)
        if cmd == "tpe":
            return cmd_tpe(config)
        if cmd == "certify":
            return cmd_certify(config)
        if cmd == "sample":
            return cmd_sample(config)
        if cmd == "simulate":
            return cmd_simulate(config, args.circuit, args.state)
        if cmd == "audit-inverses":
            return cmd_audit(config, args.mode, args.samples, args.tol)
        if cmd == "sweep":
            return cmd_sweep(config, args.metric, args.c_values)
        if cmd == "mc-oracle":
            return cmd_mc_oracle(config, args.N)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RelaxedDesignError, OSError, ValueError, KeyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
