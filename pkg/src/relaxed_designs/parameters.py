"""Closed-form design bounds: P(t), gate-word length k, depth L, eta, n0.

Everything is evaluated with mpmath because 1 - P(t) drops below double
precision already for moderate t. Real-valued results are returned as
``mpmath.mpf``; integer results are plain ``int``. Inputs may be floats,
``fractions.Fraction`` or ``mpf``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import mpmath as mp

from .errors import EtaNotContractive, InvalidRange, NotFoundBelowCap, RegimeViolation

# The exponent of t in P(t) is 3.1 / log(2), the logarithm taken in this base.
# "e" means the natural log; any positive number is taken as a literal base.
EXPONENT_LOG_BASE = "e"
DEFAULT_C = 0.5
DEFAULT_N_CAP = 10**4
_DPS = 60
_SNAP_DIGITS = 40


def _work_dps(t: int) -> int:
    # 1 - P(t) ~ t^-9.5 / 2550; keep ~_DPS significant digits of it.
    return _DPS + int(10 * math.log10(max(t, 2))) + 10


def _mpf(x):
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _ceil(x) -> int:
    """Ceiling that snaps values within working-precision noise of an integer."""
    r = mp.nint(x)
    if abs(x - r) <= mp.mpf(10) ** (-_SNAP_DIGITS) * max(1, abs(x)):
        return int(r)
    return int(mp.ceil(x))


def floor_log2(x: int) -> int:
    """Exact ``floor(log2(x))`` for a positive integer."""
    return int(x).bit_length() - 1


def min_qubits(t: int) -> int:
    """Exact ``floor(2.5 * log2(4 t))``: the largest m with 2**(2m) <= (4t)**5."""
    return floor_log2((4 * t) ** 5) // 2


def p_of_t(t: int):
    """The contraction constant P(t) of the inverse-closed construction."""
    if t < 1:
        raise InvalidRange("t must be >= 1")
    with mp.workdps(_work_dps(t)):
        t_mp = mp.mpf(t)
        base = mp.e if EXPONENT_LOG_BASE == "e" else _mpf(EXPONENT_LOG_BASE)
        expo = mp.mpf("3.1") / mp.log(2, base)
        denom = 425 * floor_log2(4 * t) ** 2 * t_mp**5 * t_mp**expo
        return (1 + (1 / denom) / 2) ** (mp.mpf(-1) / 3)


def default_epsilon_prime(t: int):
    """epsilon' = (1 - P(t)) / 2, the default inside the admissible range."""
    with mp.workdps(_work_dps(t)):
        return (1 - p_of_t(t)) / 2


def _check_unit_interval(name, x):
    if not 0 < x < 1:
        raise InvalidRange(f"{name} must lie in (0, 1), got {x}")


def min_k(t: int, n: int, epsilon_prime, c_const=DEFAULT_C, a=Fraction(2, 3)) -> int:
    """Smallest word length k satisfying the gate-count bound."""
    _check_unit_interval("a", a)
    _check_unit_interval("c_const", c_const)
    if epsilon_prime <= 0:
        raise InvalidRange("epsilon_prime must be positive")
    with mp.workdps(_work_dps(t)):
        num = 10 * t + n * n * t - n * t + n + mp.log(1 / _mpf(epsilon_prime), 2)
        den = mp.log(1 / (1 + (_mpf(c_const) - 1) * _mpf(a)), 2)
        return _ceil(num / den)


def min_L_theorem1(t: int, n: int, epsilon_d, epsilon_prime, p_t) -> int:
    """Depth for the inverse-closed construction block^L(B^k)."""
    with mp.workdps(_work_dps(t)):
        base = _mpf(epsilon_prime) + _mpf(p_t)
        if base >= 1:
            raise RegimeViolation(f"epsilon' + P(t) = {mp.nstr(base, 20)} is not < 1")
        num = 4 * n * t + mp.log(1 / _mpf(epsilon_d), 2)
        return _ceil(num / mp.log(1 / base, 2))


def correction_factor(a, k: int, n: int):
    """(1 - a^k)^(n-1); exact ``Fraction`` when ``a`` is a Fraction."""
    if isinstance(a, Fraction):
        return (1 - a**k) ** (n - 1)
    with mp.workdps(_DPS + 40):
        return (1 - _mpf(a) ** k) ** (n - 1)


def eta_from_factor(p_t, epsilon_prime, factor):
    """eta = (P + eps') / f + (1 - f) / f for a given correction factor f."""
    with mp.workdps(_DPS + 40):
        f = _mpf(factor)
        return (_mpf(p_t) + _mpf(epsilon_prime)) / f + (1 - f) / f


def eta_bound(t: int, n: int, a, k: int, epsilon_prime, c_const=None):
    """TPE constant of block(B_1) for the relaxed seed.

    Warns when ``n`` is below ``min_qubits(t)``, or when ``c_const`` is given
    and ``k`` is shorter than ``min_k`` for the same inputs.
    """
    if n < min_qubits(t):
        warnings.warn(
            f"n={n} is below floor(2.5 log2(4t))={min_qubits(t)}; bound outside its regime",
            stacklevel=2,
        )
    if c_const is not None and k < min_k(t, n, epsilon_prime, c_const, a):
        warnings.warn(f"k={k} is shorter than the required word length", stacklevel=2)
    with mp.workdps(_work_dps(t) + 40):
        return eta_from_factor(p_of_t(t), epsilon_prime, correction_factor(a, k, n))


def min_L_from_eta(eta, n: int, t: int, epsilon) -> int:
    """Depth L after which an (eta, t)-TPE gives a strong epsilon-design."""
    with mp.workdps(_work_dps(t)):
        eta = _mpf(eta)
        if not eta < 1:
            raise EtaNotContractive(f"eta = {mp.nstr(eta, 12)} is not < 1")
        if eta <= 0:
            return 1
        num = 4 * n * t + mp.log(1 / _mpf(epsilon), 2)
        return max(1, _ceil(num / mp.log(1 / eta, 2)))


@dataclass
class SweepPoint:
    n: int
    k: int
    correction_factor: object
    eta: object


@dataclass
class N0Result:
    n0: int
    eta: object
    sweep: list = field(default_factory=list)


def find_n0(t: int, a=Fraction(2, 3), c_const=DEFAULT_C, epsilon_prime_rule=None,
            n_cap: int = DEFAULT_N_CAP, n_trail: int = 10) -> N0Result:
    """Smallest n >= floor(2.5 log2(4t)) with eta_bound <= 1.

    ``epsilon_prime_rule`` maps t to epsilon' (default ``default_epsilon_prime``).
    The sweep continues ``n_trail`` points past n0 so the trend toward the
    large-n limit is recorded as well.
    """
    rule = epsilon_prime_rule or default_epsilon_prime
    eps_p = rule(t)
    p_t = p_of_t(t)
    sweep = []
    n0 = None
    eta0 = None
    n = min_qubits(t)
    with mp.workdps(_work_dps(t) + 40):
        while n <= n_cap:
            k = min_k(t, n, eps_p, c_const, a)
            f = correction_factor(a, k, n)
            eta = eta_from_factor(p_t, eps_p, f)
            sweep.append(SweepPoint(n, k, f, eta))
            if n0 is None and eta <= 1:
                n0, eta0 = n, eta
            if n0 is not None and n >= n0 + n_trail:
                break
            n += 1
    if n0 is None:
        raise NotFoundBelowCap(f"no n <= {n_cap} gives eta <= 1 for t={t}", sweep)
    return N0Result(n0, eta0, sweep)


@dataclass
class DesignParams:
    t: int
    n: int
    epsilon: float
    epsilon_prime: object
    c_const: float
    a: object
    k: int
    L: object
    p_t: object
    eta: object
    n0: object = None
    L_direct: object = None
    regime_ok: bool = True

    def to_json(self) -> dict:
        out = {}
        for key, val in asdict(self).items():
            if isinstance(val, Fraction):
                out[key] = float(val)
                out[key + "_exact"] = f"{val.numerator}/{val.denominator}"
            elif isinstance(val, mp.mpf):
                out[key] = float(val)
                out[key + "_str"] = mp.nstr(val, 30)
            else:
                out[key] = val
        return out


def design_params(t: int, n: int, epsilon: float, a=Fraction(2, 3), c_const=DEFAULT_C,
                  epsilon_prime=None, k=None, L=None, with_n0: bool = True) -> DesignParams:
    """Resolve every scalar of the construction for one (t, n, epsilon)."""
    p_t = p_of_t(t)
    eps_p = default_epsilon_prime(t) if epsilon_prime is None else _mpf(epsilon_prime)
    with mp.workdps(_work_dps(t)):
        if eps_p >= 1 - p_t:
            raise RegimeViolation("epsilon' must be strictly below 1 - P(t)")
    k = min_k(t, n, eps_p, c_const, a) if k is None else int(k)
    regime_ok = n >= min_qubits(t)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        eta = eta_bound(t, n, a, k, eps_p)
    if L is None:
        L = min_L_from_eta(eta, n, t, epsilon) if eta < 1 else None
    L1 = min_L_theorem1(t, n, epsilon, eps_p, p_t)
    n0 = None
    if with_n0:
        try:
            n0 = find_n0(t, a, c_const, lambda _t: eps_p).n0
        except NotFoundBelowCap:
            n0 = None
    return DesignParams(t, n, epsilon, eps_p, c_const, a, k, L, p_t, eta, n0, L1, regime_ok)
