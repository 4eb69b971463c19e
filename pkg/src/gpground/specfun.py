"""Real special functions: Gamma, digamma, Pochhammer, Kummer M and Tricomi U.

Everything here is a pure function of float arguments. The Tricomi function
dispatches between four evaluation routes:

``connection``
    two Kummer series joined by the Gamma-function connection formula
    (non-integer beta),
``integer``
    the logarithmic series for beta = n + 1,
``asymptotic``
    the inverse-power series in 1/z, optimally truncated,
``continuation``
    Taylor continuation of the Kummer ODE inward from the asymptotic region,
    used where the connection formula cancels catastrophically and the
    asymptotic series is not yet accurate enough.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "SpecialFunctionError",
    "PoleError",
    "ConvergenceError",
    "AccuracyError",
    "KummerParams",
    "gamma",
    "rgamma",
    "digamma",
    "pochhammer",
    "sinpi",
    "kummer_m",
    "tricomi_u",
    "log_tricomi_u",
    "tricomi_u_prime",
    "asymptotic_crossover",
    "connection_cancellation",
    "asymptotic_remainder",
    "tricomi_branch",
]

EPS = 2.220446049250313e-16
SERIES_CAP = 10_000
SERIES_RATIO = 1e-17
INTEGER_BETA_BAND = 1e-6
# connection/integer branch is rejected once the cancellation factor exceeds
# this; Gamma prefactors carry ~1e-14 relative error, so 1e2 keeps the
# value within ~1e-12 and smooth enough for finite-difference checks
CANCELLATION_LIMIT = 1e2


class SpecialFunctionError(ArithmeticError):
    pass


class PoleError(SpecialFunctionError, ValueError):
    pass


class ConvergenceError(SpecialFunctionError):
    pass


class AccuracyError(SpecialFunctionError):
    pass


@dataclass(frozen=True)
class KummerParams:
    """Parameter pair (alpha, beta) of the confluent hypergeometric equation."""

    alpha: float
    beta: float

    @classmethod
    def from_critical(cls, params, lam: float) -> "KummerParams":
        """alpha = (p+1)/(2p) - lam/4, beta = 1 + 1/p.

        ``params`` is a :class:`gpground.profiles.CriticalParams`. When 1/p is
        an integer the returned beta is an exact ``int`` so that the
        logarithmic branch of :func:`tricomi_u` is always used.
        """
        n = params.inverse_integer
        beta = 1 + n if n is not None else 1.0 + 1.0 / float(params.p)
        alpha = (float(params.p) + 1.0) / (2.0 * float(params.p)) - lam / 4.0
        if lam < params.d and not alpha > 0.0:
            raise ValueError(f"alpha = {alpha} should be positive for lam < d")
        return cls(alpha, beta)


# --------------------------------------------------------------------------
# Gamma family

_LANCZOS_G = 7.0
_LANCZOS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0.0 and x == math.floor(x)


def _sinpi(x: float) -> float:
    # exact reduction to [-1, 1] keeps sin(pi x) accurate for large |x|
    r = x - 2.0 * round(0.5 * x)
    if r > 0.5:
        return math.sin(math.pi * (1.0 - r))
    if r < -0.5:
        return -math.sin(math.pi * (1.0 + r))
    return math.sin(math.pi * r)


def sinpi(x: float) -> float:
    """sin(pi x) with exact argument reduction (relative accuracy near integers)."""
    return _sinpi(float(x))


def _cospi(x: float) -> float:
    return _sinpi(x + 0.5)


def _lanczos(x: float) -> float:
    z = x - 1.0
    acc = _LANCZOS[0]
    for i in range(1, len(_LANCZOS)):
        acc += _LANCZOS[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    # split the power so that t**(z+0.5) does not overflow before exp(-t) rescales
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * acc


def gamma(x: float) -> float:
    """Gamma function via the Lanczos approximation (g = 7, nine terms).

    Negative arguments go through the reflection formula. Raises
    :class:`PoleError` at 0, -1, -2, ...
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at {x}")
    if x == math.floor(x) and x <= 171.0:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return math.pi / (_sinpi(x) * gamma(1.0 - x))
    if x > 171.7:
        return math.inf
    return _lanczos(x)


def rgamma(x: float) -> float:
    """Reciprocal Gamma, entire: returns 0.0 at the poles of Gamma."""
    if _is_nonpositive_integer(float(x)):
        return 0.0
    return 1.0 / gamma(x)


_DIGAMMA_ROOT_HI = 1.4616321449683622
_DIGAMMA_ROOT_LO = 9.549995429965697e-17
# Taylor coefficients psi^(k)(x0)/k! about the positive root x0
_DIGAMMA_ROOT_TAYLOR = (
    0.9676722454476212,
    -0.4427631689835921,
    0.258499760955651,
    -0.16394270544240652,
    0.10782405069126237,
    -0.07219956125645471,
    0.04880428816414311,
    -0.03316112647484736,
    0.022597648232218104,
    -0.01542476590494896,
    0.010538791616612175,
    -0.007204534386356869,
    0.004926781395729853,
    -0.003369801655439328,
    0.002305126326734928,
    -0.0015769367714301972,
)


def digamma(x: float) -> float:
    """Logarithmic derivative of Gamma.

    Uses upward recurrence into the asymptotic (Bernoulli) series, the
    reflection formula for negative arguments, and a Taylor expansion about
    the positive root so that relative accuracy survives near psi = 0.
    """
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"digamma has a pole at {x}")
    if x < 0.0:
        return digamma(1.0 - x) - math.pi * _cospi(x) / _sinpi(x)
    dx = (x - _DIGAMMA_ROOT_HI) - _DIGAMMA_ROOT_LO
    if abs(dx) < 0.1:
        acc = 0.0
        for coef in reversed(_DIGAMMA_ROOT_TAYLOR):
            acc = (acc + coef) * dx
        return acc
    shift = 0.0
    while x < 10.0:
        shift -= 1.0 / x
        x += 1.0
    inv2 = 1.0 / (x * x)
    tail = inv2 * (
        1.0 / 12
        - inv2 * (1.0 / 120
                  - inv2 * (1.0 / 252
                            - inv2 * (1.0 / 240
                                      - inv2 * (1.0 / 132
                                                - inv2 * (691.0 / 32760
                                                          - inv2 / 12.0)))))
    )
    return shift + math.log(x) - 0.5 / x - tail


def pochhammer(x: float, k: int) -> float:
    """Rising factorial x (x+1) ... (x+k-1); overflow gives +-inf."""
    if k < 0:
        raise ValueError("pochhammer needs k >= 0")
    acc = 1.0
    x = float(x)
    for i in range(k):
        acc *= x + i
        if math.isinf(acc):
            break
    return acc


# --------------------------------------------------------------------------
# Kummer M


def _kummer_series(z: float, a: float, b: float, with_abs: bool = False):
    """Sum of (a)_k/(b)_k z^k/k!; optionally also the sum of |terms|."""
    if _is_nonpositive_integer(b):
        raise PoleError(f"Kummer M undefined for beta = {b}")
    term = 1.0
    total = 1.0
    mag = 1.0
    prev_abs = 1.0
    for k in range(SERIES_CAP):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        t = abs(term)
        mag += t
        if term == 0.0:
            break
        # only stop once the terms are past their peak
        if k + 1 > abs(z) and k + 1 > abs(a) and t < SERIES_RATIO * abs(total):
            break
        prev_abs = t
    else:
        if abs(term) >= prev_abs:
            raise ConvergenceError(
                f"Kummer series still growing after {SERIES_CAP} terms (z={z})")
    if with_abs:
        return total, mag
    return total


def kummer_m(z: float, params: KummerParams) -> float:
    """Kummer function M(z; alpha, beta) by direct power-series summation."""
    z = float(z)
    if not math.isfinite(z):
        raise ValueError("z must be finite")
    return _kummer_series(z, params.alpha, params.beta)


# --------------------------------------------------------------------------
# Tricomi U: individual branches


def _nearest_integer_beta(beta) -> int | None:
    if isinstance(beta, int):
        return beta
    n = round(beta)
    if abs(beta - n) <= INTEGER_BETA_BAND:
        return int(n)
    return None


def _u_connection(z: float, a: float, b: float):
    """Connection formula through two Kummer series; returns (value, cancellation)."""
    m1, mag1 = _kummer_series(z, a, b, with_abs=True)
    m2, mag2 = _kummer_series(z, 1.0 + a - b, 2.0 - b, with_abs=True)
    c1 = gamma(1.0 - b) * rgamma(1.0 + a - b)
    c2 = z ** (1.0 - b) * gamma(b - 1.0) / gamma(a)
    t1 = c1 * m1
    t2 = c2 * m2
    value = math.fsum((t1, t2))
    scale = abs(c1) * mag1 + abs(c2) * mag2
    cancel = scale / abs(value) if value != 0.0 else math.inf
    return value, cancel


def _u_integer(z: float, a: float, n: int):
    """Logarithmic series for beta = n + 1 (n >= 0); returns (value, cancellation)."""
    pieces = []
    pref = (-1.0) ** (n + 1) / math.factorial(n) * rgamma(a - n)
    if pref != 0.0:
        logz = math.log(z)
        term = 1.0
        running = 0.0
        for k in range(SERIES_CAP):
            bracket = digamma(a + k) - digamma(1.0 + k) - digamma(1.0 + n + k)
            piece = pref * term * (logz + bracket)
            pieces.append(piece)
            running += piece
            term *= (a + k) / (n + 1 + k) * z / (k + 1)
            if term == 0.0:
                break
            if k + 1 > abs(z) and k + 1 > a and \
                    abs(piece) < SERIES_RATIO * abs(running):
                break
        else:
            raise ConvergenceError("integer-beta Tricomi series did not converge")
    if n >= 1:
        inv = 1.0 / gamma(a)
        for k in range(1, n + 1):
            coef = math.factorial(k - 1) * pochhammer(1.0 - a + k, n - k) / math.factorial(n - k)
            pieces.append(inv * coef * z ** (-k))
    value = math.fsum(pieces)
    scale = math.fsum(abs(v) for v in pieces)
    cancel = scale / abs(value) if value != 0.0 else math.inf
    return value, cancel


def _u_asymptotic_scaled(z: float, a: float, b: float):
    """z**a * U(z) from the inverse-power series; returns (sum, smallest |term|)."""
    c = a - b + 1.0
    term = 1.0
    total = 1.0
    smallest = 1.0
    for k in range(SERIES_CAP):
        nxt = term * (a + k) * (c + k) / ((k + 1) * -z)
        if abs(nxt) >= abs(term) and k > 0:
            break
        term = nxt
        total += term
        smallest = abs(term)
        if term == 0.0 or smallest < SERIES_RATIO * abs(total):
            break
    return total, smallest


def asymptotic_crossover(params: KummerParams) -> float:
    """Smallest z at which the inverse-power series is used directly."""
    a, b = params.alpha, params.beta
    return max(30.0, 4.0 * abs(a * (a - b + 1.0)), 4.0 * abs((a + 1.0) * (a - b + 1.0)))


def _u_asymptotic(z: float, a: float, b: float):
    s, small = _u_asymptotic_scaled(z, a, b)
    return z ** (-a) * s, small / abs(s)


def _u_continuation(z: float, a: float, b: float, z_start: float):
    """Carry (U, U') from z_start inward to z with Taylor steps of the Kummer ODE.

    U is the dominant solution in the inward direction, so errors picked up
    along the way in the M-direction decay.
    """
    for _ in range(12):
        s0, e0 = _u_asymptotic_scaled(z_start, a, b)
        s1, e1 = _u_asymptotic_scaled(z_start, a + 1.0, b + 1.0)
        if e0 <= 1e-14 * abs(s0) and e1 <= 1e-14 * abs(s1):
            break
        z_start *= 1.5
    else:
        raise AccuracyError("no accurate asymptotic starting point for continuation")
    # work with the scaled function w = z0**a * U to keep magnitudes O(1)
    z0 = z_start
    u = s0
    du = -a * s1 / z0
    scale_log = a * math.log(z0)
    while z0 > z:
        h = -min(z0 - z, z0 / 3.0)
        c_prev, c_cur = u, du
        total = c_prev + c_cur * h
        dtotal = c_cur
        hp = h
        n = 0
        small_count = 0
        while True:
            # a_{n+2} from a_{n+1}, a_n
            c_next = (-(n + 1) * (n + b - z0) * c_cur + (n + a) * c_prev) / (z0 * (n + 2) * (n + 1))
            hp_next = hp * h
            term = c_next * hp_next
            total += term
            dtotal += (n + 2) * c_next * hp
            c_prev, c_cur = c_cur, c_next
            hp = hp_next
            n += 1
            if abs(term) < 1e-18 * abs(total):
                small_count += 1
                if small_count >= 3:
                    break
            else:
                small_count = 0
            if n > 2000:
                raise AccuracyError("Taylor continuation did not converge")
        u, du = total, dtotal
        z0 = z0 + h
    return u * math.exp(-scale_log), du * math.exp(-scale_log)


# --------------------------------------------------------------------------
# Tricomi U: dispatch

_BRANCHES = ("connection", "integer", "asymptotic", "continuation")


def _select(z: float, params: KummerParams):
    a, b = params.alpha, params.beta
    z_asym = asymptotic_crossover(params)
    if z >= z_asym:
        value, err = _u_asymptotic(z, a, b)
        if err <= 1e-13:
            return value, "asymptotic"
    n = _nearest_integer_beta(b)
    if n is not None and n >= 1:
        value, cancel = _u_integer(z, a, n - 1)
        branch = "integer"
    else:
        value, cancel = _u_connection(z, a, b)
        branch = "connection"
    if cancel <= CANCELLATION_LIMIT and math.isfinite(value):
        return value, branch
    try:
        return _u_continuation(z, a, b, max(z_asym, z))[0], "continuation"
    except AccuracyError as exc:
        raise AccuracyError(f"no branch of tricomi_u reaches tolerance at z={z}") from exc


def tricomi_u(z: float, params: KummerParams, method: str | None = None) -> float:
    """Tricomi confluent hypergeometric function U(z; alpha, beta) for z > 0.

    ``method`` forces one branch (``connection``, ``integer``, ``asymptotic``
    or ``continuation``); by default the branch is chosen automatically.
    """
    z = float(z)
    if not z > 0.0:
        raise ValueError(f"tricomi_u needs z > 0, got {z}")
    if not params.alpha > 0.0:
        raise ValueError(f"tricomi_u needs alpha > 0, got {params.alpha}")
    if method is None:
        return _select(z, params)[0]
    a, b = params.alpha, params.beta
    if method == "connection":
        return _u_connection(z, a, float(b))[0]
    if method == "integer":
        n = _nearest_integer_beta(b)
        if n is None or n < 1:
            raise ValueError(f"beta = {b} is not a positive integer")
        return _u_integer(z, a, n - 1)[0]
    if method == "asymptotic":
        return _u_asymptotic(z, a, b)[0]
    if method == "continuation":
        return _u_continuation(z, a, b, max(asymptotic_crossover(params), z))[0]
    raise ValueError(f"unknown method {method!r}; expected one of {_BRANCHES}")


def connection_cancellation(z: float, params: KummerParams) -> float:
    """Cancellation factor sum(|terms|)/|sum| of the connection formula at z."""
    return _u_connection(float(z), params.alpha, float(params.beta))[1]


def asymptotic_remainder(z: float, params: KummerParams) -> float:
    """Relative size of the smallest retained term of the inverse-power series."""
    return _u_asymptotic(float(z), params.alpha, params.beta)[1]


def tricomi_branch(z: float, params: KummerParams) -> str:
    """Name of the branch the automatic dispatch uses at z."""
    return _select(float(z), params)[1]


def tricomi_u_prime(z: float, params: KummerParams) -> float:
    """dU/dz = -alpha U(z; alpha+1, beta+1)."""
    shifted = KummerParams(params.alpha + 1.0, params.beta + 1)
    return -params.alpha * tricomi_u(z, shifted)


def log_tricomi_u(z: float, params: KummerParams) -> float:
    """log U(z; alpha, beta), usable far beyond the range where U underflows."""
    z = float(z)
    if z >= asymptotic_crossover(params):
        s, small = _u_asymptotic_scaled(z, params.alpha, params.beta)
        if small <= 1e-13 * abs(s) and s > 0.0:
            return -params.alpha * math.log(z) + math.log(s)
    return math.log(tricomi_u(z, params))
