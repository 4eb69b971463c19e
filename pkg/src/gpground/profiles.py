"""Closed-form reference profiles and the Emden-Fowler change of variables."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from . import specfun
from .specfun import KummerParams

__all__ = [
    "CriticalParams",
    "parse_p",
    "algebraic_soliton",
    "algebraic_soliton_prime",
    "soliton_pde_residual",
    "homoclinic",
    "homoclinic_energy",
    "upsilon_h",
    "log_upsilon_h",
    "emden_fowler_forward",
    "emden_fowler_inverse",
]

PLike = Union[Fraction, float, int, str]

# tolerance band for comparing a floating p against rational landmarks
P_BAND = 1e-12


def parse_p(value: PLike) -> Fraction | float:
    """Accept ``"num/den"`` (kept exact), ints, Fractions or floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            return Fraction(int(num), int(den))
        try:
            return Fraction(int(text))
        except ValueError:
            return float(text)
    return float(value)


@dataclass(frozen=True)
class CriticalParams:
    """Critical exponent p with derived dimension d and soliton constant."""

    p: Fraction | float

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))
        if not 0 < self.p <= 1:
            raise ValueError(f"p must lie in (0, 1], got {self.p}")

    @property
    def pf(self) -> float:
        return float(self.p)

    @property
    def d(self) -> float:
        return float(2 + 2 / self.p) if isinstance(self.p, Fraction) else 2.0 + 2.0 / self.p

    @property
    def alpha_p(self) -> float:
        p = self.p
        return float(p * p / (4 * (1 + p)))

    @property
    def is_exact(self) -> bool:
        return isinstance(self.p, Fraction)

    @property
    def inverse_integer(self) -> int | None:
        """n when p = 1/n (exactly for rationals, within P_BAND for floats)."""
        if self.is_exact:
            inv = 1 / self.p
            return int(inv) if inv.denominator == 1 else None
        inv = 1.0 / self.p
        n = round(inv)
        return int(n) if abs(inv - n) <= P_BAND * max(1.0, inv) else None

    def compare_half(self) -> int:
        """-1, 0 or +1 as p is below, at or above 1/2."""
        if self.is_exact:
            diff = self.p - Fraction(1, 2)
            return (diff > 0) - (diff < 0)
        diff = self.p - 0.5
        if abs(diff) <= P_BAND:
            return 0
        return 1 if diff > 0 else -1

    def kummer(self, lam: float) -> KummerParams:
        return KummerParams.from_critical(self, lam)

    def label(self) -> str:
        if self.is_exact:
            return str(self.p)
        return repr(self.p)


def _log1p_exp(x: float) -> float:
    """log(1 + e^x) without overflow."""
    if x > 0.0:
        return x + math.log1p(math.exp(-x))
    return math.log1p(math.exp(x))


def _soliton_log_arg(r: float, b: float, params: CriticalParams) -> float:
    # log(alpha_p b^{2p} r^2)
    return math.log(params.alpha_p) + 2.0 * params.pf * math.log(b) + 2.0 * math.log(r)


def algebraic_soliton(r: float, b: float, params: CriticalParams) -> float:
    """Aubin-Talenti profile U_b(r) = b (1 + alpha_p b^{2p} r^2)^{-1/p}."""
    if r == 0.0:
        return float(b)
    return math.exp(math.log(b) - _log1p_exp(_soliton_log_arg(r, b, params)) / params.pf)


def algebraic_soliton_prime(r: float, b: float, params: CriticalParams) -> float:
    """dU_b/dr."""
    if r == 0.0:
        return 0.0
    x = _soliton_log_arg(r, b, params)
    u = algebraic_soliton(r, b, params)
    # U' = -(2/p) U * s / r with s = X/(1+X), X = alpha b^{2p} r^2
    s = 1.0 / (1.0 + math.exp(-x)) if x > -700 else 0.0
    return -2.0 / params.pf * u * s / r


def soliton_pde_residual(r: float, b: float, params: CriticalParams, h: float) -> float:
    """Residual -(U'' + (d-1)/r U') - U^{2p+1} with central differences of step h."""
    if not (h > 0.0 and r > 2.0 * h):
        raise ValueError("need h > 0 and r > 2h")
    um = algebraic_soliton(r - h, b, params)
    u0 = algebraic_soliton(r, b, params)
    up = algebraic_soliton(r + h, b, params)
    upp = (up - 2.0 * u0 + um) / (h * h)
    up1 = (up - um) / (2.0 * h)
    return -(upp + (params.d - 1.0) / r * up1) - u0 ** (2.0 * params.pf + 1.0)


def homoclinic(t: float, params: CriticalParams) -> tuple[float, float]:
    """Homoclinic orbit Theta_h(t) = e^{t/p} (1 + alpha_p e^{2t})^{-1/p} and its derivative."""
    p = params.pf
    x = 2.0 * t + math.log(params.alpha_p)
    theta = math.exp(t / p - _log1p_exp(x) / p)
    s = 1.0 / (1.0 + math.exp(-x)) if x > -700 else 0.0
    return theta, theta / p * (1.0 - 2.0 * s)


def homoclinic_energy(theta: float, theta_prime: float, params: CriticalParams) -> float:
    """First integral of Theta'' - Theta/p^2 + |Theta|^{2p} Theta = 0."""
    p = params.pf
    return (0.5 * theta_prime ** 2 - theta ** 2 / (2.0 * p * p)
            + abs(theta) ** (2.0 * (p + 1.0)) / (2.0 * (p + 1.0)))


def log_upsilon_h(t: float, lam: float, params: CriticalParams) -> float:
    """log of the decaying linear far-field solution in Emden-Fowler time."""
    if not lam < params.d:
        raise ValueError("upsilon_h needs lam < d")
    z = math.exp(2.0 * t)
    return t / params.pf - 0.5 * z + specfun.log_tricomi_u(z, params.kummer(lam))


def upsilon_h(t: float, lam: float, params: CriticalParams) -> float:
    """Upsilon_h(t) = e^{t/p} e^{-e^{2t}/2} U(e^{2t}; alpha, beta).

    For t > 2 the value is assembled in log space; it underflows to 0.0 only
    once the true value is below the smallest double.
    """
    if t > 2.0:
        return math.exp(log_upsilon_h(t, lam, params))
    if not lam < params.d:
        raise ValueError("upsilon_h needs lam < d")
    z = math.exp(2.0 * t)
    return math.exp(t / params.pf - 0.5 * z) * specfun.tricomi_u(z, params.kummer(lam))


def emden_fowler_forward(r: float, f: float, f_prime: float,
                         params: CriticalParams) -> tuple[float, float, float]:
    """(r, f, f') -> (t, Psi, Psi') with r = e^t, Psi = r^{1/p} f."""
    if not r > 0.0:
        raise ValueError("Emden-Fowler transform needs r > 0")
    p = params.pf
    w = r ** (1.0 / p)
    return math.log(r), w * f, w * (f / p + r * f_prime)


def emden_fowler_inverse(t: float, psi: float, psi_prime: float,
                         params: CriticalParams) -> tuple[float, float, float]:
    """(t, Psi, Psi') -> (r, f, f')."""
    p = params.pf
    r = math.exp(t)
    w = math.exp(-t / p)
    return r, w * psi, w * (psi_prime - psi / p) / r
