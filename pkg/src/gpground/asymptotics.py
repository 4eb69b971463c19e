"""Large-amplitude laws for lambda(b) and c(b) and the moments behind them.

Three regimes, keyed on p against 1/2:

    p < 1/2      lambda ~ C_p b^{-2p}
    p = 1/2      lambda ~ C_p b^{-1} log b
    1/2 < p < 1  lambda ~ C_p b^{-2(1-p)}

and c(b) ~ A_p / b in all of them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from . import specfun
from .profiles import CriticalParams

__all__ = [
    "Branch",
    "AsymptoticLaw",
    "DivergenceError",
    "branch_of",
    "constant_C",
    "constant_A",
    "asym_lambda",
    "homoclinic_moment",
    "lambda_leading_subhalf",
    "law",
]


class Branch(str, Enum):
    SUB_HALF = "SubHalf"
    HALF = "Half"
    SUPER_HALF = "SuperHalf"


class DivergenceError(ValueError):
    pass


@dataclass(frozen=True)
class AsymptoticLaw:
    """Leading-order description of lambda(b) and c(b) for one p.

    ``exponent`` is the power of b; ``log_factor`` marks the extra log b.
    """

    p: float
    branch: Branch
    C_p: float
    A_p: float
    exponent: float
    log_factor: bool

    @property
    def formula(self) -> str:
        if self.log_factor:
            return f"{self.C_p:.10g} * b^-1 * log(b)"
        return f"{self.C_p:.10g} * b^{self.exponent:.10g}"


def _check_open_unit(params: CriticalParams) -> None:
    if not params.p < 1:
        raise ValueError("asymptotic laws need p < 1; p = 1 is solvable but has no leading law here")


def branch_of(params: CriticalParams) -> Branch:
    return {-1: Branch.SUB_HALF, 0: Branch.HALF, 1: Branch.SUPER_HALF}[params.compare_half()]


def constant_C(params: CriticalParams) -> float:
    """Prefactor C_p of the lambda(b) law."""
    _check_open_unit(params)
    p = params.pf
    branch = branch_of(params)
    if branch is Branch.HALF:
        return 144.0
    if branch is Branch.SUB_HALF:
        return 8.0 * (1.0 + p) ** 2 / (p * p * (1.0 - 2.0 * p))
    g = specfun.gamma
    num = g((p + 1.0) / (2.0 * p)) * g(-1.0 / p) * g(2.0 / p)
    den = ((1.0 + p) * g((p - 1.0) / (2.0 * p)) * g(1.0 / p)
           * g(1.0 / p - 1.0) * g(1.0 / p + 1.0))
    return -num / den * (4.0 * (1.0 + p) / (p * p)) ** (1.0 / p)


def constant_A(params: CriticalParams) -> float:
    """A_p = alpha_p^{-1/p} Gamma((p+1)/(2p)) / Gamma(1/p), the lam -> 0 far-field amplitude."""
    _check_open_unit(params)
    p = params.pf
    return (params.alpha_p ** (-1.0 / p) * specfun.gamma((p + 1.0) / (2.0 * p))
            / specfun.gamma(1.0 / p))


def asym_lambda(b: float, params: CriticalParams) -> float:
    """Leading-order lambda(b)."""
    if not b > 1.0:
        raise ValueError("asym_lambda needs b > 1")
    c = constant_C(params)
    p = params.pf
    branch = branch_of(params)
    if branch is Branch.HALF:
        return c * math.log(b) / b
    if branch is Branch.SUB_HALF:
        return c * b ** (-2.0 * p)
    return c * b ** (-2.0 * (1.0 - p))


def homoclinic_moment(k: int, params: CriticalParams) -> float:
    """Integral over the real line of e^{kt} Theta_h(t)^2, k in {2, 4}.

    Substituting s = alpha_p e^{2t} turns it into a Beta integral,
    B(k/2 + 1/p, 1/p - k/2) / (2 alpha_p^{k/2 + 1/p}), finite iff k/2 < 1/p.
    """
    if k not in (2, 4):
        raise ValueError("only the k = 2 and k = 4 moments are supported")
    q = params.p
    inv = 1 / q
    if not inv - k // 2 > 0:
        raise DivergenceError(f"moment k={k} diverges for p={params.label()} (needs p < {2 / k:g})")
    p = params.pf
    a = k / 2.0 + 1.0 / p
    bb = 1.0 / p - k / 2.0
    g = specfun.gamma
    return g(a) * g(bb) / (2.0 * params.alpha_p ** a * g(2.0 / p))


def lambda_leading_subhalf(b: float, params: CriticalParams) -> float:
    """2(1+p) / (alpha_p (1-2p)) * b^{-2p}, the sub-half leading term."""
    if branch_of(params) is not Branch.SUB_HALF:
        raise ValueError("the sub-half leading term needs 0 < p < 1/2")
    if not b > 1.0:
        raise ValueError("lambda_leading_subhalf needs b > 1")
    p = params.pf
    return 2.0 * (1.0 + p) / (params.alpha_p * (1.0 - 2.0 * p)) * b ** (-2.0 * p)


def law(params: CriticalParams) -> AsymptoticLaw:
    branch = branch_of(params)
    p = params.pf
    exponent = {Branch.SUB_HALF: -2.0 * p, Branch.HALF: -1.0,
                Branch.SUPER_HALF: -2.0 * (1.0 - p)}[branch]
    return AsymptoticLaw(p=p, branch=branch, C_p=constant_C(params), A_p=constant_A(params),
                         exponent=exponent, log_factor=branch is Branch.HALF)
