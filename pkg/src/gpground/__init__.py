"""Positive radial ground states of the trapped critical nonlinear Schroedinger equation."""

from ._backend import NAME as KERNEL
from .asymptotics import asym_lambda, constant_A, constant_C, homoclinic_moment, law
from .profiles import CriticalParams
from .shooting import GroundState, IntegratorSettings, integrate_ivp, solve_lambda

__all__ = [
    "KERNEL",
    "CriticalParams",
    "GroundState",
    "IntegratorSettings",
    "integrate_ivp",
    "solve_lambda",
    "asym_lambda",
    "constant_A",
    "constant_C",
    "homoclinic_moment",
    "law",
]
__version__ = "0.1.0"
