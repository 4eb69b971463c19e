"""Shooting solver for the radial ground state.

The radial profile f(r) solves

    f'' + (d-1)/r f' - r^2 f + lam f + |f|^{2p} f = 0,   f(0) = b, f'(0) = 0,

and the ground state is the value lam(b) for which f stays positive and
decays. A trial lam is classified by the first event along the trajectory:
f reaching zero (lam too large) or f' turning positive (lam too small).
Bisection on lam isolates the connection; the far-field amplitude c is read
off by dividing the decaying profile by e^{-r^2/2} U(r^2; alpha, beta).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _backend, specfun
from .profiles import CriticalParams

__all__ = [
    "ShootingError",
    "StepUnderflowError",
    "AmbiguityError",
    "BracketError",
    "NonConvergenceError",
    "WindowError",
    "InstabilityError",
    "IntegratorSettings",
    "Trajectory",
    "ShotTag",
    "ShotClass",
    "GroundState",
    "rhs_radial",
    "series_start",
    "start_radius",
    "stop_radius",
    "decay_floor",
    "integrate_ivp",
    "classify",
    "solve_lambda",
    "extract_c",
    "sample_profile",
    "write_profile_csv",
]

LAMBDA_EDGE = 1e-14
MAX_BISECTIONS = 200
C_WINDOW_MIN_POINTS = 8
C_SPREAD_LIMIT = 0.05
HORIZON_EXTENSIONS = (0.0, 2.0, 4.0)


class ShootingError(RuntimeError):
    pass


class StepUnderflowError(ShootingError):
    pass


class AmbiguityError(ShootingError):
    pass


class BracketError(ShootingError):
    pass


class NonConvergenceError(ShootingError):
    pass


class WindowError(ShootingError):
    pass


class InstabilityError(ShootingError):
    pass


@dataclass(frozen=True)
class IntegratorSettings:
    """Step control for the Dormand-Prince 5(4) kernel.

    The error of each step is measured against ``atol + rtol * |state|``
    with |state| the max-norm of (f, f') before and after the step. The
    absolute part defaults to zero because the far field is tiny and is
    exactly where the amplitude c is read off.
    """

    rtol: float = 1e-11
    atol: float = 0.0
    max_steps: int = 500_000
    # amplitudes above this are integrated in Emden-Fowler time for r < r_switch
    ef_threshold: float = 1e3
    r_switch: float = 1.0

    def tightened(self, factor: float) -> "IntegratorSettings":
        return IntegratorSettings(self.rtol * factor, self.atol * factor,
                                  self.max_steps * 4, self.ef_threshold, self.r_switch)


@dataclass(frozen=True)
class Trajectory:
    """Radial samples of one shot, truncated at its classifying event.

    ``event`` is the kernel status; ``f_end``/``fp_end`` are the state at
    ``r_end`` (the event point, which is not part of the stored grid when it
    breaks positivity or monotonicity). ``probe_r`` holds radii at which the
    integrator landed exactly, with values in ``probe_f``/``probe_fp`` (NaN
    where the shot stopped earlier).
    """

    r_grid: np.ndarray
    f: np.ndarray
    f_prime: np.ndarray
    r_end: float
    steps: int
    tol_used: tuple[float, float]
    b: float = math.nan
    lam: float = math.nan
    event: int = _backend.END
    f_end: float = math.nan
    fp_end: float = math.nan
    floor: float = 0.0
    probe_r: np.ndarray = field(default_factory=lambda: np.empty(0))
    probe_f: np.ndarray = field(default_factory=lambda: np.empty(0))
    probe_fp: np.ndarray = field(default_factory=lambda: np.empty(0))


class ShotTag(str, Enum):
    OVERSHOOT = "Overshoot"
    UNDERSHOOT = "Undershoot"
    CONVERGED = "Converged"


@dataclass(frozen=True)
class ShotClass:
    tag: ShotTag
    witness_r: float


@dataclass(frozen=True)
class GroundState:
    """One converged solve. ``lam`` is the eigenvalue lambda(b)."""

    b: float
    lam: float
    c: float
    profile: Trajectory
    lambda_bracket_width: float
    c_spread: float
    params: CriticalParams | None = None
    bracket: tuple[float, float] = (math.nan, math.nan)
    shots: int = 0
    c_window: tuple[float, float, int] = (math.nan, math.nan, 0)


def rhs_radial(r: float, f: float, f_prime: float, lam: float,
               params: CriticalParams) -> tuple[float, float]:
    """Right-hand side of the first-order radial system."""
    if not r > 0.0:
        raise ValueError("rhs_radial needs r > 0; start from series_start instead")
    nl = abs(f) ** (2.0 * params.pf) if f != 0.0 else 0.0
    return f_prime, -(params.d - 1.0) / r * f_prime + (r * r - lam - nl) * f


def series_start(b: float, lam: float, r0: float,
                 params: CriticalParams) -> tuple[float, float]:
    """Two-term Taylor start f = b(1 - k r0^2), f' = -2 b k r0."""
    p = params.pf
    k = p * (lam + b ** (2.0 * p)) / (4.0 * (p + 1.0))
    return b * (1.0 - k * r0 * r0), -2.0 * b * k * r0


def start_radius(b: float, params: CriticalParams) -> float:
    return min(1e-3, 1e-3 * b ** (-params.pf))


def stop_radius(params: CriticalParams) -> float:
    return max(6.0, math.sqrt(2.0 * (params.d + 5.0)))


def decay_floor(b: float) -> float:
    return 1e-12 * b


def integrate_ivp(b: float, lam: float, params: CriticalParams,
                  ctrl: IntegratorSettings | None = None, *, store: bool = True,
                  probe_r=None, r_stop: float | None = None) -> Trajectory:
    """Integrate from the series start to the first event or ``r_stop``.

    With ``store=False`` only the endpoints are kept, which is all the
    bisection needs.
    """
    if not b > 0.0:
        raise ValueError("b must be positive")
    ctrl = ctrl or IntegratorSettings()
    r0 = start_radius(b, params)
    f0, fp0 = series_start(b, lam, r0, params)
    r_stop = stop_radius(params) if r_stop is None else r_stop
    r_switch = ctrl.r_switch if b > ctrl.ef_threshold else 0.0
    probe = np.asarray([] if probe_r is None else probe_r, dtype=float)
    floor = decay_floor(b)
    (status, nsteps, r_end, f_end, fp_end, rs, fs, fps,
     out_f, out_fp) = _backend.integrate(
        float(lam), params.pf, params.d, r0, f0, fp0, r_switch, r_stop,
        ctrl.rtol, ctrl.atol, 0.0, ctrl.max_steps, floor, store, probe)
    if status == _backend.UNDERFLOW:
        raise StepUnderflowError(f"step size underflow at r={r_end:.6g} (b={b:g}, lam={lam!r})")
    if status == _backend.MAXSTEPS:
        raise StepUnderflowError(f"step budget {ctrl.max_steps} exhausted at r={r_end:.6g}")
    if store:
        r_grid = np.asarray(rs, dtype=float)
        f = np.asarray(fs, dtype=float)
        fp = np.asarray(fps, dtype=float)
        if status in (_backend.OVERSHOOT, _backend.UNDERSHOOT) and len(r_grid) > 2:
            # drop the event point itself
            r_grid, f, fp = r_grid[:-1], f[:-1], fp[:-1]
    else:
        r_grid = np.array([r0, r_end])
        f = np.array([f0, f_end])
        fp = np.array([fp0, fp_end])
    return Trajectory(r_grid, f, fp, float(r_end), int(nsteps), (ctrl.atol, ctrl.rtol),
                      b=float(b), lam=float(lam), event=int(status), f_end=float(f_end),
                      fp_end=float(fp_end), floor=floor, probe_r=probe,
                      probe_f=np.asarray(out_f, dtype=float),
                      probe_fp=np.asarray(out_fp, dtype=float))


def classify(traj: Trajectory, params: CriticalParams) -> ShotClass:
    """Overshoot, Undershoot or Converged; AmbiguityError otherwise."""
    if traj.event == _backend.OVERSHOOT:
        return ShotClass(ShotTag.OVERSHOOT, traj.r_end)
    if traj.event == _backend.UNDERSHOOT:
        return ShotClass(ShotTag.UNDERSHOOT, traj.r_end)
    if abs(traj.f_end) <= traj.floor and traj.f_end > 0.0 and traj.fp_end < 0.0:
        return ShotClass(ShotTag.CONVERGED, traj.r_end)
    raise AmbiguityError(
        f"shot ended at r={traj.r_end:.6g} with f={traj.f_end:.3e} above the decay floor "
        f"{traj.floor:.3e} and no crossing (lam={traj.lam!r})")


def _c_probe_radii(params: CriticalParams) -> np.ndarray:
    return np.linspace(2.0, stop_radius(params), 161)


def solve_lambda(b: float, params: CriticalParams, tol_lambda: float = 1e-10,
                 ctrl: IntegratorSettings | None = None, *,
                 with_c: bool = True) -> GroundState:
    """Bisect on lam in (0, d) for the ground state of amplitude b.

    After the bracket is narrower than ``tol_lambda`` bisection continues
    until the midpoint can no longer be classified or the bracket collapses
    to adjacent doubles. The extra steps cost little and push the radius at
    which the two bracketing shots separate far enough out that the
    far-field amplitude can be read off between them.
    """
    if not b > 0.0:
        raise ValueError("b must be positive")
    if not tol_lambda > 0.0:
        raise ValueError("tol_lambda must be positive")
    ctrl = ctrl or IntegratorSettings()
    probe = _c_probe_radii(params) if with_c else None
    shots = 0

    r_stop = stop_radius(params)

    def shoot(lam):
        nonlocal shots
        # a shot still positive and decaying at r_stop but above the floor is
        # re-run on a longer horizon, for classification only
        for extra in HORIZON_EXTENSIONS:
            shots += 1
            traj = integrate_ivp(b, lam, params, ctrl, store=False, probe_r=probe,
                                 r_stop=r_stop + extra)
            try:
                return classify(traj, params).tag, traj
            except AmbiguityError:
                continue
        return None, traj

    lo, hi = LAMBDA_EDGE, params.d - LAMBDA_EDGE
    tag_lo, traj_lo = shoot(lo)
    tag_hi, traj_hi = shoot(hi)
    if tag_lo is None or tag_hi is None or tag_lo == tag_hi or ShotTag.CONVERGED in (tag_lo, tag_hi):
        raise BracketError(f"initial bracket does not separate: lam={lo:g} -> {tag_lo}, "
                           f"lam={hi:g} -> {tag_hi} (b={b:g})")
    # orientation is read off, not assumed
    low_tag = tag_lo

    steps = 0
    while hi - lo > tol_lambda:
        if steps >= MAX_BISECTIONS:
            raise NonConvergenceError(f"no convergence after {MAX_BISECTIONS} bisections (b={b:g})")
        steps += 1
        mid = 0.5 * (lo + hi)
        tag, traj = shoot(mid)
        if tag is None or tag == ShotTag.CONVERGED:
            # midpoint already resolved beyond integrator noise: bracket it tightly
            half = 0.5 * tol_lambda
            tag_a, traj_a = shoot(max(lo, mid - half))
            tag_b, traj_b = shoot(min(hi, mid + half))
            if tag_a == low_tag and tag_b not in (None, ShotTag.CONVERGED, low_tag):
                lo, traj_lo, hi, traj_hi = max(lo, mid - half), traj_a, min(hi, mid + half), traj_b
                break
            raise NonConvergenceError(f"cannot classify around lam={mid!r} (b={b:g})")
        if tag == low_tag:
            lo, traj_lo = mid, traj
        else:
            hi, traj_hi = mid, traj

    # refinement towards machine precision
    while steps < MAX_BISECTIONS:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        tag, traj = shoot(mid)
        steps += 1
        if tag is None or tag == ShotTag.CONVERGED:
            break
        if tag == low_tag:
            lo, traj_lo = mid, traj
        else:
            hi, traj_hi = mid, traj

    lam = 0.5 * (lo + hi)
    profile = integrate_ivp(b, lam, params, ctrl, store=True, probe_r=probe)
    shots += 1
    c = spread = math.nan
    window = (math.nan, math.nan, 0)
    if with_c:
        c, spread, window = _extract_c(profile, lam, params, (traj_lo, traj_hi))
    return GroundState(b=float(b), lam=lam, c=c, profile=profile,
                       lambda_bracket_width=hi - lo, c_spread=spread, params=params,
                       bracket=(lo, hi), shots=shots, c_window=window)


def _far_field_log_shape(r: float, kp: specfun.KummerParams) -> float:
    return -0.5 * r * r + specfun.log_tricomi_u(r * r, kp)


def _extract_c(profile: Trajectory, lam: float, params: CriticalParams,
               partners=(), *, nl_tol: float = 1e-4, agree_tol: float = 1e-5,
               r_min: float = 2.0):
    if profile.probe_r.size and np.any(np.isfinite(profile.probe_f)):
        r = profile.probe_r
        f = profile.probe_f
    else:
        r, f = profile.r_grid, profile.f
    r_stop = stop_radius(params)
    mask = (r >= r_min) & (r <= r_stop) & np.isfinite(f) & (f > 0.0)
    with np.errstate(invalid="ignore"):
        mask &= np.abs(f) ** (2.0 * params.pf) <= nl_tol * (r * r + abs(lam))
    for other in partners:
        if other.probe_r.shape != r.shape or not np.array_equal(other.probe_r, r):
            raise ValueError("partner trajectories must share the probe radii")
        with np.errstate(invalid="ignore"):
            mask &= np.isfinite(other.probe_f)
            mask &= np.abs(other.probe_f - f) <= agree_tol * np.abs(f)
    n = int(mask.sum())
    if n < C_WINDOW_MIN_POINTS:
        raise WindowError(f"only {n} usable far-field radii (need {C_WINDOW_MIN_POINTS}); "
                          f"profile ends at r={profile.r_end:.4g}")
    kp = params.kummer(lam)
    rw = r[mask]
    ratios = np.array([math.exp(math.log(fv) - _far_field_log_shape(rv, kp))
                       for rv, fv in zip(rw, f[mask])])
    c = float(np.mean(ratios))
    spread = float(np.max(ratios) - np.min(ratios))
    if spread > C_SPREAD_LIMIT * abs(c):
        raise InstabilityError(f"far-field ratio spread {spread:.3e} exceeds "
                               f"{C_SPREAD_LIMIT:g}|c| with c={c:.6e}")
    return c, spread, (float(rw[0]), float(rw[-1]), n)


def extract_c(profile: Trajectory, lam: float, params: CriticalParams,
              partners=(), *, nl_tol: float = 1e-4, agree_tol: float = 1e-5,
              r_min: float = 2.0) -> tuple[float, float]:
    """Far-field amplitude c and its spread over the matching window.

    The window keeps radii in [r_min, r_stop] where the nonlinear term is
    below ``nl_tol`` relative to r^2 + |lam| and, when bracketing partner
    shots are given, where they agree with ``profile`` to ``agree_tol``.
    """
    c, spread, _ = _extract_c(profile, lam, params, partners, nl_tol=nl_tol,
                              agree_tol=agree_tol, r_min=r_min)
    return c, spread


def sample_profile(state: GroundState, r_values, ctrl: IntegratorSettings | None = None):
    """Re-integrate at the converged lam and land exactly on ``r_values``.

    Returns ``(f, f')`` arrays; NaN beyond the point where the shot left
    the ground state.
    """
    params = state.params
    r_values = np.asarray(r_values, dtype=float)
    order = np.argsort(r_values)
    traj = integrate_ivp(state.b, state.lam, params, ctrl, store=False,
                         probe_r=r_values[order])
    f = np.empty_like(r_values)
    fp = np.empty_like(r_values)
    f[order] = traj.probe_f
    fp[order] = traj.probe_fp
    return f, fp


def write_profile_csv(traj: Trajectory, path) -> None:
    """Write ``r,f,fp`` rows with 17 significant digits."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r", "f", "fp"])
        for r, f, fp in zip(traj.r_grid, traj.f, traj.f_prime):
            w.writerow([f"{r:.17g}", f"{f:.17g}", f"{fp:.17g}"])
