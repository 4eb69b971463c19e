"""Sweeps over b, power-law fits, pointwise-bound audits and persistence."""

from __future__ import annotations

import csv
import json
import math
import os
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import _backend, specfun
from .profiles import CriticalParams, algebraic_soliton
from .shooting import GroundState, IntegratorSettings, solve_lambda

__all__ = [
    "SweepRecord",
    "SweepError",
    "FitResult",
    "DegenerateDesignError",
    "BoundReport",
    "CoverageError",
    "geometric_grid",
    "sweep",
    "fit_power_law",
    "audit_bounds",
    "default_audit_a",
    "write_sweep_csv",
    "read_sweep_csv",
    "write_manifest",
    "resolve_jobs",
]

SWEEP_COLUMNS = ("b", "lambda", "c", "bracket", "c_spread", "status", "wall_ms")


@dataclass(frozen=True)
class SweepRecord:
    b: float
    lam: float
    c: float
    lambda_bracket_width: float
    c_spread: float
    wall_time_ms: float
    status: str = "ok"
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"


class SweepError(RuntimeError):
    """Raised after a sweep in which some solves failed; keeps every record."""

    def __init__(self, records: list[SweepRecord]):
        self.records = records
        failed = [r for r in records if not r.ok]
        lines = "; ".join(f"b={r.b:.17g}: {r.error}" for r in failed)
        super().__init__(f"{len(failed)} of {len(records)} solves failed: {lines}")


def geometric_grid(b_min: float, b_max: float, per_decade: int = 25) -> np.ndarray:
    """Geometric grid including both ends, ``per_decade`` intervals per decade."""
    if not 0 < b_min < b_max:
        raise ValueError("need 0 < b_min < b_max")
    n = max(1, round(per_decade * math.log10(b_max / b_min)))
    return np.geomspace(b_min, b_max, n + 1)


def resolve_jobs(jobs: int | None) -> int:
    env = os.environ.get("GPE_JOBS")
    if env:
        return max(1, int(env))
    if jobs is None:
        return os.cpu_count() or 1
    return max(1, int(jobs))


def _solve_record(b: float, params: CriticalParams, tol: float,
                  ctrl: IntegratorSettings | None) -> SweepRecord:
    t0 = time.perf_counter()
    try:
        gs = solve_lambda(b, params, tol, ctrl)
    except Exception as exc:  # recorded, never dropped
        ms = (time.perf_counter() - t0) * 1e3
        return SweepRecord(b, math.nan, math.nan, math.nan, math.nan, ms, "failed",
                           f"{type(exc).__name__}: {exc}")
    ms = (time.perf_counter() - t0) * 1e3
    return SweepRecord(b, gs.lam, gs.c, gs.lambda_bracket_width, gs.c_spread, ms)


def sweep(params: CriticalParams, b_values, tol: float = 1e-10, *, jobs: int | None = None,
          ctrl: IntegratorSettings | None = None, strict: bool = True) -> list[SweepRecord]:
    """One independent solve per b, results in input order.

    With ``strict`` a :class:`SweepError` carrying all records is raised if
    any solve failed; otherwise failed rows come back tagged.
    """
    b_values = [float(b) for b in b_values]
    if any(not b > 0 for b in b_values):
        raise ValueError("b values must be positive")
    if any(b2 < b1 for b1, b2 in zip(b_values, b_values[1:])):
        raise ValueError("b values must be sorted ascending")
    n_jobs = resolve_jobs(jobs)
    if n_jobs == 1 or len(b_values) <= 1:
        records = [_solve_record(b, params, tol, ctrl) for b in b_values]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            records = list(pool.map(lambda b: _solve_record(b, params, tol, ctrl), b_values))
    if strict and any(not r.ok for r in records):
        raise SweepError(records)
    return records


# --- fitting -----------------------------------------------------------------

class DegenerateDesignError(ValueError):
    pass


@dataclass(frozen=True)
class FitResult:
    """log y = slope * log b + log_prefactor, with y = lambda (pure-power)
    or y = lambda / log b (power-times-log)."""

    slope: float
    log_prefactor: float
    r_squared: float
    b_range: tuple[float, float]
    model: str
    n: int

    @property
    def prefactor(self) -> float:
        return math.exp(self.log_prefactor)


FIT_MODELS = ("pure-power", "power-times-log")


def fit_power_law(records, model: str = "pure-power") -> FitResult:
    """Least-squares log-log fit over the successful records."""
    if model not in FIT_MODELS:
        raise ValueError(f"model must be one of {FIT_MODELS}")
    rows = [r for r in records if r.ok]
    if len(rows) < 5:
        raise ValueError(f"need at least 5 successful records, got {len(rows)}")
    b = np.array([r.b for r in rows])
    lam = np.array([r.lam for r in rows])
    if np.any(lam <= 0):
        raise ValueError("all lambda values must be positive for a log fit")
    if math.log10(b.max() / b.min()) < 1.0 - 1e-12:
        raise DegenerateDesignError("b range spans less than one decade")
    x = np.log(b)
    if model == "power-times-log":
        if np.any(b <= 1.0):
            raise ValueError("power-times-log needs b > 1")
        y = np.log(lam / np.log(b))
    else:
        y = np.log(lam)
    (slope, intercept), *_ = np.linalg.lstsq(np.column_stack([x, np.ones_like(x)]), y, rcond=None)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum(resid ** 2))
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return FitResult(float(slope), float(intercept), r2, (float(b.min()), float(b.max())),
                     model, len(rows))


# --- pointwise bounds ----------------------------------------------------------

class CoverageError(ValueError):
    pass


@dataclass(frozen=True)
class BoundReport:
    """Suprema of the three pointwise bounds, each divided by its right side."""

    b: float
    a: float
    near: float
    middle: float
    far: float
    r_inner: float
    r_far_max: float
    pre_asymptotic: bool

    def as_dict(self) -> dict:
        return asdict(self)


def default_audit_a(params: CriticalParams) -> float:
    return params.pf / (2.0 * (1.0 + params.pf))


def _sup_or_nan(values, region: str, pre: bool) -> float:
    if len(values) == 0:
        if pre:
            return math.nan
        raise CoverageError(f"profile has no grid points in the {region} region")
    return float(np.max(values))


def audit_bounds(state: GroundState, a: float | None, params: CriticalParams,
                 r_far_max: float | None = None) -> BoundReport:
    """Normalised suprema of the near-, middle- and far-field bounds (C_a = 1).

    near   : sup_{r <= b^{-p(1-a)}} |f - U_b| / b  /  b^{-2p(1-a)}
    middle : sup_{b^{-p(1-a)} <= r <= 1} r^{2/p} |f - c e^{-r^2/2} U(r^2)|  /  (c^{2p+1} b^{2p(1-a)})
    far    : sup_{1 <= r <= r_far_max} |e^{r^2/2} r^k f - c r^k U(r^2)|  /  c^{2p+1},  k = (d-lam)/2

    The far supremum stops at the upper end of the trusted far-field window
    (where the bracketing shots still agree) unless ``r_far_max`` is given:
    beyond it the stored profile carries the exponentially growing error
    left by the finite precision of lam, which is not part of the solution.
    """
    a = default_audit_a(params) if a is None else a
    p = params.pf
    if not 0.0 < a < p / (1.0 + p):
        raise ValueError(f"a must lie in (0, p/(1+p)) = (0, {p / (1 + p):.6g})")
    b, lam, c = state.b, state.lam, state.c
    if not (c > 0 and math.isfinite(c)):
        raise ValueError("audit needs a ground state with positive far-field amplitude")
    prof = state.profile
    r, f = prof.r_grid, prof.f
    r_inner = b ** (-p * (1.0 - a))
    pre = r_inner > 0.5
    if r_far_max is None:
        r_far_max = state.c_window[1] if math.isfinite(state.c_window[1]) else prof.r_end
    kp = params.kummer(lam)

    near_mask = r <= r_inner
    near_vals = [abs(fv - algebraic_soliton(rv, b, params)) / b for rv, fv in
                 zip(r[near_mask], f[near_mask])]
    near = _sup_or_nan(near_vals, "near-field", pre) / b ** (-2.0 * p * (1.0 - a))

    log_c = math.log(c)
    mid_mask = (r >= r_inner) & (r <= 1.0)
    mid_vals = []
    for rv, fv in zip(r[mid_mask], f[mid_mask]):
        model = math.exp(log_c - 0.5 * rv * rv + specfun.log_tricomi_u(rv * rv, kp))
        mid_vals.append(rv ** (2.0 / p) * abs(fv - model))
    middle = (_sup_or_nan(mid_vals, "middle", pre)
              / (c ** (2.0 * p + 1.0) * b ** (2.0 * p * (1.0 - a))))

    k = 0.5 * (params.d - lam)
    far_mask = (r >= 1.0) & (r <= r_far_max) & (f > 0)
    far_vals = []
    for rv, fv in zip(r[far_mask], f[far_mask]):
        lr = k * math.log(rv)
        scaled = math.exp(0.5 * rv * rv + lr + math.log(fv))
        model = math.exp(log_c + lr + specfun.log_tricomi_u(rv * rv, kp))
        far_vals.append(abs(scaled - model))
    far = _sup_or_nan(far_vals, "far-field", pre) / c ** (2.0 * p + 1.0)
    return BoundReport(b, a, near, middle, far, r_inner, float(r_far_max), pre)


# --- persistence -----------------------------------------------------------------

def _fmt(x: float) -> str:
    return "" if x is None or (isinstance(x, float) and math.isnan(x)) else f"{x:.17g}"


def write_sweep_csv(records, path, *, timing: bool = True) -> None:
    """CSV with columns b,lambda,c,bracket,c_spread,status,wall_ms.

    ``timing=False`` leaves wall_ms empty so that repeated runs produce
    byte-identical files. Failed rows carry ``status=failed`` plus the error.
    """
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for r in records:
            status = "ok" if r.ok else f"failed: {r.error}"
            w.writerow([_fmt(r.b), _fmt(r.lam), _fmt(r.c), _fmt(r.lambda_bracket_width),
                        _fmt(r.c_spread), status,
                        f"{r.wall_time_ms:.3f}" if timing else ""])


def read_sweep_csv(path) -> list[SweepRecord]:
    def num(s):
        return float(s) if s != "" else math.nan

    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            status = row["status"]
            ok = status == "ok"
            out.append(SweepRecord(num(row["b"]), num(row["lambda"]), num(row["c"]),
                                   num(row["bracket"]), num(row["c_spread"]),
                                   num(row["wall_ms"]), "ok" if ok else "failed",
                                   "" if ok else status.partition(": ")[2]))
    return out


def _git_describe() -> str:
    try:
        res = subprocess.run(["git", "describe", "--always", "--dirty", "--tags"],
                             capture_output=True, text=True, timeout=10,
                             cwd=Path(__file__).resolve().parent)
    except (OSError, subprocess.SubprocessError):
        return "unknown"
    return res.stdout.strip() or "unknown"


def write_manifest(path, params: CriticalParams, *, tol: float,
                   ctrl: IntegratorSettings | None = None, extra: dict | None = None) -> dict:
    ctrl = ctrl or IntegratorSettings()
    manifest = {
        "p": params.label(),
        "d": params.d,
        "tolerances": {"lambda": tol, "rtol": ctrl.rtol, "atol": ctrl.atol},
        "kernel": _backend.NAME,
        "git_describe": _git_describe(),
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    if extra:
        manifest.update(extra)
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest
