"""Independent reference solver for lambda(b).

Shares nothing with the production path except the problem statement: it
integrates the radial form only, with scipy's 8th-order DOP853, detects the
two shooting events with root-finding event functions, and runs its own
bisection. Intended for spot checks, not sweeps (about a second per solve).
"""

from __future__ import annotations

import math

from scipy.integrate import solve_ivp

from .profiles import CriticalParams

__all__ = ["oracle_lambda"]


def _shot(b: float, lam: float, p: float, d: float, rtol: float, r_stop: float) -> int:
    """-1 if f' turns positive first, +1 if f reaches zero first, 0 otherwise."""
    r0 = min(1e-3, 1e-3 * b ** (-p)) * 0.5
    k = p * (lam + b ** (2 * p)) / (4 * (p + 1))
    # half the production start radius, so the O(r0^4) start error differs too
    y0 = [b * (1 - k * r0 * r0), -2 * b * k * r0]

    def rhs(r, y):
        nl = abs(y[0]) ** (2 * p)
        return [y[1], -(d - 1) / r * y[1] + (r * r - lam - nl) * y[0]]

    def zero(r, y):
        return y[0]
    zero.terminal = True
    zero.direction = -1

    def turn(r, y):
        return y[1]
    turn.terminal = True
    turn.direction = 1

    sol = solve_ivp(rhs, (r0, r_stop), y0, method="DOP853", rtol=rtol,
                    atol=1e-24 * b, events=(zero, turn))
    if sol.t_events[0].size:
        return 1
    if sol.t_events[1].size:
        return -1
    return 0


def oracle_lambda(b: float, params: CriticalParams, tol_lambda: float = 1e-12,
                  rtol: float = 1e-13) -> float:
    """Bisection on lam with the DOP853 shooting dichotomy."""
    p, d = params.pf, params.d
    lo, hi = 1e-14, d - 1e-14
    r_stop = max(6.0, math.sqrt(2 * (d + 5)))
    if _shot(b, lo, p, d, rtol, r_stop) != -1 or _shot(b, hi, p, d, rtol, r_stop) != 1:
        raise RuntimeError("oracle bracket does not separate")
    while hi - lo > tol_lambda:
        mid = 0.5 * (lo + hi)
        s = 0
        for extra in (0.0, 2.0, 4.0):
            s = _shot(b, mid, p, d, rtol, r_stop + extra)
            if s:
                break
        if s == 0:
            break
        if s < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _main():  # pragma: no cover - manual probe
    for spec, b in (("2/5", 100.0), ("2/3", 1000.0)):
        print(spec, b, oracle_lambda(b, CriticalParams(spec)))


if __name__ == "__main__":  # pragma: no cover
    _main()
