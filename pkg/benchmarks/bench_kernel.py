"""Compiled vs pure-Python shooting kernel: single shots and full solves.

    python benchmarks/bench_kernel.py [--repeat 3]
"""

import argparse
import statistics
import time

from gpground import _backend
from gpground.profiles import CriticalParams
from gpground.shooting import integrate_ivp, solve_lambda

CASES = [("2/5", 1e2), ("2/5", 1e4), ("2/3", 1e3), ("1/2", 1e5)]


def timed(fn, repeat):
    runs = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        runs.append(time.perf_counter() - t0)
    return statistics.median(runs), out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    kernels = sorted(_backend.available())
    print(f"kernels available: {', '.join(kernels)}")
    header = f"{'p':>4} {'b':>8} {'task':>6} " + " ".join(f"{k + ' ms':>12}" for k in kernels)
    if len(kernels) == 2:
        header += f" {'speedup':>8}"
    print(header)
    for p_text, b in CASES:
        params = CriticalParams(p_text)
        lam = solve_lambda(b, params, with_c=False).lam
        for task, fn in (("shot", lambda: integrate_ivp(b, lam, params, store=False)),
                         ("solve", lambda: solve_lambda(b, params))):
            times, results = {}, {}
            for k in kernels:
                with _backend.using(k):
                    times[k], results[k] = timed(fn, args.repeat)
            row = f"{p_text:>4} {b:>8.0e} {task:>6} " + " ".join(
                f"{times[k] * 1e3:>12.2f}" for k in kernels)
            if len(kernels) == 2:
                row += f" {times['python'] / times['compiled']:>8.1f}"
                a, c = (results[k] for k in kernels)
                same = a.lam == c.lam if task == "solve" else a.f_end == c.f_end
                row += "" if same else "  (results differ)"
            print(row)


if __name__ == "__main__":
    main()
