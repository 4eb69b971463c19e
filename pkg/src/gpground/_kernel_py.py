"""Pure-Python Dormand-Prince 5(4) kernel for the radial shooting problem.

Reference implementation; ``_kernel.pyx`` mirrors it line for line with
C types. Both expose :func:`integrate` with the same signature and result
layout.

State is (f, f') in the radial variable r, or (Psi, Psi') in Emden-Fowler
time t = log r while r < r_switch. Integration stops at the first accepted
step at which

* f <= 0                      -> OVERSHOOT
* f' > 0 and f > floor        -> UNDERSHOOT
* r reaches r_stop            -> END
"""

import math

END = 0
OVERSHOOT = 1
UNDERSHOOT = 2
UNDERFLOW = 3
MAXSTEPS = 4

C2, C3, C4, C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
A21 = 1 / 5
A31, A32 = 3 / 40, 9 / 40
A41, A42, A43 = 44 / 45, -56 / 15, 32 / 9
A51, A52, A53, A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
A61, A62, A63, A64, A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
B1, B3, B4, B5, B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
E1, E3, E4, E5, E6, E7 = (71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200,
                          22 / 525, -1 / 40)

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0
PI_ALPHA = 0.7 / 5.0
PI_BETA = 0.4 / 5.0


def _rhs(ef, x, y0, y1, lam, twop, dm1, invp2):
    if ef:
        e2 = math.exp(2.0 * x)
        nl = abs(y0) ** twop if y0 != 0.0 else 0.0
        return y1, y0 * (invp2 - nl - lam * e2 + e2 * e2)
    nl = abs(y0) ** twop if y0 != 0.0 else 0.0
    return y1, -dm1 / x * y1 + (x * x - lam - nl) * y0


def integrate(lam, p, d, r0, f0, fp0, r_switch, r_stop, rtol, atol, h_init,
              max_steps, floor, store, r_out):
    """Integrate from r0 to the first classification event or r_stop.

    Returns ``(status, nsteps, r_end, f_end, fp_end, rs, fs, fps, out_f, out_fp)``;
    the sample lists are ``None`` unless ``store``; ``out_f``/``out_fp`` hold
    values at the sorted radii ``r_out`` (NaN where not reached).
    """
    twop = 2.0 * p
    dm1 = d - 1.0
    invp = 1.0 / p
    invp2 = invp * invp
    n_out = len(r_out)
    out_f = [math.nan] * n_out
    out_fp = [math.nan] * n_out
    j_out = 0
    while j_out < n_out and r_out[j_out] <= r0:
        if r_out[j_out] == r0:
            out_f[j_out], out_fp[j_out] = f0, fp0
        j_out += 1

    ef = r0 < r_switch
    if ef:
        x = math.log(r0)
        w = r0 ** invp
        y0 = w * f0
        y1 = w * (f0 * invp + r0 * fp0)
        x_switch = math.log(r_switch)
        h = h_init if h_init > 0.0 else 1e-3 * p
    else:
        x = r0
        y0 = f0
        y1 = fp0
        x_switch = 0.0
        h = h_init if h_init > 0.0 else 1e-2 * r0

    rs = fs = fps = None
    if store:
        rs, fs, fps = [r0], [f0], [fp0]

    k1 = _rhs(ef, x, y0, y1, lam, twop, dm1, invp2)
    err_prev = 1.0
    rejected = False
    status = MAXSTEPS
    nsteps = 0
    r_now, f_now, fp_now = r0, f0, fp0

    while nsteps < max_steps:
        # next hard boundary in the current variable
        if ef:
            bound = x_switch
            if j_out < n_out:
                bound = min(bound, math.log(r_out[j_out]))
        else:
            bound = r_stop
            if j_out < n_out:
                bound = min(bound, r_out[j_out])
        h_try = h
        clipped = False
        if x + h_try >= bound:
            h_try = bound - x
            clipped = True
        if not clipped and h_try <= 1e-14 * max(1.0, abs(x)):
            status = UNDERFLOW
            break
        a1, b1 = k1
        k2 = _rhs(ef, x + C2 * h_try, y0 + h_try * A21 * a1, y1 + h_try * A21 * b1,
                  lam, twop, dm1, invp2)
        a2, b2 = k2
        k3 = _rhs(ef, x + C3 * h_try,
                  y0 + h_try * (A31 * a1 + A32 * a2),
                  y1 + h_try * (A31 * b1 + A32 * b2), lam, twop, dm1, invp2)
        a3, b3 = k3
        k4 = _rhs(ef, x + C4 * h_try,
                  y0 + h_try * (A41 * a1 + A42 * a2 + A43 * a3),
                  y1 + h_try * (A41 * b1 + A42 * b2 + A43 * b3), lam, twop, dm1, invp2)
        a4, b4 = k4
        k5 = _rhs(ef, x + C5 * h_try,
                  y0 + h_try * (A51 * a1 + A52 * a2 + A53 * a3 + A54 * a4),
                  y1 + h_try * (A51 * b1 + A52 * b2 + A53 * b3 + A54 * b4),
                  lam, twop, dm1, invp2)
        a5, b5 = k5
        k6 = _rhs(ef, x + h_try,
                  y0 + h_try * (A61 * a1 + A62 * a2 + A63 * a3 + A64 * a4 + A65 * a5),
                  y1 + h_try * (A61 * b1 + A62 * b2 + A63 * b3 + A64 * b4 + A65 * b5),
                  lam, twop, dm1, invp2)
        a6, b6 = k6
        n0 = y0 + h_try * (B1 * a1 + B3 * a3 + B4 * a4 + B5 * a5 + B6 * a6)
        n1 = y1 + h_try * (B1 * b1 + B3 * b3 + B4 * b4 + B5 * b5 + B6 * b6)
        x_new = bound if clipped else x + h_try
        k7 = _rhs(ef, x_new, n0, n1, lam, twop, dm1, invp2)
        a7, b7 = k7
        e0 = h_try * (E1 * a1 + E3 * a3 + E4 * a4 + E5 * a5 + E6 * a6 + E7 * a7)
        e1 = h_try * (E1 * b1 + E3 * b3 + E4 * b4 + E5 * b5 + E6 * b6 + E7 * b7)
        scale = atol + rtol * max(abs(y0), abs(y1), abs(n0), abs(n1))
        if scale <= 0.0:
            scale = 1e-300
        err = math.sqrt(0.5 * ((e0 / scale) ** 2 + (e1 / scale) ** 2))

        if err > 1.0 or err != err:
            fac = MIN_FACTOR if err != err else max(MIN_FACTOR, SAFETY * err ** -0.2)
            h = h_try * fac
            rejected = True
            if h <= 1e-14 * max(1.0, abs(x)):
                status = UNDERFLOW
                break
            continue

        # accepted
        nsteps += 1
        if err == 0.0:
            fac = MAX_FACTOR
        else:
            fac = SAFETY * err ** -PI_ALPHA * err_prev ** PI_BETA
            fac = min(MAX_FACTOR, max(MIN_FACTOR, fac))
        if rejected:
            fac = min(fac, 1.0)
        rejected = False
        err_prev = max(err, 1e-4)
        h = max(h, h_try * fac) if clipped else h_try * fac

        x = x_new
        y0, y1 = n0, n1
        k1 = k7

        if ef:
            r_now = math.exp(x)
            w = math.exp(-x * invp)
            f_now = w * y0
            fp_now = w * (y1 - y0 * invp) / r_now
        else:
            r_now, f_now, fp_now = x, y0, y1

        if store:
            rs.append(r_now)
            fs.append(f_now)
            fps.append(fp_now)

        if j_out < n_out and clipped and x == (math.log(r_out[j_out]) if ef else r_out[j_out]):
            out_f[j_out] = f_now
            out_fp[j_out] = fp_now
            j_out += 1
            while j_out < n_out and r_out[j_out] <= r_now:
                out_f[j_out] = f_now
                out_fp[j_out] = fp_now
                j_out += 1

        if f_now <= 0.0:
            status = OVERSHOOT
            break
        if fp_now > 0.0 and f_now > floor:
            status = UNDERSHOOT
            break

        if ef and x >= x_switch:
            # leave Emden-Fowler time at r = r_switch
            ef = False
            x = r_now
            y0, y1 = f_now, fp_now
            h = h * r_now
            k1 = _rhs(ef, x, y0, y1, lam, twop, dm1, invp2)
            continue
        if not ef and x >= r_stop:
            status = END
            break

    return status, nsteps, r_now, f_now, fp_now, rs, fs, fps, out_f, out_fp
