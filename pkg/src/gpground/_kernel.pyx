# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Dormand-Prince 5(4) kernel; mirrors ``_kernel_py.integrate``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, log, fabs, pow, sqrt, NAN
from libc.stdlib cimport malloc, realloc, free

cnp.import_array()

DEF END = 0
DEF OVERSHOOT = 1
DEF UNDERSHOOT = 2
DEF UNDERFLOW = 3
DEF MAXSTEPS = 4
DEF NOMEM = 5

cdef double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9
cdef double A21 = 1.0 / 5
cdef double A31 = 3.0 / 40, A32 = 9.0 / 40
cdef double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9
cdef double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561, A54 = -212.0 / 729
cdef double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176, A65 = -5103.0 / 18656
cdef double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784, B6 = 11.0 / 84
cdef double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920, E5 = -17253.0 / 339200
cdef double E6 = 22.0 / 525, E7 = -1.0 / 40

cdef double SAFETY = 0.9
cdef double MIN_FACTOR = 0.2
cdef double MAX_FACTOR = 5.0
cdef double PI_ALPHA = 0.7 / 5.0
cdef double PI_BETA = 0.4 / 5.0


cdef inline void rhs(bint ef, double x, double y0, double y1, double lam,
                     double twop, double dm1, double invp2,
                     double *o0, double *o1) noexcept nogil:
    cdef double e2, nl
    nl = pow(fabs(y0), twop) if y0 != 0.0 else 0.0
    o0[0] = y1
    if ef:
        e2 = exp(2.0 * x)
        o1[0] = y0 * (invp2 - nl - lam * e2 + e2 * e2)
    else:
        o1[0] = -dm1 / x * y1 + (x * x - lam - nl) * y0


cdef struct Buffer:
    double *r
    double *f
    double *fp
    Py_ssize_t n
    Py_ssize_t cap


cdef int buf_push(Buffer *b, double r, double f, double fp) noexcept nogil:
    cdef Py_ssize_t cap
    cdef double *nr
    cdef double *nf
    cdef double *nfp
    if b.n == b.cap:
        cap = 2 * b.cap if b.cap > 0 else 1024
        nr = <double *> realloc(b.r, cap * sizeof(double))
        if nr == NULL:
            return -1
        b.r = nr
        nf = <double *> realloc(b.f, cap * sizeof(double))
        if nf == NULL:
            return -1
        b.f = nf
        nfp = <double *> realloc(b.fp, cap * sizeof(double))
        if nfp == NULL:
            return -1
        b.fp = nfp
        b.cap = cap
    b.r[b.n] = r
    b.f[b.n] = f
    b.fp[b.n] = fp
    b.n += 1
    return 0


cdef int run(double lam, double p, double d, double r0, double f0, double fp0,
             double r_switch, double r_stop, double rtol, double atol,
             double h_init, long max_steps, double floor, bint store,
             double *r_out, Py_ssize_t n_out, double *out_f, double *out_fp,
             Buffer *buf, long *nsteps_out, double *last) noexcept nogil:
    cdef double twop = 2.0 * p, dm1 = d - 1.0, invp = 1.0 / p
    cdef double invp2 = invp * invp
    cdef Py_ssize_t j_out = 0
    cdef bint ef, clipped, rejected = False
    cdef double x, y0, y1, x_switch, h, w, bound, h_try, x_new, target
    cdef double a1, b1, a2, b2, a3, b3, a4, b4, a5, b5, a6, b6, a7, b7
    cdef double n0, n1, e0, e1, scale, err, fac, err_prev = 1.0, m
    cdef double r_now = r0, f_now = f0, fp_now = fp0
    cdef long nsteps = 0
    cdef int status = MAXSTEPS

    while j_out < n_out and r_out[j_out] <= r0:
        if r_out[j_out] == r0:
            out_f[j_out] = f0
            out_fp[j_out] = fp0
        j_out += 1

    ef = r0 < r_switch
    if ef:
        x = log(r0)
        w = pow(r0, invp)
        y0 = w * f0
        y1 = w * (f0 * invp + r0 * fp0)
        x_switch = log(r_switch)
        h = h_init if h_init > 0.0 else 1e-3 * p
    else:
        x = r0
        y0 = f0
        y1 = fp0
        x_switch = 0.0
        h = h_init if h_init > 0.0 else 1e-2 * r0

    if store:
        if buf_push(buf, r0, f0, fp0) != 0:
            return NOMEM

    rhs(ef, x, y0, y1, lam, twop, dm1, invp2, &a1, &b1)

    while nsteps < max_steps:
        if ef:
            bound = x_switch
            if j_out < n_out:
                target = log(r_out[j_out])
                if target < bound:
                    bound = target
        else:
            bound = r_stop
            if j_out < n_out and r_out[j_out] < bound:
                bound = r_out[j_out]
        h_try = h
        clipped = False
        if x + h_try >= bound:
            h_try = bound - x
            clipped = True
        if not clipped and h_try <= 1e-14 * (fabs(x) if fabs(x) > 1.0 else 1.0):
            status = UNDERFLOW
            break

        rhs(ef, x + C2 * h_try, y0 + h_try * A21 * a1, y1 + h_try * A21 * b1,
            lam, twop, dm1, invp2, &a2, &b2)
        rhs(ef, x + C3 * h_try,
            y0 + h_try * (A31 * a1 + A32 * a2),
            y1 + h_try * (A31 * b1 + A32 * b2), lam, twop, dm1, invp2, &a3, &b3)
        rhs(ef, x + C4 * h_try,
            y0 + h_try * (A41 * a1 + A42 * a2 + A43 * a3),
            y1 + h_try * (A41 * b1 + A42 * b2 + A43 * b3), lam, twop, dm1, invp2, &a4, &b4)
        rhs(ef, x + C5 * h_try,
            y0 + h_try * (A51 * a1 + A52 * a2 + A53 * a3 + A54 * a4),
            y1 + h_try * (A51 * b1 + A52 * b2 + A53 * b3 + A54 * b4),
            lam, twop, dm1, invp2, &a5, &b5)
        rhs(ef, x + h_try,
            y0 + h_try * (A61 * a1 + A62 * a2 + A63 * a3 + A64 * a4 + A65 * a5),
            y1 + h_try * (A61 * b1 + A62 * b2 + A63 * b3 + A64 * b4 + A65 * b5),
            lam, twop, dm1, invp2, &a6, &b6)
        n0 = y0 + h_try * (B1 * a1 + B3 * a3 + B4 * a4 + B5 * a5 + B6 * a6)
        n1 = y1 + h_try * (B1 * b1 + B3 * b3 + B4 * b4 + B5 * b5 + B6 * b6)
        x_new = bound if clipped else x + h_try
        rhs(ef, x_new, n0, n1, lam, twop, dm1, invp2, &a7, &b7)
        e0 = h_try * (E1 * a1 + E3 * a3 + E4 * a4 + E5 * a5 + E6 * a6 + E7 * a7)
        e1 = h_try * (E1 * b1 + E3 * b3 + E4 * b4 + E5 * b5 + E6 * b6 + E7 * b7)
        m = fabs(y0)
        if fabs(y1) > m:
            m = fabs(y1)
        if fabs(n0) > m:
            m = fabs(n0)
        if fabs(n1) > m:
            m = fabs(n1)
        scale = atol + rtol * m
        if scale <= 0.0:
            scale = 1e-300
        err = sqrt(0.5 * ((e0 / scale) * (e0 / scale) + (e1 / scale) * (e1 / scale)))

        if err > 1.0 or err != err:
            if err != err:
                fac = MIN_FACTOR
            else:
                fac = SAFETY * pow(err, -0.2)
                if fac < MIN_FACTOR:
                    fac = MIN_FACTOR
            h = h_try * fac
            rejected = True
            if h <= 1e-14 * (fabs(x) if fabs(x) > 1.0 else 1.0):
                status = UNDERFLOW
                break
            continue

        nsteps += 1
        if err == 0.0:
            fac = MAX_FACTOR
        else:
            fac = SAFETY * pow(err, -PI_ALPHA) * pow(err_prev, PI_BETA)
            if fac > MAX_FACTOR:
                fac = MAX_FACTOR
            if fac < MIN_FACTOR:
                fac = MIN_FACTOR
        if rejected and fac > 1.0:
            fac = 1.0
        rejected = False
        err_prev = err if err > 1e-4 else 1e-4
        if clipped:
            if h_try * fac > h:
                h = h_try * fac
        else:
            h = h_try * fac

        x = x_new
        y0 = n0
        y1 = n1
        a1 = a7
        b1 = b7

        if ef:
            r_now = exp(x)
            w = exp(-x * invp)
            f_now = w * y0
            fp_now = w * (y1 - y0 * invp) / r_now
        else:
            r_now = x
            f_now = y0
            fp_now = y1

        if store:
            if buf_push(buf, r_now, f_now, fp_now) != 0:
                status = NOMEM
                break

        if j_out < n_out and clipped:
            target = log(r_out[j_out]) if ef else r_out[j_out]
            if x == target:
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
            ef = False
            x = r_now
            y0 = f_now
            y1 = fp_now
            h = h * r_now
            rhs(ef, x, y0, y1, lam, twop, dm1, invp2, &a1, &b1)
            continue
        if not ef and x >= r_stop:
            status = END
            break

    nsteps_out[0] = nsteps
    last[0] = r_now
    last[1] = f_now
    last[2] = fp_now
    return status


def integrate(double lam, double p, double d, double r0, double f0, double fp0,
              double r_switch, double r_stop, double rtol, double atol,
              double h_init, long max_steps, double floor, bint store, r_out):
    """Same contract as ``_kernel_py.integrate``; releases the GIL while stepping."""
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ro = np.ascontiguousarray(r_out, dtype=np.float64)
    cdef Py_ssize_t n_out = ro.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] of = np.full(n_out, np.nan)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ofp = np.full(n_out, np.nan)
    cdef Buffer buf
    cdef long nsteps = 0
    cdef double last[3]
    cdef int status
    cdef double *ro_p = NULL
    cdef double *of_p = NULL
    cdef double *ofp_p = NULL
    buf.r = NULL
    buf.f = NULL
    buf.fp = NULL
    buf.n = 0
    buf.cap = 0
    if n_out > 0:
        ro_p = &ro[0]
        of_p = &of[0]
        ofp_p = &ofp[0]
    with nogil:
        status = run(lam, p, d, r0, f0, fp0, r_switch, r_stop, rtol, atol, h_init,
                     max_steps, floor, store, ro_p, n_out, of_p, ofp_p,
                     &buf, &nsteps, last)
    rs = fs = fps = None
    try:
        if status == NOMEM:
            raise MemoryError("trajectory buffer allocation failed")
        if store:
            rs = np.array(<double[:buf.n]> buf.r, copy=True) if buf.n else np.empty(0)
            fs = np.array(<double[:buf.n]> buf.f, copy=True) if buf.n else np.empty(0)
            fps = np.array(<double[:buf.n]> buf.fp, copy=True) if buf.n else np.empty(0)
    finally:
        free(buf.r)
        free(buf.f)
        free(buf.fp)
    return status, nsteps, last[0], last[1], last[2], rs, fs, fps, of, ofp
