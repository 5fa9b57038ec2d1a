# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled interface kernels: the same mathematics as the pure-Python solvers
in riemann.py and grp.py, ported to C structs and loops.

Status codes: 0 ok, 1 Riemann failure, 2 GRP failure.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport atanh, exp, expm1, fabs, hypot, log, log1p, sqrt, tanh, NAN

cnp.import_array()

cdef double RHO_FLOOR = 1e-14
cdef double RHO_CEIL = 1e14
cdef double ACOUSTIC_TOL = 1e-9
cdef double SONIC_TOL = 1e-13
cdef double QUAD_RTOL = 1e-12

cdef enum:
    N_LEVELS = 9  # 4, 8, ..., 1024 nodes

STATUS_OK = 0
STATUS_RIEMANN = 1
STATUS_GRP = 2

cdef double[::1] _NODES
cdef double[::1] _WEIGHTS
cdef int _OFFSET[N_LEVELS + 1]


def _init_quadrature():
    global _NODES, _WEIGHTS
    xs, ws = [], []
    off = 0
    for k in range(N_LEVELS):
        n = 4 << k
        x, w = np.polynomial.legendre.leggauss(n)
        xs.append(x)
        ws.append(w)
        _OFFSET[k] = off
        off += n
    _OFFSET[N_LEVELS] = off
    _NODES = np.ascontiguousarray(np.concatenate(xs))
    _WEIGHTS = np.ascontiguousarray(np.concatenate(ws))


_init_quadrature()


ctypedef struct Fan:
    double rho_l, v_l, rho_r, v_r, rho_s, v_s
    bint shock_l, shock_r
    double s_l, s_r          # shock speeds (valid when the side is a shock)
    double head_l, tail_l    # left fan edges (lambda_- at left, at star)
    double tail_r, head_r    # right fan edges (lambda_+ at star, at right)
    double m, sigma


ctypedef struct Input:
    double rl, vl, rr, vr
    double drl, dvl, drr, dvr
    double a, b, r, kappa, sigma, sign, m


# -- Riemann solver -------------------------------------------------------------

cdef inline double lam_minus(double v, double m, double c) nogil:
    return m * (v - c) / (1.0 - v * c)


cdef inline double lam_plus(double v, double m, double c) nogil:
    return m * (v + c) / (1.0 + v * c)


cdef inline void wave_curve(double x, double xk, double sigma, double* g, double* dg) nogil:
    cdef double s2 = sigma * sigma
    cdef double k = sigma / (1.0 + s2)
    cdef double d = x - xk
    cdef double qm1, q, phi, den, dd
    if d <= 0.0:
        g[0] = k * d
        dg[0] = k
        return
    qm1 = expm1(d)
    q = qm1 + 1.0
    phi = sigma * qm1 / sqrt((q + s2) * (1.0 + s2 * q))
    den = s2 * q * q + (1.0 + s2 * s2) * q + s2
    dd = 2.0 * s2 * q + 1.0 + s2 * s2
    g[0] = atanh(phi)
    dg[0] = q * sigma * (den - 0.5 * (q - 1.0) * dd) / (den * sqrt(den)) / (1.0 - phi * phi)


cdef inline double root_f(double x, double xl, double yl, double xr, double yr,
                          double sigma, double* df) nogil:
    cdef double gl, dgl, gr, dgr
    wave_curve(x, xl, sigma, &gl, &dgl)
    wave_curve(x, xr, sigma, &gr, &dgr)
    df[0] = -(dgl + dgr)
    return yl - yr - gl - gr


cdef int star_root(double xl, double yl, double xr, double yr, double sigma, double* out) nogil:
    cdef double k = sigma / (1.0 + sigma * sigma)
    cdef double x_lo = xl if xl < xr else xr
    cdef double x_hi = xr if xl < xr else xl
    cdef double df, f_lo, f_hi, x, fx, x_new, step
    cdef int it
    f_lo = root_f(x_lo, xl, yl, xr, yr, sigma, &df)
    if f_lo <= 0.0:
        x = 0.5 * (yl - yr) / k + 0.5 * (xl + xr)
        if x < log(RHO_FLOOR):
            return 1
        out[0] = x
        return 0
    f_hi = root_f(x_hi, xl, yl, xr, yr, sigma, &df)
    if f_hi >= 0.0:
        step = 1.0
        x_lo = x_hi
        f_lo = f_hi
        while True:
            x_hi = x_lo + step
            if x_hi > log(RHO_CEIL):
                return 1
            f_hi = root_f(x_hi, xl, yl, xr, yr, sigma, &df)
            if f_hi < 0.0:
                break
            x_lo = x_hi
            f_lo = f_hi
            step *= 2.0
    x = x_lo - f_lo * (x_hi - x_lo) / (f_hi - f_lo)
    for it in range(100):
        fx = root_f(x, xl, yl, xr, yr, sigma, &df)
        if fx == 0.0:
            out[0] = x
            return 0
        if fx > 0.0:
            x_lo = x
        else:
            x_hi = x
        x_new = x - fx / df
        if not (x_lo < x_new < x_hi):
            x_new = 0.5 * (x_lo + x_hi)
        if fabs(x_new - x) <= 4e-16 * (fabs(x) if fabs(x) > 1.0 else 1.0):
            out[0] = x_new
            return 0
        x = x_new
    return 1


cdef inline double shock_speed(double rho_s, double rho, double v, double m, double sigma,
                               int family) nogil:
    cdef double s2 = sigma * sigma
    cdef double q = rho_s / rho
    cdef double u = sigma * sqrt((q + s2) / (1.0 + s2 * q))
    if family > 0:
        return m * (v + u) / (1.0 + v * u)
    return m * (v - u) / (1.0 - v * u)


cdef int solve_star(double rl, double vl, double rr, double vr, double m, double sigma,
                    Fan* fan) nogil:
    cdef double xl, xr, yl, yr, x, y, gl, gr, dg, tol
    if not (rl > 0.0 and rr > 0.0 and fabs(vl) < 1.0 and fabs(vr) < 1.0):
        return 1
    xl = log(rl)
    xr = log(rr)
    yl = atanh(vl)
    yr = atanh(vr)
    if xl == xr and yl == yr:
        x = xl
        y = yl
    else:
        if star_root(xl, yl, xr, yr, sigma, &x) != 0:
            return 1
        wave_curve(x, xl, sigma, &gl, &dg)
        wave_curve(x, xr, sigma, &gr, &dg)
        y = 0.5 * ((yl - gl) + (yr + gr))
    fan.rho_l = rl
    fan.v_l = vl
    fan.rho_r = rr
    fan.v_r = vr
    fan.rho_s = exp(x)
    fan.v_s = tanh(y)
    fan.m = m
    fan.sigma = sigma
    fan.shock_l = x > xl
    fan.shock_r = x > xr
    tol = 1e-10 * m
    if fan.shock_l:
        fan.s_l = shock_speed(fan.rho_s, rl, vl, m, sigma, -1)
        if not (lam_minus(vl, m, sigma) + tol > fan.s_l > lam_minus(fan.v_s, m, sigma) - tol):
            return 1
    else:
        fan.head_l = lam_minus(vl, m, sigma)
        fan.tail_l = lam_minus(fan.v_s, m, sigma)
    if fan.shock_r:
        fan.s_r = shock_speed(fan.rho_s, rr, vr, m, sigma, 1)
        if not (lam_plus(fan.v_s, m, sigma) + tol > fan.s_r > lam_plus(vr, m, sigma) - tol):
            return 1
    else:
        fan.tail_r = lam_plus(fan.v_s, m, sigma)
        fan.head_r = lam_plus(vr, m, sigma)
    return 0


cdef inline void fan_left(double xi, Fan* fan, double* rho, double* v) nogil:
    cdef double sigma = fan.sigma
    cdef double k = sigma / (1.0 + sigma * sigma)
    cdef double w = xi / fan.m
    cdef double psi
    v[0] = (sigma + w) / (1.0 + sigma * w)
    psi = atanh(fan.v_l) + k * log(fan.rho_l)
    rho[0] = exp((psi - atanh(v[0])) / k)


cdef inline void fan_right(double xi, Fan* fan, double* rho, double* v) nogil:
    cdef double sigma = fan.sigma
    cdef double k = sigma / (1.0 + sigma * sigma)
    cdef double w = xi / fan.m
    cdef double psi
    v[0] = (w - sigma) / (1.0 - sigma * w)
    psi = atanh(fan.v_r) - k * log(fan.rho_r)
    rho[0] = exp((atanh(v[0]) - psi) / k)


cdef void sample0(Fan* fan, double* rho, double* v) nogil:
    if fan.shock_l:
        if 0.0 < fan.s_l:
            rho[0] = fan.rho_l
            v[0] = fan.v_l
            return
    else:
        if 0.0 <= fan.head_l:
            rho[0] = fan.rho_l
            v[0] = fan.v_l
            return
        if 0.0 < fan.tail_l:
            fan_left(0.0, fan, rho, v)
            return
    if fan.shock_r:
        if 0.0 > fan.s_r:
            rho[0] = fan.rho_r
            v[0] = fan.v_r
            return
    else:
        if 0.0 >= fan.head_r:
            rho[0] = fan.rho_r
            v[0] = fan.v_r
            return
        if 0.0 > fan.tail_r:
            fan_right(0.0, fan, rho, v)
            return
    rho[0] = fan.rho_s
    v[0] = fan.v_s


# -- GRP --------------------------------------------------------------------------

cdef inline void source_terms(double rho, double v, Input* inp, double* h1, double* h2,
                              double* s_minus, double* s_plus) nogil:
    cdef double c = inp.sigma
    cdef double c2 = c * c
    cdef double p = c2 * rho
    cdef double h = rho + p
    cdef double v2 = v * v
    cdef double a = inp.a
    cdef double fac = -inp.sign * inp.m / (inp.r * (1.0 - v2 * c2))
    cdef double kr2 = inp.kappa * inp.r * inp.r / (2.0 * a)
    cdef double q, w
    h1[0] = fac * 2.0 * v * h * (1.0 - 0.5 * kr2 * h)
    h2[0] = fac * (1.0 - v2) * (-2.0 * v2 * c2 + (1.0 - a) * (1.0 - v2 * c2) / (2.0 * a)
                                + kr2 * (p + rho * v2 * c2))
    q = h2[0] / (1.0 - v2)
    w = c * h1[0] / h
    s_minus[0] = q + w
    s_plus[0] = q - w


cdef inline void smooth_dt(double rho, double v, double drho, double dv, Input* inp,
                           double* rt, double* vt) nogil:
    cdef double h1, h2, sm, sp
    cdef double c2 = inp.sigma * inp.sigma
    cdef double h = rho * (1.0 + c2)
    cdef double fac = inp.m / (1.0 - v * v * c2)
    cdef double diag = fac * v * (1.0 - c2)
    source_terms(rho, v, inp, &h1, &h2, &sm, &sp)
    rt[0] = h1 - diag * drho - fac * h * dv
    vt[0] = h2 - fac * (1.0 - v * v) * (1.0 - v * v) * c2 / h * drho - diag * dv


cdef inline double char_log_integral(double w, double sigma) nogil:
    return ((sigma - 1.0) * (sigma - 1.0) * log1p(w)
            - (sigma + 1.0) * (sigma + 1.0) * log1p(-w)) / (4.0 * sigma)


cdef inline double fan_weight(double beta, Input* inp, Fan* fan) nogil:
    cdef double rho, v, h1, h2, sm, sp
    fan_left(beta, fan, &rho, &v)
    source_terms(rho, v, inp, &h1, &h2, &sm, &sp)
    return sm / (lam_plus(v, fan.m, fan.sigma) - beta)


cdef double dpsi_in_fan(Input* inp, Fan* fan, double beta_end) nogil:
    cdef double sigma = fan.sigma
    cdef double m = fan.m
    cdef double c2 = sigma * sigma
    cdef double rho = inp.rl
    cdef double v = inp.vl
    cdef double h1, h2, sm, sp, dpsi_dr, d0, beta_l, g_end, decay, half, mid
    cdef double prev, cur, total, b, scale
    cdef int level, j
    source_terms(rho, v, inp, &h1, &h2, &sm, &sp)
    dpsi_dr = inp.dvl / (1.0 - v * v) + sigma * inp.drl / (rho * (1.0 + c2))
    d0 = sm + (lam_minus(v, m, sigma) - lam_plus(v, m, sigma)) * dpsi_dr
    beta_l = lam_minus(v, m, sigma)
    if beta_end == beta_l:
        return d0
    g_end = char_log_integral(beta_end / m, sigma)
    decay = exp(-(g_end - char_log_integral(beta_l / m, sigma)))
    half = 0.5 * (beta_end - beta_l)
    mid = 0.5 * (beta_end + beta_l)
    prev = 0.0
    for level in range(N_LEVELS):
        total = 0.0
        for j in range(_OFFSET[level], _OFFSET[level + 1]):
            b = mid + half * _NODES[j]
            total += _WEIGHTS[j] * fan_weight(b, inp, fan) * exp(-(g_end - char_log_integral(b / m, sigma)))
        cur = total * half
        if level > 0:
            scale = fabs(cur) + fabs(d0 * decay)
            if fabs(cur - prev) <= QUAD_RTOL * scale or scale == 0.0:
                prev = cur
                break
        prev = cur
    return d0 * decay + prev


cdef void rarefaction_pair(Input* inp, Fan* fan, double* pa, double* pb, double* pd) nogil:
    cdef double sigma = inp.sigma
    cdef double rho = fan.rho_s
    cdef double v = fan.v_s
    cdef double m = fan.m
    cdef double lm = lam_minus(v, m, sigma)
    cdef double lp = lam_plus(v, m, sigma)
    cdef double h1, h2, sm, sp, dpsi
    source_terms(rho, v, inp, &h1, &h2, &sm, &sp)
    dpsi = dpsi_in_fan(inp, fan, lm)
    pa[0] = sigma / (rho * (1.0 + sigma * sigma))
    pb[0] = 1.0 / (1.0 - v * v)
    pd[0] = (lp * dpsi - lm * sm) / (lp - lm)


cdef void phi_partials(double rho, double rho_bar, double sigma, double* pr, double* prb) nogil:
    cdef double s2 = sigma * sigma
    cdef double p = s2 * rho
    cdef double pb = s2 * rho_bar
    cdef double t = (rho + pb) * (rho_bar + p)
    cdef double den = 2.0 * t * sqrt(t)
    pr[0] = (rho_bar + pb) * (sigma * (rho + pb) + sigma * (rho_bar + p)) / den
    prb[0] = -(rho + p) * (sigma * (rho_bar + p) + sigma * (rho + pb)) / den
    if rho < rho_bar:
        pr[0] = -pr[0]
        prb[0] = -prb[0]


cdef int shock_pair(Input* inp, Fan* fan, double* pa, double* pb, double* pd) nogil:
    cdef double c2 = inp.sigma * inp.sigma
    cdef double rs = fan.rho_s
    cdef double vs = fan.v_s
    cdef double vr = inp.vr
    cdef double m = fan.m
    cdef double s = fan.s_r
    cdef double h = rs * (1.0 + c2)
    cdef double big_k = vs * vs - c2 - s * vs * (1.0 - c2) / m
    cdef double den = (1.0 - vs * vr) * (1.0 - vs * vr)
    cdef double ell = (vr * vr - 1.0) / den
    cdef double phi_r, phi_rb, h1, h2, sm, sp, diag, off, k, pi1, pi2, rt, vt
    if rs == inp.rr:
        return 2
    phi_partials(rs, inp.rr, inp.sigma, &phi_r, &phi_rb)
    pa[0] = phi_r * big_k + ell * s * (1.0 - vs * vs) * (1.0 - vs * vs) * c2 / (m * h)
    pb[0] = phi_r * s * h / m + ell * big_k
    source_terms(rs, vs, inp, &h1, &h2, &sm, &sp)
    diag = vs * (1.0 - c2)
    off = (1.0 - vs * vs) * (1.0 - vs * vs) * c2 / h
    k = -s / m
    pi1 = k * (diag * h1 - h * h2)
    pi2 = k * (-off * h1 + diag * h2)
    smooth_dt(inp.rr, vr, inp.drr, inp.dvr, inp, &rt, &vt)
    pd[0] = (phi_r * pi1 + ell * pi2
             + (vs * vs - c2) * ((vs * vs - 1.0) / den * (vt + s * inp.dvr)
                                 - phi_rb * (rt + s * inp.drr)))
    return 0


cdef inline void reflect_input(Input* src, Input* dst) nogil:
    dst[0] = src[0]
    dst.rl = src.rr
    dst.vl = -src.vr
    dst.rr = src.rl
    dst.vr = -src.vl
    dst.drl = -src.drr
    dst.dvl = src.dvr
    dst.drr = -src.drl
    dst.dvr = src.dvl
    dst.sign = -src.sign


cdef inline void mirror(Fan* src, Fan* dst) nogil:
    dst[0] = src[0]
    dst.rho_l = src.rho_r
    dst.v_l = -src.v_r
    dst.rho_r = src.rho_l
    dst.v_r = -src.v_l
    dst.v_s = -src.v_s
    dst.shock_l = src.shock_r
    dst.shock_r = src.shock_l
    dst.s_l = -src.s_r
    dst.s_r = -src.s_l
    dst.head_l = -src.head_r
    dst.tail_l = -src.tail_r
    dst.tail_r = -src.tail_l
    dst.head_r = -src.head_l


cdef void sonic(Input* inp, Fan* fan, double* rho, double* v, double* rt, double* vt) nogil:
    cdef double h1, h2, sm, sp, dpsi, h
    cdef double sigma = inp.sigma
    fan_left(0.0, fan, rho, v)
    dpsi = dpsi_in_fan(inp, fan, 0.0)
    source_terms(rho[0], v[0], inp, &h1, &h2, &sm, &sp)
    h = rho[0] * (1.0 + sigma * sigma)
    rt[0] = h / (2.0 * sigma) * (dpsi - sp)
    vt[0] = 0.5 * (1.0 - v[0] * v[0]) * (dpsi + sp)


cdef void acoustic(Input* inp, double* rt, double* vt) nogil:
    cdef double c = inp.sigma
    cdef double rho = inp.rl
    cdef double v = inp.vl
    cdef double lm = lam_minus(v, inp.m, c)
    cdef double lp = lam_plus(v, inp.m, c)
    cdef double h1, h2, sm, sp, g
    if lm >= 0.0:
        smooth_dt(rho, v, inp.drl, inp.dvl, inp, rt, vt)
        return
    if lp <= 0.0:
        smooth_dt(inp.rr, inp.vr, inp.drr, inp.dvr, inp, rt, vt)
        return
    source_terms(rho, v, inp, &h1, &h2, &sm, &sp)
    g = rho * (1.0 + c * c) / (c * (1.0 - v * v))
    rt[0] = -0.5 * (lp * inp.drl + lm * inp.drr + g * (lp * inp.dvl - lm * inp.dvr)) + h1
    vt[0] = -0.5 * (lp * inp.dvl + lm * inp.dvr + (lp * inp.drl - lm * inp.drr) / g) + h2


cdef int resolve(Input* inp, double* rho, double* v, double* rt, double* vt) nogil:
    cdef Fan fan, rfan
    cdef Input rinp
    cdef double jump, tol, la, lb, ld, ra, rb, rd, det, scale
    cdef int have_reflected = 0
    if solve_star(inp.rl, inp.vl, inp.rr, inp.vr, inp.m, inp.sigma, &fan) != 0:
        return 1
    jump = hypot(inp.rl - inp.rr, inp.vl - inp.vr)
    if jump <= ACOUSTIC_TOL * (hypot(inp.rl, inp.vl) + 1e-300):
        sample0(&fan, rho, v)
        acoustic(inp, rt, vt)
        return 0
    tol = SONIC_TOL * fan.m

    if fan.shock_l:
        if fan.s_l > 0.0:
            rho[0] = inp.rl
            v[0] = inp.vl
            smooth_dt(inp.rl, inp.vl, inp.drl, inp.dvl, inp, rt, vt)
            return 0
    else:
        if fan.head_l > tol:
            rho[0] = inp.rl
            v[0] = inp.vl
            smooth_dt(inp.rl, inp.vl, inp.drl, inp.dvl, inp, rt, vt)
            return 0
        if fan.tail_l >= -tol:
            sonic(inp, &fan, rho, v, rt, vt)
            return 0

    if fan.shock_r:
        if fan.s_r < 0.0:
            rho[0] = inp.rr
            v[0] = inp.vr
            smooth_dt(inp.rr, inp.vr, inp.drr, inp.dvr, inp, rt, vt)
            return 0
    else:
        if fan.head_r < -tol:
            rho[0] = inp.rr
            v[0] = inp.vr
            smooth_dt(inp.rr, inp.vr, inp.drr, inp.dvr, inp, rt, vt)
            return 0
        if fan.tail_r <= tol:
            reflect_input(inp, &rinp)
            mirror(&fan, &rfan)
            sonic(&rinp, &rfan, rho, v, rt, vt)
            v[0] = -v[0]
            vt[0] = -vt[0]
            return 0

    if not fan.shock_l:
        rarefaction_pair(inp, &fan, &la, &lb, &ld)
    else:
        reflect_input(inp, &rinp)
        mirror(&fan, &rfan)
        have_reflected = 1
        if shock_pair(&rinp, &rfan, &la, &lb, &ld) != 0:
            return 2
        lb = -lb
    if fan.shock_r:
        if shock_pair(inp, &fan, &ra, &rb, &rd) != 0:
            return 2
    else:
        if not have_reflected:
            reflect_input(inp, &rinp)
            mirror(&fan, &rfan)
        rarefaction_pair(&rinp, &rfan, &ra, &rb, &rd)
        rb = -rb
    det = la * rb - ra * lb
    scale = fabs(la * rb) + fabs(ra * lb)
    if fabs(det) <= 1e-300 or fabs(det) <= 1e-14 * scale:
        return 2
    rho[0] = fan.rho_s
    v[0] = fan.v_s
    rt[0] = (ld * rb - rd * lb) / det
    vt[0] = (la * rd - ra * ld) / det
    return 0


# -- batch entry points -------------------------------------------------------------

def rp_batch(double[::1] rho_l, double[::1] v_l, double[::1] rho_r, double[::1] v_r,
             double[::1] a, double[::1] b, double sigma):
    """Riemann solution sampled at xi = 0 for every interface."""
    cdef Py_ssize_t n = rho_l.shape[0], i
    rho0 = np.empty(n)
    v0 = np.empty(n)
    status = np.zeros(n, dtype=np.int32)
    cdef double[::1] ro = rho0, vo = v0
    cdef int[::1] st = status
    cdef Fan fan
    with nogil:
        for i in range(n):
            if solve_star(rho_l[i], v_l[i], rho_r[i], v_r[i], sqrt(a[i] * b[i]), sigma, &fan) != 0:
                st[i] = 1
                ro[i] = NAN
                vo[i] = NAN
                continue
            sample0(&fan, &ro[i], &vo[i])
    return rho0, v0, status


def grp_batch(double[::1] rho_l, double[::1] v_l, double[::1] rho_r, double[::1] v_r,
              double[::1] drho_l, double[::1] dv_l, double[::1] drho_r, double[::1] dv_r,
              double[::1] a, double[::1] b, double[::1] r, double kappa, double sigma):
    """Riemann value at xi = 0 and its time derivative in primitive variables."""
    cdef Py_ssize_t n = rho_l.shape[0], i
    out = np.empty((4, n))
    status = np.zeros(n, dtype=np.int32)
    cdef double[:, ::1] o = out
    cdef int[::1] st = status
    cdef Input inp
    cdef int code
    with nogil:
        for i in range(n):
            inp.rl = rho_l[i]
            inp.vl = v_l[i]
            inp.rr = rho_r[i]
            inp.vr = v_r[i]
            inp.drl = drho_l[i]
            inp.dvl = dv_l[i]
            inp.drr = drho_r[i]
            inp.dvr = dv_r[i]
            inp.a = a[i]
            inp.b = b[i]
            inp.r = r[i]
            inp.kappa = kappa
            inp.sigma = sigma
            inp.sign = 1.0
            inp.m = sqrt(a[i] * b[i])
            code = resolve(&inp, &o[0, i], &o[1, i], &o[2, i], &o[3, i])
            if code != 0:
                st[i] = code
                o[0, i] = NAN
                o[1, i] = NAN
                o[2, i] = NAN
                o[3, i] = NAN
    return out[0], out[1], out[2], out[3], status
