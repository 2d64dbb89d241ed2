# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled closed-loop tick kernel.

Operation-for-operation mirror of ``_loop_py.run_motion_loop`` (which in
turn composes the public trajectory/assist/patient functions).  Both
backends must produce bit-identical trajectories; keep any change here in
lockstep with the Python side.
"""

import numpy as np

from libc.math cimport ceil as cceil, cos, floor, log, sin, sqrt
from libc.stdint cimport uint64_t

cdef double TWO_PI = 6.283185307179586476925286766559
cdef double INVPHI = (sqrt(5.0) - 1.0) / 2.0
cdef int COARSE = 720
cdef double REFINE_TOL = 1e-10
cdef double U53 = 1.0 / 9007199254740992.0


cdef struct Rng:
    uint64_t state


cdef inline uint64_t rng_next(Rng* r) nogil:
    r.state = r.state + <uint64_t>0x9E3779B97F4A7C15
    cdef uint64_t z = r.state
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)


cdef inline double rng_uniform(Rng* r) nogil:
    return <double>(rng_next(r) >> 11) * U53


cdef inline double rng_gauss(Rng* r) nogil:
    cdef double u1 = rng_uniform(r)
    cdef double u2 = rng_uniform(r)
    return sqrt(-2.0 * log(1.0 - u1)) * cos(TWO_PI * u2)


cdef struct Curve:
    int kind  # 0 circle, 1 line, 2 lemniscate
    double cx, cy, size
    double ax, ay, bx, by


cdef inline void eval_pos(Curve* c, double s, double* ox, double* oy) nogil:
    cdef double th, u, dx, dy, sth, cth
    s = s - floor(s)
    if c.kind == 0:
        th = TWO_PI * s
        ox[0] = c.cx + c.size * cos(th)
        oy[0] = c.cy + c.size * sin(th)
    elif c.kind == 2:
        th = TWO_PI * s
        sth = sin(th)
        cth = cos(th)
        ox[0] = c.cx + c.size * cth
        oy[0] = c.cy + c.size * sth * cth
    else:
        if s <= 0.5:
            u = 2.0 * s
        else:
            u = 2.0 - 2.0 * s
        dx = c.bx - c.ax
        dy = c.by - c.ay
        ox[0] = c.ax + dx * u
        oy[0] = c.ay + dy * u


cdef inline double dist_sq(Curve* c, double s, double px, double py) nogil:
    cdef double x, y
    eval_pos(c, s, &x, &y)
    return (x - px) * (x - px) + (y - py) * (y - py)


cdef inline double refine(Curve* cu, double lo, double hi, double px, double py) nogil:
    cdef double a = lo, b = hi
    cdef double c = b - INVPHI * (b - a)
    cdef double d = a + INVPHI * (b - a)
    cdef double fc = dist_sq(cu, c, px, py)
    cdef double fd = dist_sq(cu, d, px, py)
    while b - a > REFINE_TOL:
        if fc < fd:
            b = d
            d = c
            fd = fc
            c = b - INVPHI * (b - a)
            fc = dist_sq(cu, c, px, py)
        else:
            a = c
            c = d
            fc = fd
            d = a + INVPHI * (b - a)
            fd = dist_sq(cu, d, px, py)
    return 0.5 * (a + b)


cdef double project_dev(Curve* c, double* table, double px, double py) nogil:
    """Global nearest-path distance via the coarse table + refinement."""
    cdef int i, best_i = 0
    cdef double best = 1e308, d2, x, y, lo, hi, s_star
    for i in range(COARSE):
        x = table[2 * i]
        y = table[2 * i + 1]
        d2 = (x - px) * (x - px) + (y - py) * (y - py)
        if d2 < best:
            best = d2
            best_i = i
    lo = (best_i - 1.0) / COARSE
    hi = (best_i + 1.0) / COARSE
    s_star = refine(c, lo, hi, px, py)
    s_star = s_star - floor(s_star)
    eval_pos(c, s_star, &x, &y)
    d2 = (x - px) * (x - px) + (y - py) * (y - py)
    # kept in lockstep with the Python projector: coarse hit wins ties
    if best < d2:
        d2 = best
    return sqrt(d2)


cdef double project_window(Curve* c, double prev_s, double px, double py,
                           double window) nogil:
    """Forward-window nearest parameter (monotone reference progression)."""
    cdef int n = <int>cceil(window * COARSE)
    if n < 2:
        n = 2
    cdef int i, best_i = 0
    cdef double best = 1e308, s, d2, lo, hi, s_star
    for i in range(n + 1):
        s = prev_s + window * i / n
        d2 = dist_sq(c, s, px, py)
        if d2 < best:
            best = d2
            best_i = i
    lo = prev_s + window * ((best_i - 1) if best_i - 1 > 0 else 0) / n
    hi = prev_s + window * ((best_i + 1) if best_i + 1 < n else n) / n
    s_star = refine(c, lo, hi, px, py)
    if s_star < prev_s:
        s_star = prev_s
    elif s_star > prev_s + window:
        s_star = prev_s + window
    return s_star


def run_motion_loop_c(
    int kind, double cx, double cy, double size,
    double ax, double ay, double bx, double by,
    double target_duration_s,
    double k_stiff, double deadband, double force_cap,
    double mass, double damping, double dt,
    double workspace_half, double ref_window,
    double kp, double kd, double sigma, double lag_tau, double noise_tau,
    double tremor_amp, double tremor_freq,
    long n_ticks, unsigned long long seed,
    double x0, double y0, double vx0, double vy0, double t0_ms,
    double s_ref0, double s_pace0, bint passive,
):
    cdef Curve curve
    curve.kind = kind
    curve.cx = cx
    curve.cy = cy
    curve.size = size
    curve.ax = ax
    curve.ay = ay
    curve.bx = bx
    curve.by = by

    cdef double[::1] table = np.empty(2 * COARSE)
    cdef int i
    cdef double tx_, ty_
    for i in range(COARSE):
        eval_pos(&curve, (<double>i) / COARSE, &tx_, &ty_)
        table[2 * i] = tx_
        table[2 * i + 1] = ty_

    t_arr = np.empty(n_ticks)
    x_arr = np.empty(n_ticks)
    y_arr = np.empty(n_ticks)
    dev_arr = np.empty(n_ticks)
    fx_arr = np.empty(n_ticks)
    fy_arr = np.empty(n_ticks)
    refs_arr = np.empty(n_ticks)
    err_arr = np.empty(n_ticks)
    cdef double[::1] t_v = t_arr
    cdef double[::1] x_v = x_arr
    cdef double[::1] y_v = y_arr
    cdef double[::1] dev_v = dev_arr
    cdef double[::1] fx_v = fx_arr
    cdef double[::1] fy_v = fy_arr
    cdef double[::1] refs_v = refs_arr
    cdef double[::1] err_v = err_arr

    cdef Rng rng
    rng.state = seed

    cdef double pace = 1.0 / target_duration_s
    cdef double x = x0, y = y0, vx = vx0, vy = vy0, t_ms = t0_ms
    cdef double s_ref = s_ref0, s_pace = s_pace0
    cdef double ou_x = 0.0, ou_y = 0.0
    cdef double filt_x = 0.0, filt_y = 0.0
    cdef bint has_filt = False
    cdef double distance = 0.0

    cdef long tick
    cdef double px_pace, py_pace, decay, kick, phase, targ_x, targ_y
    cdef double alpha, user_fx, user_fy, s_star, ref_x, ref_y, wrapped
    cdef double ex, ey, e, mag, scale, afx, afy, fx_tot, fy_tot
    cdef double prev_x, prev_y, dx, dy, dev

    for tick in range(n_ticks):
        s_pace = s_pace + pace * dt
        if passive:
            user_fx = 0.0
            user_fy = 0.0
        else:
            eval_pos(&curve, s_pace, &px_pace, &py_pace)
            # OU wander + tremor around the pacing point.
            decay = dt / noise_tau
            kick = sigma * sqrt(2.0 * dt / noise_tau)
            ou_x = ou_x + (-ou_x * decay + kick * rng_gauss(&rng))
            ou_y = ou_y + (-ou_y * decay + kick * rng_gauss(&rng))
            phase = TWO_PI * tremor_freq * (t_ms / 1000.0)
            targ_x = px_pace + ou_x + tremor_amp * sin(phase)
            targ_y = py_pace + ou_y + tremor_amp * cos(phase)
            if (not has_filt) or lag_tau <= 0:
                filt_x = targ_x
                filt_y = targ_y
            else:
                alpha = dt / lag_tau
                filt_x = filt_x + alpha * (targ_x - filt_x)
                filt_y = filt_y + alpha * (targ_y - filt_y)
            has_filt = True
            user_fx = kp * (filt_x - x) - kd * vx
            user_fy = kp * (filt_y - y) - kd * vy

        # Windowed forward projection of the handle onto the path.
        s_star = project_window(&curve, s_ref, x, y, ref_window)
        wrapped = s_star - floor(s_star)
        eval_pos(&curve, wrapped, &ref_x, &ref_y)
        s_ref = wrapped

        # Deadband restoring force.
        ex = x - ref_x
        ey = y - ref_y
        e = sqrt(ex * ex + ey * ey)
        if e <= deadband or k_stiff == 0.0:
            afx = 0.0
            afy = 0.0
        else:
            mag = k_stiff * (e - deadband)
            if mag > force_cap:
                mag = force_cap
            scale = mag / e
            afx = -ex * scale
            afy = -ey * scale

        # Semi-implicit Euler with workspace clamp.
        fx_tot = user_fx + afx
        fy_tot = user_fy + afy
        vx = vx + dt * (fx_tot - damping * vx) / mass
        vy = vy + dt * (fy_tot - damping * vy) / mass
        prev_x = x
        prev_y = y
        x = x + dt * vx
        y = y + dt * vy
        if x > workspace_half:
            x = workspace_half
            vx = 0.0
        elif x < -workspace_half:
            x = -workspace_half
            vx = 0.0
        if y > workspace_half:
            y = workspace_half
            vy = 0.0
        elif y < -workspace_half:
            y = -workspace_half
            vy = 0.0
        t_ms = t_ms + dt * 1000.0

        dx = x - prev_x
        dy = y - prev_y
        distance += sqrt(dx * dx + dy * dy)
        dev = project_dev(&curve, &table[0], x, y)

        t_v[tick] = t_ms
        x_v[tick] = x
        y_v[tick] = y
        dev_v[tick] = dev
        fx_v[tick] = afx
        fy_v[tick] = afy
        refs_v[tick] = s_ref
        err_v[tick] = e

    return (
        t_arr, x_arr, y_arr, dev_arr, fx_arr, fy_arr, refs_arr, err_arr,
        distance, x, y, vx, vy, t_ms, s_ref, s_pace,
    )
