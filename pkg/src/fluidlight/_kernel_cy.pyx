# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=False
"""Cython build of the event-driven buffer integrator.

Line-for-line translation of _kernel_py.integrate with typed locals.  The
operation order is identical, so results are bit-identical to the pure-Python
backend; only the interpreter overhead of the event loop is removed.
"""

from libc.math cimport sqrt, isinf

EPS = 1e-12

RED_START = 0
GREEN_START = 1
BUFFER_EMPTY = 2
BUFFER_NONEMPTY = 3
RAMP_SATURATION = 4
ARRIVAL_CHANGE = 5
HORIZON = 6

cdef double _EPS = 1e-12
cdef long _MAX_ITER = 10_000_000


cdef inline double _empty_hit(double x, double c, double s, double dt,
                              double tau_min) nogil:
    cdef double disc, sq, q, a2, best, r
    if s == 0.0:
        if c < 0.0:
            r = -x / c
            if r > tau_min and r <= dt + _EPS:
                return r
        return -1.0
    disc = c * c + 2.0 * s * x
    if disc < 0.0:
        return -1.0
    sq = sqrt(disc)
    if c >= 0.0:
        q = -0.5 * (c + sq)
    else:
        q = -0.5 * (c - sq)
    a2 = -0.5 * s
    best = -1.0
    r = q / a2
    if r > tau_min and r <= dt + _EPS:
        best = r
    if q != 0.0:
        r = x / q
        if r > tau_min and r <= dt + _EPS and (best < 0.0 or r < best):
            best = r
    return best


def empty_hit(double x, double c, double s, double dt, double tau_min):
    return _empty_hit(x, c, s, dt, tau_min)


def integrate(double theta, double C, long N, double x0, double beta_max,
              double ramp_rate, double[::1] bounds, double[::1] rates):
    cdef double T = N * C
    cdef Py_ssize_t m = rates.shape[0]
    cdef bint ramp_inf = isinf(ramp_rate)

    segments = []
    events = []

    cdef double t = 0.0
    cdef double x = x0
    cdef long k = 0
    cdef Py_ssize_t ai = 0
    cdef bint all_green = theta <= 0.0
    cdef bint all_red = theta >= C
    cdef bint red = not all_green
    cdef double g0 = 0.0
    cdef bint latched = False
    cdef bint frozen = x == 0.0
    cdef double threshold = 0.0

    cdef double br, alpha, b0, bs, v, te, t_switch, t_arr, t_sat, t_empty
    cdef double c, tau_min, tau, dt, bleft
    cdef bint hit_empty, hit_switch, hit_arr, hit_sat, at_horizon
    cdef long it = 0

    if red:
        events.append((0.0, RED_START, 0.0, 0.0, x))
        threshold = 0.0
    else:
        if frozen:
            latched = True
        br = beta_max if (latched or ramp_inf) else 0.0
        events.append((0.0, GREEN_START, 0.0, br, x))
        threshold = beta_max
    if frozen:
        if rates[0] > threshold + _EPS:
            events.append((0.0, BUFFER_NONEMPTY, threshold, threshold, 0.0))
            frozen = False
    else:
        br = 0.0 if red else (beta_max if (latched or ramp_inf) else 0.0)
        events.append((0.0, BUFFER_NONEMPTY, br, br, x))

    while True:
        it += 1
        if it > _MAX_ITER:
            raise RuntimeError("event loop failed to terminate")

        alpha = rates[ai]

        if frozen:
            b0 = alpha
            bs = 0.0
        elif red:
            b0 = 0.0
            bs = 0.0
        elif latched or ramp_inf:
            b0 = beta_max
            bs = 0.0
        elif ramp_rate > 0.0 and t >= g0 + beta_max / ramp_rate - _EPS:
            # at or past the ramp saturation time (time-based test: the rate
            # value itself can round to just below beta_max)
            b0 = beta_max
            bs = 0.0
        else:
            b0 = ramp_rate * (t - g0)
            if b0 > beta_max:
                b0 = beta_max
            bs = ramp_rate

        te = T
        if all_red:
            t_switch = (k + 1) * C
        elif red:
            t_switch = k * C + theta
        else:
            t_switch = (k + 1) * C
        if t_switch < te:
            te = t_switch
        if ai + 1 < m:
            t_arr = bounds[ai + 1]
            if t_arr < te:
                te = t_arr
        else:
            t_arr = T + 1.0
        t_sat = T + 1.0
        if bs != 0.0 and ramp_rate > 0.0:
            t_sat = g0 + beta_max / ramp_rate
            if t_sat < te:
                te = t_sat
        t_empty = T + 1.0
        if not frozen:
            c = alpha - b0
            tau_min = 0.0 if x > 0.0 else _EPS
            tau = _empty_hit(x, c, bs, te - t, tau_min)
            if tau > 0.0:
                t_empty = t + tau
                if t_empty < te:
                    te = t_empty

        dt = te - t
        if dt > 0.0:
            segments.append((t, te, x, alpha, b0, bs))
            if not frozen:
                x = x + (alpha - b0) * dt - 0.5 * bs * dt * dt
                if x < 0.0:
                    x = 0.0

        if frozen:
            bleft = threshold
        else:
            bleft = b0 + bs * dt
            if bleft > beta_max:
                bleft = beta_max

        hit_empty = (not frozen) and t_empty <= te + _EPS
        hit_switch = t_switch <= te + _EPS
        hit_arr = t_arr <= te + _EPS
        hit_sat = t_sat <= te + _EPS
        at_horizon = T <= te + _EPS

        t = te

        if hit_empty:
            x = 0.0
            frozen = True
            if red:
                threshold = 0.0
                events.append((t_empty, BUFFER_EMPTY, bleft, 0.0, 0.0))
                bleft = 0.0
            else:
                latched = True
                threshold = beta_max
                events.append((t_empty, BUFFER_EMPTY, bleft, beta_max, 0.0))
                bleft = beta_max

        if hit_switch and t_switch < T - _EPS:
            if all_red:
                k += 1
                events.append((t_switch, RED_START, bleft, 0.0, x))
                bleft = 0.0
            elif red:
                red = False
                g0 = t_switch
                if frozen:
                    latched = True
                    threshold = beta_max
                    br = beta_max
                else:
                    latched = False
                    br = beta_max if ramp_inf else 0.0
                events.append((t_switch, GREEN_START, bleft, br, x))
                bleft = br
            elif all_green:
                k += 1
                g0 = k * C
                if frozen:
                    latched = True
                    threshold = beta_max
                    br = beta_max
                else:
                    latched = False
                    br = beta_max if ramp_inf else 0.0
                events.append((t_switch, GREEN_START, bleft, br, x))
                bleft = br
            else:
                k += 1
                red = True
                latched = False
                if frozen:
                    threshold = 0.0
                events.append((t_switch, RED_START, bleft, 0.0, x))
                bleft = 0.0

        if hit_arr:
            while ai + 1 < m and bounds[ai + 1] <= te + _EPS:
                ai += 1
            if t_arr < T - _EPS:
                events.append((t_arr, ARRIVAL_CHANGE, bleft, bleft, x))

        if (hit_sat and t_sat < T - _EPS and not frozen and not red
                and not latched and bs != 0.0):
            events.append((t_sat, RAMP_SATURATION, beta_max, beta_max, x))

        if frozen and not at_horizon:
            alpha = rates[ai]
            if alpha > threshold + _EPS:
                events.append((t, BUFFER_NONEMPTY, threshold, threshold, 0.0))
                frozen = False

        if at_horizon:
            events.append((T, HORIZON, bleft, bleft, x))
            break

    return segments, events, x
