"""Pure-Python event-driven integrator for the buffer process.

This is the reference implementation of the hot kernel.  A Cython translation
with identical operation order lives in _kernel_cy.pyx; fluidlight.kernel
selects the compiled version when available.  Both backends must produce
bit-identical output (the test suite checks this).

The buffer x evolves piecewise-quadratically: between events the arrival rate
is constant and the service rate is affine, so x(t) has an exact closed form
and every event time (light switch, arrival change, ramp saturation, buffer
empty) is found exactly rather than by stepping.
"""

import math

EPS = 1e-12

RED_START = 0
GREEN_START = 1
BUFFER_EMPTY = 2
BUFFER_NONEMPTY = 3
RAMP_SATURATION = 4
ARRIVAL_CHANGE = 5
HORIZON = 6

_MAX_ITER = 10_000_000


def empty_hit(x, c, s, dt, tau_min):
    """Smallest tau in (tau_min, dt] with x + c*tau - s*tau^2/2 == 0, else -1.

    Uses the cancellation-free quadratic root form (q/a and c/q with
    q = -(b + sign(b)*sqrt(disc))/2).
    """
    if s == 0.0:
        if c < 0.0:
            tau = -x / c
            if tau > tau_min and tau <= dt + EPS:
                return tau
        return -1.0
    # roots of (-s/2)*tau^2 + c*tau + x = 0
    disc = c * c + 2.0 * s * x
    if disc < 0.0:
        return -1.0
    sq = math.sqrt(disc)
    if c >= 0.0:
        q = -0.5 * (c + sq)
    else:
        q = -0.5 * (c - sq)
    a2 = -0.5 * s
    best = -1.0
    r = q / a2
    if r > tau_min and r <= dt + EPS:
        best = r
    if q != 0.0:
        r = x / q
        if r > tau_min and r <= dt + EPS and (best < 0.0 or r < best):
            best = r
    return best


def integrate(theta, C, N, x0, beta_max, ramp_rate, bounds, rates):
    """Integrate the buffer over [0, N*C].

    bounds/rates describe the piecewise-constant arrival realization
    (len(bounds) == len(rates) + 1, bounds[-1] >= N*C).

    Returns (segments, events, x_final) where segments are tuples
    (t_start, t_end, x_start, alpha, beta_start, beta_slope) and events are
    tuples (time, kind, beta_left, beta_right, x_at).  Event kinds are the
    module-level integer codes.
    """
    T = N * C
    m = len(rates)
    ramp_inf = math.isinf(ramp_rate)

    segments = []
    events = []

    t = 0.0
    x = x0
    k = 0
    ai = 0
    all_green = theta <= 0.0
    all_red = theta >= C
    red = not all_green
    g0 = 0.0
    latched = False
    frozen = x == 0.0
    threshold = 0.0

    # events at t = 0: the initial light phase, then the buffer state
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
        if rates[0] > threshold + EPS:
            events.append((0.0, BUFFER_NONEMPTY, threshold, threshold, 0.0))
            frozen = False
    else:
        br = 0.0 if red else (beta_max if (latched or ramp_inf) else 0.0)
        events.append((0.0, BUFFER_NONEMPTY, br, br, x))

    it = 0
    while True:
        it += 1
        if it > _MAX_ITER:
            raise RuntimeError("event loop failed to terminate")

        alpha = rates[ai]

        # service regime on the upcoming segment: beta(tt) = b0 + bs*(tt - t)
        if frozen:
            b0 = alpha
            bs = 0.0
        elif red:
            b0 = 0.0
            bs = 0.0
        elif latched or ramp_inf:
            b0 = beta_max
            bs = 0.0
        elif ramp_rate > 0.0 and t >= g0 + beta_max / ramp_rate - EPS:
            # at or past the ramp saturation time (time-based test: the rate
            # value itself can round to just below beta_max)
            b0 = beta_max
            bs = 0.0
        else:
            b0 = ramp_rate * (t - g0)
            if b0 > beta_max:
                b0 = beta_max
            bs = ramp_rate

        # candidate event times
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
            tau_min = 0.0 if x > 0.0 else EPS
            tau = empty_hit(x, c, bs, te - t, tau_min)
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

        # beta left-limit at te under the pre-event regime
        if frozen:
            bleft = threshold
        else:
            bleft = b0 + bs * dt
            if bleft > beta_max:
                bleft = beta_max

        hit_empty = (not frozen) and t_empty <= te + EPS
        hit_switch = t_switch <= te + EPS
        hit_arr = t_arr <= te + EPS
        hit_sat = t_sat <= te + EPS
        at_horizon = T <= te + EPS

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

        if hit_switch and t_switch < T - EPS:
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
            while ai + 1 < m and bounds[ai + 1] <= te + EPS:
                ai += 1
            if t_arr < T - EPS:
                events.append((t_arr, ARRIVAL_CHANGE, bleft, bleft, x))

        if (
            hit_sat
            and t_sat < T - EPS
            and not frozen
            and not red
            and not latched
            and bs != 0.0
        ):
            events.append((t_sat, RAMP_SATURATION, beta_max, beta_max, x))

        if frozen and not at_horizon:
            alpha = rates[ai]
            if alpha > threshold + EPS:
                events.append((t, BUFFER_NONEMPTY, threshold, threshold, 0.0))
                frozen = False

        if at_horizon:
            events.append((T, HORIZON, bleft, bleft, x))
            break

    return segments, events, x
