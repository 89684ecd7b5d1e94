"""Compiled kernels: per-site clock streams and chronological sweeps.

Every site owns an independent xoshiro256++ substream keyed by (seed, site)
through a splitmix64 mix.  A clock event consumes exactly two raw draws, in
order: the exponential gap to the previous event, then the update uniform.
Any consumer that walks a site's clock therefore reproduces bit-identical
event times and uniforms, whether it materializes arrays up front
(`_site_events`) or draws lazily inside a sweep.

Gaps map the raw 53-bit output through (k + 0.5) * 2^-53 so they are
strictly positive; uniforms use k * 2^-53 and lie in [0, 1).
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

U64 = np.uint64
_GOLD = U64(0x9E3779B97F4A7C15)
_MIX1 = U64(0xBF58476D1CE4E5B9)
_MIX2 = U64(0x94D049BB133111EB)
_INV53 = 1.0 / 9007199254740992.0  # 2^-53

# site keys for auxiliary streams (random backgrounds); real sites never
# reach this range
BG_TAG = np.int64(1) << np.int64(40)


@njit(cache=True, inline="always")
def _mix(x):
    # splitmix64: returns (advanced state, output)
    x = x + _GOLD
    z = x
    z = (z ^ (z >> U64(30))) * _MIX1
    z = (z ^ (z >> U64(27))) * _MIX2
    z = z ^ (z >> U64(31))
    return x, z


@njit(cache=True, inline="always")
def _rotl(x, k):
    return (x << k) | (x >> (U64(64) - k))


@njit(cache=True, inline="always")
def _init_site(seed, site, s):
    x = seed
    x, h = _mix(x)
    x = h ^ (U64(site) * _GOLD)
    x, s[0] = _mix(x)
    x, s[1] = _mix(x)
    x, s[2] = _mix(x)
    x, s[3] = _mix(x)


@njit(cache=True, inline="always")
def _next64(s):
    out = _rotl(s[0] + s[3], U64(23)) + s[0]
    t = s[1] << U64(17)
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = _rotl(s[3], U64(45))
    return out


@njit(cache=True, inline="always")
def _u01(s):
    return np.float64(_next64(s) >> U64(11)) * _INV53


@njit(cache=True, inline="always")
def _gap(s):
    u = (np.float64(_next64(s) >> U64(11)) + 0.5) * _INV53
    return -np.log(u)


# ---------------------------------------------------------------------------
# single-site streams and agreement intervals
# ---------------------------------------------------------------------------


@njit(cache=True)
def _site_events(seed, site, t_max):
    """All (time, uniform) pairs with time <= t_max for one site's clock."""
    cap = int(t_max + 6.0 * np.sqrt(t_max + 1.0)) + 16
    times = np.empty(cap, np.float64)
    unifs = np.empty(cap, np.float64)
    s = np.empty(4, np.uint64)
    _init_site(seed, site, s)
    t = 0.0
    m = 0
    while True:
        g = _gap(s)
        u = _u01(s)
        t += g
        if t > t_max:
            break
        if m >= cap:
            cap *= 2
            nt = np.empty(cap, np.float64)
            nu = np.empty(cap, np.float64)
            nt[:m] = times[:m]
            nu[:m] = unifs[:m]
            times = nt
            unifs = nu
        times[m] = t
        unifs[m] = u
        m += 1
    return times[:m].copy(), unifs[:m].copy()


@njit(cache=True)
def _scan_intervals(times, unifs, beta, delta):
    """Agreement intervals of one site: open at u < beta while outside,
    close at the first u >= 1 - delta while inside.

    Intervals are closed at both ends and annotated with the indices of
    their opening and closing events; an interval still open after the
    last event gets end = inf and closing index -1 (the caller extends
    coverage and rescans).
    """
    m = times.shape[0]
    starts = np.empty(m + 1, np.float64)
    ends = np.empty(m + 1, np.float64)
    open_idx = np.empty(m + 1, np.int64)
    close_idx = np.empty(m + 1, np.int64)
    kill = 1.0 - delta
    k = 0
    inside = False
    for i in range(m):
        u = unifs[i]
        if inside:
            if u >= kill:
                ends[k] = times[i]
                close_idx[k] = i
                k += 1
                inside = False
        else:
            if u < beta:
                starts[k] = times[i]
                open_idx[k] = i
                inside = True
    if inside:
        ends[k] = np.inf
        close_idx[k] = -1
        k += 1
    return starts[:k].copy(), ends[:k].copy(), open_idx[:k].copy(), close_idx[:k].copy()


@njit(cache=True, parallel=True)
def _membership_batch(seed0, reps, site, t, beta, delta):
    """For each replica stream, is (t, site) inside an agreement interval."""
    out = np.zeros(reps, np.uint8)
    for r in prange(reps):
        s = np.empty(4, np.uint64)
        _init_site(seed0 + U64(r), site, s)
        tt = 0.0
        inside = False
        last_close = -1.0
        while True:
            g = _gap(s)
            u = _u01(s)
            tt += g
            if tt > t:
                break
            if inside:
                if u >= 1.0 - delta:
                    inside = False
                    last_close = tt
            else:
                if u < beta:
                    inside = True
        if inside or last_close == t:
            out[r] = 1
    return out


@njit(cache=True)
def _bg_states(seed, tag_index, count, n, bern_p):
    """Deterministic random background: `count` states off an auxiliary
    stream keyed by BG_TAG + tag_index.  Two states draw Bernoulli(bern_p),
    larger alphabets draw uniformly."""
    out = np.empty(count, np.int8)
    s = np.empty(4, np.uint64)
    _init_site(seed, BG_TAG + tag_index, s)
    for i in range(count):
        u = _u01(s)
        if n == 2:
            out[i] = 1 if u < bern_p else 0
        else:
            v = np.int8(u * n)
            out[i] = v if v < n else np.int8(n - 1)
    return out


# ---------------------------------------------------------------------------
# windowed sweeps under the canonical coupling
# ---------------------------------------------------------------------------


@njit(cache=True, inline="always")
def _sift(ht, hi, size, start):
    # Min-heap keyed by (time, site offset): exact time ties cannot occur
    # with continuous clocks but are broken toward the smaller site index
    # if quantization ever produces one.
    i = start
    t = ht[i]
    s = hi[i]
    while True:
        c = 2 * i + 1
        if c >= size:
            break
        if c + 1 < size and (ht[c + 1] < ht[c] or (ht[c + 1] == ht[c] and hi[c + 1] < hi[c])):
            c += 1
        if ht[c] < t or (ht[c] == t and hi[c] < s):
            ht[i] = ht[c]
            hi[i] = hi[c]
            i = c
        else:
            break
    ht[i] = t
    hi[i] = s


@njit(cache=True)
def _heapify(ht, hi):
    for start in range(ht.shape[0] // 2 - 1, -1, -1):
        _sift(ht, hi, ht.shape[0], start)


@njit(cache=True)
def _sweep_record(seed, left, right, horizon, init, right_boundary, cum, order):
    """Run K coupled trajectories on one window, recording every event.

    init is (K, S) with S = right - left + 1; all trajectories share the
    event streams, the fixed right-boundary state, and the bucket tables.
    Returns (times, sites, after) where after[m, k] is trajectory k's state
    at the event's site just after event m.
    """
    S = right - left + 1
    K = init.shape[0]
    states = np.empty((K, S + 1), np.int8)
    for k in range(K):
        states[k, :S] = init[k]
        states[k, S] = right_boundary
    st = np.empty((S, 4), np.uint64)
    ht = np.empty(S, np.float64)
    hi = np.empty(S, np.int64)
    for i in range(S):
        _init_site(seed, left + i, st[i])
        ht[i] = _gap(st[i])
        hi[i] = i
    _heapify(ht, hi)

    cap = int(S * horizon + 6.0 * np.sqrt(S * horizon + 1.0)) + 64
    ev_t = np.empty(cap, np.float64)
    ev_site = np.empty(cap, np.int64)
    ev_after = np.empty((cap, K), np.int8)
    m = 0
    while True:
        t = ht[0]
        if t > horizon:
            break
        i = hi[0]
        u = _u01(st[i])
        if m >= cap:
            cap *= 2
            nt = np.empty(cap, np.float64)
            ns = np.empty(cap, np.int64)
            na = np.empty((cap, K), np.int8)
            nt[:m] = ev_t[:m]
            ns[:m] = ev_site[:m]
            na[:m] = ev_after[:m]
            ev_t, ev_site, ev_after = nt, ns, na
        ev_t[m] = t
        ev_site[m] = i + left
        for k in range(K):
            a0 = states[k, i]
            a1 = states[k, i + 1]
            c = 0
            while u >= cum[a0, a1, c]:
                c += 1
            b = order[c]
            states[k, i] = b
            ev_after[m, k] = np.int8(b)
        m += 1
        ht[0] = t + _gap(st[i])
        _sift(ht, hi, S, 0)
    return ev_t[:m].copy(), ev_site[:m].copy(), ev_after[:m].copy()


@njit(cache=True, parallel=True)
def _pi_batch(seed0, reps, left, right, horizon, cum, order, n_random, bern_p):
    """Coalescence times of site-0 perturbations over sampled backgrounds.

    Per replica: backgrounds are the n constant configurations plus
    n_random product-sampled ones; each background spawns the n variants
    that differ from it only at site 0.  A variant group has coalesced once
    all its members agree on the whole window; the replica's value is the
    latest group coalescence time.  Status bits: 1 = some group still
    disagreed at the horizon, 2 = disagreement reached the left window
    edge.
    """
    n = cum.shape[0]
    B = n + n_random
    K = B * n
    S = right - left + 1
    idx0 = -left
    pi = np.empty(reps, np.float64)
    status = np.zeros(reps, np.uint8)
    for r in prange(reps):
        seed = seed0 + U64(r)
        states = np.empty((K, S + 1), np.int8)
        for b in range(B):
            row0 = b * n
            if b < n:
                for i in range(S + 1):
                    states[row0, i] = b
            else:
                bs = np.empty(4, np.uint64)
                _init_site(seed, BG_TAG + np.int64(b - n), bs)
                for i in range(S + 1):
                    u = _u01(bs)
                    if n == 2:
                        states[row0, i] = 1 if u < bern_p else 0
                    else:
                        v = np.int8(u * n)
                        states[row0, i] = v if v < n else np.int8(n - 1)
            for v in range(1, n):
                for i in range(S + 1):
                    states[row0 + v, i] = states[row0, i]
            for v in range(n):
                states[row0 + v, idx0] = v

        st = np.empty((S, 4), np.uint64)
        ht = np.empty(S, np.float64)
        hi = np.empty(S, np.int64)
        for i in range(S):
            _init_site(seed, left + i, st[i])
            ht[i] = _gap(st[i])
            hi[i] = i
        _heapify(ht, hi)

        diff = np.empty(B, np.int64)
        coal = np.zeros(B, np.float64)
        for g in range(B):
            diff[g] = 1
        total = B
        newk = np.empty(K, np.int8)
        touched = False
        while True:
            t = ht[0]
            if t > horizon:
                break
            i = hi[0]
            u = _u01(st[i])
            for k in range(K):
                a0 = states[k, i]
                a1 = states[k, i + 1]
                c = 0
                while u >= cum[a0, a1, c]:
                    c += 1
                newk[k] = np.int8(order[c])
            for g in range(B):
                base = g * n
                beq = True
                aeq = True
                b0 = states[base, i]
                a0n = newk[base]
                for v in range(1, n):
                    if states[base + v, i] != b0:
                        beq = False
                    if newk[base + v] != a0n:
                        aeq = False
                if not aeq and i == 0:
                    touched = True
                if beq and not aeq:
                    diff[g] += 1
                    total += 1
                elif not beq and aeq:
                    diff[g] -= 1
                    total -= 1
                    if diff[g] == 0:
                        coal[g] = t
            for k in range(K):
                states[k, i] = newk[k]
            if total == 0:
                break
            ht[0] = t + _gap(st[i])
            _sift(ht, hi, S, 0)
        pm = 0.0
        for g in range(B):
            if diff[g] > 0:
                status[r] |= 1
                pm = horizon
            elif coal[g] > pm:
                pm = coal[g]
        if touched:
            status[r] |= 2
        pi[r] = pm
    return pi, status


# ---------------------------------------------------------------------------
# the cone chain
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _cone_batch(seed0, reps, T, max_depth):
    """sigma = first chain depth whose linking event falls beyond T.

    The chain takes s_k = first event at site -k strictly after s_{k-1},
    starting from s_0 = 0.  Returns -1 where max_depth was exhausted.
    """
    out = np.empty(reps, np.int64)
    for r in prange(reps):
        seed = seed0 + U64(r)
        s_prev = 0.0
        sig = -1
        st = np.empty(4, np.uint64)
        for k in range(1, max_depth + 1):
            _init_site(seed, np.int64(-k), st)
            t = 0.0
            while True:
                g = _gap(st)
                _u01(st)
                t += g
                if t > s_prev:
                    break
            if t > T:
                sig = k
                break
            s_prev = t
        out[r] = sig
    return out


# ---------------------------------------------------------------------------
# drift sampling at a fixed height
# ---------------------------------------------------------------------------


@njit(cache=True, parallel=True)
def _drift_batch(seed0, reps, beta, delta, T):
    """One-step increments of the downward and upward walks at height T.

    Per replica stream: branch 0 means T lies inside an agreement interval
    (the X walk jumps down to its start, the Y walk to its end); branch 1
    means outside (X waits for the next opening, Y for the next event).
    dchk re-estimates the jump-down integrand from two fresh exponential
    draws, independent of the interval scan.
    """
    branch = np.empty(reps, np.uint8)
    dy = np.empty(reps, np.float64)
    dx = np.empty(reps, np.float64)
    dchk = np.empty(reps, np.float64)
    kill = 1.0 - delta
    for r in prange(reps):
        s = np.empty(4, np.uint64)
        _init_site(seed0 + U64(r), 0, s)
        t = 0.0
        inside = False
        cur_start = 0.0
        while True:
            g = _gap(s)
            u = _u01(s)
            t += g
            if t > T:
                break
            if inside:
                if u >= kill:
                    inside = False
            else:
                if u < beta:
                    inside = True
                    cur_start = t
        if inside:
            branch[r] = 0
            dx[r] = cur_start - T
            while u < kill:
                g = _gap(s)
                u = _u01(s)
                t += g
            dy[r] = t - T
        else:
            branch[r] = 1
            dy[r] = t - T
            while u >= beta:
                g = _gap(s)
                u = _u01(s)
                t += g
            dx[r] = t - T
        xdraw = _gap(s) / beta
        wdraw = _gap(s) / delta
        w = wdraw if wdraw < T else T
        v = xdraw - w
        dchk[r] = v if v < 0.0 else 0.0
    return branch, dy, dx, dchk


# ---------------------------------------------------------------------------
# the paired walks
# ---------------------------------------------------------------------------


@njit(cache=True)
def _first_start(seed, site, beta, delta):
    """Infimum of one site's agreement set."""
    cover = 8.0 / beta + 8.0
    while True:
        times, unifs = _site_events(seed, site, cover)
        starts, _, _, _ = _scan_intervals(times, unifs, beta, delta)
        if starts.shape[0] > 0:
            return starts[0]
        cover = cover * 1.7 + 4.0


@njit(cache=True)
def _walk_site(seed, site, beta, delta, x, y, s_prev):
    """Resolve one step of both walks against one site's agreement set.

    Returns (x2, y2, s_next, x_in, y_in); the site's events are rescanned
    with growing coverage until every query resolves inside it.
    """
    cover = max(x, y, s_prev) + 8.0 / beta + 8.0 / delta + 8.0
    x2 = 0.0
    y2 = 0.0
    s_next = 0.0
    x_in = False
    y_in = False
    while True:
        times, unifs = _site_events(seed, site, cover)
        starts, ends, _, _ = _scan_intervals(times, unifs, beta, delta)
        ok = True

        j = np.searchsorted(times, s_prev, side="right")
        if j < times.shape[0]:
            s_next = times[j]
        else:
            ok = False

        i = np.searchsorted(starts, y, side="right") - 1
        if i >= 0 and y <= ends[i]:
            y_in = True
            y2 = ends[i]
            if y2 == np.inf:
                ok = False
        else:
            y_in = False
            jy = np.searchsorted(times, y, side="left")
            if jy < times.shape[0]:
                y2 = times[jy]
            else:
                ok = False

        i = np.searchsorted(starts, x, side="right") - 1
        if i >= 0 and x <= ends[i]:
            x_in = True
            x2 = starts[i]
        else:
            x_in = False
            jx = np.searchsorted(starts, x, side="left")
            if jx < starts.shape[0]:
                x2 = starts[jx]
            else:
                ok = False

        if ok:
            return x2, y2, s_next, x_in, y_in
        cover = cover * 1.7 + 4.0


@njit(cache=True)
def _walk_run(seed, beta, delta, n_max):
    """Run the paired walks down to crossing or the step cap.

    Returns (xs, ys, ss, x_in, y_in, tau) with xs/ys/ss of length L+1 for L
    realized steps; tau = -1 when the cap was hit before X <= Y.
    """
    xs = np.empty(n_max + 1, np.float64)
    ys = np.empty(n_max + 1, np.float64)
    ss = np.empty(n_max + 1, np.float64)
    xina = np.empty(n_max, np.uint8)
    yina = np.empty(n_max, np.uint8)
    x = _first_start(seed, 0, beta, delta)
    y = 0.0
    s = 0.0
    xs[0] = x
    ys[0] = y
    ss[0] = s
    tau = -1
    L = 0
    for n in range(n_max):
        x, y, s, xin, yin = _walk_site(seed, np.int64(-(n + 1)), beta, delta, x, y, s)
        xina[n] = 1 if xin else 0
        yina[n] = 1 if yin else 0
        xs[n + 1] = x
        ys[n + 1] = y
        ss[n + 1] = s
        L = n + 1
        if x <= y:
            tau = L
            break
    return (
        xs[: L + 1].copy(),
        ys[: L + 1].copy(),
        ss[: L + 1].copy(),
        xina[:L].copy(),
        yina[:L].copy(),
        tau,
    )


@njit(cache=True, parallel=True)
def _walk_tau_batch(seed0, reps, beta, delta, n_max):
    """Crossing steps and running maxima of the paired walks, batched."""
    taus = np.empty(reps, np.int64)
    ms = np.empty(reps, np.float64)
    for r in prange(reps):
        seed = seed0 + U64(r)
        x = _first_start(seed, 0, beta, delta)
        y = 0.0
        s = 0.0
        m = x
        tau = -1
        for n in range(n_max):
            x, y, s, xin, yin = _walk_site(seed, np.int64(-(n + 1)), beta, delta, x, y, s)
            if x > m:
                m = x
            if x <= y:
                tau = n + 1
                break
        taus[r] = tau
        ms[r] = m
    return taus, ms
