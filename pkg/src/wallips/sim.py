"""Windowed simulation under the canonical coupling.

All trajectories on a window share one event stream: at each clock ring the
new state is picked by locating the update uniform inside the cumulative
bucket partition of the rule row for the current neighborhood, with the
designated long-lived state occupying the first bucket.  Coupled runs
therefore agree forever once they coincide, and disagreement spreads only
leftward because site j reads sites j and j+1.

The window is finite with a frozen right-boundary state.  Influence of the
boundary travels leftward at Poisson rate 1, so placing the right edge at
least horizon + 4*sqrt(horizon) beyond the sites of interest makes the
truncation invisible to non-censored runs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .model import TransitionRule
from .streams import EventStream

_Z95 = 1.959963984540054


class WindowMismatch(ValueError):
    """Configurations and event stream disagree about the site window."""


class WindowTooSmall(ValueError):
    """The site window cannot contain the cone of dependence."""


class UnderResolved(RuntimeError):
    """Too many replicas were censored for the estimate to be trusted."""


# ---------------------------------------------------------------------------
# configurations and bucket tables
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Configuration:
    """States on a site window plus the frozen state beyond the right edge."""

    window: tuple[int, int]
    states: np.ndarray
    right_boundary: int

    def __post_init__(self) -> None:
        left, right = int(self.window[0]), int(self.window[1])
        object.__setattr__(self, "window", (left, right))
        s = np.ascontiguousarray(self.states, dtype=np.int8).copy()
        if s.shape != (right - left + 1,):
            raise ValueError(
                f"states shape {s.shape} does not cover window [{left}, {right}]"
            )
        if np.any(s < 0):
            raise ValueError("states must be nonnegative alphabet indices")
        s.setflags(write=False)
        object.__setattr__(self, "states", s)
        object.__setattr__(self, "right_boundary", int(self.right_boundary))

    @classmethod
    def constant(
        cls, window: tuple[int, int], state: int, right_boundary: int | None = None
    ) -> "Configuration":
        size = int(window[1]) - int(window[0]) + 1
        rb = state if right_boundary is None else right_boundary
        return cls(window, np.full(size, state, dtype=np.int8), rb)

    @classmethod
    def random(
        cls,
        window: tuple[int, int],
        seed: int,
        n_states: int = 2,
        p: float = 0.5,
        tag: int = 0,
        right_boundary: int | None = None,
    ) -> "Configuration":
        """Product-sampled states off an auxiliary substream of `seed`.

        Two-state alphabets draw Bernoulli(p) per site, larger ones draw
        uniformly.  `tag` separates multiple backgrounds of one seed.
        """
        size = int(window[1]) - int(window[0]) + 1
        s = _kernels._bg_states(
            np.uint64(seed), np.int64(tag), size + 1, n_states, float(p)
        )
        rb = int(s[size]) if right_boundary is None else right_boundary
        return cls(window, s[:size], rb)

    def with_state(self, j: int, state: int) -> "Configuration":
        left, right = self.window
        if not left <= j <= right:
            raise IndexError(f"site {j} outside window {list(self.window)}")
        s = self.states.copy()
        s[j - left] = state
        return Configuration(self.window, s, self.right_boundary)

    def state_at(self, j: int) -> int:
        left, right = self.window
        if not left <= j <= right:
            raise IndexError(f"site {j} outside window {list(self.window)}")
        return int(self.states[j - left])


def _buckets(rule: TransitionRule, designated: int) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative bucket boundaries with the designated state first.

    Returns (cum, order): order lists the alphabet with `designated` moved
    to the front, cum[s0, s1, k] is the right edge of order[k]'s bucket.
    """
    n = rule.n
    if not 0 <= designated < n:
        raise ValueError(f"designated state {designated} outside alphabet of size {n}")
    order = np.array(
        [designated] + [s for s in range(n) if s != designated], dtype=np.int64
    )
    cum = np.cumsum(rule.table[:, :, order], axis=2)
    np.minimum(cum, 1.0, out=cum)
    cum[:, :, -1] = 1.0
    return np.ascontiguousarray(cum), order


def _validate_states(config: Configuration, n: int) -> None:
    if np.any(config.states >= n) or not 0 <= config.right_boundary < n:
        raise ValueError("configuration uses states outside the rule's alphabet")


def _change_mask(
    sites: np.ndarray, after: np.ndarray, init_states: np.ndarray, left: int
) -> np.ndarray:
    """Mask of events whose update actually changed the state at its site."""
    m = sites.shape[0]
    if m == 0:
        return np.zeros(0, dtype=bool)
    order = np.lexsort((np.arange(m), sites))
    s_sorted = sites[order]
    a_sorted = after[order]
    prev = np.empty(m, dtype=after.dtype)
    first = np.ones(m, dtype=bool)
    first[1:] = s_sorted[1:] != s_sorted[:-1]
    prev[first] = init_states[s_sorted[first] - left]
    rest = ~first
    prev[rest] = a_sorted[:-1][rest[1:]]
    mask = np.empty(m, dtype=bool)
    mask[order] = prev != a_sorted
    return mask


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


@dataclass
class Trajectory:
    """Piecewise-constant evolution of one configuration.

    `times`, `sites`, `states` list the genuine state changes in
    chronological order; every change time is an event time of the
    underlying stream at its site.
    """

    initial: Configuration
    times: np.ndarray
    sites: np.ndarray
    states: np.ndarray
    horizon: float

    _by_site: dict[int, tuple[np.ndarray, np.ndarray]] | None = field(
        default=None, repr=False, compare=False
    )

    @property
    def window(self) -> tuple[int, int]:
        return self.initial.window

    @property
    def n_changes(self) -> int:
        return int(self.times.shape[0])

    def changes(self) -> list[tuple[float, int, int]]:
        return [
            (float(t), int(j), int(a))
            for t, j, a in zip(self.times, self.sites, self.states)
        ]

    def _site_changes(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        if self._by_site is None:
            by: dict[int, tuple[np.ndarray, np.ndarray]] = {}
            order = np.lexsort((np.arange(self.n_changes), self.sites))
            s_sorted = self.sites[order]
            bounds = np.flatnonzero(np.diff(s_sorted)) + 1
            for chunk in np.split(order, bounds):
                if chunk.shape[0]:
                    by[int(self.sites[chunk[0]])] = (
                        self.times[chunk],
                        self.states[chunk],
                    )
            self._by_site = by
        empty = (np.empty(0), np.empty(0, dtype=np.int8))
        return self._by_site.get(int(j), empty)

    def state_at(self, t: float, j: int) -> int:
        """State of site j at time t (right-continuous in t)."""
        if not 0.0 <= t <= self.horizon:
            raise ValueError(f"time {t} outside [0, {self.horizon}]")
        ct, cs = self._site_changes(j)
        i = int(np.searchsorted(ct, t, side="right"))
        if i == 0:
            return self.initial.state_at(j)
        return int(cs[i - 1])

    def snapshot(self, t: float) -> np.ndarray:
        """All window states at time t, left to right."""
        left, right = self.window
        return np.array(
            [self.state_at(t, j) for j in range(left, right + 1)], dtype=np.int8
        )

    def raster(self, t_grid: np.ndarray) -> np.ndarray:
        """Snapshot matrix, one row per grid time."""
        return np.stack([self.snapshot(float(t)) for t in np.asarray(t_grid)])


def evolve(
    rule: TransitionRule,
    config0: Configuration,
    events: EventStream,
    designated: int = 0,
) -> Trajectory:
    """Run one configuration through the full event sweep."""
    return couple(rule, [config0], events, designated).trajectories[0]


# ---------------------------------------------------------------------------
# coupling
# ---------------------------------------------------------------------------


@dataclass
class CoupledTrajectories:
    """K trajectories driven by one event stream, with their disagreements.

    `disagreement` maps a site to the disjoint intervals [start, end) on
    which at least two trajectories differ there; `censored` marks an
    interval cut by the horizon.
    """

    trajectories: list[Trajectory]
    disagreement: dict[int, list[tuple[float, float, bool]]]
    horizon: float
    window: tuple[int, int]


def couple(
    rule: TransitionRule,
    configs: list[Configuration],
    events: EventStream,
    designated: int = 0,
) -> CoupledTrajectories:
    """Evolve several configurations against the identical events.

    All configurations must share the stream's window and one right-boundary
    state; otherwise they would not read the same neighborhoods.
    """
    if not configs:
        raise ValueError("couple needs at least one configuration")
    left, right = events.window
    rb = configs[0].right_boundary
    for c in configs:
        if c.window != events.window:
            raise WindowMismatch(
                f"configuration window {list(c.window)} vs stream {list(events.window)}"
            )
        if c.right_boundary != rb:
            raise WindowMismatch("configurations disagree on the right boundary state")
        _validate_states(c, rule.n)
    cum, order = _buckets(rule, designated)
    init = np.ascontiguousarray(np.stack([c.states for c in configs]))
    ev_t, ev_site, ev_after = _kernels._sweep_record(
        np.uint64(events.seed),
        np.int64(left),
        np.int64(right),
        float(events.horizon),
        init,
        np.int8(rb),
        cum,
        order,
    )

    trajectories = []
    for k, c in enumerate(configs):
        mask = _change_mask(ev_site, ev_after[:, k], c.states, left)
        trajectories.append(
            Trajectory(
                initial=c,
                times=ev_t[mask].copy(),
                sites=ev_site[mask].copy(),
                states=ev_after[mask, k].copy(),
                horizon=events.horizon,
            )
        )

    disagreement = _disagreement_record(
        init, ev_t, ev_site, ev_after, left, right, events.horizon
    )
    return CoupledTrajectories(
        trajectories=trajectories,
        disagreement=disagreement,
        horizon=events.horizon,
        window=events.window,
    )


def _disagreement_record(init, ev_t, ev_site, ev_after, left, right, horizon):
    """Per-site intervals on which the coupled trajectories differ."""
    init_diff = (init != init[0]).any(axis=0)
    if ev_t.shape[0]:
        neq = (ev_after != ev_after[:, :1]).any(axis=1)
    else:
        neq = np.zeros(0, dtype=bool)

    record: dict[int, list[tuple[float, float, bool]]] = {}
    open_at: dict[int, float] = {
        left + i: 0.0 for i in np.flatnonzero(init_diff)
    }
    for m in range(ev_t.shape[0]):
        j = int(ev_site[m])
        now = bool(neq[m])
        was = j in open_at
        if now and not was:
            open_at[j] = float(ev_t[m])
        elif was and not now:
            record.setdefault(j, []).append((open_at.pop(j), float(ev_t[m]), False))
    for j, t0 in sorted(open_at.items()):
        record.setdefault(j, []).append((t0, float(horizon), True))
    for j in record:
        record[j].sort()
    return record


@dataclass(frozen=True)
class AgreementTime:
    """End of all disagreement on the window; censored when the horizon or
    the left window edge truncated the observation."""

    time: float
    censored: bool


def agreement_time(coupled: CoupledTrajectories) -> AgreementTime:
    """Earliest time after which all coupled trajectories coincide."""
    t = 0.0
    censored = False
    left = coupled.window[0]
    for j, intervals in coupled.disagreement.items():
        for _, end, cens in intervals:
            t = max(t, end)
            censored = censored or cens
        if j <= left:
            censored = True
    return AgreementTime(t, censored)


# ---------------------------------------------------------------------------
# the agreement-tail estimator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BackgroundSampler:
    """Initial-configuration sampler for the agreement tail.

    Every replica always includes the constant background for each alphabet
    state; `n_random` extra backgrounds are product-sampled, Bernoulli(p)
    per site for two states and uniform for larger alphabets.
    """

    n_random: int = 1
    p: float = 0.5

    def __post_init__(self) -> None:
        if self.n_random < 0:
            raise ValueError("n_random must be nonnegative")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p={self.p} outside [0, 1]")


@dataclass(frozen=True)
class TailEstimate:
    """Monte Carlo tail of the whole-window agreement time.

    The sup over all initial pairs in the agreement-time definition is
    uncountable; sampling backgrounds lower-bounds it, as `note` records.
    Censored replicas (horizon hit, or disagreement touching the left
    window edge) count as exceeding every grid time.
    """

    t: np.ndarray
    survival: np.ndarray
    lo95: np.ndarray
    hi95: np.ndarray
    t_scaled: np.ndarray
    replicas: int
    n_censored: int
    pi: np.ndarray
    horizon: float
    window: tuple[int, int]
    note: str


_TAIL_NOTE = (
    "sampled backgrounds lower-bound the supremum over all initial pairs"
)


def _wilson(k: np.ndarray, n: int, z: float = _Z95) -> tuple[np.ndarray, np.ndarray]:
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = (z / denom) * np.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    return np.maximum(center - half, 0.0), np.minimum(center + half, 1.0)


def default_tail_window(horizon: float) -> tuple[int, int]:
    """Symmetric window wide enough for the cone of site 0."""
    margin = int(math.ceil(horizon + 4.0 * math.sqrt(horizon)))
    return (-margin, margin)


def pi_tail(
    rule: TransitionRule,
    sampler: BackgroundSampler,
    t_grid,
    replicas: int,
    seed: int,
    designated: int = 0,
    horizon: float | None = None,
    window: tuple[int, int] | None = None,
    max_censored: float = 0.01,
) -> TailEstimate:
    """Estimate P(agreement time > t) over sampled site-0 perturbations.

    Each replica evolves, for every sampled background, the variants that
    differ from it only at site 0, all against one shared event stream; the
    replica's value is the last time any variant group still disagreed
    anywhere on the window.
    """
    t_grid = np.asarray(t_grid, dtype=np.float64)
    if t_grid.ndim != 1 or t_grid.shape[0] == 0:
        raise ValueError("t_grid must be a nonempty 1-d array")
    if np.any(np.diff(t_grid) <= 0.0) or t_grid[0] < 0.0:
        raise ValueError("t_grid must be strictly increasing and nonnegative")
    if replicas < 0:
        raise ValueError("replicas must be nonnegative")

    t_max = float(t_grid[-1])
    if horizon is None:
        horizon = t_max + 10.0
    if horizon < t_max:
        raise ValueError(f"horizon {horizon} below largest grid time {t_max}")
    if window is None:
        window = default_tail_window(horizon)
    left, right = int(window[0]), int(window[1])
    need = horizon + 4.0 * math.sqrt(horizon)
    if left > -need or right < need:
        raise WindowTooSmall(
            f"window [{left}, {right}] cannot contain the cone over horizon {horizon}"
        )

    if replicas == 0:
        nan = np.full(t_grid.shape, np.nan)
        return TailEstimate(
            t=t_grid.copy(),
            survival=nan,
            lo95=nan.copy(),
            hi95=nan.copy(),
            t_scaled=nan.copy(),
            replicas=0,
            n_censored=0,
            pi=np.empty(0),
            horizon=float(horizon),
            window=(left, right),
            note=_TAIL_NOTE,
        )

    cum, order = _buckets(rule, designated)
    pi, status = _kernels._pi_batch(
        np.uint64(seed),
        np.int64(replicas),
        np.int64(left),
        np.int64(right),
        float(horizon),
        cum,
        order,
        np.int64(sampler.n_random),
        float(sampler.p),
    )
    n_censored = int(np.count_nonzero(status))
    if n_censored > max_censored * replicas:
        raise UnderResolved(
            f"{n_censored} of {replicas} replicas censored "
            f"(limit {max_censored:.0%}); enlarge horizon or window"
        )
    effective = np.where(status != 0, np.inf, pi)
    exceed = (effective[None, :] > t_grid[:, None]).sum(axis=1)
    survival = exceed / replicas
    lo, hi = _wilson(exceed, replicas)
    return TailEstimate(
        t=t_grid.copy(),
        survival=survival,
        lo95=lo,
        hi95=hi,
        t_scaled=t_grid * survival,
        replicas=int(replicas),
        n_censored=n_censored,
        pi=pi,
        horizon=float(horizon),
        window=(left, right),
        note=_TAIL_NOTE,
    )


# ---------------------------------------------------------------------------
# the cone of dependence
# ---------------------------------------------------------------------------


def cone_sigma(events: EventStream, T: float) -> int:
    """First chain depth whose linking event falls beyond time T.

    The chain s_0 = 0, s_k = first event at site -k strictly after s_{k-1}
    realizes the depth at which site 0 loses all influence from time-T
    information; a site with no event before the horizon ends the chain
    because horizon >= T.
    """
    if not 0.0 <= T <= events.horizon:
        raise ValueError(f"T={T} outside [0, horizon={events.horizon}]")
    s_prev = 0.0
    k = 1
    while True:
        if -k < events.left:
            raise WindowTooSmall(
                f"cone chain left the window [{events.left}, {events.right}]"
            )
        nxt = events.first_event_after(-k, s_prev)
        if nxt is None or nxt[0] > T:
            return k
        s_prev = nxt[0]
        k += 1


def cone_sigma_batch(
    seed: int, replicas: int, T: float, max_depth: int | None = None
) -> np.ndarray:
    """Chain depths over independent replica streams (seed, seed+1, ...)."""
    if T < 0.0:
        raise ValueError(f"T must be nonnegative, got {T}")
    if max_depth is None:
        max_depth = int(4.0 * T + 10.0 * math.sqrt(T) + 50.0)
    out = _kernels._cone_batch(
        np.uint64(seed), np.int64(replicas), float(T), np.int64(max_depth)
    )
    if np.any(out < 0):
        raise WindowTooSmall(f"cone chain exceeded max_depth={max_depth}")
    return out
