"""Agreement sets, the bounding random walks, and their drifts.

Each site's clock events split into agreement intervals: an interval opens
at an event whose uniform falls below beta while no interval is active, and
closes at the first later event whose uniform reaches 1 - delta.  Walking
leftward one site per step, the X walk hugs interval starts from above and
the Y walk rides interval ends from below; the step at which X drops to Y
bounds how deep and how late a site-0 perturbation can matter.

Sets are backed by an event stream and extend themselves lazily: whenever a
query needs times beyond the covered horizon, the site is regenerated with a
larger cutoff, which preserves every earlier event.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .sim import CoupledTrajectories, WindowTooSmall
from .streams import EventStream


class ParameterOrder(ValueError):
    """beta and 1 - delta are out of order (opening would also close)."""


# ---------------------------------------------------------------------------
# agreement sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AgreementInterval:
    """One closed interval [start, end] of a site's agreement set."""

    start: float
    end: float
    open_index: int
    close_index: int
    censored: bool


@dataclass
class _SiteScan:
    times: np.ndarray
    unifs: np.ndarray
    starts: np.ndarray
    ends: np.ndarray
    open_idx: np.ndarray
    close_idx: np.ndarray
    cover: float


class AgreementSets:
    """Per-site agreement intervals for fixed (beta, delta).

    Stream-backed sets (from agreement_sets) answer queries at arbitrary
    times by lazy extension.  Static sets (from_intervals) serve hand-built
    fixtures and raise once a query runs past the provided data.
    """

    def __init__(self, beta: float, delta: float, events: EventStream | None):
        if not 0.0 <= beta <= 1.0 or not 0.0 <= delta <= 1.0:
            raise ValueError("beta and delta must lie in [0, 1]")
        if beta > 1.0 - delta:
            raise ParameterOrder(
                f"beta={beta} exceeds 1-delta={1.0 - delta}; "
                "an opening event would simultaneously close"
            )
        self.beta = float(beta)
        self.delta = float(delta)
        self.events = events
        self._sites: dict[int, _SiteScan] = {}

    # -- construction -------------------------------------------------------

    @classmethod
    def from_intervals(
        cls,
        beta: float,
        delta: float,
        intervals: dict[int, list[tuple[float, float]]],
        horizon: float,
    ) -> "AgreementSets":
        """Static sets from explicit [start, end] lists (fixtures, examples).

        Event indices are synthesized in order; the interval endpoints act
        as the only known event times of each site.
        """
        self = cls(beta, delta, None)
        self._static_horizon = float(horizon)
        for j, pairs in intervals.items():
            pairs = sorted(pairs)
            for (s0, e0), (s1, _) in zip(pairs, pairs[1:]):
                if e0 >= s1:
                    raise ValueError(f"intervals at site {j} overlap near {s1}")
            starts = np.array([p[0] for p in pairs], dtype=np.float64)
            ends = np.array([p[1] for p in pairs], dtype=np.float64)
            times = np.sort(np.concatenate([starts, ends[np.isfinite(ends)]]))
            oidx = np.searchsorted(times, starts).astype(np.int64)
            cidx = np.where(
                np.isfinite(ends), np.searchsorted(times, ends), -1
            ).astype(np.int64)
            self._sites[int(j)] = _SiteScan(
                times, np.empty(0), starts, ends, oidx, cidx, float(horizon)
            )
        return self

    @property
    def horizon(self) -> float:
        if self.events is not None:
            return self.events.horizon
        return self._static_horizon

    # -- internal coverage --------------------------------------------------

    def _scan(self, j: int, need: float) -> _SiteScan:
        """Site j's scan, covering times at least up to `need`."""
        j = int(j)
        cur = self._sites.get(j)
        if self.events is None:
            if cur is None:
                return _SiteScan(
                    np.empty(0), np.empty(0), np.empty(0), np.empty(0),
                    np.empty(0, np.int64), np.empty(0, np.int64),
                    self._static_horizon,
                )
            if need > cur.cover:
                raise RuntimeError(
                    f"static agreement sets exhausted at site {j} "
                    f"(need {need}, cover {cur.cover})"
                )
            return cur
        if cur is not None and need <= cur.cover:
            return cur
        cover = self.events.horizon if cur is None else cur.cover
        while cover < need:
            cover = cover * 1.7 + 8.0
        times, unifs = _kernels._site_events(
            np.uint64(self.events.seed), np.int64(j), cover
        )
        starts, ends, oidx, cidx = _kernels._scan_intervals(
            times, unifs, self.beta, self.delta
        )
        scan = _SiteScan(times, unifs, starts, ends, oidx, cidx, cover)
        self._sites[j] = scan
        return scan

    def _grow(self, j: int, scan: _SiteScan) -> _SiteScan:
        if self.events is None:
            raise RuntimeError(f"static agreement sets exhausted at site {j}")
        return self._scan(j, scan.cover * 1.7 + 8.0)

    # -- public views -------------------------------------------------------

    def intervals(self, j: int) -> list[AgreementInterval]:
        """Agreement intervals of site j inside [0, horizon].

        The last interval is censored at the horizon when its closing event
        has not occurred yet; a censored interval reports close_index -1.
        """
        horizon = self.horizon
        scan = self._scan(j, horizon)
        out = []
        for s, e, oi, ci in zip(scan.starts, scan.ends, scan.open_idx, scan.close_idx):
            if s > horizon:
                break
            if e > horizon or not np.isfinite(e):
                out.append(AgreementInterval(float(s), horizon, int(oi), -1, True))
            else:
                out.append(AgreementInterval(float(s), float(e), int(oi), int(ci), False))
        return out

    def contains(self, j: int, t: float) -> bool:
        """Closed-interval membership of time t in A_j."""
        return self.locate(j, t)[0]

    def locate(self, j: int, t: float) -> tuple[bool, float | None, float | None]:
        """(membership, start, end) of the interval containing t, if any.

        The closing time of a still-open interval is resolved by lazy
        extension, so `end` is always finite for members (delta > 0).
        """
        if self.beta == 0.0:
            return False, None, None
        scan = self._scan(j, t)
        while True:
            i = int(np.searchsorted(scan.starts, t, side="right")) - 1
            if i < 0 or t > scan.ends[i]:
                return False, None, None
            if np.isfinite(scan.ends[i]):
                return True, float(scan.starts[i]), float(scan.ends[i])
            if self.delta == 0.0:
                raise RuntimeError("delta=0 intervals never close")
            scan = self._grow(j, scan)

    def next_start(self, j: int, t: float) -> float:
        """First interval start at or after t; +inf when beta = 0."""
        if self.beta == 0.0:
            return math.inf
        scan = self._scan(j, t)
        while True:
            i = int(np.searchsorted(scan.starts, t, side="left"))
            if i < scan.starts.shape[0]:
                return float(scan.starts[i])
            scan = self._grow(j, scan)

    def first_start(self, j: int) -> float:
        """inf A_j, the first opening time of site j."""
        return self.next_start(j, 0.0)

    def next_event(self, j: int, t: float, strict: bool = False) -> float:
        """First event time of site j at or after t (strictly after when
        `strict`), extending coverage as needed."""
        scan = self._scan(j, t)
        side = "right" if strict else "left"
        while True:
            i = int(np.searchsorted(scan.times, t, side=side))
            if i < scan.times.shape[0]:
                return float(scan.times[i])
            scan = self._grow(j, scan)


def agreement_sets(events: EventStream, beta: float, delta: float) -> AgreementSets:
    """Scan an event stream into per-site agreement sets."""
    return AgreementSets(beta, delta, events)


def prob_in_A(t, beta: float, delta: float):
    """Probability that a fixed time lies in a site's agreement set.

    Stationary two-state alternation between openings at rate beta and
    closings at rate delta gives (beta/(beta+delta)) * (1 - exp(-(beta+delta)t)),
    nondecreasing in t with limit beta/(beta+delta).
    """
    if beta <= 0.0 or delta <= 0.0:
        raise ValueError("beta and delta must be positive")
    t = np.asarray(t, dtype=np.float64)
    if np.any(t < 0.0):
        raise ValueError("t must be nonnegative")
    r = beta + delta
    out = (beta / r) * (1.0 - np.exp(-r * t))
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# the paired walks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WalkPath:
    """Realized paths of the bounding walks, one site deeper per step.

    x[n] and y[n] are tied to site -n: the step from index n to n+1
    consults A at site -(n+1), recorded by x_in_a[n] / y_in_a[n].  s is the
    cone chain of event-to-event hops.  tau is the first index with
    x <= y (None when the step cap censored the run), m the largest x seen
    up to then.  sigma is only computed when a threshold sigma_t was given.
    """

    beta: float
    delta: float
    x: np.ndarray
    y: np.ndarray
    s: np.ndarray
    x_in_a: np.ndarray
    y_in_a: np.ndarray
    tau: int | None
    m: float
    censored: bool
    sigma: int | None = None
    sigma_t: float | None = None

    @property
    def steps(self) -> int:
        return int(self.x.shape[0]) - 1


def default_step_cap(beta: float, delta: float) -> int:
    """Ten times a crude expected crossing step from the closed-form drift.

    X starts near 1/beta and the gap shrinks by |driftZ| per step when the
    drift is negative; positive-drift parameters fall back to a large fixed
    cap so runs still terminate (censored).
    """
    rep = drift_closed_form(beta, delta)
    if rep.drift_z < 0.0:
        expected = 1.0 / beta / -rep.drift_z + 5.0
        return max(100, int(10.0 * expected))
    return 10000


def run_walks(
    agreement: AgreementSets,
    events: EventStream | None = None,
    steps: int | None = None,
    n_max: int | None = None,
    sigma_t: float | None = None,
) -> WalkPath:
    """Run the paired walks over one realization of the agreement sets.

    With `steps` the walk runs exactly that many steps and reports the
    crossing index tau if one occurred on the way.  Otherwise it stops at
    tau, or censors at `n_max` (default: default_step_cap).
    """
    beta, delta = agreement.beta, agreement.delta
    if delta <= 0.0:
        raise ValueError("delta must be positive for the walks to terminate")
    if events is None:
        events = agreement.events

    if steps is not None:
        cap = int(steps)
        stop_at_tau = False
    else:
        cap = int(n_max) if n_max is not None else default_step_cap(beta, delta)
        stop_at_tau = True
    if cap < 0:
        raise ValueError("step count must be nonnegative")

    x = agreement.first_start(0)
    y = 0.0
    s = 0.0
    xs, ys, ss = [x], [y], [s]
    x_in_a, y_in_a = [], []
    tau = None
    for n in range(cap):
        site = -(n + 1)
        s = agreement.next_event(site, s, strict=True)

        yin, _, y_end = agreement.locate(site, y)
        if yin:
            y = y_end
        else:
            y = agreement.next_event(site, y, strict=False)

        if math.isfinite(x):
            xin, x_start, _ = agreement.locate(site, x)
            if xin:
                x = x_start
            else:
                x = agreement.next_start(site, x)
        else:
            xin = False

        xs.append(x)
        ys.append(y)
        ss.append(s)
        x_in_a.append(xin)
        y_in_a.append(yin)
        if tau is None and x <= y:
            tau = n + 1
            if stop_at_tau:
                break

    xa = np.array(xs)
    ya = np.array(ys)
    sa = np.array(ss)
    m_stop = len(xs) - 1 if tau is None else tau
    sigma = None
    if sigma_t is not None:
        sigma = _sigma_along(agreement, events, sa, float(sigma_t))
    return WalkPath(
        beta=beta,
        delta=delta,
        x=xa,
        y=ya,
        s=sa,
        x_in_a=np.array(x_in_a, dtype=bool),
        y_in_a=np.array(y_in_a, dtype=bool),
        tau=tau,
        m=float(xa[: m_stop + 1].max()),
        censored=tau is None,
        sigma=sigma,
        sigma_t=sigma_t,
    )


def _sigma_along(agreement, events, s_chain, T):
    """First chain depth beyond T, continuing past the realized walk."""
    if T < 0.0:
        raise ValueError("sigma threshold must be nonnegative")
    for k in range(1, s_chain.shape[0]):
        if s_chain[k] > T:
            return k
    k = s_chain.shape[0] - 1
    s = float(s_chain[k]) if k >= 0 else 0.0
    while True:
        k += 1
        if events is not None and -k < events.left:
            raise WindowTooSmall(
                f"cone chain for sigma left the window at site {-k}"
            )
        s = agreement.next_event(-k, s, strict=True)
        if s > T:
            return k


def walk_tau_batch(
    beta: float, delta: float, replicas: int, seed: int, n_max: int | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Crossing steps and maxima over replica streams (seed, seed+1, ...).

    Returns (tau, m); tau is -1 where the cap censored the run.
    """
    if beta <= 0.0 or delta <= 0.0:
        raise ValueError("beta and delta must be positive")
    if beta > 1.0 - delta:
        raise ParameterOrder(f"beta={beta} exceeds 1-delta={1.0 - delta}")
    if n_max is None:
        n_max = default_step_cap(beta, delta)
    return _kernels._walk_tau_batch(
        np.uint64(seed), np.int64(replicas), float(beta), float(delta),
        np.int64(n_max),
    )


# ---------------------------------------------------------------------------
# containment of disagreement between the walks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    """A disagreement interval escaping the walk bound at its site."""

    site: int
    start: float
    end: float
    y_n: float
    x_n: float
    reason: str


def containment_check(coupled: CoupledTrajectories, walk: WalkPath) -> list[Violation]:
    """Check every disagreement point (t, -n) satisfies y[n] < t <= x[n].

    The walk bound also asserts there is no disagreement at or beyond the
    crossing depth tau, and none at positive sites at all (one-sided flow);
    both are reported as violations if observed.  Returns the empty list
    when the bound holds.
    """
    out = []
    horizon = coupled.horizon
    for j in sorted(coupled.disagreement):
        n = -j
        for start, end, cens in coupled.disagreement[j]:
            end_eff = horizon if cens else end
            if n < 0:
                out.append(
                    Violation(j, start, end_eff, math.nan, math.nan,
                              "disagreement at a positive site")
                )
            elif walk.tau is not None and n >= walk.tau:
                out.append(
                    Violation(j, start, end_eff, math.nan, math.nan,
                              "disagreement at or beyond the crossing depth")
                )
            elif n > walk.steps:
                out.append(
                    Violation(j, start, end_eff, math.nan, math.nan,
                              "disagreement deeper than the realized walk")
                )
            else:
                y_n = float(walk.y[n])
                x_n = float(walk.x[n])
                # At an update time the site still carries its pre-update
                # state, so a disagreement recorded as opening at `start`
                # and repaired at `end` occupies the points (start, end].
                # That set sits inside (y_n, x_n] exactly when y_n <= start
                # and end <= x_n.
                if not (y_n <= start and end_eff <= x_n):
                    out.append(
                        Violation(j, start, end_eff, y_n, x_n,
                                  "disagreement outside (y, x]")
                    )
    return out


# ---------------------------------------------------------------------------
# drifts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DriftReport:
    """Closed-form one-step drifts of the walks, optionally with Monte
    Carlo estimates measured at a fixed height.

    mc_x_down_check re-derives the downward drift from fresh exponential
    draws (the last-opening / last-closing decomposition) independent of
    the event-scan estimates; mc_y_else isolates the plain unit-rate hop of
    Y outside the agreement set.
    """

    beta: float
    delta: float
    drift_y: float
    drift_x_up: float
    drift_x_down: float
    drift_z: float
    drift_z_limit: float

    height: float | None = None
    replicas: int = 0
    mc_y: float | None = None
    se_y: float | None = None
    mc_x_up: float | None = None
    se_x_up: float | None = None
    mc_x_down: float | None = None
    se_x_down: float | None = None
    mc_z: float | None = None
    se_z: float | None = None
    mc_x_down_check: float | None = None
    se_x_down_check: float | None = None
    mc_y_else: float | None = None
    se_y_else: float | None = None
    mc_abs_x: float | None = None
    se_abs_x: float | None = None
    mc_sq_x: float | None = None
    se_sq_x: float | None = None
    mc_p_in: float | None = None
    se_p_in: float | None = None


def drift_closed_form(beta: float, delta: float) -> DriftReport:
    """Expected one-step increments of Y, X (both branches), and Z = X - Y."""
    if beta <= 0.0 or delta <= 0.0:
        raise ValueError("beta and delta must be positive")
    r = beta + delta
    drift_y = (beta + delta * delta) / (delta * r)
    drift_x_up = delta / (beta * r)
    drift_x_down = -beta / (delta * r)
    return DriftReport(
        beta=beta,
        delta=delta,
        drift_y=drift_y,
        drift_x_up=drift_x_up,
        drift_x_down=drift_x_down,
        drift_z=drift_x_up + drift_x_down - drift_y,
        drift_z_limit=-2.0 * beta / delta + delta / beta,
    )


def _mean_se(v: np.ndarray) -> tuple[float, float]:
    m = float(v.mean())
    se = float(v.std(ddof=1) / math.sqrt(v.shape[0])) if v.shape[0] > 1 else math.inf
    return m, se


def drift_estimate(
    beta: float,
    delta: float,
    T: float = 200.0,
    replicas: int = 100000,
    seed: int = 0,
) -> DriftReport:
    """Measure the walk drifts at height T by direct simulation.

    The closed forms hold up to O(e^{-delta*T}) boundary corrections, so T
    must be large enough to push those below measurement noise.
    """
    if math.exp(-delta * T) >= 1e-6:
        raise ValueError(
            f"height T={T} too small: exp(-delta*T) = {math.exp(-delta * T):.3g} "
            "exceeds 1e-6, closed forms would not apply"
        )
    if replicas < 2:
        raise ValueError("need at least 2 replicas for standard errors")
    base = drift_closed_form(beta, delta)
    branch, dy, dx, dchk = _kernels._drift_batch(
        np.uint64(seed), np.int64(replicas), float(beta), float(delta), float(T)
    )
    up = branch == 1
    mc_y, se_y = _mean_se(dy)
    mc_x_up, se_x_up = _mean_se(np.where(up, dx, 0.0))
    mc_x_down, se_x_down = _mean_se(np.where(up, 0.0, dx))
    mc_z, se_z = _mean_se(dx - dy)
    mc_chk, se_chk = _mean_se(dchk)
    mc_ye, se_ye = _mean_se(dy[up])
    mc_abs, se_abs = _mean_se(np.abs(dx))
    mc_sq, se_sq = _mean_se(dx * dx)
    mc_p, se_p = _mean_se((~up).astype(np.float64))
    return DriftReport(
        beta=beta,
        delta=delta,
        drift_y=base.drift_y,
        drift_x_up=base.drift_x_up,
        drift_x_down=base.drift_x_down,
        drift_z=base.drift_z,
        drift_z_limit=base.drift_z_limit,
        height=float(T),
        replicas=int(replicas),
        mc_y=mc_y,
        se_y=se_y,
        mc_x_up=mc_x_up,
        se_x_up=se_x_up,
        mc_x_down=mc_x_down,
        se_x_down=se_x_down,
        mc_z=mc_z,
        se_z=se_z,
        mc_x_down_check=mc_chk,
        se_x_down_check=se_chk,
        mc_y_else=mc_ye,
        se_y_else=se_ye,
        mc_abs_x=mc_abs,
        se_abs_x=se_abs,
        mc_sq_x=mc_sq,
        se_sq_x=se_sq,
        mc_p_in=mc_p,
        se_p_in=se_p,
    )
