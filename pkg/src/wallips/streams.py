"""Per-site clock streams: the shared randomness of the canonical coupling.

Each site in the window carries a rate-1 Poisson clock, and each clock ring
comes with one update uniform.  All simulation layers read the same streams,
so two runs with equal (seed, window, horizon) see bit-identical events, and
a run with a larger horizon extends each site's event list without touching
the earlier entries.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels

_MASK64 = (1 << 64) - 1


@dataclass
class EventStream:
    """Lazy per-site event generator on a fixed site window.

    events_at(j) returns the arrays (times, uniforms) of site j's clock, all
    times in (0, horizon].  Sites are generated on first use and cached.
    Substreams are keyed by (seed, site), so the events of one site do not
    depend on the window or on which other sites were queried.
    """

    seed: int
    window: tuple[int, int]
    horizon: float

    _cache: dict[int, tuple[np.ndarray, np.ndarray]] = field(
        default_factory=dict, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        left, right = int(self.window[0]), int(self.window[1])
        if not left <= 0 <= right:
            raise ValueError(f"window [{left}, {right}] must contain site 0")
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        self.window = (left, right)
        self.seed = int(self.seed) & _MASK64
        self.horizon = float(self.horizon)

    @property
    def left(self) -> int:
        return self.window[0]

    @property
    def right(self) -> int:
        return self.window[1]

    @property
    def n_sites(self) -> int:
        return self.window[1] - self.window[0] + 1

    def _require_site(self, j: int) -> None:
        if not self.window[0] <= j <= self.window[1]:
            raise IndexError(f"site {j} outside window {list(self.window)}")

    def events_at(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Event times and update uniforms of site j, chronological."""
        j = int(j)
        self._require_site(j)
        hit = self._cache.get(j)
        if hit is None:
            hit = _kernels._site_events(
                np.uint64(self.seed), np.int64(j), self.horizon
            )
            self._cache[j] = hit
        return hit

    def first_event_after(self, j: int, t: float) -> tuple[float, float] | None:
        """First (time, uniform) at site j with time strictly above t.

        Returns None when no such event falls inside the horizon.
        """
        times, unifs = self.events_at(j)
        i = int(np.searchsorted(times, t, side="right"))
        if i >= times.shape[0]:
            return None
        return float(times[i]), float(unifs[i])

    def extended(self, horizon: float) -> "EventStream":
        """Same streams cut at a larger horizon; prefixes are preserved."""
        if horizon < self.horizon:
            raise ValueError(
                f"extension horizon {horizon} below current {self.horizon}"
            )
        return EventStream(self.seed, self.window, horizon)


def gen_events(seed: int, window: tuple[int, int], horizon: float) -> EventStream:
    """Construct the event stream family for one window and horizon."""
    return EventStream(seed, window, horizon)
