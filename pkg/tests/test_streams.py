"""Tests for the shared event streams driving the coupling construction."""

import numpy as np
import pytest

from wallips import EventStream, gen_events


# ---------------------------------------------------------------------------
# determinism and structure
# ---------------------------------------------------------------------------


def test_same_inputs_reproduce_bit_exactly():
    a = gen_events(42, (-5, 5), 30.0)
    b = gen_events(42, (-5, 5), 30.0)
    for j in range(-5, 6):
        ta, ua = a.events_at(j)
        tb, ub = b.events_at(j)
        assert np.array_equal(ta, tb)
        assert np.array_equal(ua, ub)


def test_different_seeds_differ():
    a = gen_events(1, (0, 0), 50.0)
    b = gen_events(2, (0, 0), 50.0)
    ta, _ = a.events_at(0)
    tb, _ = b.events_at(0)
    assert ta.shape != tb.shape or not np.array_equal(ta, tb)


def test_times_strictly_increasing_and_in_range():
    ev = gen_events(7, (-20, 20), 100.0)
    for j in range(-20, 21):
        t, u = ev.events_at(j)
        assert t.shape == u.shape
        assert np.all(np.diff(t) > 0.0)
        assert np.all(t > 0.0)
        assert np.all(t <= 100.0)
        assert np.all(u >= 0.0)
        assert np.all(u < 1.0)


def test_sites_have_distinct_streams():
    ev = gen_events(7, (-1, 1), 50.0)
    t0, _ = ev.events_at(0)
    t1, _ = ev.events_at(1)
    m = min(t0.shape[0], t1.shape[0])
    assert not np.array_equal(t0[:m], t1[:m])


# ---------------------------------------------------------------------------
# Poisson statistics
# ---------------------------------------------------------------------------


def test_mean_event_count_near_horizon():
    # 10^4 sites at horizon 50: rate-1 Poisson keeps the mean in [49, 51]
    ev = gen_events(1, (0, 9999), 50.0)
    counts = [ev.events_at(j)[0].shape[0] for j in range(10000)]
    assert 49.0 <= float(np.mean(counts)) <= 51.0


def test_uniforms_are_uniform():
    ev = gen_events(3, (0, 199), 50.0)
    us = np.concatenate([ev.events_at(j)[1] for j in range(200)])
    n = us.shape[0]
    assert abs(us.mean() - 0.5) < 3.0 / np.sqrt(12.0 * n)


# ---------------------------------------------------------------------------
# extension
# ---------------------------------------------------------------------------


def test_extension_preserves_existing_events():
    a = gen_events(5, (-3, 3), 50.0)
    b = a.extended(100.0)
    assert b.horizon == 100.0
    for j in range(-3, 4):
        ta, ua = a.events_at(j)
        tb, ub = b.events_at(j)
        assert tb.shape[0] >= ta.shape[0]
        assert np.array_equal(tb[: ta.shape[0]], ta)
        assert np.array_equal(ub[: ua.shape[0]], ua)
        assert np.all(tb[ta.shape[0]:] > 50.0)


def test_extension_cannot_shrink():
    ev = gen_events(5, (-3, 3), 50.0)
    with pytest.raises(ValueError):
        ev.extended(10.0)


def test_extension_matches_fresh_generation():
    a = gen_events(9, (-2, 2), 25.0).extended(80.0)
    b = gen_events(9, (-2, 2), 80.0)
    for j in range(-2, 3):
        assert np.array_equal(a.events_at(j)[0], b.events_at(j)[0])
        assert np.array_equal(a.events_at(j)[1], b.events_at(j)[1])


# ---------------------------------------------------------------------------
# lookup
# ---------------------------------------------------------------------------


def test_first_event_after_is_strict():
    ev = gen_events(11, (0, 0), 40.0)
    t, u = ev.events_at(0)
    got = ev.first_event_after(0, float(t[0]))
    assert got is not None
    assert got[0] == t[1]
    assert got[1] == u[1]
    assert ev.first_event_after(0, 0.0)[0] == t[0]
    assert ev.first_event_after(0, float(t[-1])) is None


def test_window_validation():
    with pytest.raises(ValueError):
        EventStream(seed=1, window=(1, 5), horizon=10.0)
    with pytest.raises(ValueError):
        EventStream(seed=1, window=(-5, -1), horizon=10.0)
    with pytest.raises(ValueError):
        EventStream(seed=1, window=(-5, 5), horizon=0.0)
