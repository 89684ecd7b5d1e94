"""Acceptance suite: one check per release criterion, one printed line each.

Each test records `[acceptance N] <name>: PASS/FAIL (...)`; the shared
conftest hook replays the lines in the terminal summary of every run.
"""

import io
import math
import contextlib
from statistics import NormalDist

import numpy as np
import pytest

from wallips import (
    Configuration,
    SimpleParams,
    TransitionRule,
    BackgroundSampler,
    agreement_sets,
    beta_delta,
    classify_simple,
    cone_sigma_batch,
    containment_check,
    couple,
    drift_estimate,
    gen_events,
    pi_tail,
    run_walks,
    walk_tau_batch,
)
from wallips import Region, _kernels
from wallips.harness import run_cli

WALL = SimpleParams(0.0, 0.9, 0.02, 0.02)
BLIND = SimpleParams(0.4, 0.4, 0.4, 0.4)
SQRT2 = math.sqrt(2.0)


def _verdict(registry, num, name, ok, detail):
    line = f"[acceptance {num}] {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    registry.append(line)
    return line


# ---------------------------------------------------------------------------
# 1. closed-form agreement probability
# ---------------------------------------------------------------------------


def test_acceptance_1_membership_probability(verdicts):
    reps = 100000
    t, beta, delta = 5.0, 0.1, 0.1
    ref = 0.316060
    hits = _kernels._membership_batch(
        np.uint64(21), reps, np.int64(0), t, beta, delta
    )
    phat = float(np.sum(hits)) / reps
    se = math.sqrt(ref * (1.0 - ref) / reps)
    z = abs(phat - ref) / se
    ok = z <= 3.0
    line = _verdict(verdicts, 1, "agreement-set membership matches closed form", ok,
             f"phat={phat:.6f} ref={ref} |z|={z:.2f}<=3")
    assert ok, line


# ---------------------------------------------------------------------------
# 2. drift formulas
# ---------------------------------------------------------------------------


def test_acceptance_2_drift_formulas(verdicts):
    r = drift_estimate(0.1, 0.1, T=200.0, replicas=100000, seed=17)
    checks = [
        ("Y", r.mc_y, r.se_y, 5.5),
        ("X-up", r.mc_x_up, r.se_x_up, 5.0),
        ("X-down", r.mc_x_down, r.se_x_down, -5.0),
    ]
    zs = {name: abs(mc - ref) / se for name, mc, se, ref in checks}
    ok = all(z <= 3.0 for z in zs.values())
    detail = " ".join(f"{k}|z|={v:.2f}" for k, v in zs.items())
    line = _verdict(verdicts, 2, "walk drifts match 5.5 / 5.0 / -5.0", ok, detail + " <=3")
    assert ok, line


# ---------------------------------------------------------------------------
# 3. containment of disagreements
# ---------------------------------------------------------------------------


def test_acceptance_3_containment(verdicts):
    rule = WALL.to_rule()
    beta, delta, _ = beta_delta(rule, 0)
    violations = 0
    for seed in range(1000):
        events = gen_events(seed, (-200, 20), 100.0)
        base = Configuration.random((-200, 20), seed, n_states=rule.n)
        configs = [base.with_state(0, v) for v in range(rule.n)]
        coupled = couple(rule, configs, events, designated=0)
        walk = run_walks(agreement_sets(events, beta, delta), events=events)
        violations += len(containment_check(coupled, walk))
    ok = violations == 0
    line = _verdict(verdicts, 3, "all disagreements inside (Y, X] over 1000 runs", ok,
             f"violations={violations}")
    assert ok, line


# ---------------------------------------------------------------------------
# 4. exact tail oracle
# ---------------------------------------------------------------------------


def test_acceptance_4_blind_rule_dkw_band(verdicts):
    reps = 10000
    est = pi_tail(BLIND.to_rule(), BackgroundSampler(),
                  [2.0, 4.0, 6.0, 8.0], reps, 71)
    pi = np.sort(est.pi)
    n = pi.shape[0]
    cdf = 1.0 - np.exp(-pi)
    upper = np.max((np.arange(1, n + 1) / n) - cdf)
    lower = np.max(cdf - (np.arange(n) / n))
    dev = max(upper, lower)
    eps = math.sqrt(math.log(2.0 / 0.01) / (2.0 * n))
    ok = dev <= eps and est.n_censored == 0
    line = _verdict(verdicts, 4, "memoryless-coalescence tail inside 99% DKW band", ok,
             f"sup-dev={dev:.5f} eps={eps:.5f}")
    assert ok, line


# ---------------------------------------------------------------------------
# 5. ergodicity evidence at the wall point
# ---------------------------------------------------------------------------


def test_acceptance_5_wall_point_tail_decay(verdicts):
    est = pi_tail(WALL.to_rule(), BackgroundSampler(),
                  [50.0, 100.0, 150.0, 200.0], 10000, 11)
    ts = est.t_scaled
    tail_ok = ts[1] >= ts[2] >= ts[3]
    p200 = est.survival[-1]
    bound = 0.05 / 200.0 * 10.0
    p_ok = p200 < bound
    ok = bool(tail_ok and p_ok)
    line = _verdict(verdicts, 5, "t*P(pi>t) shrinking and P(pi>200) small at the wall point",
             ok, f"t*P={np.array2string(ts, precision=4)} "
                 f"P(>200)={p200:.4f}<{bound}")
    assert ok, line


# ---------------------------------------------------------------------------
# 6. criterion and classifier oracles
# ---------------------------------------------------------------------------


def _brute_beta_delta(table, a):
    n = table.shape[0]
    beta = min(table[s0, s1, a] for s0 in range(n) for s1 in range(n))
    delta = max(1.0 - table[a, s1, a] for s1 in range(n))
    beta_eff = min(
        table[s0, s1, a] for s0 in range(n) for s1 in range(n) if s0 != a
    )
    return beta, delta, beta_eff


def _grid_region(i10, i01, i00):
    if i10 == 100 or i01 == 0:
        return Region.NOT_POSITIVE_RATES
    if i01 > 0 and i00 > 0 and (
        2 * i10 < 100 or i10 < i01 + i00 or i01 < i00
    ):
        return Region.PRIOR_COVERED
    if max(i01, i00) < SQRT2 * (100 - i10):
        return Region.NEWLY_COVERED
    return Region.OPEN


def test_acceptance_6_oracle_equivalence(verdicts):
    rng = np.random.default_rng(1234)
    mismatch = 0
    total = 0
    for n in (2, 3, 4):
        for _ in range(334):
            table = rng.random((n, n, n))
            table /= table.sum(axis=2, keepdims=True)
            rule = TransitionRule(table)
            a = int(rng.integers(n))
            total += 1
            if beta_delta(rule, a) != _brute_beta_delta(table, a):
                mismatch += 1
    grid_bad = 0
    for i00 in (0, 25):
        for i10 in range(101):
            for i01 in range(101):
                got = classify_simple(
                    SimpleParams(0.0, i10 / 100, i01 / 100, i00 / 100)
                ).region
                if got != _grid_region(i10, i01, i00):
                    grid_bad += 1
    lo = classify_simple(SimpleParams(0.0, 0.585, 0.58, 0.0)).region
    hi = classify_simple(SimpleParams(0.0, 0.585, 0.59, 0.0)).region
    at = classify_simple(SimpleParams(0.0, 0.585, 0.585, 0.0)).region
    vertex_ok = (
        lo == Region.NEWLY_COVERED
        and at == Region.NEWLY_COVERED
        and hi == Region.OPEN
    )
    ok = mismatch == 0 and grid_bad == 0 and vertex_ok
    line = _verdict(verdicts, 6, "coefficients and region map match brute-force oracles", ok,
             f"rule-mismatches={mismatch}/{total} grid-mismatches={grid_bad} "
             f"vertex-bracket={'ok' if vertex_ok else 'bad'}")
    assert ok, line


# ---------------------------------------------------------------------------
# 7. cone statistics
# ---------------------------------------------------------------------------


def test_acceptance_7_cone_statistics(verdicts):
    sig10 = cone_sigma_batch(23, 10000, 10.0)
    mean = float(np.mean(sig10 - 1))
    band = 3.0 * math.sqrt(10.0 / 10000)
    mean_ok = abs(mean - 10.0) <= band
    sig5 = cone_sigma_batch(29, 100000, 5.0)
    p_exc = float(np.mean((sig5 - 1) > 20.0))
    chernoff = math.exp(-2.0 * 5.0 * (3.0 * math.log(3.0) - 3.0))
    exc_ok = p_exc <= chernoff
    ok = mean_ok and exc_ok
    line = _verdict(verdicts, 7, "cone depth is Poissonian with Chernoff-bounded excess", ok,
             f"mean={mean:.4f} in 10+-{band:.4f}; "
             f"P(sigma-1>20)={p_exc:.5f}<={chernoff:.3f}")
    assert ok, line


# ---------------------------------------------------------------------------
# 8. walk crossing-time tail
# ---------------------------------------------------------------------------


def test_acceptance_8_walk_tail_slope(verdicts):
    taus, _ = walk_tau_batch(0.1, 0.1, 10000, 37)
    n_cens = int(np.sum(taus < 0))
    finite = taus[taus >= 0]
    grid = np.arange(1.0, np.percentile(finite, 99.5))
    surv = np.array([
        float(np.mean(taus > g) + np.mean(taus < 0)) for g in grid
    ])
    keep = surv > 0.0
    x = grid[keep]
    y = np.log(surv[keep])
    design = np.vstack([x, np.ones_like(x)]).T
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    slope = float(coef[0])
    resid = y - design @ coef
    s2 = float(resid @ resid) / (x.shape[0] - 2)
    se = math.sqrt(s2 / float(((x - x.mean()) ** 2).sum()))
    z99 = NormalDist().inv_cdf(0.995)
    hi = slope + z99 * se
    ok = hi < 0.0
    line = _verdict(verdicts, 8, "crossing-time tail is log-linear with negative slope", ok,
             f"slope={slope:.4f} 99%CI-hi={hi:.4f}<0 censored={n_cens}")
    assert ok, line


# ---------------------------------------------------------------------------
# 9. command determinism
# ---------------------------------------------------------------------------


def _capture(argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = run_cli(argv)
    return code, buf.getvalue()


def test_acceptance_9_cli_determinism(tmp_path, verdicts):
    stdout_cmds = {
        "criterion": ["criterion", "--p11", "0", "--p10", "0.9",
                      "--p01", "0.02", "--p00", "0.02", "--state", "0"],
        "classify": ["classify", "--p11", "0", "--p10", "0.585",
                     "--p01", "0.585", "--p00", "0"],
    }
    file_cmds = {
        "sweep": ["sweep", "--p00", "0.25", "--grid", "21"],
        "raster": ["raster", "--p11", "0", "--p10", "0.9", "--p01", "0.02",
                   "--p00", "0.02", "--window", "100", "--horizon", "80",
                   "--dt", "1", "--seed", "5", "--init", "random"],
        "couple": ["couple", "--p11", "0", "--p10", "0.9", "--p01", "0.02",
                   "--p00", "0.02", "--state", "0", "--left", "-80",
                   "--right", "10", "--horizon", "40", "--seed", "3",
                   "--init", "random"],
        "tail": ["tail", "--p11", "0.4", "--p10", "0.4", "--p01", "0.4",
                 "--p00", "0.4", "--state", "0", "--t-grid", "1,2,4",
                 "--reps", "200", "--seed", "8"],
        "walks": ["walks", "--beta", "0.1", "--delta", "0.1",
                  "--steps", "25", "--seed", "6"],
        "drift": ["drift", "--beta", "0.1", "--delta", "0.1", "--T", "200",
                  "--reps", "2000", "--seed", "3"],
        "cone": ["cone", "--T", "10", "--reps", "2000", "--seed", "2"],
    }
    bad = []
    for name, argv in stdout_cmds.items():
        c1, o1 = _capture(list(argv))
        c2, o2 = _capture(list(argv))
        if not (c1 == c2 and o1 == o2):
            bad.append(name)
    for name, argv in file_cmds.items():
        a = tmp_path / f"{name}_a"
        b = tmp_path / f"{name}_b"
        c1, _ = _capture(argv + ["--out", str(a)])
        c2, _ = _capture(argv + ["--out", str(b)])
        if not (c1 == c2 == 0 and a.read_bytes() == b.read_bytes()):
            bad.append(name)
    ok = not bad
    line = _verdict(verdicts, 9, "every command reruns byte-identically", ok,
             "all 9 commands" if ok else "differs: " + ",".join(bad))
    assert ok, line
