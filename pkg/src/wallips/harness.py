"""Command-line harness: experiments in, CSV/PGM artifacts out.

Every subcommand is a thin binding over the library modules.  Identical
flags and seed produce byte-identical output files; replica seeds are the
base seed plus the replica index, and aggregation is in index order, so
results do not depend on scheduling.

A JSON config file (one flat object mirroring the flags) can supply any
parameter; explicit flags override it, and unknown keys are rejected.
"""

from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import formats, sim, walks
from .model import (
    MalformedRule,
    SimpleParams,
    beta_delta,
    classify_simple,
    criterion,
)
from .streams import gen_events

_REQUIRED = object()


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _set_threads(threads: int | None) -> None:
    if threads is not None:
        import numba

        numba.set_num_threads(int(threads))


def _params(p11: float, p10: float, p01: float, p00: float) -> SimpleParams:
    return SimpleParams(float(p11), float(p10), float(p01), float(p00))


def _parse_grid(text: str) -> np.ndarray:
    try:
        vals = [float(x) for x in text.split(",") if x.strip() != ""]
    except ValueError as e:
        raise MalformedRule(f"bad time grid {text!r}: {e}") from None
    if not vals:
        raise MalformedRule(f"empty time grid {text!r}")
    return np.array(vals)


def _report_lines(rep) -> list[str]:
    def b(x):
        return "true" if x else "false"

    return [
        f"state={rep.state}",
        f"beta={formats.fmt_value(rep.beta)}",
        f"delta={formats.fmt_value(rep.delta)}",
        f"beta_eff={formats.fmt_value(rep.beta_eff)}",
        f"raw_holds={b(rep.raw_holds)}",
        f"eff_holds={b(rep.eff_holds)}",
        f"drift_unscaled={formats.fmt_value(rep.drift_unscaled)}",
        f"drift_scaled={formats.fmt_value(rep.drift_scaled)}",
        f"degenerate={b(rep.degenerate)}",
    ]


def _window_sites(window: int | None, left: int | None, right: int | None):
    """Resolve --window N into a centered site range unless explicit."""
    if left is not None and right is not None:
        return int(left), int(right)
    if window is None:
        raise MalformedRule("need either --window or both --left and --right")
    n = int(window)
    if n < 1:
        raise MalformedRule(f"window size must be positive, got {n}")
    return -(n // 2), n - n // 2 - 1


def _base_config(init: str, window, seed: int, n: int = 2) -> sim.Configuration:
    if init == "zero":
        return sim.Configuration.constant(window, 0)
    if init == "one":
        return sim.Configuration.constant(window, 1)
    if init == "random":
        return sim.Configuration.random(window, seed, n_states=n)
    raise MalformedRule(f"unknown initial condition {init!r}")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_criterion(p11, p10, p01, p00, state) -> int:
    """Print the criterion report; exit 0 when the effective form holds."""
    rule = _params(p11, p10, p01, p00).to_rule()
    rep = criterion(rule, int(state))
    print("\n".join(_report_lines(rep)))
    return 0 if rep.eff_holds else 1


def cmd_classify(p11, p10, p01, p00) -> int:
    """Print the region of a reduced-cube point with its criterion report."""
    rc = classify_simple(_params(p11, p10, p01, p00))
    lines = [
        f"region={rc.region.value}",
        f"clause={rc.clause or ''}",
    ]
    lines += _report_lines(rc.report)
    print("\n".join(lines))
    return 0


def cmd_sweep(p00, grid, out) -> int:
    """Classify a (p10, p01) section of the p11=0 face onto a CSV grid."""
    g = int(grid)
    if g < 2:
        raise MalformedRule(f"grid must be at least 2, got {g}")
    p00 = float(p00)
    header = [
        "p11", "p10", "p01", "p00", "beta", "delta", "beta_eff",
        "raw_holds", "eff_holds", "region", "clause",
    ]
    rows = []
    for i in range(g):
        p10 = round(i / (g - 1), 12)
        for j in range(g):
            p01 = round(j / (g - 1), 12)
            rc = classify_simple(SimpleParams(0.0, p10, p01, p00))
            rep = rc.report
            rows.append(
                (
                    0.0, p10, p01, p00, rep.beta, rep.delta, rep.beta_eff,
                    rep.raw_holds, rep.eff_holds, rc.region.value,
                    rc.clause or "",
                )
            )
    formats.write_csv(
        out, "sweep",
        {"p00": p00, "grid": g, "designated_state": 0},
        header, rows,
    )
    return 0


def cmd_raster(p11, p10, p01, p00, state, window, left, right, horizon,
               dt, seed, init, out) -> int:
    """Sample one trajectory on a time grid and write it as a PGM raster."""
    params = _params(p11, p10, p01, p00)
    rule = params.to_rule()
    if not float(dt) > 0.0:
        raise MalformedRule(f"dt must be positive, got {dt}")
    lo, hi = _window_sites(window, left, right)
    horizon = float(horizon)
    events = gen_events(int(seed), (lo, hi), horizon)
    config = _base_config(init, (lo, hi), int(seed), rule.n)
    traj = sim.evolve(rule, config, events, designated=int(state))
    count = int(math.floor(horizon / float(dt))) + 1
    t_grid = np.arange(count) * float(dt)
    grid = traj.raster(t_grid)[::-1]
    gray = formats.state_to_gray(grid, rule.n)
    comment = (
        f"schema=raster/{formats.SCHEMAS['raster']} "
        f"left={lo} right={hi} horizon={formats.fmt_value(horizon)} "
        f"dt={formats.fmt_value(float(dt))} seed={int(seed)} "
        f"p11={formats.fmt_value(params.p11)} p10={formats.fmt_value(params.p10)} "
        f"p01={formats.fmt_value(params.p01)} p00={formats.fmt_value(params.p00)} "
        f"state={int(state)} init={init}"
    )
    formats.write_pgm(out, gray, [comment])
    return 0


def cmd_couple(p11, p10, p01, p00, state, left, right, horizon, seed,
               init, out) -> int:
    """Couple the site-0 variants of one background; write disagreements."""
    rule = _params(p11, p10, p01, p00).to_rule()
    lo, hi = int(left), int(right)
    events = gen_events(int(seed), (lo, hi), float(horizon))
    base = _base_config(init, (lo, hi), int(seed), rule.n)
    configs = [base.with_state(0, v) for v in range(rule.n)]
    coupled = sim.couple(rule, configs, events, designated=int(state))
    at = sim.agreement_time(coupled)
    rows = [
        (j, start, end, cens)
        for j in sorted(coupled.disagreement)
        for start, end, cens in coupled.disagreement[j]
    ]
    formats.write_csv(
        out, "couple",
        {
            "p11": p11, "p10": p10, "p01": p01, "p00": p00,
            "state": int(state), "left": lo, "right": hi,
            "horizon": float(horizon), "seed": int(seed), "init": init,
            "k": rule.n,
            "agreement_time": at.time, "censored": at.censored,
        },
        ["site", "start", "end", "censored"], rows,
    )
    return 0


def cmd_tail(p11, p10, p01, p00, state, t_grid, reps, seed, horizon,
             n_random, bern_p, max_censored, out, threads) -> int:
    """Estimate the agreement-time tail of a rule; write the tail CSV."""
    _set_threads(threads)
    rule = _params(p11, p10, p01, p00).to_rule()
    grid = _parse_grid(t_grid) if isinstance(t_grid, str) else np.asarray(t_grid)
    sampler = sim.BackgroundSampler(n_random=int(n_random), p=float(bern_p))
    est = sim.pi_tail(
        rule, sampler, grid, int(reps), int(seed),
        designated=int(state),
        horizon=None if horizon is None else float(horizon),
        max_censored=float(max_censored),
    )
    rows = zip(est.t, est.survival, est.lo95, est.hi95, est.t_scaled)
    formats.write_csv(
        out, "tail",
        {
            "p11": p11, "p10": p10, "p01": p01, "p00": p00,
            "state": int(state), "replicas": est.replicas,
            "seed": int(seed), "horizon": est.horizon,
            "left": est.window[0], "right": est.window[1],
            "n_random": int(n_random), "bern_p": float(bern_p),
            "censored": est.n_censored, "note": est.note,
        },
        ["t", "survival", "lo95", "hi95", "t_scaled"], rows,
    )
    return 0


def cmd_walks(beta, delta, p11, p10, p01, p00, state, steps, seed,
              sigma_t, out) -> int:
    """Run the paired walks once and write the path with its agreement sets.

    Walk parameters come either from --beta/--delta directly or from the
    coefficients of a rule given by its four probabilities.
    """
    have_free = beta is not None or delta is not None
    have_rule = any(v is not None for v in (p11, p10, p01, p00))
    if have_free == have_rule:
        raise MalformedRule("give either --beta and --delta or the four rule "
                            "probabilities, not both")
    if have_rule:
        rule = _params(p11, p10, p01, p00).to_rule()
        beta, delta, _ = beta_delta(rule, int(state))
    else:
        if beta is None or delta is None:
            raise MalformedRule("need both --beta and --delta")
        beta, delta = float(beta), float(delta)
    steps = int(steps)
    if steps < 0:
        raise MalformedRule(f"steps must be nonnegative, got {steps}")

    depth = steps + 5
    if sigma_t is not None:
        t = float(sigma_t)
        depth = max(depth, int(4.0 * t + 10.0 * math.sqrt(t) + 50.0))
    start_horizon = 16.0 / max(beta, 1e-3) + 16.0 / max(delta, 1e-3)
    events = gen_events(int(seed), (-depth, 0), start_horizon)
    sets = walks.agreement_sets(events, beta, delta)
    path = walks.run_walks(
        sets, events, steps=steps,
        sigma_t=None if sigma_t is None else float(sigma_t),
    )

    header = [
        "kind", "n", "x", "y", "s", "x_in_a", "y_in_a",
        "site", "start", "end", "interval_censored",
    ]
    rows = []
    if steps > 0:
        for n in range(path.steps + 1):
            rows.append(
                (
                    "step", n, path.x[n], path.y[n], path.s[n],
                    None if n == 0 else path.x_in_a[n - 1],
                    None if n == 0 else path.y_in_a[n - 1],
                    None, None, None, None,
                )
            )
        t_cap = float(max(np.max(path.y), np.max(path.s))) * 1.05 + 5.0
        x_fin = path.x[np.isfinite(path.x)]
        if x_fin.shape[0]:
            t_cap = max(t_cap, float(np.max(x_fin)) * 1.05 + 5.0)
        for site in range(0, -(path.steps + 1), -1):
            scan = sets._scan(site, t_cap)
            for s0, e0 in zip(scan.starts, scan.ends):
                if s0 > t_cap:
                    break
                cens = not np.isfinite(e0) or e0 > t_cap
                rows.append(
                    ("interval", None, None, None, None, None, None,
                     site, s0, min(float(e0), t_cap), cens)
                )
    formats.write_csv(
        out, "walks",
        {
            "beta": beta, "delta": delta, "steps": steps, "seed": int(seed),
            "tau": path.tau, "m": path.m, "censored": path.censored,
            "sigma": path.sigma, "sigma_t": path.sigma_t,
        },
        header, rows,
    )
    return 0


def cmd_drift(beta, delta, height, reps, seed, out, threads) -> int:
    """Measure walk drifts against their closed forms; write the drift CSV."""
    _set_threads(threads)
    beta, delta = float(beta), float(delta)
    rep = walks.drift_estimate(beta, delta, float(height), int(reps), int(seed))
    mn = min(beta, delta)
    rows = [
        ("y", rep.drift_y, rep.mc_y, rep.se_y),
        ("x_up", rep.drift_x_up, rep.mc_x_up, rep.se_x_up),
        ("x_down", rep.drift_x_down, rep.mc_x_down, rep.se_x_down),
        ("z", rep.drift_z, rep.mc_z, rep.se_z),
        ("x_down_check", rep.drift_x_down, rep.mc_x_down_check,
         rep.se_x_down_check),
        ("y_else", 1.0, rep.mc_y_else, rep.se_y_else),
        ("abs_x_m1", 1.0 / mn, rep.mc_abs_x, rep.se_abs_x),
        ("sq_x_m2", 2.0 / (mn * mn), rep.mc_sq_x, rep.se_sq_x),
        ("p_in", beta / (beta + delta), rep.mc_p_in, rep.se_p_in),
    ]
    formats.write_csv(
        out, "drift",
        {
            "beta": beta, "delta": delta, "height": rep.height,
            "replicas": rep.replicas, "seed": int(seed),
            "drift_z_limit": rep.drift_z_limit,
        },
        ["quantity", "reference", "mc", "se"], rows,
    )
    return 0


def cmd_cone(T, reps, seed, max_depth, out, threads) -> int:
    """Sample the cone-exit depth sigma; write summary statistics."""
    _set_threads(threads)
    T = float(T)
    sig = sim.cone_sigma_batch(
        int(seed), int(reps), T,
        None if max_depth is None else int(max_depth),
    )
    excess = sig.astype(np.float64) - 1.0
    mean = float(excess.mean() + 1.0)
    se = float(excess.std(ddof=1) / math.sqrt(sig.shape[0]))
    p_gt = float(np.mean(excess > 4.0 * T))
    chern = math.exp(-2.0 * T * (3.0 * math.log(3.0) - 3.0))
    formats.write_csv(
        out, "cone",
        {"T": T, "replicas": int(reps), "seed": int(seed)},
        ["T", "replicas", "mean_sigma", "se_sigma", "p_gt_4t", "chernoff_4t"],
        [(T, int(reps), mean, se, p_gt, chern)],
    )
    return 0


# ---------------------------------------------------------------------------
# argument parsing and dispatch
# ---------------------------------------------------------------------------


def _add_rule_flags(p: argparse.ArgumentParser, required: bool = False) -> None:
    for name in ("p11", "p10", "p01", "p00"):
        p.add_argument(f"--{name}", type=float, default=None)
    p.add_argument("--state", type=int, default=None,
                   help="designated long-lived state (default 0)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="wallips",
        description="Ergodicity criterion and wall simulations for one-sided "
                    "interacting particle systems.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("criterion", help="evaluate the ergodicity criterion")
    _add_rule_flags(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("classify", help="classify a reduced-cube point")
    _add_rule_flags(p)
    p.add_argument("--config", default=None)

    p = sub.add_parser("sweep", help="classify a parameter-section grid")
    p.add_argument("--p00", type=float, default=None)
    p.add_argument("--grid", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("raster", help="render one trajectory to PGM")
    _add_rule_flags(p)
    p.add_argument("--window", type=int, default=None)
    p.add_argument("--left", type=int, default=None)
    p.add_argument("--right", type=int, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--init", default=None, choices=["random", "zero", "one"])
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("couple", help="couple site-0 variants, log disagreement")
    _add_rule_flags(p)
    p.add_argument("--left", type=int, default=None)
    p.add_argument("--right", type=int, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--init", default=None, choices=["random", "zero", "one"])
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("tail", help="agreement-time tail estimate")
    _add_rule_flags(p)
    p.add_argument("--t-grid", dest="t_grid", default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--n-random", dest="n_random", type=int, default=None)
    p.add_argument("--bern-p", dest="bern_p", type=float, default=None)
    p.add_argument("--max-censored", dest="max_censored", type=float, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("walks", help="run the paired bounding walks")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    _add_rule_flags(p)
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--sigma-t", dest="sigma_t", type=float, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("drift", help="Monte Carlo drift vs closed forms")
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--delta", type=float, default=None)
    p.add_argument("--T", dest="height", type=float, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    p = sub.add_parser("cone", help="cone-exit depth statistics")
    p.add_argument("--T", dest="T", type=float, default=None)
    p.add_argument("--reps", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--max-depth", dest="max_depth", type=int, default=None)
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--config", default=None)

    return ap


_DEFAULTS: dict[str, dict] = {
    "criterion": {"p11": _REQUIRED, "p10": _REQUIRED, "p01": _REQUIRED,
                  "p00": _REQUIRED, "state": 0},
    "classify": {"p11": _REQUIRED, "p10": _REQUIRED, "p01": _REQUIRED,
                 "p00": _REQUIRED},
    "sweep": {"p00": 0.0, "grid": 101, "out": _REQUIRED},
    "raster": {"p11": _REQUIRED, "p10": _REQUIRED, "p01": _REQUIRED,
               "p00": _REQUIRED, "state": 0, "window": None, "left": None,
               "right": None, "horizon": 300.0, "dt": 1.0, "seed": 0,
               "init": "random", "out": _REQUIRED},
    "couple": {"p11": _REQUIRED, "p10": _REQUIRED, "p01": _REQUIRED,
               "p00": _REQUIRED, "state": 0, "left": -200, "right": 20,
               "horizon": 100.0, "seed": 0, "init": "random",
               "out": _REQUIRED},
    "tail": {"p11": _REQUIRED, "p10": _REQUIRED, "p01": _REQUIRED,
             "p00": _REQUIRED, "state": 0, "t_grid": "50,100,150,200",
             "reps": 1000, "seed": 0, "horizon": None, "n_random": 1,
             "bern_p": 0.5, "max_censored": 0.01, "threads": None,
             "out": _REQUIRED},
    "walks": {"beta": None, "delta": None, "p11": None, "p10": None,
              "p01": None, "p00": None, "state": 0, "steps": 40, "seed": 0,
              "sigma_t": None, "out": _REQUIRED},
    "drift": {"beta": _REQUIRED, "delta": _REQUIRED, "height": 200.0,
              "reps": 100000, "seed": 0, "threads": None, "out": _REQUIRED},
    "cone": {"T": _REQUIRED, "reps": 10000, "seed": 0, "max_depth": None,
             "threads": None, "out": _REQUIRED},
}

_HANDLERS = {
    "criterion": cmd_criterion,
    "classify": cmd_classify,
    "sweep": cmd_sweep,
    "raster": cmd_raster,
    "couple": cmd_couple,
    "tail": cmd_tail,
    "walks": cmd_walks,
    "drift": cmd_drift,
    "cone": cmd_cone,
}


def _merge(command: str, ns: argparse.Namespace) -> dict:
    defaults = _DEFAULTS[command]
    cfg = {}
    if getattr(ns, "config", None):
        cfg = formats.load_config(ns.config)
        unknown = sorted(set(cfg) - set(defaults))
        if unknown:
            raise MalformedRule(f"unknown config keys: {', '.join(unknown)}")
    out = {}
    missing = []
    for key, fallback in defaults.items():
        v = getattr(ns, key, None)
        if v is None:
            v = cfg.get(key, fallback)
        if v is _REQUIRED:
            missing.append(key)
            continue
        out[key] = v
    if missing:
        raise MalformedRule(
            f"missing required parameters: {', '.join('--' + m for m in missing)}"
        )
    return out


def run_cli(argv=None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        kwargs = _merge(ns.command, ns)
    except (MalformedRule, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    handler = _HANDLERS[ns.command]
    try:
        return handler(**kwargs)
    except MalformedRule as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
