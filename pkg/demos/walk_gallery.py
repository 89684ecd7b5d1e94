"""Follow the bounding walks for several coupling coefficients.

For each (beta, delta) pair the script runs one walk in detail, then a
batch, and compares the Monte Carlo drifts against their closed forms.
"""

import argparse

import numpy as np

from wallips import (
    agreement_sets,
    drift_closed_form,
    drift_estimate,
    gen_events,
    run_walks,
    walk_tau_batch,
)

PAIRS = [(0.1, 0.1), (0.3, 0.1), (0.1, 0.04)]


# ---------------------------------------------------------------------------
# single realization
# ---------------------------------------------------------------------------


def _one_walk(beta, delta, seed):
    events = gen_events(seed, (-80, 2), 40.0)
    walk = run_walks(agreement_sets(events, beta, delta), events=events)
    if walk.tau is None:
        print(f"  seed {seed}: censored at the step cap")
        return
    print(f"  seed {seed}: crossed at step {walk.tau},"
          f" X={walk.x[walk.tau]:.3f} <= Y={walk.y[walk.tau]:.3f},"
          f" running max M={walk.m:.3f}")


# ---------------------------------------------------------------------------
# batch statistics
# ---------------------------------------------------------------------------


def _batch(beta, delta, reps, seed):
    taus, ms = walk_tau_batch(beta, delta, reps, seed)
    done = taus >= 0
    frac = float(np.mean(done))
    med = float(np.median(taus[done]))
    print(f"  {reps} runs: {frac:.1%} crossed, median tau {med:.0f},"
          f" max depth overall {float(np.max(ms)):.1f}")


def _drifts(beta, delta, reps, seed):
    ref = drift_closed_form(beta, delta)
    height = max(200.0, float(np.ceil(14.0 / delta)))
    mc = drift_estimate(beta, delta, T=height, replicas=reps, seed=seed)
    print(f"  drifts (closed form vs {reps} samples at T={height:g}):")
    print(f"    Y:      {ref.drift_y:+.3f} vs {mc.mc_y:+.3f}")
    print(f"    X up:   {ref.drift_x_up:+.3f} vs {mc.mc_x_up:+.3f}")
    print(f"    X down: {ref.drift_x_down:+.3f} vs {mc.mc_x_down:+.3f}")
    print(f"    Z:      {ref.drift_z:+.3f} vs"
          f" {mc.mc_x_up + mc.mc_x_down - mc.mc_y:+.3f}"
          f"  (limit form {ref.drift_z_limit:+.3f})")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=4000)
    parser.add_argument("--seed", type=int, default=12)
    args = parser.parse_args()
    for beta, delta in PAIRS:
        print(f"beta={beta} delta={delta}"
              f"  (criterion holds: {delta < np.sqrt(2) * beta})")
        for s in range(args.seed, args.seed + 3):
            _one_walk(beta, delta, s)
        _batch(beta, delta, args.reps, args.seed)
        _drifts(beta, delta, args.reps, args.seed)
        print()


if __name__ == "__main__":
    main()
