"""Estimate agreement-time tails for two contrasting rules.

A rule that ignores its neighborhood coalesces at the first origin clock,
so its tail is exactly exponential; the wall-building rule needs walls to
form first, but its scaled tail t * P(pi > t) still dies out.
"""

import argparse

import numpy as np

from wallips import BackgroundSampler, SimpleParams, pi_tail

WALL = SimpleParams(0.0, 0.9, 0.02, 0.02)
BLIND = SimpleParams(0.4, 0.4, 0.4, 0.4)


def _table(name, est, reference=None):
    print(f"{name}: {est.replicas} replicas, {est.n_censored} censored,"
          f" window {est.window}, horizon {est.horizon:g}")
    head = "      t   P(pi>t)      lo95      hi95    t*P"
    if reference is not None:
        head += "      exact"
    print(head)
    for i, t in enumerate(est.t):
        row = (f"  {t:5.1f}  {est.survival[i]:8.4f}  {est.lo95[i]:8.4f}"
               f"  {est.hi95[i]:8.4f}  {est.t_scaled[i]:6.2f}")
        if reference is not None:
            row += f"  {reference(t):9.4f}"
        print(row)
    print(f"  note: {est.note}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--reps", type=int, default=2000)
    parser.add_argument("--seed", type=int, default=11)
    args = parser.parse_args()

    blind = pi_tail(BLIND.to_rule(), BackgroundSampler(),
                    [0.5, 1.0, 2.0, 4.0], args.reps, args.seed)
    _table("neighborhood-blind rule", blind, reference=lambda t: np.exp(-t))
    print()
    wall = pi_tail(WALL.to_rule(), BackgroundSampler(),
                   [25.0, 50.0, 100.0, 150.0], args.reps, args.seed)
    _table("wall-building rule", wall)


if __name__ == "__main__":
    main()
