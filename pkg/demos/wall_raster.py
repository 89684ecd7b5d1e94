"""Render the wall-building rule and measure how fast agreement spreads.

Simulates SimpleParams(0, 0.9, 0.02, 0.02) from a fair-coin initial
condition, writes the space-time raster as a PGM, then couples the two
variants of the origin and writes the resulting disagreement intervals.
"""

import argparse

import numpy as np

from wallips import (
    Configuration,
    SimpleParams,
    agreement_time,
    couple,
    evolve,
    gen_events,
)
from wallips.formats import write_pgm, state_to_gray

WALL = SimpleParams(0.0, 0.9, 0.02, 0.02)


# ---------------------------------------------------------------------------
# raster
# ---------------------------------------------------------------------------


def _render(seed, window, horizon, path):
    rule = WALL.to_rule()
    events = gen_events(seed, window, float(horizon))
    init = Configuration.random(window, seed, n_states=rule.n)
    traj = evolve(rule, init, events)
    grid = np.arange(0.0, float(horizon) + 1.0)
    raster = traj.raster(grid)
    pixels = state_to_gray(raster[::-1], rule.n)
    write_pgm(path, pixels, comments=["schema=raster/1"])
    white = float(np.mean(pixels[: len(grid) // 3] == 255))
    print(f"wrote {path}: {pixels.shape[0]}x{pixels.shape[1]},"
          f" white fraction in final third {white:.3f}")


# ---------------------------------------------------------------------------
# coupling
# ---------------------------------------------------------------------------


def _couple_origin(seed, window, horizon):
    rule = WALL.to_rule()
    events = gen_events(seed, window, float(horizon))
    base = Configuration.random(window, seed, n_states=rule.n)
    configs = [base.with_state(0, v) for v in range(rule.n)]
    coupled = couple(rule, configs, events, designated=0)
    agree = agreement_time(coupled)
    n_int = sum(len(v) for v in coupled.disagreement.values())
    sites = sorted(coupled.disagreement)
    word = "interval" if n_int == 1 else "intervals"
    print(f"coupling at the origin: {n_int} disagreement {word} over"
          f" sites {sites[0]}..{sites[-1]}" if sites else
          "coupling at the origin: variants already agree")
    if agree.censored:
        print("  agreement time: censored at the horizon")
    else:
        print(f"  agreement time: {agree.time:.3f}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=3)
    parser.add_argument("--size", type=int, default=300,
                        help="window width and horizon")
    parser.add_argument("--out", default="wall.pgm")
    args = parser.parse_args()
    half = args.size // 2
    window = (-half, args.size - half - 1)
    _render(args.seed, window, args.size, args.out)
    _couple_origin(args.seed, (-120, 20), 60)


if __name__ == "__main__":
    main()
