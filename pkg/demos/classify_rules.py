"""Walk a few named rules through the ergodicity criterion.

Prints the coupling coefficients, the criterion verdict before and after
optimizing the time scale, and where each rule lands on the region map.
"""

import argparse

from wallips import SimpleParams, beta_delta, classify_simple, criterion, time_scale


# ---------------------------------------------------------------------------
# rule gallery
# ---------------------------------------------------------------------------

GALLERY = [
    ("wall point", SimpleParams(0.0, 0.9, 0.02, 0.02)),
    ("coin flips", SimpleParams(0.5, 0.5, 0.5, 0.5)),
    ("gentle majority", SimpleParams(0.7, 0.6, 0.4, 0.3)),
    ("near-East", SimpleParams(0.3, 0.95, 0.3, 0.05)),
    ("lazy copier", SimpleParams(0.9, 0.8, 0.2, 0.1)),
]


def _describe(name, params):
    rule = params.to_rule()
    beta, delta, beta_eff = beta_delta(rule, 0)
    rep = criterion(rule, 0)
    cls = classify_simple(params)
    print(f"{name}: p = {params}")
    print(f"  beta={beta:.4f} delta={delta:.4f} beta_eff={beta_eff:.4f}")
    print(f"  raw criterion delta < sqrt(2)*beta: {rep.raw_holds}")
    print(f"  effective criterion:                {rep.eff_holds}")
    region = cls.region.value
    clause = f" ({cls.clause})" if cls.clause else ""
    print(f"  region: {region}{clause}")
    return rule


def _scaling_story(params):
    """Show that slowing the clock shrinks delta but also beta."""
    print("time scaling at the wall point:")
    for lam in (1.0, 0.5, 0.1):
        scaled = time_scale(params.to_rule(), lam)
        beta, delta, beta_eff = beta_delta(scaled, 0)
        print(f"  lambda={lam:4}  beta={beta:.4f}  delta={delta:.4f}"
              f"  beta_eff={beta_eff:.4f}  delta/beta_eff={delta / beta_eff:.4f}")
    print("  both coefficients shrink linearly, so the ratio delta/beta_eff")
    print("  is scale invariant; the effective criterion depends only on it.")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.parse_args()
    for name, params in GALLERY:
        _describe(name, params)
        print()
    _scaling_story(GALLERY[0][1])


if __name__ == "__main__":
    main()
