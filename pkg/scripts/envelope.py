"""Envelope check across families: small volume-product deficit forces a small distance to the ball.

    python scripts/envelope.py
"""
import numpy as np

from santalo.lab import FamilySpec, stability_scan

FAMILIES = [
    FamilySpec("caps_cut_ball", 3, np.geomspace(1e-5, 0.3, 8).tolist()),
    FamilySpec("lp_revolution", 3, [1.5, 1.8, 1.95, 2.05, 2.5, 4.0]),
    FamilySpec("ellipsoid", 3, [0.5, 2.0]),
    FamilySpec("random_polytope", 2, count=6, seed=3, points=40, symmetric=True),
]


def main():
    worst = 0.0
    for spec in FAMILIES:
        records, slope = stability_scan(spec, with_q=False)
        print(f"{spec.name}: fitted exponent {slope}")
        for r in records:
            print(f"  param={r.param:<10.4g} deficit={r.deficit:.3e} bm-1={r.bm_minus_1:.3e}")
            if r.deficit < 1e-5:
                worst = max(worst, r.bm_minus_1)
    print(f"largest bm-1 among bodies with deficit < 1e-5: {worst:.3e} (envelope bound 0.05)")


if __name__ == "__main__":
    main()
