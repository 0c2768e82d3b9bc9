"""Stability scan of the caps-cut balls: deficit, distance to the ball, fitted exponent.

    python scripts/caps_exponent.py --n 3 --out caps3.csv
"""
import argparse
import json
from pathlib import Path

import numpy as np

from santalo.lab import FamilySpec, configure_logging, stability_scan, write_records

CORPUS = Path(__file__).resolve().parents[1] / "configs" / "corpus.json"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=3, choices=[3, 4])
    ap.add_argument("--out", required=True)
    ap.add_argument("--with-q", action="store_true", help="also run the false-centre scan per body")
    ap.add_argument("--no-timing", action="store_true")
    args = ap.parse_args()
    configure_logging()
    cfg = json.loads(CORPUS.read_text())["caps_exponent"][str(args.n)]
    eps = np.geomspace(*cfg["cap_volumes"], cfg["count"]).tolist()
    records, slope = stability_scan(FamilySpec("caps_cut_ball", args.n, eps), with_q=args.with_q)
    write_records(records, args.out, slope, timing=not args.no_timing)
    print(f"n={args.n}: fitted exponent {slope:.4f} (target {2 / (args.n + 1):.4f})")


if __name__ == "__main__":
    main()
