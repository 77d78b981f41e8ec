#!/usr/bin/env python3
"""Run the density-controlled (AC) construction and print the drift ledger.

Example:
    python3 scripts/run_ac.py --eps 0.9 --stages 2 --t 1.5 --seed 7
"""

import argparse
import json
import os

from cmvspectra.construct import ac_iterate
from cmvspectra.odometer import make_sampling


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--eps", type=float, default=0.9)
    ap.add_argument("--stages", type=int, default=2)
    ap.add_argument("--t", type=float, default=1.5)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--alpha", type=float, default=0.3,
                    help="initial level-1 table is (alpha, 0)")
    ap.add_argument("--r", type=float, default=0.6)
    ap.add_argument("--out", help="directory for trail.json")
    args = ap.parse_args()

    f = make_sampling((args.alpha, 0.0), args.r)
    u = {0: 1.0}
    reports, final = ac_iterate(f, args.eps, args.stages, u, args.t, seed=args.seed)

    print(f"{'stage':>5} {'period':>6} {'drift':>12} {'drift^1/t':>12} {'cap':>12}")
    for r in reports:
        if r.density_drift is None:
            print(f"{r.stage:>5} {r.period:>6} {'-':>12} {'-':>12} {'-':>12}")
        else:
            rooted = r.density_drift ** (1.0 / args.t)
            print(f"{r.stage:>5} {r.period:>6} {r.density_drift:>12.4e} "
                  f"{rooted:>12.4e} {2.0 ** -r.stage:>12.4e}")
    print(f"final period {final.period}")

    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "trail.json"), "w") as fh:
            json.dump({"stages": [r.to_json() for r in reports],
                       "final": final.to_json()}, fh, indent=2)
        print(f"wrote {os.path.join(args.out, 'trail.json')}")


if __name__ == "__main__":
    main()
