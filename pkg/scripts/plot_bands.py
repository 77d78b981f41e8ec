#!/usr/bin/env python3
"""Print the band/gap table of a periodic sequence and write an SVG diagram.

Example:
    python3 scripts/plot_bands.py --values 0.3 0 0.1 0 --r 0.6 --out /tmp/bands.svg
"""

import argparse
import math

from cmvspectra.cli import _atomic_write, _band_ring_svg
from cmvspectra.coeffs import make_periodic
from cmvspectra.floquet import band_structure


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--values", type=float, nargs="+", default=[0.3, 0.0],
                    help="one period of real coefficient values")
    ap.add_argument("--r", type=float, default=0.6)
    ap.add_argument("--out", help="SVG output path")
    args = ap.parse_args()

    seq = make_periodic(args.values, args.r)
    bs = band_structure(seq)
    two_pi = 2.0 * math.pi
    print(f"period {bs.q}: {len(bs.bands)} bands, {bs.open_gap_count()} open gaps, "
          f"band measure {bs.total_band_measure():.6f}")
    for i, b in enumerate(bs.bands):
        print(f"  band {i}: [{b.theta_lo % two_pi:.6f}, {b.theta_hi % two_pi:.6f}] "
              f"mass {b.mass:.6f}")
    for i, g in enumerate(bs.gaps):
        state = "closed" if g.closed else f"open, chord {g.chord:.3e}"
        print(f"  gap {i}:  [{g.theta_lo % two_pi:.6f}, {g.theta_hi % two_pi:.6f}] ({state})")

    if args.out:
        _atomic_write(args.out, _band_ring_svg([bs]))
        print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
