#!/usr/bin/env python3
"""Dump log rho(s) and its second difference for the builtin frequency instances.

Homogeneous harmonics give straight lines, sums of harmonics bend upward, and the
exp(-1/r^2) mimic (which breaks the potential hypothesis) bends downward.
"""
import argparse
import re
from pathlib import Path

from alexlab.hopf_lab import frequency
from alexlab.reports import write_csv


def instances():
    yield frequency.harmonic_2d(2)
    yield frequency.harmonic_3d(3)
    yield frequency.combine(frequency.harmonic_2d(1), frequency.harmonic_2d(3))
    yield frequency.radial_constant_potential(2.0, 2)
    yield frequency.flat_radial(2)


def main(argv=None):
    ap = argparse.ArgumentParser(description="log rho profiles of the frequency instances")
    ap.add_argument("--out", default="alexlab-out/frequency")
    ap.add_argument("--points", type=int, default=201)
    args = ap.parse_args(argv)
    out = Path(args.out)
    for inst in instances():
        rep = frequency.frequency_convexity(frequency.frequency_series(inst, points=args.points))
        fc = rep.fitted_constants
        header, rows = rep.series["log_rho"]
        name = re.sub(r"[^A-Za-z0-9.]+", "_", f"n{inst.n}_{inst.label}").strip("_")
        write_csv(out / f"{name}.csv", header, rows)
        status = "convex" if not rep.broken else "broken: " + ", ".join(rep.broken)
        print(f"{name:<28} min d2 log rho = {fc['min_d2_log_rho']:+.3e}  {status}")
    print(f"wrote CSVs under {out}")


if __name__ == "__main__":
    main()
