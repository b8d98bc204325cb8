#!/usr/bin/env python3
"""Run the acceptance criteria and print one PASS/FAIL line each.

    python3 scripts/run_acceptance.py                 # criteria 1-10
    python3 scripts/run_acceptance.py -c 1,6,7 -v     # a subset, with sub-checks
"""
import argparse
import sys
import time

from alexlab import acceptance


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("-c", "--criteria", default=None, help="comma-separated numbers (default: all ten)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("-v", "--verbose", action="store_true", help="print every sub-check")
    args = ap.parse_args(argv)
    wanted = [int(x) for x in args.criteria.split(",")] if args.criteria else list(range(1, 11))

    failed = 0
    for i in wanted:
        t0 = time.perf_counter()
        res = acceptance.criterion_10(args.seed) if i == 10 else acceptance.CRITERIA[i](args.seed)
        print(f"{res.line()}  ({time.perf_counter() - t0:.1f} s)", flush=True)
        if args.verbose:
            for c in res.checks:
                print(f"    {'ok ' if c.ok else 'BAD'} {c.name} = {c.value} (bound {c.bound})")
        failed += not res.passed
    print(f"{len(wanted) - failed}/{len(wanted)} criteria pass")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
