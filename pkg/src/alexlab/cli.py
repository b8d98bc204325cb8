"""Command line: ``alexlab run``, ``alexlab catalog``, ``alexlab suite``.

Exit codes: 0 all checks pass, 1 some check is violated, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .catalog import list_catalog
from .errors import AlexlabError
from .hopf_lab.appendix import BUILTIN_G
from .scenarios import KINDS, ScenarioParseError, load_scenario, run_scenario

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

INSTANCES = [
    {"kind": "hopf", "name": "barrier", "note": "(R - r)^k with k(k - n) = C0 (default when w is omitted)"},
    {"kind": "hopf", "name": "poisson", "note": "Poisson kernel of the unit ball, zero at (-1, 0, ...)"},
    {"kind": "hopf", "name": "power", "note": "(1 - r)^p, parameter 'power'"},
    {"kind": "hopf", "name": "exp-flat", "note": "exp(-1/t), vanishes to infinite order at t = 0"},
    {"kind": "frequency", "name": "harmonic", "note": "Re z^m (n=2) or zonal harmonic of degree 0..3 (n=3)"},
    {"kind": "frequency", "name": "sum", "note": "sum of harmonics of the listed degrees"},
    {"kind": "frequency", "name": "radial", "note": "radial solution of Lap u = c u"},
    {"kind": "frequency", "name": "flat", "note": "exp(-1/r^2) with V chosen so that (r^2 V)_r < 0"},
    {"kind": "taylor", "name": "manufactured", "note": "u = sum_j t^j a_j(y), trigonometric a_j, seeded"},
] + [{"kind": "appendix", "name": g, "note": "orthogonally invariant G"} for g in BUILTIN_G]


def _err(msg: str) -> None:
    print(f"alexlab: {msg}", file=sys.stderr)


def cmd_run(args) -> int:
    try:
        sc = load_scenario(args.scenario)
    except ScenarioParseError as exc:
        _err(f"{args.scenario}: {exc}")
        return EXIT_USAGE
    except AlexlabError as exc:
        _err(str(exc))
        return EXIT_USAGE
    try:
        res = run_scenario(sc, args.out, args.seed)
    except AlexlabError as exc:
        _err(f"{args.scenario}: {type(exc).__name__}: {exc}")
        return EXIT_USAGE
    for line in res.summary_lines():
        print(line)
    print(f"report: {res.out_dir / 'report.json'}")
    return res.exit_code


def cmd_catalog(args) -> int:
    surfaces = list_catalog()
    if args.json:
        print(json.dumps({"surfaces": surfaces, "instances": INSTANCES}, indent=2, sort_keys=True))
        return EXIT_OK
    print("surfaces")
    for e in surfaces:
        designed = " ".join(f"{k}={'yes' if v is True else 'no' if v is False else v}" for k, v in e["designed"].items())
        print(f"  {e['name']:<16} {designed}")
        print(f"  {'':<16} {e['note']}")
    print("instances")
    for e in INSTANCES:
        print(f"  {e['kind']:<10} {e['name']:<14} {e['note']}")
    return EXIT_OK


def cmd_suite(args) -> int:
    from .acceptance import CRITERIA, run_suite

    which = None
    if args.criteria:
        try:
            which = [int(x) for x in args.criteria.split(",")]
        except ValueError:
            _err("--criteria takes a comma-separated list of integers")
            return EXIT_USAGE
        if any(i not in CRITERIA for i in which):
            _err(f"criteria must be among {sorted(CRITERIA)}")
            return EXIT_USAGE
    out = Path(args.out or "alexlab-out/suite")
    _, code = run_suite(out, args.seed, which, echo=print)
    print(f"report: {out / 'report.json'}")
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="alexlab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"alexlab {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help=f"run a scenario file (kinds: {', '.join(KINDS)})")
    r.add_argument("scenario", help="scenario JSON file")
    r.add_argument("--seed", type=int, default=None, help="override the scenario seed (default 0)")
    r.add_argument("--out", default=None, help="output directory (report.json, plots/)")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("catalog", help="list builtin surfaces and PDE instances")
    c.add_argument("--json", action="store_true", help="machine-readable output")
    c.set_defaults(func=cmd_catalog)

    s = sub.add_parser("suite", help="run the acceptance criteria 1-9 and write a report")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", default=None, help="output directory (default alexlab-out/suite)")
    s.add_argument("--criteria", default=None, help="comma-separated subset, e.g. 1,5,9")
    s.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "seed", None) is not None and args.seed < 0:
        _err("--seed must be nonnegative")
        return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
