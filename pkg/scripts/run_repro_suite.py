#!/usr/bin/env python3
"""Run every canned scenario plus the property suite for all mechanisms.

Writes JSON reports (and the summary CSV) into out/ and exits nonzero if
any scenario or suite is inconsistent with the documented expectations.

Usage:
    python scripts/run_repro_suite.py [--seed 0] [--budget 8000] [--outdir out]
"""

import argparse
import sys
from pathlib import Path

from facilab.cli import SCENARIOS, main as facilab_main

MECHANISMS = ("dictator:1", "rand_med", "rand_center", "sep2d:a=0", "coord_median")


def run(argv) -> int:
    print("$ facilab " + " ".join(argv))
    code = facilab_main(argv)
    print()
    return code


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--budget", type=int, default=8000)
    parser.add_argument("--outdir", default="out")
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    failures = []

    for scenario in SCENARIOS:
        argv = [
            "repro", scenario,
            "--seed", str(args.seed),
            "--budget", str(args.budget),
            "--out", str(outdir / f"repro-{scenario}.json"),
        ]
        if scenario == "table1":
            argv += ["--csv", str(outdir / "table1.csv")]
        if run(argv) != 0:
            failures.append(scenario)

    for mech in MECHANISMS:
        slug = mech.replace(":", "-").replace("=", "")
        argv = [
            "check", "--mech", mech,
            "--n", "3", "--d", "2",
            "--seed", str(args.seed),
            "--budget", str(args.budget),
            "--out", str(outdir / f"check-{slug}.json"),
        ]
        if run(argv) != 0:
            failures.append(mech)

    if failures:
        print(f"INCONSISTENT: {failures}")
        return 1
    print(f"all scenarios and suites consistent; reports in {outdir}/")
    return 0


if __name__ == "__main__":
    sys.exit(main())
