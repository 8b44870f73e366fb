#!/usr/bin/env python3
"""Run `verify` on every feasible metric that has a default parameter point."""
import argparse
import contextlib
import io
import json
import sys

from vsr_finsler.cli import main as cli

RUNS = [
    ("Poincare", []),
    ("DISIMb", ["--A2=1/3"]),
    ("DISIMb", ["--A2=-1/4"]),
    ("XDISIM1", ["--A1=1/2", "--A2=0", "--A3=1/4"]),
    ("DTE2a", ["--rep=2", "--A2=1/2", "--lambda=1/3"]),
    ("DTE3b", ["--A1=0", "--A2=0"]),
    ("IE2_TE2", []),
    ("ISO3", []),
    ("ISO21", []),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", default="1000")
    ap.add_argument("--seed", default="0")
    args = ap.parse_args()
    failed = 0
    for group, extra in RUNS:
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = cli(["verify", "--group", group, *extra, "--samples", args.samples, "--seed", args.seed])
        doc = json.loads(buf.getvalue())
        bad = [c["name"] for c in doc["checks"] if not c["pass"]]
        failed += code != 0
        print(f"{group:10s} {' '.join(extra):40s} {'pass' if code == 0 else 'FAIL ' + ','.join(bad)}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
