#!/usr/bin/env python3
"""Compare the finite-difference Cartan scalar with the closed form for
F^2 = sgn(G)|G|^(1+A2)|N.y|^(-2 A2) over a range of third-derivative steps."""
import argparse
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))
from oracles import cartan_scalar_closed_form  # noqa: E402

from vsr_finsler.finsler_kernel import cartan_scalar, field_from_spec  # noqa: E402
from vsr_finsler.pipeline import default_spec, solve_group  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--A2", default="1/3")
    ap.add_argument("--y", default="2,0,0,1")
    args = ap.parse_args()
    a2 = Fraction(args.A2)
    y = np.array([float(v) for v in args.y.split(",")])
    exact = cartan_scalar_closed_form(y, float(-2 * a2), float(1 + a2))
    f = field_from_spec(default_spec(solve_group("DISIMb", {"A2": a2})))
    print(f"closed form  C = {exact:.16g}")
    for h in (2e-2, 1e-2, 5e-3, 2e-3, 1e-3):
        c = cartan_scalar(f, None, y, h=h)
        print(f"h = {h:<6g}  C = {c:.12g}  rel err {abs(c - exact) / abs(exact):.2e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
