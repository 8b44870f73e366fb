#!/usr/bin/env python3
"""Christoffel symbols and flag curvature of the round 2-sphere field against closed forms."""
import sys

import numpy as np

from vsr_finsler.finsler_kernel import connections, sphere_field, torsion_and_curvature


def main() -> int:
    f = sphere_field()
    worst_gamma = worst_k = 0.0
    for theta in np.linspace(0.4, 2.6, 7):
        x = np.array([0.0, theta, 0.1, 0.0])
        y = np.array([0.0, 0.8, 0.45, 0.0])
        s, c = np.sin(theta), np.cos(theta)
        chern = connections(f, x, y)["chern"][0]
        err = max(abs(chern[1, 2, 2] + s * c), abs(chern[2, 1, 2] - c / s), abs(chern[2, 2, 1] - c / s))
        flag = torsion_and_curvature(f, x, y, blocks=("torsion", "flag"))["flag"][0]
        eig = np.sort(np.linalg.eigvals(flag[1:3, 1:3]).real)
        k = -eig[0] / f(x[None], y[None])[0]
        worst_gamma, worst_k = max(worst_gamma, err), max(worst_k, abs(k - 1))
        print(f"theta {theta:.3f}: christoffel err {err:.2e}, K = {k:.8f}")
    ok = worst_gamma <= 1e-4 and worst_k <= 1e-3
    print(f"max christoffel err {worst_gamma:.2e}, max |K - 1| {worst_k:.2e}: {'ok' if ok else 'FAILED'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
