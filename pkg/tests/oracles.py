"""Closed-form references used to pin numeric results. Independent of the package internals."""
from __future__ import annotations

import numpy as np

ETA = np.diag([-1.0, 1.0, 1.0, 1.0])
N = np.array([1.0, 0.0, 0.0, 1.0])


def power_metric_derivatives(y, a: float, b: float):
    """F^2 = sgn(G)|G|^b |N.y|^a with G = eta(y,y): returns (F^2, g, third derivative of F^2).

    Uses u = ln|F^2|: d3 F^2 = F^2 (u_ijk + sym(u_ij u_k) + u_i u_j u_k).
    """
    y = np.asarray(y, dtype=float)
    G = y @ ETA @ y
    n = N @ y
    Gi = 2 * ETA @ y
    f2 = np.sign(G) * abs(G) ** b * abs(n) ** a
    u1 = b * Gi / G + a * N / n
    u2 = b * (2 * ETA / G - np.outer(Gi, Gi) / G**2) - a * np.outer(N, N) / n**2
    eg = (np.einsum("ij,k->ijk", ETA, Gi) + np.einsum("ik,j->ijk", ETA, Gi)
          + np.einsum("jk,i->ijk", ETA, Gi))
    u3 = (b * (-2 * eg / G**2 + 2 * np.einsum("i,j,k->ijk", Gi, Gi, Gi) / G**3)
          + 2 * a * np.einsum("i,j,k->ijk", N, N, N) / n**3)
    sym = (np.einsum("ij,k->ijk", u2, u1) + np.einsum("ik,j->ijk", u2, u1)
           + np.einsum("jk,i->ijk", u2, u1))
    d3 = f2 * (u3 + sym + np.einsum("i,j,k->ijk", u1, u1, u1))
    g = 0.5 * f2 * (u2 + np.outer(u1, u1))
    return f2, g, d3


def cartan_scalar_closed_form(y, a: float, b: float) -> float:
    _, g, d3 = power_metric_derivatives(y, a, b)
    c = d3 / 4
    gi = np.linalg.inv(g)
    cm = np.einsum("mab,ab->m", c, gi)
    return float(cm @ gi @ cm)


def sphere_christoffel(theta: float) -> dict[tuple[int, int, int], float]:
    """Nonzero Levi-Civita symbols of d theta^2 + sin^2 theta d phi^2, coordinates (theta, phi) = (1, 2)."""
    s, c = np.sin(theta), np.cos(theta)
    return {(1, 2, 2): -s * c, (2, 1, 2): c / s, (2, 2, 1): c / s}


def boost_tz(theta: float) -> np.ndarray:
    """Undeformed boost along z acting on (t, x, y, z)."""
    ch, sh = np.cosh(theta), np.sinh(theta)
    m = np.eye(4)
    m[0, 0] = m[3, 3] = ch
    m[0, 3] = m[3, 0] = sh
    return m


def rotation_xy(theta: float) -> np.ndarray:
    c, s = np.cos(theta), np.sin(theta)
    m = np.eye(4)
    m[1, 1] = m[2, 2] = c
    m[1, 2], m[2, 1] = -s, s
    return m
