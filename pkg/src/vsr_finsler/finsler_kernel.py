"""Finite-difference Finsler geometry over a metric field F^2(x, y).

All routines are batched: x and y have shape (B, 4) (a single 4-vector is promoted) and
results carry the batch axis first. Derivatives are central differences with one
Richardson level, R = (4 D(h/2) - D(h)) / 3. Array index order follows the placement of
indices in the tensor symbol, upper index first, derivative indices last where noted.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .metric_builder import DomainError, MetricSpec, evaluate, in_domain

DIM = 4
COND_MAX = 1e12


class SingularMetric(ArithmeticError):
    pass


class StepTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class Steps:
    """Relative steps (times |y|) for y, absolute steps for x."""

    first: float = 1e-4
    hessian: float = 1e-3
    third: float = 1e-2
    nested: float = 1e-2
    mixed_y: float = 1e-3
    x: float = 2e-3
    x_nested: float = 1e-2


DEFAULT_STEPS = Steps()


@dataclass(frozen=True)
class MetricField:
    evaluator: Callable[[np.ndarray, np.ndarray], np.ndarray]
    x_dependent: bool = False
    domain: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    name: str = ""

    def __call__(self, x, y) -> np.ndarray:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.domain is not None and not np.all(self.domain(x, y)):
            raise StepTooLarge(f"stencil point outside the domain of {self.name or 'field'}")
        return self.evaluator(x, y)


def field_from_spec(spec: MetricSpec, margin: float = 1e-9) -> MetricField:
    return MetricField(lambda x, y: evaluate(spec, y), False,
                       lambda x, y: in_domain(spec, y, margin), spec.group or "spec")


def quadratic_field(g0, name: str = "quadratic") -> MetricField:
    g0 = np.asarray(g0, dtype=float)
    return MetricField(lambda x, y: np.einsum("zi,ij,zj->z", y, g0, y), False, None, name)


def sphere_field() -> MetricField:
    """Round unit 2-sphere in (x1, x2) = (theta, phi), padded flat in x0 and x3."""
    def f2(x, y):
        return y[:, 0] ** 2 + y[:, 1] ** 2 + np.sin(x[:, 1]) ** 2 * y[:, 2] ** 2 + y[:, 3] ** 2
    return MetricField(f2, True, None, "sphere")


def _batch(x, y):
    y = np.atleast_2d(np.asarray(y, dtype=float))
    x = np.zeros_like(y) if x is None else np.atleast_2d(np.asarray(x, dtype=float))
    if x.shape[0] == 1 and y.shape[0] > 1:
        x = np.repeat(x, y.shape[0], axis=0)
    if np.any(np.linalg.norm(y, axis=1) == 0):
        raise DomainError("y must be nonzero")
    return x, y


# --- generic differencing ------------------------------------------------------------

def _richardson(d_h, d_h2):
    return (4.0 * d_h2 - d_h) / 3.0


def _product_stencil(order: int):
    """Index tuples and sign patterns for the product of `order` central-difference operators."""
    idx = list(itertools.product(range(DIM), repeat=order))
    signs = np.array(list(itertools.product((1.0, -1.0), repeat=order)))
    return idx, signs


def y_derivatives(fun, x, y, order: int, rel_step: float) -> np.ndarray:
    """All order-n y-derivatives of fun(x, y) -> (B, *S); result (B, *S, 4, ..., 4)."""
    idx, signs = _product_stencil(order)
    b = y.shape[0]
    scale = np.linalg.norm(y, axis=1)
    outs = []
    for hrel in (rel_step, rel_step / 2):
        h = hrel * scale  # (B,)
        # shift[k, s] = sum_j signs[s, j] e_{idx[k][j]}
        shifts = np.zeros((len(idx), len(signs), DIM))
        for k, ii in enumerate(idx):
            for j, i in enumerate(ii):
                shifts[k, :, i] += signs[:, j]
        pts = y[None, None] + shifts[:, :, None, :] * h[None, None, :, None]
        xs = np.broadcast_to(x, pts.shape).reshape(-1, DIM)
        vals = fun(xs, pts.reshape(-1, DIM))
        vals = vals.reshape((len(idx), len(signs), b) + vals.shape[1:])
        w = np.prod(signs, axis=1)
        d = np.tensordot(w, vals, axes=([0], [1])) / (2.0**order)  # (K, B, *S)
        d = d / h.reshape((1, b) + (1,) * (d.ndim - 2)) ** order
        d = np.moveaxis(d, 0, -1)  # (B, *S, K)
        outs.append(d.reshape(d.shape[:-1] + (DIM,) * order))
    return _richardson(*outs)


def x_derivative(fun, x, y, step: float) -> np.ndarray:
    """First x-derivative of fun(x, y) -> (B, *S); result (B, *S, 4)."""
    outs = []
    for h in (step, step / 2):
        eye = np.eye(DIM) * h
        plus = fun((x[None] + eye[:, None]).reshape(-1, DIM), np.broadcast_to(y, (DIM,) + y.shape).reshape(-1, DIM))
        minus = fun((x[None] - eye[:, None]).reshape(-1, DIM), np.broadcast_to(y, (DIM,) + y.shape).reshape(-1, DIM))
        d = (plus - minus).reshape((DIM, y.shape[0]) + plus.shape[1:]) / (2 * h)
        outs.append(np.moveaxis(d, 0, -1))
    return _richardson(*outs)


def mixed_xy(fun, x, y, step_x: float, rel_y: float) -> np.ndarray:
    """d^2 fun / dx^a dy^n as (B, *S, a, n)."""
    def dy(xx, yy):
        return y_derivatives(fun, xx, yy, 1, rel_y)
    return np.swapaxes(x_derivative(dy, x, y, step_x), -1, -2)


# --- metric-level quantities ---------------------------------------------------------

def _g(f: MetricField, x, y, steps: Steps) -> np.ndarray:
    h = y_derivatives(f, x, y, 2, steps.hessian)
    g = 0.5 * h
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def fundamental_tensor(f: MetricField, x, y, h: float | None = None, steps: Steps = DEFAULT_STEPS) -> np.ndarray:
    """g_{mn} = 1/2 d^2 F^2 / dy^m dy^n, symmetrized. Shape (B, 4, 4), or (4, 4) for one point."""
    single = np.ndim(y) == 1
    x, y = _batch(x, y)
    if h is not None:
        steps = Steps(**{**steps.__dict__, "hessian": h})
    g = _g(f, x, y, steps)
    return g[0] if single else g


def _inverse(g: np.ndarray) -> np.ndarray:
    c = np.linalg.cond(g)
    if np.any(~np.isfinite(c)) or np.any(c > COND_MAX):
        raise SingularMetric(f"fundamental tensor is singular (cond {np.max(c):.3g})")
    return np.linalg.inv(g)


def homogeneity_check(f: MetricField, x, y, lambdas=(0.5, 2.0, 3.0)) -> float:
    x, y = _batch(x, y)
    f0 = f(x, y)
    worst = 0.0
    for lam in lambdas:
        fl = f(x, lam * y)
        ref = np.abs(lam**2 * f0)
        worst = max(worst, float(np.max(np.abs(fl - lam**2 * f0) / np.where(ref > 0, ref, 1.0))))
    return worst


def euler_residuals(f: MetricField, x, y, steps: Steps = DEFAULT_STEPS) -> tuple[float, float]:
    """Relative residuals of y.dF^2 = 2F^2 and g(y, y) = F^2."""
    x, y = _batch(x, y)
    f0 = f(x, y)
    grad = y_derivatives(f, x, y, 1, steps.first)
    g = _g(f, x, y, steps)
    r1 = np.abs(np.einsum("zi,zi->z", y, grad) - 2 * f0) / np.abs(f0)
    r2 = np.abs(np.einsum("zi,zij,zj->z", y, g, y) - f0) / np.abs(f0)
    return float(np.max(r1)), float(np.max(r2))


def _cartan(f: MetricField, x, y, steps: Steps) -> np.ndarray:
    c = 0.25 * y_derivatives(f, x, y, 3, steps.third)
    perms = list(itertools.permutations((1, 2, 3)))
    return sum(np.transpose(c, (0,) + p) for p in perms) / len(perms)


def cartan_tensor(f: MetricField, x, y, h: float | None = None, steps: Steps = DEFAULT_STEPS) -> np.ndarray:
    """C_{abc} = 1/2 dg_{ab}/dy^c = 1/4 d^3 F^2, fully symmetrized. Requires invertible g."""
    single = np.ndim(y) == 1
    x, y = _batch(x, y)
    if h is not None:
        steps = Steps(**{**steps.__dict__, "third": h})
    _inverse(_g(f, x, y, steps))
    c = _cartan(f, x, y, steps)
    return c[0] if single else c


def cartan_scalar(f: MetricField, x, y, h: float | None = None, steps: Steps = DEFAULT_STEPS):
    """C = g^{mn} C_m C_n with C_m = C_{mab} g^{ab}."""
    single = np.ndim(y) == 1
    x, y = _batch(x, y)
    if h is not None:
        steps = Steps(**{**steps.__dict__, "third": h})
    gi = _inverse(_g(f, x, y, steps))
    c = _cartan(f, x, y, steps)
    cm = np.einsum("zmab,zab->zm", c, gi)
    s = np.einsum("zmn,zm,zn->z", gi, cm, cm)
    return float(s[0]) if single else s


def dg_dy(f: MetricField, x, y, steps: Steps = DEFAULT_STEPS) -> np.ndarray:
    """Unsymmetrized nested derivative d_c g_{ab} as (B, a, b, c), for index-symmetry checks."""
    x, y = _batch(x, y)
    return y_derivatives(lambda xx, yy: _g(f, xx, yy, steps), x, y, 1, steps.nested)


# --- connections ---------------------------------------------------------------------

class _Geometry:
    """Lazily composed connection quantities; each is a batched function of (x, y)."""

    def __init__(self, f: MetricField, steps: Steps):
        self.f = f
        self.s = steps

    def g(self, x, y):
        return _g(self.f, x, y, self.s)

    def ginv(self, x, y):
        return _inverse(self.g(x, y))

    def spray(self, x, y):
        """G^m = 1/4 g^{mn} (y^a dx_a dy_n F^2 - dx_n F^2)."""
        mixed = mixed_xy(self.f, x, y, self.s.x, self.s.mixed_y)  # (B, a, n)
        dx = x_derivative(self.f, x, y, self.s.x)
        a = np.einsum("za,zan->zn", y, mixed) - dx
        return 0.25 * np.einsum("zmn,zn->zm", self.ginv(x, y), a)

    def N(self, x, y):
        """N^s_m = dy_m G^s as (B, s, m)."""
        return y_derivatives(self.spray, x, y, 1, self.s.nested)

    def berwald(self, x, y):
        """G^s_{mn} = dy_n N^s_m as (B, s, m, n)."""
        return y_derivatives(self.N, x, y, 1, self.s.nested)

    def cartan(self, x, y):
        return _cartan(self.f, x, y, self.s)

    def delta_g(self, x, y):
        """delta_m g_{ab} = dx_m g_ab - N^c_m dy_c g_ab as (B, a, b, m)."""
        dxg = x_derivative(self.g, x, y, self.s.x_nested)
        dyg = 2.0 * self.cartan(x, y)
        return dxg - np.einsum("zcm,zabc->zabm", self.N(x, y), dyg)

    def chern(self, x, y):
        dg = self.delta_g(x, y)  # dg[r, n, m] = delta_m g_{rn}
        t = dg + np.transpose(dg, (0, 1, 3, 2)) - np.transpose(dg, (0, 3, 1, 2))
        # t[r, m, n] = delta_n g_rm + delta_m g_rn - delta_r g_mn
        return 0.5 * np.einsum("zsr,zrmn->zsmn", self.ginv(x, y), t)

    def cartan_connection(self, x, y):
        """Lambda^s_{mn} = 1/2 g^{sr} dy_r g_{mn} = g^{sr} C_{rmn}."""
        return np.einsum("zsr,zrmn->zsmn", self.ginv(x, y), self.cartan(x, y))

    def delta_N(self, x, y):
        """dN[s, m, n] = delta_n N^s_m."""
        dxn = x_derivative(self.N, x, y, self.s.x_nested)
        return dxn - np.einsum("zan,zsma->zsmn", self.N(x, y), self.berwald(x, y))

    def torsion(self, x, y):
        """R^s_{mn} = delta_n N^s_m - delta_m N^s_n."""
        d = self.delta_N(x, y)
        return d - np.swapaxes(d, -1, -2)

    def delta_of(self, fun, x, y):
        """delta_k of a batched tensor function, derivative index appended."""
        dx = x_derivative(fun, x, y, self.s.x_nested)
        dy = y_derivatives(fun, x, y, 1, self.s.nested)
        return dx - np.einsum("zak,z...a->z...k", self.N(x, y), dy)


@dataclass
class GeometryReport:
    point: tuple[list[float], list[float]]
    g: np.ndarray
    g_inverse: np.ndarray
    cartan: np.ndarray
    cartan_scalar: float
    spray: np.ndarray
    nonlinear_connection: np.ndarray
    chern: np.ndarray
    berwald: np.ndarray
    landsberg: np.ndarray
    cartan_connection: np.ndarray
    torsion: np.ndarray | None = None
    curvature: dict[str, np.ndarray] = field(default_factory=dict)
    residuals: dict[str, float] = field(default_factory=dict)
    certificate: str = ""

    def horizontal_blocks(self) -> dict[str, np.ndarray]:
        out = {"spray": self.spray, "nonlinear_connection": self.nonlinear_connection, "chern": self.chern,
               "berwald": self.berwald, "landsberg": self.landsberg}
        if self.torsion is not None:
            out["torsion"] = self.torsion
        out.update({k: v for k, v in self.curvature.items() if k != "P"})
        return out

    def max_horizontal(self) -> float:
        return max(float(np.max(np.abs(v))) if v.size else 0.0 for v in self.horizontal_blocks().values())

    def to_json(self) -> dict:
        def arr(a):
            return np.asarray(a, dtype=float).tolist()
        return {
            "point": {"x": self.point[0], "y": self.point[1]},
            "g": arr(self.g), "g_inverse": arr(self.g_inverse), "cartan": arr(self.cartan),
            "cartan_scalar": float(self.cartan_scalar), "spray": arr(self.spray),
            "nonlinear_connection": arr(self.nonlinear_connection), "chern": arr(self.chern),
            "berwald": arr(self.berwald), "landsberg": arr(self.landsberg),
            "cartan_connection": arr(self.cartan_connection),
            "torsion": None if self.torsion is None else arr(self.torsion),
            "curvature": {k: arr(v) for k, v in sorted(self.curvature.items())},
            "residuals": {k: float(v) for k, v in sorted(self.residuals.items())},
            "certificate": self.certificate,
        }


FLAT_CERTIFICATE = ("F^2 does not depend on x: every x-derivative vanishes, so the spray, N, Chern, "
                    "Berwald, Landsberg, torsion and all horizontal curvature blocks are identically zero")


def short_circuit(f: MetricField) -> str | None:
    return None if f.x_dependent else FLAT_CERTIFICATE


def connections(f: MetricField, x, y, steps: Steps = DEFAULT_STEPS, generic: bool = False) -> dict[str, np.ndarray]:
    """Spray, N, Chern, Berwald, Landsberg and the Cartan-connection triple at one point.

    For x-independent fields the short-circuit returns exact zeros unless ``generic``.
    """
    x, y = _batch(x, y)
    geo = _Geometry(f, steps)
    gi = geo.ginv(x, y)
    lam = geo.cartan_connection(x, y)
    if not generic and short_circuit(f):
        z1, z2, z3 = (np.zeros((x.shape[0],) + (DIM,) * k) for k in (1, 2, 3))
        return {"spray": z1, "nonlinear_connection": z2, "chern": z3, "berwald": z3.copy(),
                "landsberg": z3.copy(), "cartan_connection": lam, "g_inverse": gi}
    spray = geo.spray(x, y)
    n = geo.N(x, y)
    chern = geo.chern(x, y)
    berwald = geo.berwald(x, y)
    return {"spray": spray, "nonlinear_connection": n, "chern": chern, "berwald": berwald,
            "landsberg": berwald - chern, "cartan_connection": lam, "g_inverse": gi}


def torsion_and_curvature(f: MetricField, x, y, steps: Steps = DEFAULT_STEPS, generic: bool = False,
                          blocks=("torsion", "finsler", "flag", "berwald", "R~", "S", "P", "X")) -> dict[str, np.ndarray]:
    """Torsion R^s_{mn} and curvature blocks; P (pure vertical, Cartan triple) is never short-circuited."""
    x, y = _batch(x, y)
    geo = _Geometry(f, steps)
    b = x.shape[0]
    out: dict[str, np.ndarray] = {}
    flat = not generic and short_circuit(f) is not None
    shapes = {"torsion": 3, "finsler": 4, "flag": 2, "berwald": 4, "R~": 4, "S": 4, "X": 4}
    if flat:
        for k in blocks:
            if k != "P":
                out[k] = np.zeros((b,) + (DIM,) * shapes[k])
    else:
        if "torsion" in blocks or "flag" in blocks:
            r = geo.torsion(x, y)
            out["torsion"] = r
            out["flag"] = np.einsum("znma,za->znm", r, y)  # F^n_m = y^a R^n_{ma}
        if "finsler" in blocks:
            d = y_derivatives(geo.torsion, x, y, 1, steps.nested)  # [r, m, n, s] = dy_s R^r_{mn}
            out["finsler"] = np.transpose(d, (0, 1, 4, 2, 3))
        if "berwald" in blocks or "R~" in blocks:
            gb = geo.berwald(x, y)
            db = y_derivatives(geo.berwald, x, y, 1, steps.nested)  # [s, m, n, r] = dy_r G^s_mn
            out["berwald"] = np.transpose(db, (0, 1, 4, 2, 3))
            if "R~" in blocks:
                dgb = geo.delta_of(geo.berwald, x, y)  # [s, r, n, m] = delta_m G^s_{rn}
                t1 = dgb - np.swapaxes(dgb, -1, -2)    # [s, r, m, n] after relabel below
                t1 = np.swapaxes(t1, -1, -2)
                quad = (np.einsum("zgrn,zsgm->zsrmn", gb, gb) - np.einsum("zgrm,zsgn->zsrmn", gb, gb))
                out["R~"] = t1 + quad
        if "S" in blocks or "X" in blocks:
            h = geo.chern(x, y)
            v = geo.cartan_connection(x, y)
            if "S" in blocks:
                dh = geo.delta_of(geo.chern, x, y)  # [m, s, a, k] = delta_k H^m_{sa}
                quad = (np.einsum("zmrj,zrsi->zmsij", h, h) - np.einsum("zmri,zrsj->zmsij", h, h))
                t = dh - np.swapaxes(dh, -1, -2)
                out["S"] = t + quad
            if "X" in blocks:
                dyh = y_derivatives(geo.chern, x, y, 1, steps.nested)  # [m, s, a, b] = dy_b H^m_{sa}
                dv = geo.delta_of(geo.cartan_connection, x, y)     # [m, s, b, a] = delta_a V^m_{sb}
                out["X"] = (dyh - np.swapaxes(dv, -1, -2)
                            + np.einsum("zmrj,zrsi->zmsij", v, h) - np.einsum("zmrj,zrsi->zmsij", h, v))
    if "P" in blocks:
        v = geo.cartan_connection(x, y)
        dv = y_derivatives(geo.cartan_connection, x, y, 1, steps.nested)  # [m, s, a, b] = dy_b V^m_{sa}
        out["P"] = (dv - np.swapaxes(dv, -1, -2)
                    + np.einsum("zmrj,zrsi->zmsij", v, v) - np.einsum("zmri,zrsj->zmsij", v, v))
    return out


def geometry_report(f: MetricField, x, y, steps: Steps = DEFAULT_STEPS, generic: bool = False,
                    curvature: bool = True) -> GeometryReport:
    x1, y1 = _batch(x, y)
    if x1.shape[0] != 1:
        raise ValueError("geometry_report takes a single point")
    g = _g(f, x1, y1, steps)
    con = connections(f, x1, y1, steps, generic)
    c = _cartan(f, x1, y1, steps)
    gi = con["g_inverse"]
    cm = np.einsum("zmab,zab->zm", c, gi)
    cs = float(np.einsum("zmn,zm,zn->z", gi, cm, cm)[0])
    curv = torsion_and_curvature(f, x1, y1, steps, generic) if curvature else {}
    torsion = curv.pop("torsion", None)
    e1, e2 = euler_residuals(f, x1, y1, steps)
    res = {
        "g_symmetry": float(np.max(np.abs(g - np.swapaxes(g, -1, -2)))),
        "g_ginv_identity": float(np.max(np.abs(g @ gi - np.eye(DIM)))),
        "euler_gradient": e1,
        "euler_fundamental": e2,
        "cartan_y_contraction": float(np.max(np.abs(np.einsum("zabc,zc->zab", c, y1)))),
    }
    return GeometryReport(
        (x1[0].tolist(), y1[0].tolist()), g[0], gi[0], c[0], cs,
        con["spray"][0], con["nonlinear_connection"][0], con["chern"][0], con["berwald"][0],
        con["landsberg"][0], con["cartan_connection"][0],
        None if torsion is None else torsion[0], {k: v[0] for k, v in curv.items()}, res,
        short_circuit(f) if not generic else "",
    )
