"""Generator matrices of the (deformed) Poincare subgroups in their 5-d natural representation.

Index order is t, x, y, z, w (w is the homogeneous coordinate). A generator acts
on spacetime as x -> R x + P, and on tangent vectors through its upper-left 4x4
block. Every group is built from a small set of 4x4 building blocks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

import numpy as np

from .exact_linalg import RationalMatrix, as_fraction, fraction_str

T, X, Y, Z, W = range(5)
SYMBOLS = ("A1", "A2", "A3", "alpha", "beta", "lambda")


class CatalogError(ValueError):
    pass


class MissingParameter(CatalogError):
    pass


class ConstraintViolated(CatalogError):
    pass


class NoRepresentation(CatalogError):
    pass


class UnknownGroup(CatalogError):
    pass


KINDS = {
    "r": "rotation",
    "b": "boost",
    "t": "null-translation",
    "p": "spacetime-translation",
}


@dataclass(frozen=True)
class Generator:
    symbol: str
    matrix: RationalMatrix
    kind: str

    @property
    def bottom_row_zero(self) -> bool:
        return not self.matrix.rows[W]


@dataclass(frozen=True)
class GroupInstance:
    name: str
    rep_variant: int
    params: Mapping[str, Fraction]
    generators: tuple[Generator, ...]
    # "affine": tangent vectors move by the 4x4 block only.
    # "projective": the 5x5 matrix acts projectively, so the tangent action depends on x.
    tangent_action: str = "affine"
    flags: tuple[str, ...] = ()

    def generator(self, symbol: str) -> Generator:
        for g in self.generators:
            if g.symbol == symbol:
                return g
        raise KeyError(symbol)

    @property
    def symbols(self) -> list[str]:
        return [g.symbol for g in self.generators]


@dataclass(frozen=True)
class GroupInfo:
    name: str
    symbols: tuple[str, ...]
    rep_count: int
    aux_symbols: tuple[tuple[str, ...], ...] = ()
    no_representation: bool = False
    alias_of: str | None = None


# --- 4x4 building blocks --------------------------------------------------------------

def _mat(entries: Mapping[tuple[int, int], object], n: int = 5) -> RationalMatrix:
    rows: list[dict] = [{} for _ in range(n)]
    for (i, j), v in entries.items():
        v = as_fraction(v)
        if v:
            rows[i][j] = rows[i].get(j, 0) + v
    return RationalMatrix(rows, n)


def E(i: int, j: int, v=1) -> RationalMatrix:
    return _mat({(i, j): v})


def I4(v=1) -> RationalMatrix:
    return _mat({(k, k): v for k in range(4)})


def rot(a: int, b: int) -> RationalMatrix:
    """Rotation generator turning axis a into axis b."""
    return _mat({(a, b): -1, (b, a): 1})


def boost(i: int) -> RationalMatrix:
    return _mat({(T, i): 1, (i, T): 1})


Jx, Jy, Jz = rot(Y, Z), rot(Z, X), rot(X, Y)
Kx, Ky, Kz = boost(X), boost(Y), boost(Z)
T1 = Kx + Jy
T2 = Ky - Jx


def _sum(*terms: RationalMatrix) -> RationalMatrix:
    out = RationalMatrix.zeros(5, 5)
    for t in terms:
        out = out + t
    return out


def _trans(mu: int, v=1) -> RationalMatrix:
    return E(mu, W, v)


def _gen(symbol: str, m: RationalMatrix) -> Generator:
    return Generator(symbol, m, KINDS[symbol[0]])


def _std_translations() -> list[Generator]:
    return [_gen(f"p_{c}", _trans(i)) for i, c in enumerate("txyz")]


def _translations(lin: Mapping[str, RationalMatrix], col: Mapping[str, Mapping[int, object]] | None = None):
    """p_mu = lin[mu] + translation column (default e_mu)."""
    out = []
    for i, c in enumerate("txyz"):
        m = lin.get(c, RationalMatrix.zeros(5, 5))
        column = (col or {}).get(c, {i: 1})
        m = m + _mat({(r, W): v for r, v in column.items()})
        out.append(_gen(f"p_{c}", m))
    return out


# --- group builders -------------------------------------------------------------------
# Each builder takes the fully resolved parameter map and returns the generator list.

def _poincare(p):
    return [_gen("r_x", Jx), _gen("r_y", Jy), _gen("r_z", Jz),
            _gen("b_x", Kx), _gen("b_y", Ky), _gen("b_z", Kz)] + _std_translations()


def _de_sitter(p):
    lam = p["lambda"]
    lorentz = _poincare(p)[:6]
    ps = [
        _gen("p_t", _mat({(T, W): 1, (W, T): -lam})),
        _gen("p_x", _mat({(X, W): 1, (W, X): lam})),
        _gen("p_y", _mat({(Y, W): 1, (W, Y): lam})),
        _gen("p_z", _mat({(Z, W): 1, (W, Z): lam})),
    ]
    return lorentz + ps


def _disim(p):
    a1, a2 = p["A1"], p["A2"]
    return [_gen("t_1", T1), _gen("t_2", T2),
            _gen("r_z", I4(a1) + Jz), _gen("b_z", I4(a2) + Kz)] + _std_translations()


def _xdisim1(p):
    a1, a2, a3 = p["A1"], p["A2"], p["A3"]
    bz = I4(a3 - a1) + Kz.scale(1 + a1)
    ps = _translations({}, {
        "t": {T: 1 + a1 / 2, Z: a1 / 2},
        "x": {X: 1 + a1},
        "y": {Y: 1 + a1},
        "z": {T: -a1 / 2, Z: 1 + 3 * a1 / 2},
    })
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", I4(a2) + Jz), _gen("b_z", bz)] + ps


def _xdisim2(p):
    a1, a2, a3 = p["A1"], p["A2"], p["A3"]
    bz = _mat({(T, Z): 1 + 2 * a1 - a3, (X, X): a3 - a1, (Y, Y): a3 - a1,
               (Z, T): 1 + a3, (Z, Z): 2 * (a3 - a1)})
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", I4(a2) + Jz), _gen("b_z", bz)] + _std_translations()


def _xdisim2_alpha(p):
    a1, a2, a3, al = p["A1"], p["A2"], p["A3"], p["alpha"]
    bz = _mat({(T, T): 2 * (al - a1), (T, Z): 1 + 2 * al - a3,
               (X, X): a3 - a1, (Y, Y): a3 - a1,
               (Z, T): 1 + a3 + 2 * (a1 - al), (Z, Z): 2 * (a3 - al)})
    ps = _translations({}, {
        "t": {T: 1 + al, Z: a1 - al},
        "x": {X: 1 + a1},
        "y": {Y: 1 + a1},
        "z": {T: al - a1, Z: 1 + 2 * a1 - al},
    })
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", I4(a2) + Jz), _gen("b_z", bz)] + ps


def _dihom(p):
    a1, a2 = p["A1"], p["A2"]
    s = a1 + a2
    t2 = T2 + _mat({(W, T): -s, (W, Z): -s})
    ps = [
        _gen("p_t", _mat({(T, W): 1, (Y, T): -s})),
        _gen("p_x", _mat({(X, W): 1, (Y, X): s})),
        _gen("p_y", _mat({(T, Z): a1, (Z, T): a1, (Y, Y): s, (Y, W): 1, (W, W): -s})),
        _gen("p_z", _mat({(Y, Z): s, (Z, W): 1})),
    ]
    return [_gen("t_1", T1), _gen("t_2", t2), _gen("b_z", Kz)] + ps


def _wdihom(p):
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("b_z", I4(p["A2"]) + Kz)] + _std_translations()


def _dte1(p):
    a1, a2 = p["A1"], p["A2"]
    rz = _mat({(T, T): a1, (T, Z): -a2, (X, X): a1 + a2, (Y, Y): a1 + a2,
               (Z, T): a2, (Z, Z): a1 + 2 * a2}) + Jz
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", rz)] + _std_translations()


def _dte2a_beta(p):
    a2, b = p["A2"], p["beta"]
    lin = {
        "t": _mat({(T, T): 2 * b - a2 / 2, (Z, Z): 2 * b - a2 / 2, (T, Z): -a2 / 2, (Z, T): -a2 / 2,
                   (X, X): b, (Y, Y): b}),
        "x": _mat({(T, X): -b, (X, T): b - a2, (X, Z): b - a2, (Z, X): b}),
        "y": _mat({(T, Y): -b, (Y, T): b - a2, (Y, Z): b - a2, (Z, Y): b}),
        "z": _mat({(T, T): a2 / 2, (T, Z): a2 / 2 - 2 * b, (X, X): b, (Y, Y): b,
                   (Z, T): 2 * b - 3 * a2 / 2, (Z, Z): 4 * b - 3 * a2 / 2}),
    }
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", Jz)] + _translations(lin)


def _dte2a_lambda(p):
    a2, lam = p["A2"], p["lambda"]
    k = lam - a2
    lin = {
        "t": I4(lam) + Kz.scale(k),
        "x": T1.scale(k),
        "y": T2.scale(k),
        "z": I4(lam) + Kz.scale(k),
    }
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", Jz)] + _translations(lin)


def _dte3b(p):
    a1, a2 = p["A1"], p["A2"]
    tz = _mat({(T, Z): a1, (X, X): -a1, (Y, Y): -a1, (Z, T): -a1, (Z, Z): -2 * a1})
    lin = {"t": tz, "x": T1.scale(-a1), "y": T2.scale(-a1), "z": tz}
    rz = _mat({(T, T): a2, (T, Z): a2, (Z, T): -a2, (Z, Z): -a2}) + Jz
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", rz)] + _translations(lin)


def _ie2(p):
    return [_gen("t_1", T1), _gen("t_2", T2), _gen("r_z", Jz)] + _std_translations()


def _rotations():
    return [_gen("r_x", Jx), _gen("r_y", Jy), _gen("r_z", Jz)]


def _diso3_1(p):
    al, be = p["alpha"], p["beta"]
    lin = {"t": I4(al)}
    for i, c in ((X, "x"), (Y, "y"), (Z, "z")):
        lin[c] = _mat({(T, i): be, (i, T): al})
    return _rotations() + _translations(lin)


def _diso3_2(p, rep):
    a1 = p["A1"]
    if rep == 1:
        lin = {"t": I4(a1)}
    elif rep == 2:
        lin = {c: E(i, T, -a1) for i, c in enumerate("txyz")}
    else:
        # Not printed. Member c = A1 of the family p_t = diag(c, A1+c, A1+c, A1+c),
        # p_i = c E_it, which closes as [p_t, p_i] = A1 p_i (rep 1 is c = 0, rep 2 is c = -A1).
        lin = {"t": _mat({(T, T): a1, (X, X): 2 * a1, (Y, Y): 2 * a1, (Z, Z): 2 * a1})}
        for i, c in ((X, "x"), (Y, "y"), (Z, "z")):
            lin[c] = E(i, T, a1)
    return _rotations() + _translations(lin)


def _iso3(p):
    return _rotations() + _std_translations()


def _so21():
    return [_gen("r_x", Jx), _gen("b_y", Ky), _gen("b_z", Kz)]


def _diso21_1(p):
    al, be = p["alpha"], p["beta"]
    lin = {
        "x": I4(al),
        "t": _mat({(T, X): al, (X, T): be}),
        "y": _mat({(X, Y): -be, (Y, X): al}),
        "z": _mat({(X, Z): -be, (Z, X): al}),
    }
    return _so21() + _translations(lin)


def _diso21_2(p, rep):
    a1 = p["A1"]
    if rep == 1:
        lin = {"x": I4(-a1)}
    else:
        lin = {c: E(i, X, a1) for i, c in enumerate("txyz")}
    return _so21() + _translations(lin)


def _iso21(p):
    return _so21() + _std_translations()


# --- registry -------------------------------------------------------------------------

@dataclass(frozen=True)
class _Entry:
    info: GroupInfo
    build: Callable[[dict, int], list]
    required: Callable[[int], tuple[str, ...]]
    pinned: Mapping[str, Fraction] = field(default_factory=dict)
    tangent_action: str = "affine"


def _fixed(*syms):
    return lambda rep: syms


_REGISTRY: dict[str, _Entry] = {}


def _register(name, symbols, build, required=None, reps=1, aux=(), pinned=None,
              tangent_action="affine", no_rep=False, alias=None):
    info = GroupInfo(name, tuple(symbols), reps, tuple(aux), no_rep, alias)
    _REGISTRY[name] = _Entry(info, build, required or _fixed(*symbols), pinned or {}, tangent_action)


_register("deSitter", ("lambda",), lambda p, r: _de_sitter(p), tangent_action="projective")
_register("Poincare", (), lambda p, r: _poincare(p))
_register("DISIM", ("A1", "A2"), lambda p, r: _disim(p))
_register("DISIMb", ("A2",), lambda p, r: _disim(p), pinned={"A1": Fraction(0)})
_register("XDISIM1", ("A1", "A2", "A3"), lambda p, r: _xdisim1(p))
_register("XDISIM2", ("A1", "A2", "A3"),
          lambda p, r: _xdisim2(p) if r == 1 else _xdisim2_alpha(p),
          required=lambda r: ("A1", "A2", "A3") if r == 1 else ("A1", "A2", "A3", "alpha"),
          reps=2, aux=((), ("alpha",)))
_register("ISIM", (), lambda p, r: _disim(p), pinned={"A1": Fraction(0), "A2": Fraction(0)})
_register("DIHOM", ("A1", "A2"), lambda p, r: _dihom(p))
_register("WDIHOM", ("A2",), lambda p, r: _wdihom(p))
_register("IHOM", (), lambda p, r: _wdihom(p), pinned={"A2": Fraction(0)})
_register("DTE1", ("A1", "A2"), lambda p, r: _dte1(p))
_register("DTE2a", ("A1", "A2"),
          lambda p, r: _dte2a_beta(p) if r == 1 else _dte2a_lambda(p),
          required=lambda r: ("A2", "beta") if r == 1 else ("A2", "lambda"),
          reps=2, aux=(("beta",), ("lambda",)))
_register("DTE2b", ("A1", "A2"), None, no_rep=True)
_register("DTE3a", ("A1", "A2"),
          lambda p, r: _dte2a_beta(p) if r == 1 else _dte2a_lambda(p),
          required=lambda r: ("A2", "beta") if r == 1 else ("A2", "lambda"),
          reps=2, aux=(("beta",), ("lambda",)), alias="DTE2a")
_register("DTE3b", ("A1", "A2"), lambda p, r: _dte3b(p))
_register("IE2_TE2", (), lambda p, r: _ie2(p))
_register("DISO3_1", ("A1",), lambda p, r: _diso3_1(p), required=_fixed("alpha", "beta"),
          aux=(("alpha", "beta"),))
_register("DISO3_2", ("A1",), _diso3_2, reps=3)
_register("ISO3", (), lambda p, r: _iso3(p))
_register("DISO21_1", ("A1",), lambda p, r: _diso21_1(p), required=_fixed("alpha", "beta"),
          aux=(("alpha", "beta"),))
_register("DISO21_2", ("A1",), _diso21_2, reps=2)
_register("ISO21", (), lambda p, r: _iso21(p))

GROUP_NAMES = tuple(_REGISTRY)


def list_groups() -> list[GroupInfo]:
    return [e.info for e in _REGISTRY.values()]


def group_info(name: str) -> GroupInfo:
    try:
        return _REGISTRY[name].info
    except KeyError:
        raise UnknownGroup(f"unknown group {name!r}; known: {', '.join(GROUP_NAMES)}") from None


def _resolve(name: str, rep: int, params: Mapping[str, object]) -> dict[str, Fraction]:
    entry = _REGISTRY[name]
    p = {k: as_fraction(v) for k, v in params.items() if v is not None}
    unknown = set(p) - set(SYMBOLS)
    if unknown:
        raise CatalogError(f"unknown parameter(s) {sorted(unknown)}")
    for k, v in entry.pinned.items():
        if k in p and p[k] != v:
            raise ConstraintViolated(f"{name} requires {k} = {v}, got {p[k]}")
        p[k] = v
    missing = [s for s in entry.required(rep) if s not in p]
    if missing:
        raise MissingParameter(f"{name} rep {rep} needs {', '.join(missing)}")

    # Quadratic / product constraints; A1 is derived when absent.
    if name in ("DTE2a", "DTE3a"):
        root = p["beta"] if rep == 1 else p["lambda"]
        a1 = p["A2"] * root - root * root
        if "A1" in p and p["A1"] != a1:
            sym = "beta" if rep == 1 else "lambda"
            raise ConstraintViolated(
                f"{sym}={root} is not a root of {sym}^2 - A2*{sym} + A1 at A1={p['A1']}, A2={p['A2']}")
        p["A1"] = a1
    if name in ("DISO3_1", "DISO21_1"):
        a1 = -p["alpha"] * p["beta"]
        if "A1" in p and p["A1"] != a1:
            raise ConstraintViolated(f"alpha*beta + A1 = {p['alpha'] * p['beta'] + p['A1']} != 0")
        p["A1"] = a1
    return p


def instantiate(name: str, params: Mapping[str, object] | None = None, rep: int = 1) -> GroupInstance:
    entry = _REGISTRY.get(name)
    if entry is None:
        raise UnknownGroup(f"unknown group {name!r}; known: {', '.join(GROUP_NAMES)}")
    if entry.info.no_representation:
        raise NoRepresentation(f"{name} has no natural representation")
    if not 1 <= rep <= entry.info.rep_count:
        raise CatalogError(f"{name} has {entry.info.rep_count} representation(s), got rep {rep}")
    p = _resolve(name, rep, params or {})
    gens = tuple(entry.build(p, rep))
    flags = []
    if any(g.matrix.rows[W].get(W) for g in gens):
        flags.append("nonzero (5,5) entry transcribed verbatim")
    if entry.tangent_action == "affine" and any(not g.bottom_row_zero for g in gens):
        flags.append("bottom row ignored by the tangent action")
    return GroupInstance(name, rep, dict(sorted(p.items())), gens, entry.tangent_action, tuple(flags))


def linear_part(g: Generator) -> RationalMatrix:
    m = g.matrix
    return RationalMatrix([{j: v for j, v in m.rows[i].items() if j < 4} for i in range(4)], 4)


def expm(a: np.ndarray) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a truncated Taylor series."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    norm = np.linalg.norm(a, 1)
    s = max(0, int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0)
    b = a / 2.0**s
    out = np.eye(n)
    term = np.eye(n)
    for k in range(1, 30):
        term = term @ b / k
        out = out + term
        if np.max(np.abs(term)) < 1e-18 * max(1.0, np.max(np.abs(out))):
            break
    for _ in range(s):
        out = out @ out
    return out


def one_parameter_element(g: Generator, theta: float) -> np.ndarray:
    return expm(theta * g.matrix.to_float())


def tangent_element(g: Generator, theta: float) -> np.ndarray:
    """exp(theta * linear part), the action on tangent vectors."""
    return expm(theta * linear_part(g).to_float())


# --- JSON export ---------------------------------------------------------------------

def instance_to_json(inst: GroupInstance) -> dict:
    return {
        "group": inst.name,
        "rep_variant": inst.rep_variant,
        "params": {k: fraction_str(v) for k, v in inst.params.items()},
        "generators": [
            {"name": g.symbol, "kind": g.kind,
             "matrix": [[fraction_str(v) for v in row] for row in g.matrix.to_dense()]}
            for g in inst.generators
        ],
        "tangent_action": inst.tangent_action,
        "flags": list(inst.flags),
    }


def instance_from_json(doc: dict) -> GroupInstance:
    gens = tuple(
        Generator(g["name"], RationalMatrix.from_dense([[Fraction(v) for v in r] for r in g["matrix"]]), g["kind"])
        for g in doc["generators"]
    )
    return GroupInstance(doc["group"], int(doc["rep_variant"]),
                         {k: Fraction(v) for k, v in doc["params"].items()}, gens,
                         doc.get("tangent_action", "affine"), tuple(doc.get("flags", ())))


def dumps(inst: GroupInstance) -> str:
    return json.dumps(instance_to_json(inst), indent=1, sort_keys=True)
