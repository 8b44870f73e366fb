"""Conformal-covariant tensor search: joint eigenspaces of induced operators on tensor powers."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

from .catalog import GroupInstance, W, linear_part, tangent_element
from .exact_linalg import (
    RationalMatrix,
    SubspaceBasis,
    exact_spectrum,
    fraction_str,
    null_space,
    rationalize,
)
from .tensor_space import (
    DIM,
    MAX_RANK,
    RankOutOfRange,
    TensorVector,
    antisymmetrize,
    induced_derivation_operator,
    outer,
    symmetric_subspace,
    symmetrize,
)

MAX_DEN = 10**6


class RationalizationFailed(ArithmeticError):
    def __init__(self, value: float, generator: str):
        super().__init__(f"weight {value!r} of {generator} is not rational within max_den")
        self.value = value
        self.generator = generator


@dataclass(frozen=True)
class CovariantFamily:
    rank: int
    basis: SubspaceBasis
    weights: Mapping[str, Fraction]
    symmetry: str
    derived_from_rank1: bool = False

    @property
    def dim(self) -> int:
        return self.basis.dim

    def tensors(self) -> list[TensorVector]:
        return [TensorVector(self.rank, v) for v in self.basis]

    def contains(self, t: TensorVector) -> bool:
        return t.rank == self.rank and self.basis.contains(t.components)

    def symmetric_part(self) -> SubspaceBasis:
        return SubspaceBasis.span([symmetrize(t).components for t in self.tensors()], DIM**self.rank)


@dataclass(frozen=True)
class _Constraint:
    """One induced operator with its admissible weights; report=False means weight must be 0."""

    symbol: str
    op: RationalMatrix
    candidates: tuple  # Fractions, or floats for irrational reals
    report: bool = True


# --- operator preparation ------------------------------------------------------------

def _weight_candidates(psi: RationalMatrix, p: int, tol: float) -> tuple:
    """Real p-fold sums of eigenvalues of psi (eigenvalues of its Kronecker sum)."""
    spec = exact_spectrum(psi, MAX_DEN)
    vals: list = [q for q, _ in spec.rational] + list(spec.other)
    out = set()
    for combo in itertools.combinations_with_replacement(range(len(vals)), p):
        parts = [vals[i] for i in combo]
        if all(isinstance(v, Fraction) for v in parts):
            out.add(sum(parts, Fraction(0)))
            continue
        s = sum(complex(v) for v in parts)
        if abs(s.imag) > tol:
            continue
        q = rationalize(s.real, MAX_DEN)
        out.add(q if abs(float(q) - s.real) <= 1e-9 else float(s.real))
    return tuple(sorted(out, key=float))


def constraints(g: GroupInstance, p: int, tol: float = 1e-9) -> list[_Constraint]:
    if not 1 <= p <= MAX_RANK:
        raise RankOutOfRange(f"rank {p} outside [1, {MAX_RANK}]")
    out = []
    for gen in g.generators:
        phi = linear_part(gen)
        if g.tangent_action == "projective":
            row = gen.matrix.rows[W]
            c = {j: v for j, v in row.items() if j < W}
            d = row.get(W, Fraction(0))
            for beta in range(DIM):
                k = {(i, i): c.get(beta, Fraction(0)) for i in range(DIM)}
                for j, v in c.items():
                    k[(beta, j)] = k.get((beta, j), 0) + v
                km = RationalMatrix([{j: v for (i, j), v in k.items() if i == r and v} for r in range(DIM)], DIM)
                if not km.is_zero():
                    out.append(_Constraint(f"{gen.symbol}/x{beta}", induced_derivation_operator(km, p),
                                           (Fraction(0),), report=False))
            phi = phi.shift(d)
        if phi.is_zero():
            continue
        op = induced_derivation_operator(phi, p)
        out.append(_Constraint(gen.symbol, op, _weight_candidates(phi, p, tol)))
    return out


# --- branching search ----------------------------------------------------------------

def _apply_cols(op: RationalMatrix, basis: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    return [op.matvec(list(b)) for b in basis]


def _eigen_restrict(basis, lb, w: Fraction) -> list[tuple[Fraction, ...]]:
    """Vectors v in span(basis) with L v = w v, given lb = L applied to each basis vector."""
    n, k = len(basis[0]), len(basis)
    rows = []
    for r in range(n):
        row = {}
        for i in range(k):
            v = lb[i][r] - w * basis[i][r]
            if v:
                row[i] = v
        rows.append(row)
    ker = null_space(RationalMatrix(rows, k))
    return [tuple(sum((c[i] * basis[i][r] for i in range(k) if c[i]), Fraction(0)) for r in range(n))
            for c in ker.vectors]


def _numeric_has_eigvec(basis, lb, w: float, tol: float = 1e-8) -> bool:
    b = np.array([[float(x) for x in v] for v in basis]).T
    lbm = np.array([[float(x) for x in v] for v in lb]).T
    m = lbm - w * b
    s = np.linalg.svd(m, compute_uv=False)
    return s.size > 0 and s[-1] <= tol * max(1.0, s[0])


def _branch(basis, cons: list[_Constraint], weights: dict, out: list) -> None:
    if not cons:
        out.append((basis, dict(weights)))
        return
    c, rest = cons[0], cons[1:]
    lb = _apply_cols(c.op, basis)
    for w in c.candidates:
        if not isinstance(w, Fraction):
            if _numeric_has_eigvec(basis, lb, w):
                raise RationalizationFailed(w, c.symbol)
            continue
        sub = _eigen_restrict(basis, lb, w)
        if not sub:
            continue
        if c.report:
            weights[c.symbol] = w
        _branch(SubspaceBasis.span(sub, len(basis[0])).vectors, rest, weights, out)
        weights.pop(c.symbol, None)


def _symmetry_of(basis: SubspaceBasis, rank: int) -> str:
    if rank == 1:
        return "symmetric"
    ts = [TensorVector(rank, v) for v in basis]
    if all(symmetrize(t) == t for t in ts):
        return "symmetric"
    if all(antisymmetrize(t) == t for t in ts):
        return "antisymmetric"
    return "mixed"


def _raw_families(g: GroupInstance, p: int, subspace: str, tol: float):
    cons = constraints(g, p, tol)
    cons.sort(key=lambda c: (c.report, len(c.candidates)))
    start = symmetric_subspace(p) if subspace == "symmetric" else SubspaceBasis.full(DIM**p)
    raw: list = []
    _branch(start.vectors, cons, {}, raw)
    fams = []
    symbols = [gen.symbol for gen in g.generators]
    for basis, w in raw:
        sb = SubspaceBasis.span(basis, DIM**p)
        weights = {s: w.get(s, Fraction(0)) for s in symbols}
        fams.append((sb, weights))
    fams.sort(key=lambda f: (f[0].vectors, [f[1][s] for s in symbols]))
    return fams


def _product_span(rank: int, weights: Mapping[str, Fraction], lower: Mapping[int, list[CovariantFamily]]):
    vecs = []
    for q in range(1, rank // 2 + 1):
        for fa in lower.get(q, []):
            for fb in lower.get(rank - q, []):
                if any(fa.weights[s] + fb.weights[s] != weights[s] for s in weights):
                    continue
                for a in fa.tensors():
                    for b in fb.tensors():
                        t = outer(a, b)
                        for perm in set(itertools.permutations(range(rank))):
                            vecs.append(t.permuted(perm).components)
    return SubspaceBasis.span(vecs, DIM**rank)


def conformal_covariants(g: GroupInstance, rank: int, tol: float = 1e-9, subspace: str = "full",
                         _cache: dict | None = None) -> list[CovariantFamily]:
    """All maximal joint eigenspaces of the induced generator actions on rank-`rank` tensors."""
    if not 1 <= rank <= MAX_RANK:
        raise RankOutOfRange(f"rank {rank} outside [1, {MAX_RANK}]")
    cache = _cache if _cache is not None else {}
    key = (rank, subspace)
    if key in cache:
        return cache[key]
    lower = {q: conformal_covariants(g, q, tol, subspace, cache) for q in range(1, rank)}
    fams = []
    for basis, weights in _raw_families(g, rank, subspace, tol):
        derived = False
        if rank > 1:
            derived = basis.issubspace(_product_span(rank, weights, lower))
        fams.append(CovariantFamily(rank, basis, weights, _symmetry_of(basis, rank), derived))
    cache[key] = fams
    return fams


def brute_force_covariants(g: GroupInstance, rank: int, tol: float = 1e-9) -> list[tuple[SubspaceBasis, dict]]:
    """Reference search: every weight assignment, eigenspaces intersected on the full space."""
    from .exact_linalg import intersect

    cons = constraints(g, rank, tol)
    spaces = []
    for c in cons:
        opts = []
        for w in c.candidates:
            if not isinstance(w, Fraction):
                continue
            es = null_space(c.op.shift(w))
            if es.dim:
                opts.append((w, es))
        spaces.append(opts)
    symbols = [gen.symbol for gen in g.generators]
    out = []
    for choice in itertools.product(*spaces):
        v = SubspaceBasis.full(DIM**rank)
        for _, es in choice:
            v = intersect(v, es)
            if not v.dim:
                break
        if v.dim:
            w = {c.symbol: wc for c, (wc, _) in zip(cons, choice) if c.report}
            out.append((v, {s: w.get(s, Fraction(0)) for s in symbols}))
    out.sort(key=lambda f: (f[0].vectors, [f[1][s] for s in symbols]))
    return out


def check_soundness(g: GroupInstance, fam: CovariantFamily) -> bool:
    """Exact check L_a G = w_a G for all generators and basis tensors."""
    for c in constraints(g, fam.rank):
        w = fam.weights.get(c.symbol, Fraction(0)) if c.report else Fraction(0)
        for v in fam.basis:
            lv = c.op.matvec(list(v))
            if any(a != w * b for a, b in zip(lv, v)):
                return False
    # Pure translations carry weight 0 by construction.
    for gen in g.generators:
        if g.tangent_action == "affine" and linear_part(gen).is_zero() and fam.weights[gen.symbol] != 0:
            return False
    return True


def transform_tensor(t: np.ndarray, r: np.ndarray) -> np.ndarray:
    """G'_{m1..mp} = prod_j R^{a_j}_{m_j} G_{a1..ap}."""
    out = t
    for k in range(t.ndim):
        out = np.moveaxis(np.tensordot(r.T, out, axes=([1], [k])), 0, k)
    return out


@dataclass(frozen=True)
class VerifyReport:
    max_residual: Mapping[str, float]
    passed: bool
    tol: float


def verify_family(g: GroupInstance, fam: CovariantFamily, thetas: Iterable[float] = (-1.0, -0.5, 0.5, 1.0),
                  tol: float = 1e-9) -> VerifyReport:
    thetas = list(thetas)
    res = {}
    for gen in g.generators:
        worst = 0.0
        w = float(fam.weights.get(gen.symbol, 0))
        for th in thetas:
            r = tangent_element(gen, th)
            for t in fam.tensors():
                a = t.to_numpy()
                got = transform_tensor(a, r)
                want = np.exp(w * th) * a
                scale = max(np.max(np.abs(want)), 1e-300)
                worst = max(worst, float(np.max(np.abs(got - want)) / scale))
        res[gen.symbol] = worst
    return VerifyReport(res, all(v <= tol for v in res.values()), tol)


def family_to_json(f: CovariantFamily) -> dict:
    return {
        "basis": [[fraction_str(x) for x in v] for v in f.basis],
        "weights": {k: fraction_str(v) for k, v in f.weights.items()},
        "symmetry": f.symmetry,
        "derived_from_rank1": f.derived_from_rank1,
    }


def result_to_json(g: GroupInstance, rank: int, fams: Sequence[CovariantFamily]) -> dict:
    return {
        "group": g.name,
        "rep_variant": g.rep_variant,
        "params": {k: fraction_str(v) for k, v in g.params.items()},
        "rank": rank,
        "families": [family_to_json(f) for f in fams],
    }
