"""Invariant metric functions F^2 = prod_i M_i(y)^{E_i} assembled from covariant families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Sequence

import numpy as np

from .catalog import GroupInstance, tangent_element
from .exact_linalg import (
    RationalMatrix,
    SubspaceBasis,
    as_fraction,
    fraction_str,
    null_space,
    solve_affine,
)
from .invariant_solver import CovariantFamily
from .tensor_space import TensorVector, symmetrize

FORMS = ("plain", "abs", "signed-abs")


class DomainError(ValueError):
    pass


class InfeasibleSolution(ValueError):
    pass


@dataclass(frozen=True)
class Monomial:
    label: str
    tensor: TensorVector
    weights: Mapping[str, Fraction]

    @property
    def degree(self) -> int:
        return self.tensor.rank

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return monomial_value(self, y)


def monomial_value(m: Monomial, y: np.ndarray) -> np.ndarray:
    """M(y) = G_{m1..mp} y^m1 ... y^mp, vectorized over leading axes of y."""
    y = np.asarray(y, dtype=float)
    batch = y.shape[:-1]
    ys = y.reshape(-1, 4)
    out = ys @ m.tensor.to_numpy().reshape(4, -1)
    for _ in range(m.degree - 1):
        out = np.einsum("bi,bij->bj", ys, out.reshape(len(ys), 4, -1))
    return out.reshape(batch)


def enumerate_monomials(families: Sequence[CovariantFamily],
                        choices: Mapping[int, Sequence[tuple[str, object]]] | None = None,
                        include_derived: bool = False) -> list[Monomial]:
    """One monomial per chosen member of each family.

    ``choices[i]`` lists (label, member) for family i, where member is a TensorVector
    inside the family or a coordinate vector over the family basis. Families without
    an entry contribute their symmetric basis tensors. Antisymmetric families (and the
    antisymmetric part of mixed ones) drop out since they vanish on y (x) y.
    """
    out = []
    for i, fam in enumerate(families):
        if fam.symmetry == "antisymmetric":
            continue
        if fam.derived_from_rank1 and not include_derived and not (choices and i in choices):
            continue
        members = (choices or {}).get(i)
        if members is None:
            sym = fam.symmetric_part()
            members = [(f"M{fam.rank}_{i}" + (f"_{k}" if sym.dim > 1 else ""), TensorVector(fam.rank, v))
                       for k, v in enumerate(sym.vectors)]
        for label, member in members:
            t = member if isinstance(member, TensorVector) else _from_coords(fam, member)
            if not fam.contains(t):
                raise ValueError(f"{label} is not a member of family {i}")
            t = symmetrize(t)
            if t.is_zero():
                continue
            out.append(Monomial(label, t, dict(fam.weights)))
    return out


def _from_coords(fam: CovariantFamily, coords) -> TensorVector:
    coords = [as_fraction(c) for c in coords]
    if len(coords) != fam.dim:
        raise ValueError(f"family has dimension {fam.dim}, got {len(coords)} coordinates")
    comps = [sum((c * v[j] for c, v in zip(coords, fam.basis)), Fraction(0)) for j in range(4**fam.rank)]
    return TensorVector(fam.rank, tuple(comps))


def _generator_symbols(monomials: Sequence[Monomial]) -> list[str]:
    seen: dict[str, None] = {}
    for m in monomials:
        for s in m.weights:
            seen.setdefault(s, None)
    return list(seen)


def constraint_matrix(monomials: Sequence[Monomial]) -> tuple[RationalMatrix, list[str]]:
    """Rows: degree row, then one weight row per generator (zero rows dropped)."""
    syms = _generator_symbols(monomials)
    rows = [{i: Fraction(m.degree) for i, m in enumerate(monomials)}]
    kept = ["degree"]
    for s in syms:
        r = {i: m.weights.get(s, Fraction(0)) for i, m in enumerate(monomials)}
        r = {i: v for i, v in r.items() if v}
        if r:
            rows.append(r)
            kept.append(s)
    return RationalMatrix(rows, len(monomials)), kept


@dataclass(frozen=True)
class ExponentSolution:
    monomials: tuple[Monomial, ...]
    feasible: bool
    particular: tuple[Fraction, ...] | None
    kernel: SubspaceBasis

    def exponents(self, kernel_coeffs: Sequence = ()) -> tuple[Fraction, ...]:
        if not self.feasible:
            raise InfeasibleSolution("exponent constraints have no solution")
        e = list(self.particular)
        for c, v in zip(kernel_coeffs, self.kernel.vectors):
            c = as_fraction(c)
            e = [a + c * b for a, b in zip(e, v)]
        return tuple(e)

    def min_norm_coeffs(self) -> tuple[Fraction, ...]:
        """Kernel coefficients of the exponent vector with least Euclidean norm (basis independent)."""
        if not self.feasible:
            raise InfeasibleSolution("exponent constraints have no solution")
        vs = self.kernel.vectors
        if not vs:
            return ()
        dot = lambda a, b: sum((x * y for x, y in zip(a, b)), Fraction(0))
        gram = RationalMatrix([{j: dot(u, v) for j, v in enumerate(vs) if dot(u, v)} for u in vs], len(vs))
        return tuple(solve_affine(gram, [-dot(u, self.particular) for u in vs]).particular)


def solve_exponents(monomials: Sequence[Monomial], target_degree=2) -> ExponentSolution:
    if not monomials:
        return ExponentSolution((), False, None, SubspaceBasis(0, ()))
    a, _ = constraint_matrix(monomials)
    b = [as_fraction(target_degree)] + [Fraction(0)] * (a.nrows - 1)
    sol = solve_affine(a, b)
    return ExponentSolution(tuple(monomials), sol.feasible, sol.particular, sol.kernel)


@dataclass(frozen=True)
class ZeroDegreeInvariant:
    exponents: tuple[int, ...]
    expression: str


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    den = 1
    for x in v:
        den = den * x.denominator // math.gcd(den, x.denominator)
    ints = [int(x * den) for x in v]
    g = 0
    for x in ints:
        g = math.gcd(g, x)
    ints = [x // g for x in ints] if g else ints
    first = next((x for x in ints if x), 1)
    return tuple(-x for x in ints) if first < 0 else tuple(ints)


def render_ratio(labels: Sequence[str], exps: Sequence[int]) -> str:
    def part(pairs):
        out = []
        for lab, e in pairs:
            out.append(lab if e == 1 else f"({lab})^{e}")
        return "*".join(out) or "1"
    num = [(l, e) for l, e in zip(labels, exps) if e > 0]
    den = [(l, -e) for l, e in zip(labels, exps) if e < 0]
    return part(num) if not den else f"{part(num)}/{part(den)}"


def zero_degree_invariants(monomials: Sequence[Monomial]) -> list[ZeroDegreeInvariant]:
    """Exponent vectors k with sum p_i k_i = 0 and sum k_i w_ia = 0: phi = prod M_i^k_i."""
    if not monomials:
        return []
    a, _ = constraint_matrix(monomials)
    ker = null_space(a)
    labels = [m.label for m in monomials]
    out = []
    for v in ker.vectors:
        k = _primitive(v)
        out.append(ZeroDegreeInvariant(k, render_ratio(labels, k)))
    return out


def zero_degree_space(monomials: Sequence[Monomial]) -> SubspaceBasis:
    a, _ = constraint_matrix(monomials)
    return null_space(a)


@dataclass(frozen=True)
class Modifier:
    """F^2 -> F^2 * S(phi) with phi = prod M_i^k_i a zero-degree invariant."""

    tag: str
    exponents: tuple[int, ...]
    func: Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class SumPart:
    """F_(n) = D * (sum_i c_i F_i^n)^(1/n), with F_i = sqrt(F_i^2) of each term."""

    n: int
    coeff: Fraction
    terms: tuple[tuple[Fraction, "MetricSpec"], ...]


@dataclass(frozen=True)
class MetricSpec:
    factors: tuple[tuple[Monomial, Fraction], ...] = ()
    form: str = "signed-abs"
    modifier: Modifier | None = None
    parts: tuple[SumPart, ...] = ()
    group: str = ""
    params: Mapping[str, Fraction] = field(default_factory=dict)

    @property
    def is_sum(self) -> bool:
        return bool(self.parts)

    def degree(self) -> Fraction:
        """Homogeneity degree of F^2, computed exactly."""
        if self.parts:
            degs = {t.degree() for p in self.parts for _, t in p.terms}
            if degs != {Fraction(2)}:
                raise ValueError(f"sum parts must each have degree 2, got {sorted(degs)}")
            return Fraction(2)
        return sum((m.degree * e for m, e in self.factors), Fraction(0))

    @property
    def monomials(self) -> list[Monomial]:
        if self.parts:
            out = []
            for p in self.parts:
                for _, t in p.terms:
                    out.extend(t.monomials)
            return out
        return [m for m, _ in self.factors]

    def describe(self) -> str:
        if self.parts:
            chunks = []
            for p in self.parts:
                inner = " + ".join(f"{c}*[{t.describe()}]^({p.n}/2)" for c, t in p.terms)
                chunks.append(f"{p.coeff}*({inner})^(1/{p.n})")
            return "F = " + " + ".join(chunks)
        body = []
        for m, e in self.factors:
            if e == 0:
                continue
            base = f"|{m.label}|" if self.form != "plain" else f"({m.label})"
            body.append(f"{base}^({e})")
        sgn = [m.label for m, e, n in self._sign_powers() if n % 2]
        lead = "".join(f"sgn({s})*" for s in sgn) if self.form == "signed-abs" else ""
        mod = f"*S[{self.modifier.tag}]" if self.modifier else ""
        return "F^2 = " + lead + ("*".join(body) or "1") + mod

    def _sign_powers(self):
        out = []
        for m, e in self.factors:
            if e.denominator == 1:
                n = int(e)
            else:
                n = 1 if m.degree % 2 == 0 else 0
            out.append((m, e, n))
        return out


def assemble_metric(sol: ExponentSolution, kernel_choice: Sequence = (), form: str = "signed-abs",
                    modifier: Modifier | None = None, group: str = "", params=None,
                    drop_zero: bool = False) -> MetricSpec:
    if form not in FORMS:
        raise ValueError(f"form must be one of {FORMS}")
    if not sol.feasible:
        raise InfeasibleSolution("exponent constraints are infeasible; no invariant metric")
    exps = sol.exponents(kernel_choice)
    factors = tuple((m, e) for m, e in zip(sol.monomials, exps) if e != 0 or not drop_zero)
    spec = MetricSpec(factors, form, modifier, (), group, dict(params or {}))
    if spec.degree() != 2:
        raise AssertionError("assembled metric is not degree 2")
    if modifier is not None and len(modifier.exponents) != len(sol.monomials):
        raise ValueError("modifier exponents must index the solution's monomials")
    return spec


def sum_of_parts(parts: Sequence[tuple[int, object, Sequence[tuple[object, MetricSpec]]]],
                 group: str = "", params=None) -> MetricSpec:
    """Build F = sum_n D_n (sum_i c_i F_i^n)^(1/n) from (n, D_n, [(c_i, spec_i)])."""
    ps = tuple(SumPart(int(n), as_fraction(d), tuple((as_fraction(c), s) for c, s in terms))
               for n, d, terms in parts)
    spec = MetricSpec(parts=ps, group=group, params=dict(params or {}))
    spec.degree()
    return spec


# --- evaluation ----------------------------------------------------------------------

def base_values(spec: MetricSpec, y: np.ndarray) -> list[np.ndarray]:
    return [monomial_value(m, y) for m in spec.monomials]


def _phi(spec: MetricSpec, vals: list[np.ndarray]) -> np.ndarray:
    out = np.ones_like(vals[0])
    for v, k in zip(vals, spec.modifier.exponents):
        if k < 0 and np.any(v == 0):
            raise DomainError("zero denominator in a zero-degree invariant")
        out = out * v ** float(k) if k >= 0 else out / v ** float(-k)
    return out


def evaluate(spec: MetricSpec, y, S: Callable | None = None) -> np.ndarray:
    """F^2(y), vectorized over leading axes of y."""
    y = np.asarray(y, dtype=float)
    if spec.parts:
        total = np.zeros(y.shape[:-1])
        for p in spec.parts:
            inner = np.zeros(y.shape[:-1])
            for c, t in p.terms:
                f2 = evaluate(t, y, S)
                if np.any(f2 < 0):
                    raise DomainError("sum-of-parts term with negative F^2")
                inner = inner + float(c) * np.sqrt(f2) ** p.n
            if p.n % 2 == 0 and np.any(inner < 0):
                raise DomainError("negative radicand in sum-of-parts")
            total = total + float(p.coeff) * np.sign(inner) * np.abs(inner) ** (1.0 / p.n)
        return total * total
    vals = [monomial_value(m, y) for m, _ in spec.factors]
    out = np.ones(y.shape[:-1])
    for (m, e, n), v in zip(spec._sign_powers(), vals):
        ef = float(e)
        if spec.form == "plain":
            if e.denominator != 1 and np.any(v <= 0):
                raise DomainError(f"nonpositive base {m.label} under fractional exponent {e}")
            if e < 0 and np.any(v == 0):
                raise DomainError(f"zero base {m.label} under negative exponent")
            out = out * (v ** int(e) if e.denominator == 1 else v ** ef)
        else:
            a = np.abs(v)
            if e < 0 and np.any(a == 0):
                raise DomainError(f"zero base {m.label} under negative exponent")
            out = out * a ** ef
            if spec.form == "signed-abs" and n % 2:
                out = out * np.sign(v)
    if spec.modifier is not None:
        allv = vals
        func = S or spec.modifier.func
        out = out * func(_phi(spec, allv))
    return out


def in_domain(spec: MetricSpec, y, margin: float = 1e-6) -> np.ndarray:
    """True where every base is away from zero: |M_i| >= margin * |y|^p_i."""
    y = np.asarray(y, dtype=float)
    norm = np.linalg.norm(y, axis=-1)
    ok = norm > 0
    for m in spec.monomials:
        ok &= np.abs(monomial_value(m, y)) >= margin * norm**m.degree
    if spec.parts:
        for p in spec.parts:
            for _, t in p.terms:
                ok &= evaluate(t, y) > 0
    return ok


# --- numeric checks ------------------------------------------------------------------

def sample_domain(spec: MetricSpec, n: int, rng: np.random.Generator, margin: float = 1e-6,
                  extra=None) -> np.ndarray:
    out = []
    while sum(len(o) for o in out) < n:
        y = rng.normal(size=(4 * n, 4))
        ok = in_domain(spec, y, margin)
        if extra is not None:
            ok &= extra(y)
        out.append(y[ok])
    return np.concatenate(out)[:n]


def invariance_residual(spec: MetricSpec, group: GroupInstance, samples: int = 1000, seed: int = 0,
                        theta_max: float = 1.0, margin: float = 1e-6) -> dict[str, float]:
    """max |F^2(exp(theta lin) y) - F^2(y)| / |F^2(y)| per generator over seeded samples."""
    rng = np.random.default_rng(seed)
    out = {}
    for gen in group.generators:
        thetas = rng.uniform(-theta_max, theta_max, size=samples)
        ys = sample_domain(spec, samples, rng, margin)
        worst = 0.0
        mats = np.stack([tangent_element(gen, th) for th in thetas])
        yp = np.einsum("nij,nj->ni", mats, ys)
        keep = in_domain(spec, yp, margin)
        f0 = evaluate(spec, ys[keep])
        f1 = evaluate(spec, yp[keep])
        if f0.size:
            worst = float(np.max(np.abs(f1 - f0) / np.abs(f0)))
        out[gen.symbol] = worst
    return out


def homogeneity_residual(spec: MetricSpec, samples: int = 1000, seed: int = 0,
                         lambdas=(0.5, 2.0, 3.0), margin: float = 1e-6) -> float:
    rng = np.random.default_rng(seed)
    ys = sample_domain(spec, samples, rng, margin)
    f = evaluate(spec, ys)
    worst = 0.0
    for lam in lambdas:
        fl = evaluate(spec, lam * ys)
        worst = max(worst, float(np.max(np.abs(fl - lam**2 * f) / np.abs(lam**2 * f))))
    return worst


def phi_value(spec: MetricSpec, y) -> np.ndarray:
    vals = [monomial_value(m, np.asarray(y, dtype=float)) for m, _ in spec.factors]
    return _phi(spec, vals)


def zero_degree_function(monomials: Sequence[Monomial], exps: Sequence[int]) -> Callable:
    def phi(y):
        y = np.asarray(y, dtype=float)
        out = np.ones(y.shape[:-1])
        for m, k in zip(monomials, exps):
            v = monomial_value(m, y)
            out = out * v ** float(k) if k >= 0 else out / v ** float(-k)
        return out
    return phi


# --- JSON ----------------------------------------------------------------------------

def spec_to_json(spec: MetricSpec) -> dict:
    doc = {
        "group": spec.group,
        "params": {k: fraction_str(v) for k, v in spec.params.items()},
        "form": spec.form,
        "factors": [
            {"tensor_ref": m.label, "degree": m.degree, "exponent": fraction_str(e),
             "tensor": [fraction_str(x) for x in m.tensor.components],
             "weights": {k: fraction_str(v) for k, v in m.weights.items()}}
            for m, e in spec.factors
        ],
        "modifier_tag": spec.modifier.tag if spec.modifier else None,
        "modifier_exponents": list(spec.modifier.exponents) if spec.modifier else None,
        "parts": [
            {"n": p.n, "coeff": fraction_str(p.coeff),
             "terms": [{"c": fraction_str(c), "spec": spec_to_json(t)} for c, t in p.terms]}
            for p in spec.parts
        ],
        "degree": fraction_str(spec.degree()),
    }
    return doc


def spec_from_json(doc: dict, modifier_func: Callable | None = None) -> MetricSpec:
    factors = tuple(
        (Monomial(f["tensor_ref"], TensorVector.from_iter(int(f["degree"]), [Fraction(x) for x in f["tensor"]]),
                  {k: Fraction(v) for k, v in f.get("weights", {}).items()}),
         Fraction(f["exponent"]))
        for f in doc.get("factors", [])
    )
    mod = None
    if doc.get("modifier_tag"):
        mod = Modifier(doc["modifier_tag"], tuple(doc["modifier_exponents"]), modifier_func or (lambda p: np.ones_like(p)))
    parts = tuple(
        SumPart(int(p["n"]), Fraction(p["coeff"]),
                tuple((Fraction(t["c"]), spec_from_json(t["spec"], modifier_func)) for t in p["terms"]))
        for p in doc.get("parts", [])
    )
    return MetricSpec(factors, doc.get("form", "signed-abs"), mod, parts, doc.get("group", ""),
                      {k: Fraction(v) for k, v in doc.get("params", {}).items()})
