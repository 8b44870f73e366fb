"""Exact rational linear algebra plus a few float helpers.

Matrices are stored sparsely as one ``{column: Fraction}`` dict per row. All
operations on :class:`RationalMatrix` and :class:`SubspaceBasis` are exact.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

Row = dict  # column index -> nonzero Fraction


class DimensionMismatch(ValueError):
    pass


class NoConvergence(RuntimeError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact values; use rationalize()")
    return Fraction(x)


def fraction_str(q: Fraction) -> str:
    """Serialize as ``num/den`` (always with a denominator)."""
    q = as_fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_fraction(s: str) -> Fraction:
    return Fraction(s)


class RationalMatrix:
    """Sparse exact matrix; immutable by convention."""

    __slots__ = ("nrows", "ncols", "rows")

    def __init__(self, rows: Sequence[Row], ncols: int):
        self.nrows = len(rows)
        self.ncols = ncols
        self.rows = tuple({c: v for c, v in r.items() if v != 0} for r in rows)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "RationalMatrix":
        data = [list(r) for r in data]
        ncols = len(data[0]) if data else 0
        rows = []
        for r in data:
            if len(r) != ncols:
                raise DimensionMismatch("ragged matrix")
            rows.append({j: as_fraction(v) for j, v in enumerate(r) if v != 0})
        return cls(rows, ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([{} for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int, scale=1) -> "RationalMatrix":
        s = as_fraction(scale)
        return cls([{i: s} for i in range(n)], n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def to_dense(self) -> list[list[Fraction]]:
        out = [[Fraction(0)] * self.ncols for _ in range(self.nrows)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i][j] = v
        return out

    def to_float(self) -> np.ndarray:
        out = np.zeros((self.nrows, self.ncols))
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out[i, j] = float(v)
        return out

    def is_zero(self) -> bool:
        return not any(self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.shape == other.shape and self.rows == other.rows

    def __repr__(self) -> str:
        return f"RationalMatrix({self.nrows}x{self.ncols}, nnz={sum(map(len, self.rows))})"

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"{self.shape} vs {other.shape}")
        rows = []
        for a, b in zip(self.rows, other.rows):
            r = dict(a)
            for j, v in b.items():
                r[j] = r.get(j, 0) + v
            rows.append(r)
        return RationalMatrix(rows, self.ncols)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix([{j: -v for j, v in r.items()} for r in self.rows], self.ncols)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def scale(self, s) -> "RationalMatrix":
        s = as_fraction(s)
        return RationalMatrix([{j: s * v for j, v in r.items()} for r in self.rows], self.ncols)

    def shift(self, s) -> "RationalMatrix":
        """Return ``self - s*I`` (square matrices only)."""
        if self.nrows != self.ncols:
            raise DimensionMismatch("shift needs a square matrix")
        s = as_fraction(s)
        if s == 0:
            return self
        rows = []
        for i, r in enumerate(self.rows):
            r = dict(r)
            r[i] = r.get(i, 0) - s
            rows.append(r)
        return RationalMatrix(rows, self.ncols)

    def transpose(self) -> "RationalMatrix":
        cols: list[Row] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                cols[j][i] = v
        return RationalMatrix(cols, self.nrows)

    T = property(transpose)

    def matvec(self, v: Sequence[Fraction]) -> list[Fraction]:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.shape}")
        return [sum((c * v[j] for j, c in r.items()), Fraction(0)) for r in self.rows]

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"{self.shape} @ {other.shape}")
        rows = []
        for r in self.rows:
            acc: Row = {}
            for k, a in r.items():
                for j, b in other.rows[k].items():
                    acc[j] = acc.get(j, 0) + a * b
            rows.append(acc)
        return RationalMatrix(rows, other.ncols)

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.ncols:
            raise DimensionMismatch("column counts differ")
        return RationalMatrix(list(self.rows) + list(other.rows), self.ncols)


def _rref_rows(rows: Iterable[Row]) -> dict[int, Row]:
    """Incremental Gauss-Jordan. Returns pivot column -> fully reduced row."""
    pivots: dict[int, Row] = {}
    for src in rows:
        r = {j: v for j, v in src.items() if v != 0}
        for p in [p for p in r if p in pivots]:
            f = r.get(p)
            if not f:
                continue
            for j, v in pivots[p].items():
                nv = r.get(j, 0) - f * v
                if nv:
                    r[j] = nv
                else:
                    r.pop(j, None)
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {j: v * inv for j, v in r.items()}
        for prow in pivots.values():
            f = prow.get(c)
            if f:
                for j, v in r.items():
                    nv = prow.get(j, 0) - f * v
                    if nv:
                        prow[j] = nv
                    else:
                        prow.pop(j, None)
        pivots[c] = r
    return pivots


def rref(m: RationalMatrix) -> tuple[list[Row], list[int]]:
    """Reduced row echelon form: (nonzero rows sorted by pivot, pivot columns)."""
    piv = _rref_rows(m.rows)
    cols = sorted(piv)
    return [piv[c] for c in cols], cols


def rank(m: RationalMatrix) -> int:
    return len(_rref_rows(m.rows))


@dataclass(frozen=True)
class SubspaceBasis:
    """A linear subspace in canonical RREF form (leading entry +1, sorted by pivot)."""

    ambient_dim: int
    vectors: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def span(cls, vectors: Iterable[Sequence], ambient_dim: int) -> "SubspaceBasis":
        rows = []
        for v in vectors:
            if len(v) != ambient_dim:
                raise DimensionMismatch(f"vector of length {len(v)} in dimension {ambient_dim}")
            rows.append({j: as_fraction(x) for j, x in enumerate(v) if x != 0})
        piv = _rref_rows(rows)
        vecs = []
        for c in sorted(piv):
            dense = [Fraction(0)] * ambient_dim
            for j, x in piv[c].items():
                dense[j] = x
            vecs.append(tuple(dense))
        return cls(ambient_dim, tuple(vecs))

    @classmethod
    def full(cls, n: int) -> "SubspaceBasis":
        return cls(n, tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @property
    def dim(self) -> int:
        return len(self.vectors)

    def __len__(self) -> int:
        return len(self.vectors)

    def __iter__(self):
        return iter(self.vectors)

    def contains(self, v: Sequence) -> bool:
        return SubspaceBasis.span(list(self.vectors) + [v], self.ambient_dim).dim == self.dim

    def issubspace(self, other: "SubspaceBasis") -> bool:
        return SubspaceBasis.span(self.vectors + other.vectors, self.ambient_dim).dim == other.dim

    def coordinates(self, v: Sequence) -> list[Fraction] | None:
        """Coefficients c with sum_i c_i * vectors[i] == v, or None if v is outside."""
        # RREF basis: coefficient i is the entry of v at the pivot of vector i.
        v = [as_fraction(x) for x in v]
        coeffs = []
        for b in self.vectors:
            p = next(j for j, x in enumerate(b) if x != 0)
            coeffs.append(v[p])
        recon = [sum((c * b[j] for c, b in zip(coeffs, self.vectors)), Fraction(0))
                 for j in range(self.ambient_dim)]
        return coeffs if recon == v else None


def null_space(m: RationalMatrix) -> SubspaceBasis:
    rows, pivots = rref(m)
    pivset = set(pivots)
    free = [j for j in range(m.ncols) if j not in pivset]
    vecs = []
    for f in free:
        v = [Fraction(0)] * m.ncols
        v[f] = Fraction(1)
        for p, r in zip(pivots, rows):
            x = r.get(f)
            if x:
                v[p] = -x
        vecs.append(v)
    return SubspaceBasis.span(vecs, m.ncols)


@dataclass(frozen=True)
class AffineSolution:
    """Solution set ``particular + span(kernel)``; ``feasible`` is False when empty."""

    feasible: bool
    particular: tuple[Fraction, ...] | None
    kernel: SubspaceBasis


def solve_affine(a: RationalMatrix, b: Sequence) -> AffineSolution:
    if len(b) != a.nrows:
        raise DimensionMismatch(f"rhs length {len(b)} for {a.shape}")
    n = a.ncols
    aug = RationalMatrix(
        [{**r, n: as_fraction(bi)} if bi != 0 else dict(r) for r, bi in zip(a.rows, b)],
        n + 1,
    )
    rows, pivots = rref(aug)
    kernel = null_space(a)
    if pivots and pivots[-1] == n:
        return AffineSolution(False, None, kernel)
    x = [Fraction(0)] * n
    for p, r in zip(pivots, rows):
        x[p] = r.get(n, Fraction(0))
    return AffineSolution(True, tuple(x), kernel)


def intersect(a: SubspaceBasis, b: SubspaceBasis) -> SubspaceBasis:
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"{a.ambient_dim} vs {b.ambient_dim}")
    n = a.ambient_dim
    if not a.vectors or not b.vectors:
        return SubspaceBasis(n, ())
    # Columns [a_1..a_k, -b_1..-b_m]; kernel coefficients on the a-part give the intersection.
    k = a.dim
    rows = []
    for j in range(n):
        r = {}
        for i, v in enumerate(a.vectors):
            if v[j]:
                r[i] = v[j]
        for i, v in enumerate(b.vectors):
            if v[j]:
                r[k + i] = -v[j]
        rows.append(r)
    ker = null_space(RationalMatrix(rows, k + b.dim))
    vecs = []
    for c in ker.vectors:
        vecs.append([sum((c[i] * a.vectors[i][j] for i in range(k)), Fraction(0)) for j in range(n)])
    return SubspaceBasis.span(vecs, n)


def rationalize(x: float, max_den: int = 10**6) -> Fraction:
    if not np.isfinite(x):
        raise ValueError(f"cannot rationalize {x}")
    return Fraction(x).limit_denominator(max_den)


def real_eigenvalues(m, tol: float = 1e-9) -> list[tuple[float, int]]:
    """Real eigenvalues of a float matrix with algebraic multiplicities, ascending."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"square matrix expected, got shape {a.shape}")
    try:
        ev = np.linalg.eigvals(a)
    except np.linalg.LinAlgError as exc:
        raise NoConvergence(str(exc)) from exc
    real = sorted(float(z.real) for z in ev if abs(z.imag) <= tol)
    out: list[tuple[float, int]] = []
    cluster: list[float] = []
    for x in real:
        if cluster and x - cluster[-1] > tol:
            out.append((float(np.mean(cluster)), len(cluster)))
            cluster = []
        cluster.append(x)
    if cluster:
        out.append((float(np.mean(cluster)), len(cluster)))
    return out


# --- exact spectra of small matrices -------------------------------------------------

def charpoly(m: RationalMatrix) -> list[Fraction]:
    """Characteristic polynomial det(tI - M), coefficients highest degree first.

    Faddeev-LeVerrier; exact over the rationals.
    """
    n = m.nrows
    if n != m.ncols:
        raise DimensionMismatch("charpoly needs a square matrix")
    coeffs = [Fraction(1)]
    mk = RationalMatrix.zeros(n, n)
    for k in range(1, n + 1):
        mk = m @ mk.shift(-coeffs[-1])  # M (M_{k-1} + c_{k-1} I)
        tr = sum((mk.rows[i].get(i, Fraction(0)) for i in range(n)), Fraction(0))
        coeffs.append(-tr / k)
    return coeffs


def _poly_divmod(num: list[Fraction], den: list[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    num = list(num)
    q = []
    while len(num) >= len(den):
        f = num[0] / den[0]
        q.append(f)
        for i, d in enumerate(den):
            num[i] -= f * d
        num.pop(0)
    while num and num[0] == 0:
        num.pop(0)
    return q, num


def _poly_eval(p: Sequence[Fraction], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in p:
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a small rational matrix: exact rational ones plus the rest numerically."""

    rational: tuple[tuple[Fraction, int], ...]
    other: tuple[complex, ...]

    def values(self) -> list:
        return [q for q, _ in self.rational] + list(self.other)


def exact_spectrum(m: RationalMatrix, max_den: int = 10**6) -> Spectrum:
    """Split the spectrum of ``m`` into exact rational roots and numeric leftovers.

    Rational roots are found from float roots of the characteristic polynomial
    (rationalized, then confirmed by exact evaluation and deflated), so repeated
    roots come out exactly even when the float roots scatter.
    """
    p = charpoly(m)
    found: dict[Fraction, int] = {}
    changed = True
    while len(p) > 1 and changed:
        changed = False
        roots = np.roots([float(c) for c in p]) if len(p) > 1 else []
        cands = {rationalize(float(r.real), max_den) for r in roots if abs(r.imag) < 1e-3}
        # Scattered multiple roots: also try the mean of each real cluster.
        real = sorted(r.real for r in roots if abs(r.imag) < 1e-3)
        for _, grp in itertools.groupby(real, key=lambda v: round(v, 2)):
            g = list(grp)
            cands.add(rationalize(float(np.mean(g)), max_den))
        cands.add(Fraction(0))
        for q in sorted(cands):
            while len(p) > 1 and _poly_eval(p, q) == 0:
                p, _ = _poly_divmod(p, [Fraction(1), -q])
                found[q] = found.get(q, 0) + 1
                changed = True
    other = tuple(complex(r) for r in np.roots([float(c) for c in p])) if len(p) > 1 else ()
    return Spectrum(tuple(sorted(found.items())), other)
