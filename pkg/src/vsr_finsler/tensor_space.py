"""Rank-p covariant tensors over 4-d spacetime, flattened row-major (first index slowest)."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .exact_linalg import RationalMatrix, SubspaceBasis, as_fraction, solve_affine

DIM = 4
MAX_RANK = 4


class RankOutOfRange(ValueError):
    pass


class NotSymmetric(ValueError):
    pass


class NotDecomposable(ValueError):
    pass


def _check_rank(p: int, lo: int = 1, hi: int = MAX_RANK) -> None:
    if not lo <= p <= hi:
        raise RankOutOfRange(f"rank {p} outside [{lo}, {hi}]")


@lru_cache(maxsize=None)
def multi_indices(p: int) -> tuple[tuple[int, ...], ...]:
    return tuple(itertools.product(range(DIM), repeat=p))


def flat_index(idx: Sequence[int]) -> int:
    k = 0
    for i in idx:
        k = k * DIM + i
    return k


@dataclass(frozen=True)
class TensorVector:
    rank: int
    components: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.components) != DIM**self.rank:
            raise ValueError(f"rank {self.rank} tensor needs {DIM**self.rank} components")

    @classmethod
    def from_iter(cls, rank: int, comps) -> "TensorVector":
        return cls(rank, tuple(as_fraction(c) for c in comps))

    @classmethod
    def zeros(cls, rank: int) -> "TensorVector":
        return cls(rank, (Fraction(0),) * DIM**rank)

    @classmethod
    def from_matrix(cls, m: Sequence[Sequence]) -> "TensorVector":
        return cls.from_iter(2, [v for row in m for v in row])

    def __getitem__(self, idx) -> Fraction:
        if isinstance(idx, int):
            idx = (idx,)
        return self.components[flat_index(idx)]

    def __add__(self, other: "TensorVector") -> "TensorVector":
        return TensorVector(self.rank, tuple(a + b for a, b in zip(self.components, other.components)))

    def scale(self, s) -> "TensorVector":
        s = as_fraction(s)
        return TensorVector(self.rank, tuple(s * a for a in self.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def to_numpy(self) -> np.ndarray:
        return np.array([float(c) for c in self.components]).reshape((DIM,) * self.rank)

    def permuted(self, perm: Sequence[int]) -> "TensorVector":
        """T'_{i_0..i_{p-1}} = T_{i_perm[0]..i_perm[p-1]}."""
        out = [Fraction(0)] * len(self.components)
        for idx in multi_indices(self.rank):
            out[flat_index(idx)] = self.components[flat_index([idx[k] for k in perm])]
        return TensorVector(self.rank, tuple(out))


def outer(a: TensorVector, b: TensorVector) -> TensorVector:
    return TensorVector(a.rank + b.rank, tuple(x * y for x in a.components for y in b.components))


def induced_derivation_operator(phi: RationalMatrix, p: int) -> RationalMatrix:
    """(L G)_{m1..mp} = sum_j sum_a phi[a][m_j] G_{m1..a..mp}."""
    _check_rank(p)
    if phi.shape != (DIM, DIM):
        raise ValueError(f"phi must be 4x4, got {phi.shape}")
    cols_of = [dict() for _ in range(DIM)]  # m -> {a: phi[a][m]}
    for a, row in enumerate(phi.rows):
        for m, v in row.items():
            cols_of[m][a] = v
    rows = []
    for idx in multi_indices(p):
        r: dict[int, Fraction] = {}
        for j, m in enumerate(idx):
            for a, v in cols_of[m].items():
                src = list(idx)
                src[j] = a
                c = flat_index(src)
                r[c] = r.get(c, 0) + v
        rows.append(r)
    return RationalMatrix(rows, DIM**p)


def apply(op: RationalMatrix, t: TensorVector) -> TensorVector:
    return TensorVector(t.rank, tuple(op.matvec(list(t.components))))


def _is_sym(t: TensorVector) -> bool:
    return all(t.permuted(s) == t for s in _adjacent_swaps(t.rank))


def _is_antisym(t: TensorVector) -> bool:
    return all(t.permuted(s) == t.scale(-1) for s in _adjacent_swaps(t.rank))


def _adjacent_swaps(p: int):
    for k in range(p - 1):
        perm = list(range(p))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        yield perm


def classify_symmetry(t: TensorVector) -> str:
    _check_rank(t.rank, 2, 3)
    if _is_sym(t):
        return "symmetric"
    if _is_antisym(t):
        return "antisymmetric"
    return "mixed"


def symmetrize(t: TensorVector) -> TensorVector:
    """Average over all index permutations."""
    perms = list(itertools.permutations(range(t.rank)))
    acc = TensorVector.zeros(t.rank)
    for s in perms:
        acc = acc + t.permuted(s)
    return acc.scale(Fraction(1, len(perms)))


def antisymmetrize(t: TensorVector) -> TensorVector:
    perms = list(itertools.permutations(range(t.rank)))
    acc = TensorVector.zeros(t.rank)
    for s in perms:
        acc = acc + t.permuted(s).scale(_perm_sign(s))
    return acc.scale(Fraction(1, len(perms)))


def _perm_sign(s) -> int:
    s = list(s)
    sign = 1
    for i in range(len(s)):
        while s[i] != i:
            j = s[i]
            s[i], s[j] = s[j], s[i]
            sign = -sign
    return sign


def symmetric_subspace(p: int) -> SubspaceBasis:
    _check_rank(p)
    vecs = {}
    for idx in multi_indices(p):
        key = tuple(sorted(idx))
        v = vecs.setdefault(key, [0] * DIM**p)
        v[flat_index(idx)] = 1
    return SubspaceBasis.span(vecs.values(), DIM**p)


def symmetrized_product(v: TensorVector, g: TensorVector) -> TensorVector:
    """N_(s G_mn) = N_s G_mn + N_m G_ns + N_n G_sm (three cyclic placements, no 1/3)."""
    if v.rank != 1 or g.rank != 2:
        raise RankOutOfRange("symmetrized_product takes a rank-1 and a rank-2 tensor")
    if g.permuted((1, 0)) != g:
        raise NotSymmetric("rank-2 argument must be symmetric")
    out = []
    for s, m, n in multi_indices(3):
        out.append(v[s] * g[m, n] + v[m] * g[n, s] + v[n] * g[s, m])
    return TensorVector(3, tuple(out))


def in_span_of_products(t: TensorVector, rank1s: Sequence[TensorVector],
                        rank2s: Sequence[TensorVector]) -> dict[tuple[int, int], Fraction]:
    """Coefficients c[(i, j)] with t = sum c * rank1s[i]_(s rank2s[j]_mn)."""
    if t.rank != 3:
        raise RankOutOfRange("only rank-3 decompositions are supported")
    keys, cols = [], []
    for i, v in enumerate(rank1s):
        for j, g in enumerate(rank2s):
            keys.append((i, j))
            cols.append(symmetrized_product(v, g).components)
    if not cols:
        if t.is_zero():
            return {}
        raise NotDecomposable("no product tensors supplied")
    a = RationalMatrix([{k: col[r] for k, col in enumerate(cols) if col[r]} for r in range(DIM**3)], len(cols))
    sol = solve_affine(a, list(t.components))
    if not sol.feasible:
        raise NotDecomposable("tensor lies outside the span of symmetrized products")
    return dict(zip(keys, sol.particular))
