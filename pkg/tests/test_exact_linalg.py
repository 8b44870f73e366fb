from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vsr_finsler.catalog import instantiate, linear_part
from vsr_finsler.exact_linalg import (
    DimensionMismatch,
    RationalMatrix,
    SubspaceBasis,
    exact_spectrum,
    fraction_str,
    intersect,
    null_space,
    parse_fraction,
    rationalize,
    real_eigenvalues,
    solve_affine,
)


def M(rows):
    return RationalMatrix.from_dense(rows)


def e(i, n=3):
    return [Q(int(i == j)) for j in range(n)]


def test_null_space_of_zero_matrix_is_everything():
    assert null_space(RationalMatrix.zeros(3, 3)) == SubspaceBasis.full(3)
    assert null_space(RationalMatrix.zeros(3, 3)).dim == 3


def test_null_space_of_identity_is_empty():
    assert null_space(RationalMatrix.identity(4)).dim == 0


def test_null_space_rank_one():
    ns = null_space(M([[1, 1], [2, 2]]))
    assert ns.dim == 1
    assert ns.contains([1, -1])
    # canonical: leading entry +1
    assert ns.vectors[0][0] == 1


def test_solve_affine_underdetermined():
    sol = solve_affine(M([[1, 2]]), [2])
    assert sol.feasible
    assert tuple(sol.particular) == (2, 0)
    assert sol.kernel.dim == 1 and sol.kernel.contains([-2, 1])


def test_solve_affine_inconsistent():
    assert not solve_affine(M([[1], [1]]), [0, 1]).feasible


@pytest.mark.parametrize("a2", [Q(1, 3), Q(-1, 4), Q(2, 7)])
def test_solve_affine_disimb_system(a2):
    sol = solve_affine(M([[1, 2], [1 + a2, 2 * a2]]), [2, 0])
    assert tuple(sol.particular) == (-2 * a2, 1 + a2)
    assert sol.kernel.dim == 0


def test_real_eigenvalues_rotation_has_none():
    assert real_eigenvalues(np.array([[0.0, -1.0], [1.0, 0.0]]), 1e-9) == []


def test_real_eigenvalues_multiplicity():
    got = real_eigenvalues(np.diag([1.0, 1.0, 2.0]), 1e-9)
    assert [(round(v, 12), m) for v, m in got] == [(1.0, 2), (2.0, 1)]


def test_real_eigenvalues_deformed_rotation():
    rz = instantiate("DISIM", {"A1": Q(1, 2), "A2": 0}).generator("r_z")
    got = real_eigenvalues(linear_part(rz).to_float(), 1e-9)
    assert len(got) == 1
    assert got[0][0] == pytest.approx(0.5, abs=1e-12) and got[0][1] == 2


def test_exact_spectrum_is_rational_and_verified():
    rz = instantiate("DISIM", {"A1": Q(1, 2), "A2": 0}).generator("r_z")
    sp = exact_spectrum(linear_part(rz))
    assert Q(1, 2) in sp.values()


@pytest.mark.parametrize("x, den, want", [(0.5, 10**6, Q(1, 2)), (0.333333333333, 10**6, Q(1, 3)),
                                          (1.4142135, 10, Q(7, 5))])
def test_rationalize(x, den, want):
    assert rationalize(x, den) == want


def test_intersections():
    a = SubspaceBasis.span([e(0), e(1)], 3)
    b = SubspaceBasis.span([e(1), e(2)], 3)
    assert intersect(a, b) == SubspaceBasis.span([e(1)], 3)
    assert intersect(a, a) == a
    n = SubspaceBasis.span([[1, 0, 0, 1]], 4)
    m = SubspaceBasis.span([[1, 0, 0, -1]], 4)
    assert intersect(n, m).dim == 0


def test_intersect_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        intersect(SubspaceBasis.full(3), SubspaceBasis.full(4))


def test_fraction_strings_round_trip():
    for q in (Q(0), Q(-3, 7), Q(5)):
        assert parse_fraction(fraction_str(q)) == q
    assert fraction_str(Q(1, 2)) == "1/2"


# --- properties ------------------------------------------------------------------------

small = st.integers(-6, 6)
mats = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r)))


@given(mats)
def test_null_space_vectors_are_annihilated(rows):
    m = M(rows)
    for v in null_space(m).vectors:
        assert all(x == 0 for x in m.matvec(list(v)))


@given(mats, st.data())
def test_affine_solution_is_exact(rows, data):
    m = M(rows)
    b = data.draw(st.lists(small, min_size=len(rows), max_size=len(rows)))
    sol = solve_affine(m, b)
    if not sol.feasible:
        return
    assert m.matvec(list(sol.particular)) == [Q(x) for x in b]
    for v in sol.kernel.vectors:
        shifted = [p + 3 * k for p, k in zip(sol.particular, v)]
        assert m.matvec(shifted) == [Q(x) for x in b]


@given(st.integers(-10**4, 10**4), st.integers(1, 10**4))
def test_rationalize_round_trips_small_ratios(n, d):
    assert rationalize(n / d, 10**4) == Q(n, d)


vec4 = st.lists(small, min_size=4, max_size=4)


@given(st.lists(vec4, min_size=1, max_size=3), st.lists(vec4, min_size=1, max_size=3))
def test_intersect_commutes_and_is_idempotent(va, vb):
    a, b = SubspaceBasis.span(va, 4), SubspaceBasis.span(vb, 4)
    assert intersect(a, b) == intersect(b, a)
    assert intersect(a, a) == a
