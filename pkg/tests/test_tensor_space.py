from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from vsr_finsler.catalog import instantiate, linear_part
from vsr_finsler.exact_linalg import RationalMatrix, exact_spectrum, null_space
from vsr_finsler.golden import ETA, N_SPURION, RANK3_NORMALIZATION, disim_rank3, h_xdisim2, mat, xdisim2_rank3
from vsr_finsler.tensor_space import (
    NotDecomposable,
    NotSymmetric,
    RankOutOfRange,
    TensorVector,
    apply,
    classify_symmetry,
    in_span_of_products,
    induced_derivation_operator,
    outer,
    symmetric_subspace,
    symmetrize,
    symmetrized_product,
)

DIHOM_F = mat([[0, 1, 0, 0], [-1, 0, 0, -1], [0, 0, 0, 0], [0, 1, 0, 0]])


def test_rank_one_operator_is_transpose():
    phi = RationalMatrix.from_dense([[0, 1, 0, 0], [2, 0, 0, 0], [0, 0, 3, 0], [0, 0, 0, 4]])
    assert induced_derivation_operator(phi, 1) == phi.transpose()


def test_identity_scales_by_rank():
    assert induced_derivation_operator(RationalMatrix.identity(4), 2) == RationalMatrix.identity(16, 2)


def test_lorentz_boost_annihilates_minkowski():
    bz = linear_part(instantiate("Poincare").generator("b_z"))
    assert apply(induced_derivation_operator(bz, 2), ETA).is_zero()


def test_rank_out_of_range():
    with pytest.raises(RankOutOfRange):
        induced_derivation_operator(RationalMatrix.identity(4), 5)
    with pytest.raises(RankOutOfRange):
        classify_symmetry(N_SPURION)


def test_classify():
    assert classify_symmetry(ETA) == "symmetric"
    assert classify_symmetry(DIHOM_F) == "antisymmetric"
    e0, e1 = TensorVector.from_iter(1, [1, 0, 0, 0]), TensorVector.from_iter(1, [0, 1, 0, 0])
    assert classify_symmetry(outer(e0, e1)) == "mixed"


def test_symmetrized_product_printed_entries():
    f = symmetrized_product(N_SPURION, ETA)
    # printed tensor is -1 times N_(s eta_mn) in (-,+,+,+)
    assert (f[0, 0, 0], f[0, 0, 3], f[3, 3, 3], f[0, 1, 1]) == (-3, -1, 3, 1)
    assert f.scale(RANK3_NORMALIZATION["DISIM"]({})) == disim_rank3()


def test_symmetrized_product_zero_and_asymmetric():
    assert symmetrized_product(TensorVector.zeros(1), ETA).is_zero()
    with pytest.raises(NotSymmetric):
        symmetrized_product(N_SPURION, DIHOM_F)


@pytest.mark.parametrize("a1, a3", [(Q(1, 2), Q(1, 4)), (Q(1, 3), Q(-1, 5))])
def test_xdisim2_rank3_matches_product(a1, a3):
    f = symmetrized_product(N_SPURION, h_xdisim2(a1, a3))
    scale = RANK3_NORMALIZATION["XDISIM2"]({"A1": a1, "A3": a3})
    assert f.scale(scale) == xdisim2_rank3(a1, a3)


def test_in_span_of_products():
    coeffs = in_span_of_products(disim_rank3(), [N_SPURION], [ETA])
    assert coeffs == {(0, 0): -1}
    assert set(in_span_of_products(TensorVector.zeros(3), [N_SPURION], [ETA]).values()) == {0}


def test_outside_product_span():
    # x^3 direction: symmetric, and orthogonal to every N_(s G_mn) with these factors
    t = TensorVector(3, tuple(Q(int(i == 21)) for i in range(64)))
    assert classify_symmetry(t) == "symmetric"
    with pytest.raises(NotDecomposable):
        in_span_of_products(t, [N_SPURION], [ETA])


# --- properties ------------------------------------------------------------------------

ints = st.integers(-3, 3)
phis = st.lists(ints, min_size=16, max_size=16).map(
    lambda xs: RationalMatrix.from_dense([xs[4 * i:4 * i + 4] for i in range(4)]))


@given(phis, phis, st.integers(1, 2))
def test_operator_is_linear(p1, p2, rank):
    assert induced_derivation_operator(p1 + p2, rank) == (
        induced_derivation_operator(p1, rank) + induced_derivation_operator(p2, rank))


@given(phis)
def test_symmetric_subspace_is_invariant(phi):
    op = induced_derivation_operator(phi, 2)
    sym = symmetric_subspace(2)
    for v in sym.vectors:
        assert sym.contains(op.matvec(list(v)))


@given(phis)
def test_weights_add_under_products(phi):
    op1, op2 = induced_derivation_operator(phi, 1), induced_derivation_operator(phi, 2)
    for lam in exact_spectrum(phi.transpose()).values():
        if not isinstance(lam, Q):
            continue
        for v in null_space(op1.shift(lam)).vectors:
            t = TensorVector(1, v)
            vv = outer(t, t)
            assert apply(op2, vv) == vv.scale(2 * lam)


@given(st.lists(ints, min_size=4, max_size=4), st.lists(ints, min_size=16, max_size=16))
def test_symmetrized_product_is_symmetric(v, g):
    gs = symmetrize(TensorVector.from_iter(2, g))
    f = symmetrized_product(TensorVector.from_iter(1, v), gs)
    assert f.is_zero() or classify_symmetry(f) == "symmetric"
