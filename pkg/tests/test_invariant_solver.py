import dataclasses
import json
import time
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, strategies as st

from vsr_finsler.catalog import instantiate, linear_part, tangent_element
from vsr_finsler.exact_linalg import SubspaceBasis
from vsr_finsler.golden import N_SPURION, T_TIME, X_SPACE, expected_covariants, g_iso3, g_iso21, h_xdisim2, mat
from vsr_finsler.invariant_solver import (
    brute_force_covariants,
    check_soundness,
    conformal_covariants,
    result_to_json,
    transform_tensor,
    verify_family,
)
from vsr_finsler.tensor_space import RankOutOfRange, outer, symmetric_subspace
from test_catalog import ALL_INSTANCES


def only(fams):
    assert len(fams) == 1
    return fams[0]


def test_disim_spurion():
    inst = instantiate("DISIM", {"A1": 0, "A2": Q(1, 3)})
    fam = only(conformal_covariants(inst, 1))
    assert fam.basis == SubspaceBasis.span([N_SPURION.components], 4)
    assert fam.weights["b_z"] == Q(4, 3)
    assert all(v == 0 for k, v in fam.weights.items() if k != "b_z")


def test_de_sitter_has_nothing_up_to_rank_four():
    inst = instantiate("deSitter", {"lambda": 1})
    t0 = time.perf_counter()
    cache = {}
    assert all(conformal_covariants(inst, r, _cache=cache) == [] for r in (1, 2, 3, 4))
    assert time.perf_counter() - t0 < 30


def test_iso3_quadric_family():
    fams = conformal_covariants(instantiate("ISO3"), 2)
    sym = [f for f in fams if f.symmetry == "symmetric" and not f.derived_from_rank1]
    fam = only(sym)
    assert fam.dim == 2
    assert fam.contains(g_iso3(1, 0)) and fam.contains(g_iso3(0, 1))
    assert set(fam.weights.values()) == {0}


def test_dihom_rank2_is_only_antisymmetric():
    inst = instantiate("DIHOM", {"A1": Q(1, 2), "A2": Q(1, 4)})
    fams = conformal_covariants(inst, 2)
    extra = [f for f in fams if not f.derived_from_rank1]
    assert extra and all(f.symmetry == "antisymmetric" for f in extra)
    f_tilde = mat([[0, 1, 0, 0], [-1, 0, 0, -1], [0, 0, 0, 0], [0, 1, 0, 0]])
    assert any(f.contains(f_tilde) for f in extra)
    nn = outer(N_SPURION, N_SPURION)
    assert any(f.derived_from_rank1 and f.contains(nn) for f in fams)


def test_rank_out_of_range():
    with pytest.raises(RankOutOfRange):
        conformal_covariants(instantiate("Poincare"), 5)


def test_verify_disimb_spurion_under_bz():
    inst = instantiate("DISIMb", {"A2": Q(1, 3)})
    fam = only(conformal_covariants(inst, 1))
    rep = verify_family(inst, fam, thetas=(0.5,))
    assert rep.passed and rep.max_residual["b_z"] < 1e-10
    # independent: act with the numeric exponential and compare with e^{(1+A2)/2}
    r = tangent_element(inst.generator("b_z"), 0.5)
    got = transform_tensor(N_SPURION.to_numpy(), r)
    assert np.allclose(got, np.exp((1 + 1 / 3) * 0.5) * N_SPURION.to_numpy(), rtol=1e-12)


def test_verify_at_zero_angle_is_exact():
    inst = instantiate("DISIM", {"A1": Q(1, 3), "A2": Q(1, 4)})
    for fam in conformal_covariants(inst, 2):
        assert set(verify_family(inst, fam, thetas=(0.0,)).max_residual.values()) == {0.0}


def test_xdisim2_h_factor():
    a1, a3 = Q(1, 2), Q(1, 4)
    inst = instantiate("XDISIM2", {"A1": a1, "A2": Q(1, 3), "A3": a3})
    h = h_xdisim2(a1, a3)
    fam = only([f for f in conformal_covariants(inst, 2) if f.contains(h)])
    assert fam.weights["b_z"] == 2 * (a3 - a1)
    th = 0.7
    got = transform_tensor(h.to_numpy(), tangent_element(inst.generator("b_z"), th))
    assert np.allclose(got, np.exp(2 * float(a3 - a1) * th) * h.to_numpy(), rtol=1e-10, atol=1e-12)


def test_expected_covariants_records():
    disim = {t.label: t for t in expected_covariants("DISIM")}
    assert disim["N"].weights["b_z"] == 1 + Q(1, 4)
    # printed rank-2 factor and the recomputed one
    assert disim["G"].weights["b_z"] == 2 * Q(1, 3) and disim["G"].alt_weights["b_z"] == 2 * Q(1, 4)
    iso21 = {t.label: t for t in expected_covariants("ISO21")}
    assert iso21["X"].members == (X_SPACE,)
    assert iso21["G~(a,b)"].members == (g_iso21(1, 0), g_iso21(0, 1)) and iso21["G~(a,b)"].span_dim == 2
    m = {t.label: t for t in expected_covariants("DISO3_2")}
    assert m["M"].members == (T_TIME,) and m["M"].weights["p_t"] == Q(1, 3)
    assert m["G(a,b)"].weights["p_t"] == Q(2, 3)


def test_result_json_schema():
    inst = instantiate("DISIMb", {"A2": Q(1, 3)})
    doc = result_to_json(inst, 1, conformal_covariants(inst, 1))
    assert set(doc) == {"group", "rep_variant", "params", "rank", "families"}
    fam = doc["families"][0]
    assert fam["basis"] == [["1/1", "0/1", "0/1", "1/1"]] and fam["weights"]["b_z"] == "4/3"
    json.dumps(doc)


# --- properties ------------------------------------------------------------------------

instances = st.sampled_from(ALL_INSTANCES)


@given(instances, st.integers(1, 2))
def test_soundness(inst, rank):
    for fam in conformal_covariants(inst, rank):
        assert check_soundness(inst, fam)
        for g in inst.generators:
            if linear_part(g).is_zero() and inst.tangent_action == "affine":
                assert fam.weights[g.symbol] == 0


def _key(basis, weights):
    return basis.vectors, tuple(sorted(weights.items()))


@given(instances, st.data(), st.integers(1, 2))
def test_completeness_against_brute_force(inst, data, rank):
    k = data.draw(st.integers(1, min(4, len(inst.generators))))
    idx = data.draw(st.lists(st.integers(0, len(inst.generators) - 1), min_size=k, max_size=k, unique=True))
    sub = dataclasses.replace(inst, generators=tuple(inst.generators[i] for i in sorted(idx)))
    if sub.tangent_action != "affine":
        return
    fast = sorted(_key(f.basis, f.weights) for f in conformal_covariants(sub, rank))
    slow = sorted(_key(b, w) for b, w in brute_force_covariants(sub, rank))
    assert fast == slow


@given(instances)
def test_weight_additivity(inst):
    cache = {}
    r1, r2 = conformal_covariants(inst, 1, _cache=cache), conformal_covariants(inst, 2, _cache=cache)
    for fa in r1:
        for fb in r1:
            t = outer(fa.tensors()[0], fb.tensors()[0])
            want = {s: fa.weights[s] + fb.weights[s] for s in fa.weights}
            assert any(f.contains(t) and dict(f.weights) == want for f in r2)


@given(instances)
def test_symmetric_search_is_subset_of_full(inst):
    full = conformal_covariants(inst, 2)
    sym = conformal_covariants(inst, 2, subspace="symmetric")
    for f in sym:
        assert any(f.basis.issubspace(g.basis) and dict(f.weights) == dict(g.weights) for g in full)
        assert f.basis.issubspace(symmetric_subspace(2))
