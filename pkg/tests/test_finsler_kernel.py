import json
from fractions import Fraction as Q

import numpy as np
import pytest
from hypothesis import given, strategies as st

from oracles import ETA, cartan_scalar_closed_form, power_metric_derivatives, sphere_christoffel
from vsr_finsler.finsler_kernel import (
    MetricField,
    SingularMetric,
    StepTooLarge,
    cartan_scalar,
    cartan_tensor,
    connections,
    dg_dy,
    euler_residuals,
    field_from_spec,
    fundamental_tensor,
    geometry_report,
    homogeneity_check,
    quadratic_field,
    sphere_field,
    torsion_and_curvature,
)
from vsr_finsler.metric_builder import DomainError, sample_domain
from vsr_finsler.pipeline import default_spec, solve_group

Y0 = np.array([2.0, 0.0, 0.0, 1.0])
DISIMB_C = 0.9614997135382753  # closed form, A2 = 1/3 at Y0


@pytest.fixture(scope="module")
def disimb():
    return field_from_spec(default_spec(solve_group("DISIMb", {"A2": Q(1, 3)})))


@pytest.fixture(scope="module")
def poincare():
    return field_from_spec(default_spec(solve_group("Poincare")))


def test_poincare_g_is_eta(poincare):
    g = fundamental_tensor(poincare, None, [0.3, 1.0, -0.2, 0.5])
    assert np.allclose(g, ETA, atol=1e-9)


def test_rank_one_square_is_singular():
    n = np.array([1.0, 0, 0, 1])
    f = MetricField(lambda x, y: (y @ n) ** 2, name="N.y squared")
    g = fundamental_tensor(f, None, [1.0, 0.2, 0.1, 0.4])
    assert np.allclose(g, np.outer(n, n), atol=1e-8)
    with pytest.raises(SingularMetric):
        cartan_scalar(f, None, [1.0, 0.2, 0.1, 0.4])


def test_zero_vector_rejected(poincare):
    with pytest.raises(DomainError):
        fundamental_tensor(poincare, None, np.zeros(4))


def test_step_too_large_near_cone(disimb):
    y = np.array([1.0, 0.0, 0.0, 1.0 - 1e-6])  # N.y and Gyy both tiny
    with pytest.raises(StepTooLarge):
        fundamental_tensor(disimb, None, y)


def test_homogeneity_check_flags_broken_field(disimb):
    ys = np.array([[2.0, 0, 0, 1], [0.3, 1.0, 0.2, 0.1]])
    assert homogeneity_check(disimb, None, ys) < 1e-12
    broken = MetricField(lambda x, y: np.einsum("zi,ij,zj->z", y, ETA, y) + 1.0, name="broken")
    assert homogeneity_check(broken, None, ys) > 0.1


def test_disimb_g_matches_closed_form(disimb):
    f2, g_want, _ = power_metric_derivatives(Y0, -2 / 3, 4 / 3)
    assert disimb(None, Y0[None])[0] == pytest.approx(f2, rel=1e-14)
    assert np.max(np.abs(fundamental_tensor(disimb, None, Y0) - g_want)) < 1e-8


def test_frozen_cartan_oracle(disimb):
    assert cartan_scalar_closed_form(Y0, -2 / 3, 4 / 3) == pytest.approx(DISIMB_C, rel=1e-13)
    for h in (1e-2, 5e-3):
        assert cartan_scalar(disimb, None, Y0, h=h) == pytest.approx(DISIMB_C, rel=1e-6)
    _, _, d3 = power_metric_derivatives(Y0, -2 / 3, 4 / 3)
    assert np.max(np.abs(cartan_tensor(disimb, None, Y0) - d3 / 4)) < 1e-6


def test_poincare_cartan_vanishes(poincare):
    assert abs(cartan_scalar(poincare, None, [0.3, 1.0, -0.2, 0.5])) <= 1e-8


def test_euler_chain_200_points(disimb):
    spec = default_spec(solve_group("DISIMb", {"A2": Q(1, 3)}))
    ys = sample_domain(spec, 200, np.random.default_rng(0), margin=0.2)
    e1, e2 = euler_residuals(disimb, None, ys)
    assert e1 < 1e-6 and e2 < 1e-6


@pytest.mark.parametrize("lam", [0.5, 2.0, 5.0])
def test_g_is_degree_zero(disimb, lam):
    g1 = fundamental_tensor(disimb, None, Y0)
    g2 = fundamental_tensor(disimb, None, lam * Y0)
    assert np.max(np.abs(g2 - g1)) < 1e-7


def test_dg_symmetry_and_cartan_y_contraction(disimb):
    d = dg_dy(disimb, None, Y0)[0]
    sym = [np.max(np.abs(d - np.transpose(d, p))) for p in ((1, 0, 2), (0, 2, 1), (2, 1, 0))]
    assert max(sym) < 1e-5
    c = cartan_tensor(disimb, None, Y0)
    assert np.max(np.abs(np.einsum("abc,c->ab", c, Y0))) < 1e-6


def test_flat_short_circuit_is_exact(disimb):
    rep = geometry_report(disimb, None, Y0)
    assert rep.certificate
    assert rep.max_horizontal() == 0.0
    for k in ("finsler", "flag", "berwald", "R~", "S", "X"):
        assert not np.any(rep.curvature[k])
    assert "P" in rep.curvature


def test_flat_generic_differencing(disimb, poincare):
    for f in (disimb, poincare):
        rep = geometry_report(f, None, Y0 if f is disimb else [0.3, 1.0, -0.2, 0.5], generic=True)
        assert rep.max_horizontal() <= 1e-5


def test_sphere_christoffel():
    f = sphere_field()
    for theta in (0.6, 1.1):
        x = np.array([0.0, theta, 0.2, 0.0])
        chern = connections(f, x, [0.0, 0.4, 0.9, 0.0])["chern"][0]
        for (s, m, n), want in sphere_christoffel(theta).items():
            assert abs(chern[s, m, n] - want) < 1e-4


def test_sphere_flag_curvature():
    f = sphere_field()
    x = np.array([0.0, 0.9, 0.1, 0.0])
    y = np.array([0.0, 0.7, 0.5, 0.0])
    flag = torsion_and_curvature(f, x, y, blocks=("torsion", "flag"))["flag"][0]
    f2 = f(x[None], y[None])[0]
    eig = np.sort(np.linalg.eigvals(flag[1:3, 1:3]).real)
    assert abs(eig[1]) < 1e-3                    # along y
    assert abs(-eig[0] / f2 - 1.0) < 1e-3       # K = 1 on the orthogonal flag


def test_quadratic_field_report_json():
    f = quadratic_field(np.diag([-1.0, 2.0, 1.0, 3.0]))
    rep = geometry_report(f, None, [0.1, 1.0, 0.5, 0.2], curvature=False)
    doc = json.loads(json.dumps(rep.to_json()))
    assert np.allclose(doc["g"], np.diag([-1.0, 2.0, 1.0, 3.0]), atol=1e-9)
    assert abs(doc["cartan_scalar"]) < 1e-8
    assert doc["certificate"] and doc["torsion"] is None
    assert doc["residuals"]["g_ginv_identity"] < 1e-9


def test_report_is_deterministic(disimb):
    a = json.dumps(geometry_report(disimb, None, Y0, curvature=False).to_json())
    b = json.dumps(geometry_report(disimb, None, Y0, curvature=False).to_json())
    assert a == b


@given(st.floats(-0.9, 0.9), st.floats(0.1, 2.0), st.floats(0.1, 3.0))
def test_power_metric_fundamental_identity(a2, scale, t):
    f = MetricField(lambda x, y: np.sign(np.einsum("zi,ij,zj->z", y, ETA, y))
                    * np.abs(np.einsum("zi,ij,zj->z", y, ETA, y)) ** (1 + a2)
                    * np.abs(y[:, 0] + y[:, 3]) ** (-2 * a2))
    y = scale * np.array([t + 1.5, 0.3, -0.4, t])
    _, g_want, _ = power_metric_derivatives(y, -2 * a2, 1 + a2)
    g = fundamental_tensor(f, None, y)
    assert np.max(np.abs(g - g_want)) <= 1e-6 * max(1.0, np.max(np.abs(g_want)))
