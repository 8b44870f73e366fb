"""Reference records for the summary tables, evaluated at sampled rational parameters.

Every expected tensor, weight and exponent is written as a closed-form function of the
deformation parameters, so the records stay symbolic and are instantiated per row.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .tensor_space import TensorVector

Q = Fraction


def vec(*xs) -> TensorVector:
    return TensorVector.from_iter(1, xs)


def mat(rows) -> TensorVector:
    return TensorVector.from_matrix(rows)


def diag(*d) -> TensorVector:
    return mat([[d[i] if i == j else 0 for j in range(4)] for i in range(4)])


ETA = diag(-1, 1, 1, 1)
N_SPURION = vec(1, 0, 0, 1)
T_TIME = vec(1, 0, 0, 0)
X_SPACE = vec(0, 1, 0, 0)


def h_te2(a, b) -> TensorVector:
    """Two-parameter invariant quadric of the null-rotation groups; H(-1,1) is eta, H(1,0) is N N."""
    a, b = Q(a), Q(b)
    return mat([[a, 0, 0, a + b], [0, b, 0, 0], [0, 0, b, 0], [a + b, 0, 0, a + 2 * b]])


def g_iso3(a, b) -> TensorVector:
    return diag(a, b, b, b)


def g_iso21(a, b) -> TensorVector:
    return diag(a, b, -a, -a)


def h_xdisim2(a1, a3) -> TensorVector:
    a1, a3 = Q(a1), Q(a3)
    d = 1 + a1
    return mat([[-(1 + a3) / d, 0, 0, (a1 - a3) / d], [0, 1, 0, 0], [0, 0, 1, 0],
                [(a1 - a3) / d, 0, 0, (1 + 2 * a1 - a3) / d]])


def h_xdisim2_diagonal(a1, a3) -> TensorVector:
    a1, a3 = Q(a1), Q(a3)
    return diag(-(1 + a1) / (1 + 2 * a1 - a3), 1, 1, (1 + 2 * a1 - a3) / (1 + a1))


def n_xdisim2_diagonal(a1, a3) -> TensorVector:
    a1, a3 = Q(a1), Q(a3)
    return vec((1 + a1) / (1 + 2 * a1 - a3), 0, 0, 1)


def xdisim2_shift(a1, a3) -> Fraction:
    """k in z' = z - k t, the t-z change that diagonalizes the XDISIM2 quadric."""
    a1, a3 = Q(a1), Q(a3)
    return (a1 - a3) / (1 + 2 * a1 - a3)


def _slices_to_tensor(slices) -> TensorVector:
    return TensorVector.from_iter(3, [slices[s][m][n] for s in range(4) for m in range(4) for n in range(4)])


def disim_rank3() -> TensorVector:
    """Printed symmetric rank-3 DISIM tensor, sliced on its first index."""
    return _slices_to_tensor([
        [[3, 0, 0, 1], [0, -1, 0, 0], [0, 0, -1, 0], [1, 0, 0, -1]],
        [[0, -1, 0, 0], [-1, 0, 0, -1], [0, 0, 0, 0], [0, -1, 0, 0]],
        [[0, 0, -1, 0], [0, 0, 0, 0], [-1, 0, 0, -1], [0, 0, -1, 0]],
        [[1, 0, 0, -1], [0, -1, 0, 0], [0, 0, -1, 0], [-1, 0, 0, -3]],
    ])


def xdisim2_rank3(a1, a3) -> TensorVector:
    a1, a3 = Q(a1), Q(a3)
    u = -(1 + a1)
    p = 1 + 3 * a3 - 2 * a1
    q = -1 + 3 * a3 - 4 * a1
    return _slices_to_tensor([
        [[3 * (1 + a3), 0, 0, p], [0, u, 0, 0], [0, 0, u, 0], [p, 0, 0, q]],
        [[0, u, 0, 0], [u, 0, 0, u], [0, 0, 0, 0], [0, u, 0, 0]],
        [[0, 0, u, 0], [0, 0, 0, 0], [u, 0, 0, u], [0, 0, u, 0]],
        [[p, 0, 0, q], [0, u, 0, 0], [0, 0, u, 0], [q, 0, 0, -3 * (1 - a3 + 2 * a1)]],
    ])


# Scale linking each printed rank-3 tensor to the symmetrized product N_(s B_mn) of its
# printed factors (three cyclic placements, no 1/3).
RANK3_NORMALIZATION = {
    "DISIM": lambda p: Q(-1),
    "XDISIM2": lambda p: -(1 + p["A1"]),
}


# --- record types --------------------------------------------------------------------

@dataclass(frozen=True)
class ExpectedTensor:
    """A printed covariant: members must lie in one computed family of the same weights.

    ``weights`` lists only the factors that are printed; ``invariant`` means all are 0.
    ``span_dim`` pins the family dimension for multi-parameter families.
    """

    label: str
    members: tuple[TensorVector, ...]
    weights: Mapping[str, Fraction] = field(default_factory=dict)
    invariant: bool = False
    span_dim: int | None = None
    alt_weights: Mapping[str, Fraction] = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.members[0].rank


@dataclass(frozen=True)
class ExpectedMetric:
    """kind: product (unique exponents), family (affine set A e = b), or none."""

    kind: str
    monomials: tuple[tuple[str, TensorVector], ...] = ()
    exponents: tuple[Fraction, ...] = ()
    constraints: tuple[tuple[tuple[Fraction, ...], Fraction], ...] = ()
    alt_exponents: tuple[Fraction, ...] = ()
    display: str = ""


@dataclass(frozen=True)
class Variant:
    rep: int
    params: Mapping[str, Fraction]


@dataclass(frozen=True)
class GoldenRow:
    table: str
    group: str
    title: str
    rep: int = 1
    cov_params: Mapping[str, Fraction] = field(default_factory=dict)
    metric_params: Mapping[str, Fraction] | None = None
    tensors: tuple[ExpectedTensor, ...] = ()
    no_covariants_up_to: int = 0
    metric: ExpectedMetric | None = None
    zero_degree: tuple[tuple[int, ...], ...] | None = None
    variants: tuple[Variant, ...] = ()
    relations: tuple[tuple[str, Fraction], ...] = ()
    discrepancy: str = ""
    same_as: str = ""

    @property
    def mparams(self) -> Mapping[str, Fraction]:
        return self.cov_params if self.metric_params is None else self.metric_params


def _p(**kw) -> dict[str, Fraction]:
    return {("lambda" if k == "lam" else k): Q(v) for k, v in kw.items()}


def _none(display="no invariant metric") -> ExpectedMetric:
    return ExpectedMetric("none", display=display)


def _family(monos, coeffs, rhs, display) -> ExpectedMetric:
    return ExpectedMetric("family", tuple(monos), constraints=((tuple(Q(c) for c in coeffs), Q(rhs)),),
                          display=display)


# --- default sampled parameters ------------------------------------------------------

P_DISIM = _p(A1=Q(1, 3), A2=Q(1, 4))
P_DISIM_METRIC = _p(A1=0, A2=Q(1, 4))
P_XDISIM = _p(A1=Q(1, 2), A2=Q(1, 3), A3=Q(1, 4))
P_XDISIM_METRIC = _p(A1=Q(1, 2), A2=0, A3=Q(1, 4))
P_DIHOM = _p(A1=Q(1, 2), A2=Q(1, 4))
P_WDIHOM = _p(A2=Q(1, 3))
P_DTE1 = _p(A1=Q(1, 4), A2=Q(1, 3))
P_DTE2A1 = _p(A2=Q(1, 2), beta=Q(1, 4))
P_DTE2A2 = _p(A2=Q(1, 2), lam=Q(1, 3))
P_DTE3B = _p(A1=0, A2=0)
P_DISO3_1 = _p(alpha=Q(1, 2), beta=Q(-1, 2))
P_DISO_A1 = _p(A1=Q(1, 3))
P_DESITTER = _p(lam=1)


def _disim_like(a2) -> tuple[Fraction, Fraction]:
    return (1 + a2, -2 * a2)


def _rows() -> list[GoldenRow]:
    rows: list[GoldenRow] = []
    add = rows.append

    # Table I ---------------------------------------------------------------------
    add(GoldenRow("I", "deSitter", "de Sitter", cov_params=P_DESITTER, no_covariants_up_to=4,
                  metric=_none("no conformal covariant tensor")))
    add(GoldenRow("I", "Poincare", "Poincare",
                  tensors=(ExpectedTensor("G", (ETA,), invariant=True),),
                  metric=ExpectedMetric("product", (("G", ETA),), (Q(1),), display="F^2 = Gyy")))
    p, m = P_DISIM, P_DISIM_METRIC
    add(GoldenRow("I", "DISIM", "DISIM", cov_params=p, metric_params=m,
                  tensors=(ExpectedTensor("N", (N_SPURION,), {"b_z": 1 + p["A2"]}),
                           ExpectedTensor("G", (ETA,), {"b_z": 2 * p["A1"]}, alt_weights={"b_z": 2 * p["A2"]})),
                  metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)), _disim_like(m["A2"]),
                                        display="F^2 = (Gyy)^(1+A2) (N.y)^(-2 A2)"),
                  discrepancy="rank-2 B_z factor printed as exp(2 A1 theta); computed exp(2 A2 theta)"))
    p, m = P_XDISIM, P_XDISIM_METRIC
    d = 1 + m["A1"]
    add(GoldenRow("I", "XDISIM1", "XDISIM1", cov_params=p, metric_params=m,
                  tensors=(ExpectedTensor("N", (N_SPURION,), {"b_z": 1 + p["A3"]}),
                           ExpectedTensor("G", (ETA,), {"b_z": 2 * (p["A3"] - p["A1"])})),
                  metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)),
                                        ((1 + m["A3"]) / d, -2 * (m["A3"] + m["A1"]) / d),
                                        alt_exponents=((1 + m["A3"]) / d, 2 * (m["A1"] - m["A3"]) / d),
                                        display="F^2 = (Gyy)^((1+A3)/(1+A1)) (N.y)^(-2(A3+A1)/(1+A1))"),
                  discrepancy="N exponent printed -2(A3+A1)/(1+A1); computed 2(A1-A3)/(1+A1)"))
    h = h_xdisim2(p["A1"], p["A3"])
    hm = h_xdisim2(m["A1"], m["A3"])
    add(GoldenRow("I", "XDISIM2", "XDISIM2", cov_params=p, metric_params=m,
                  tensors=(ExpectedTensor("N", (N_SPURION,), {"b_z": 1 + p["A3"]}),
                           ExpectedTensor("H", (h,), {"b_z": 2 * (p["A3"] - p["A1"])})),
                  metric=ExpectedMetric("product", (("H", hm), ("N", N_SPURION)),
                                        ((1 + m["A3"]) / d, -2 * (m["A3"] - m["A1"]) / d),
                                        display="F^2 = (Hyy)^((1+A3)/(1+A1)) (N.y)^(-2(A3-A1)/(1+A1))")))
    add(GoldenRow("I", "ISIM", "ISIM",
                  tensors=(ExpectedTensor("N", (N_SPURION,), {"b_z": Q(1)}),
                           ExpectedTensor("G", (ETA,), invariant=True)),
                  metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)), (Q(1), Q(0)),
                                        display="F^2 = Gyy")))
    add(GoldenRow("I", "DIHOM", "DIHOM", cov_params=P_DIHOM, metric=_none()))
    a2 = P_WDIHOM["A2"]
    add(GoldenRow("I", "WDIHOM", "WDIHOM", cov_params=P_WDIHOM, same_as="DISIM",
                  metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)), _disim_like(a2),
                                        display="same as DISIM")))
    add(GoldenRow("I", "IHOM", "IHOM", same_as="ISIM",
                  metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)), (Q(1), Q(0)),
                                        display="same as ISIM")))
    add(GoldenRow("I", "DTE1", "DTE1", cov_params=P_DTE1, metric=_none(),
                  variants=(Variant(1, _p(A1=Q(1, 4), A2=0)), Variant(1, _p(A1=0, A2=Q(1, 4))))))
    for name in ("DTE2a", "DTE3a"):
        alias = "" if name == "DTE2a" else "DTE2a"
        p = P_DTE2A1
        add(GoldenRow("I", name, f"{name}1", rep=1, cov_params=p, same_as=alias,
                      tensors=(ExpectedTensor("N", (N_SPURION,), invariant=True),
                               ExpectedTensor("G", (ETA,), {"p_t": p["A2"], "p_z": p["A2"]})),
                      metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)), (Q(0), Q(2)),
                                            display="F = N.y"),
                      relations=(("A1", p["A2"] ** 2 / 4),)))
        p = P_DTE2A2
        a2, lam = p["A2"], p["lambda"]
        add(GoldenRow("I", name, f"{name}2", rep=2, cov_params=p, same_as=alias,
                      tensors=(ExpectedTensor("N", (N_SPURION,), {"p_t": 2 * lam - a2, "p_z": 2 * lam - a2}),
                               ExpectedTensor("G", (ETA,), {"p_t": 2 * lam, "p_z": 2 * lam})),
                      metric=ExpectedMetric("product", (("G", ETA), ("N", N_SPURION)),
                                            ((a2 - 2 * lam) / (a2 - lam), 2 * lam / (a2 - lam)),
                                            display="F^2 = (Gyy)^((A2-2l)/(A2-l)) (N.y)^(2l/(A2-l))"),
                      variants=(Variant(2, _p(A2=a2, lam=a2)),),
                      relations=(("A1", a2 * lam - lam * lam),)))
    add(GoldenRow("I", "DTE2b", "DTE2b", metric=_none()))
    hab = (h_te2(1, 0), h_te2(0, 1))
    te2_metric = _family((("H(-1,1)", h_te2(-1, 1)), ("H(1,1)", h_te2(1, 1))), (2, 2), 2,
                         "F^2 = prod (H_(a,b)yy)^D_ab, sum D_ab = 1")
    add(GoldenRow("I", "DTE3b", "DTE3b", cov_params=P_DTE3B,
                  tensors=(ExpectedTensor("N", (N_SPURION,), invariant=True),
                           ExpectedTensor("H(a,b)", hab, invariant=True, span_dim=2)),
                  metric=te2_metric))
    add(GoldenRow("I", "IE2_TE2", "TE(2)", same_as="DTE3b",
                  tensors=(ExpectedTensor("N", (N_SPURION,), invariant=True),
                           ExpectedTensor("H(a,b)", hab, invariant=True, span_dim=2)),
                  metric=te2_metric))
    add(GoldenRow("I", "DISO3_1", "DISO(3)1", cov_params=P_DISO3_1, metric=_none(),
                  variants=(Variant(1, _p(alpha=Q(1, 2), beta=Q(1, 2))),)))
    a1 = P_DISO_A1["A1"]
    add(GoldenRow("I", "DISO3_2", "DISO(3)2", cov_params=P_DISO_A1, metric=_none(),
                  tensors=(ExpectedTensor("M", (T_TIME,), {"p_t": a1}),
                           ExpectedTensor("G(a,b)", (g_iso3(1, 0), g_iso3(0, 1)), {"p_t": 2 * a1}, span_dim=2)),
                  variants=(Variant(2, P_DISO_A1), Variant(3, P_DISO_A1))))
    iso3_monos = (("T", T_TIME), ("G(-1,1)", g_iso3(-1, 1)), ("G(1,1)", g_iso3(1, 1)))
    add(GoldenRow("I", "ISO3", "ISO(3)",
                  tensors=(ExpectedTensor("T", (T_TIME,), invariant=True),
                           ExpectedTensor("G(a,b)", (g_iso3(1, 0), g_iso3(0, 1)), invariant=True, span_dim=2)),
                  metric=_family(iso3_monos, (1, 2, 2), 2, "F^2 = (T.y)^A prod (G_(a,b)yy)^B_ab, A + 2 sum B = 2")))
    add(GoldenRow("I", "DISO21_1", "DISO(2,1)1", cov_params=P_DISO3_1, metric=_none(),
                  variants=(Variant(1, _p(alpha=Q(1, 2), beta=Q(1, 2))),)))
    add(GoldenRow("I", "DISO21_2", "DISO(2,1)2", cov_params=P_DISO_A1, metric=_none(),
                  variants=(Variant(2, P_DISO_A1),)))
    iso21_monos = (("X", X_SPACE), ("G~(-1,1)", g_iso21(-1, 1)), ("G~(1,1)", g_iso21(1, 1)))
    add(GoldenRow("I", "ISO21", "ISO(2,1)",
                  tensors=(ExpectedTensor("X", (X_SPACE,), invariant=True),
                           ExpectedTensor("G~(a,b)", (g_iso21(1, 0), g_iso21(0, 1)), invariant=True, span_dim=2)),
                  metric=_family(iso21_monos, (1, 2, 2), 2,
                                 "F^2 = (X.y)^A prod (G~_(a,b)yy)^B_ab, A + 2 sum B = 2")))

    # Table II: zero-degree invariants over the listed monomials --------------------
    gn = (("G", ETA), ("N", N_SPURION))
    for name, title, rep, params, monos in (
        ("DISIM", "DISIM", 1, P_DISIM_METRIC, gn),
        ("XDISIM1", "XDISIM1", 1, P_XDISIM_METRIC, gn),
        ("XDISIM2", "XDISIM2", 1, P_XDISIM_METRIC,
         (("H", h_xdisim2(P_XDISIM_METRIC["A1"], P_XDISIM_METRIC["A3"])), ("N", N_SPURION))),
        ("ISIM", "ISIM", 1, {}, gn),
        ("DTE2a", "DTE2a1", 1, P_DTE2A1, gn),
        ("DTE2a", "DTE2a2", 2, P_DTE2A2, gn),
    ):
        add(GoldenRow("II", name, title, rep=rep, cov_params=params,
                      metric=ExpectedMetric("zero", monos, display="phi = 1"), zero_degree=()))
    add(GoldenRow("II", "DTE3b", "DTE3b", cov_params=P_DTE3B,
                  metric=ExpectedMetric("zero", (("N", N_SPURION), ("G", ETA)), display="phi = (N.y)^2/Gyy"),
                  zero_degree=((2, -1),)))
    add(GoldenRow("II", "IE2_TE2", "TE(2)",
                  metric=ExpectedMetric("zero", (("H(-1,1)", h_te2(-1, 1)), ("H(1,1)", h_te2(1, 1))),
                                        display="phi = H_(a,b)yy/H_(c,d)yy"),
                  zero_degree=((1, -1),)))
    add(GoldenRow("II", "ISO3", "ISO(3)",
                  metric=ExpectedMetric("zero", iso3_monos,
                                        display="phi = (T.y)^2/G_(a,b)yy and G_(a,b)yy/G_(c,d)yy"),
                  zero_degree=((2, -1, 0), (2, 0, -1), (0, 1, -1))))
    add(GoldenRow("II", "ISO21", "ISO(2,1)",
                  metric=ExpectedMetric("zero", iso21_monos,
                                        display="phi = (X.y)^2/G~_(a,b)yy and G~_(a,b)yy/G~_(c,d)yy"),
                  zero_degree=((2, -1, 0), (2, 0, -1), (0, 1, -1))))

    # Table III: F^2 = sgn(Gyy)|Gyy|^(1-A)|N.y|^(2A) and the three families ----------
    a = -P_DISIM_METRIC["A2"]
    add(GoldenRow("III", "DISIM", "DISIM", cov_params=P_DISIM_METRIC,
                  metric=ExpectedMetric("product", gn, (1 - a, 2 * a),
                                        display="F^2 = sgn(Gyy)|Gyy|^(1-A)|N.y|^(2A)")))
    add(GoldenRow("III", "Poincare", "Poincare", metric=ExpectedMetric("product", (("G", ETA),), (Q(1),),
                                                                         display="A = 0")))
    add(GoldenRow("III", "DTE2a", "DTE2a1", cov_params=P_DTE2A1,
                  metric=ExpectedMetric("product", gn, (Q(0), Q(2)), display="F = |N.y| (A = 1)")))
    add(GoldenRow("III", "IE2_TE2", "TE(2)", metric=te2_metric))
    add(GoldenRow("III", "ISO3", "ISO(3)", metric=rows_metric(rows, "ISO3")))
    add(GoldenRow("III", "ISO21", "ISO(2,1)", metric=rows_metric(rows, "ISO21")))
    return rows


def rows_metric(rows, group) -> ExpectedMetric:
    return next(r.metric for r in rows if r.table == "I" and r.group == group)


GOLDEN_ROWS: tuple[GoldenRow, ...] = tuple(_rows())


def rows_for(table: str) -> list[GoldenRow]:
    return [r for r in GOLDEN_ROWS if r.table == table]


def expected_covariants(group: str) -> tuple[ExpectedTensor, ...]:
    """Published rank-1/2 tensors of a group's first summary row, with closed-form weights."""
    for r in GOLDEN_ROWS:
        if r.group == group and r.tensors:
            return r.tensors
    return ()
