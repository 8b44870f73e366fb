"""Recompute every summary-table row and compare it against the golden records."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .catalog import NoRepresentation
from .exact_linalg import RationalMatrix, SubspaceBasis, fraction_str, solve_affine
from .golden import GOLDEN_ROWS, ExpectedMetric, ExpectedTensor, GoldenRow
from .metric_builder import _primitive, solve_exponents, zero_degree_space
from .pipeline import SolveResult, metric_solution, monomials_from_members, solve_group

MATCH, MISMATCH, NOTED = "match", "mismatch", "discrepancy-noted"


@dataclass
class Check:
    name: str
    ok: bool
    detail: str = ""
    noted: bool = False  # failed, but reproduces the recorded alternative


@dataclass
class TableRow:
    table: str
    group: str
    title: str
    expected: str
    status: str
    checks: list[Check] = field(default_factory=list)
    note: str = ""

    def to_json(self) -> dict:
        return {
            "table": self.table, "group": self.group, "title": self.title, "expected": self.expected,
            "status": self.status, "note": self.note,
            "checks": [{"name": c.name, "ok": c.ok, "noted": c.noted, "detail": c.detail} for c in self.checks],
        }


def _fr(xs) -> str:
    return "(" + ", ".join(fraction_str(Fraction(x)) for x in xs) + ")"


def _check_tensor(res: SolveResult, exp: ExpectedTensor) -> Check:
    fams = [f for f in res.families.get(exp.rank, []) if all(f.contains(m) for m in exp.members)]
    if len(fams) != 1:
        return Check(f"tensor {exp.label}", False, f"found in {len(fams)} families")
    fam = fams[0]
    if exp.span_dim is not None and fam.dim != exp.span_dim:
        return Check(f"tensor {exp.label}", False, f"family dimension {fam.dim} != {exp.span_dim}")
    want = {s: Fraction(0) for s in fam.weights} if exp.invariant else dict(exp.weights)
    got = {s: fam.weights.get(s) for s in want}
    detail = ", ".join(f"{s}: {fraction_str(got[s])}" for s in sorted(want))
    if got == want and exp.invariant:
        return Check(f"tensor {exp.label}", True, "invariant")
    if got == want:
        return Check(f"tensor {exp.label}", True, detail)
    alt = {s: fam.weights.get(s) for s in exp.alt_weights}
    noted = bool(exp.alt_weights) and alt == dict(exp.alt_weights)
    want_s = ", ".join(f"{s}: {fraction_str(v)}" for s, v in sorted(want.items()))
    return Check(f"tensor {exp.label}", False, f"computed {detail}; printed {want_s}", noted)


def has_no_metric(name: str, rep: int, params) -> tuple[bool, str]:
    """True when the group admits no invariant metric: no representation, or infeasible exponents."""
    try:
        res = solve_group(name, params, rep)
    except NoRepresentation as e:
        return True, str(e)
    monos, sol = metric_solution(res)
    if not monos:
        return True, "no symmetric covariant of rank <= 2"
    return (not sol.feasible), ("infeasible" if not sol.feasible else
                               f"feasible with exponents {_fr(sol.particular)}")


def _affine_equal(sol, exp: ExpectedMetric, n: int) -> bool:
    rows = [{i: Fraction(c) for i, c in enumerate(coeffs) if c} for coeffs, _ in exp.constraints]
    want = solve_affine(RationalMatrix(rows, n), [rhs for _, rhs in exp.constraints])
    if not (sol.feasible and want.feasible) or sol.kernel != want.kernel:
        return False
    diff = [a - b for a, b in zip(sol.particular, want.particular)]
    return want.kernel.contains(diff)


def _check_metric(row: GoldenRow) -> list[Check]:
    m = row.metric
    if m.kind == "none":
        out = []
        for rep, params in [(row.rep, row.cov_params)] + [(v.rep, v.params) for v in row.variants]:
            ok, why = has_no_metric(row.group, rep, params)
            ps = ", ".join(f"{k}={fraction_str(v)}" for k, v in sorted(params.items()))
            out.append(Check(f"no metric (rep {rep}; {ps})", ok, why))
        return out
    res = solve_group(row.group, row.mparams, row.rep)
    try:
        monos = monomials_from_members(res, m.monomials)
    except LookupError as e:
        return [Check("metric monomials", False, str(e))]
    labels = [mm.label for mm in monos]
    if m.kind == "zero":
        space = zero_degree_space(monos)
        want = SubspaceBasis.span([[Fraction(k) for k in v] for v in row.zero_degree], len(monos))
        return [Check(f"zero-degree invariants over {labels}", space == want,
                      f"computed {[_fr(_primitive(v)) for v in space.vectors] or 'phi = 1'}")]
    sol = solve_exponents(monos)
    checks = []
    if m.kind == "product":
        ok = sol.feasible and sol.kernel.dim == 0 and tuple(sol.particular) == tuple(m.exponents)
        detail = f"exponents over {labels}: " + (_fr(sol.particular) if sol.feasible else "infeasible")
        noted = False
        if not ok:
            detail += f"; printed {_fr(m.exponents)}"
            noted = bool(m.alt_exponents) and sol.feasible and tuple(sol.particular) == tuple(m.alt_exponents)
        checks.append(Check("metric exponents", ok, detail, noted))
    elif m.kind == "family":
        ok = _affine_equal(sol, m, len(monos))
        checks.append(Check("metric family", ok,
                            f"over {labels}: particular {_fr(sol.particular or ())}, kernel dim {sol.kernel.dim}"))
    for v in row.variants:
        ok, why = has_no_metric(row.group, v.rep, v.params)
        ps = ", ".join(f"{k}={fraction_str(x)}" for k, x in sorted(v.params.items()))
        checks.append(Check(f"excluded point has no metric ({ps})", ok, why))
    return checks


def evaluate_row(row: GoldenRow) -> TableRow:
    checks: list[Check] = []
    if row.no_covariants_up_to:
        res = solve_group(row.group, row.cov_params, row.rep, tuple(range(1, row.no_covariants_up_to + 1)))
        sizes = [len(res.families[r]) for r in sorted(res.families)]
        checks.append(Check("no covariants", not any(sizes), f"family counts by rank {sizes}"))
    if row.tensors or row.relations:
        ranks = tuple(sorted({t.rank for t in row.tensors} | {1}))
        res = solve_group(row.group, row.cov_params, row.rep, ranks)
        checks.extend(_check_tensor(res, t) for t in row.tensors)
        for k, v in row.relations:
            got = res.instance.params.get(k)
            checks.append(Check(f"relation {k}", got == v, f"{k} = {fraction_str(got)}"))
    if row.metric is not None and not (row.no_covariants_up_to and row.metric.kind == "none"):
        checks.extend(_check_metric(row))
    if all(c.ok for c in checks):
        status = MATCH
    elif row.discrepancy and all(c.ok or c.noted for c in checks):
        status = NOTED
    else:
        status = MISMATCH
    note = row.discrepancy if status == NOTED else (f"same as {row.same_as}" if row.same_as else "")
    return TableRow(row.table, row.group, row.title, row.metric.display if row.metric else "", status, checks, note)


def reproduce_tables(rows=GOLDEN_ROWS, workers: int = 4) -> list[TableRow]:
    """Rows evaluated in parallel and returned in canonical (golden) order."""
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(evaluate_row, rows))


def tables_ok(rows: list[TableRow]) -> bool:
    return all(r.status != MISMATCH for r in rows)


def to_markdown(rows: list[TableRow]) -> str:
    out = []
    for table in ("I", "II", "III"):
        sel = [r for r in rows if r.table == table]
        if not sel:
            continue
        out.append(f"## Table {table}\n")
        out.append("| group | expected | status | details |")
        out.append("|---|---|---|---|")
        for r in sel:
            det = "; ".join(f"{c.name}: {c.detail}" for c in r.checks)
            if r.note:
                det = f"{r.note}. {det}"
            cells = [r.title, r.expected, r.status, det]
            out.append("| " + " | ".join(c.replace("|", "\\|") for c in cells) + " |")
        out.append("")
    return "\n".join(out)
