"""vsr-finsler command line: list, solve, metric, verify, tables."""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path

import numpy as np

from .catalog import CatalogError, instance_to_json, list_groups
from .exact_linalg import fraction_str, parse_fraction
from .finsler_kernel import (
    cartan_scalar,
    euler_residuals,
    field_from_spec,
    fundamental_tensor,
    geometry_report,
    SingularMetric,
    short_circuit,
)
from .invariant_solver import family_to_json
from .metric_builder import (
    InfeasibleSolution,
    MetricSpec,
    constraint_matrix,
    evaluate,
    homogeneity_residual,
    invariance_residual,
    monomial_value,
    sample_domain,
    spec_to_json,
    zero_degree_invariants,
)
from .pipeline import default_spec, metric_solution, solve_group
from .tables import reproduce_tables, tables_ok, to_markdown

DEFAULT_TOLERANCES = {
    "invariance": 1e-9,
    "homogeneity": 1e-9,
    "fundamental": 1e-6,
    "euler": 1e-6,
    "cartan_y": 1e-6,
    "cartan_riemannian": 1e-8,
    "flat_generic": 1e-5,
}
FD_MARGIN = 0.2  # finite-difference checks sample where every |M_i| >= 0.2 |y|^p_i
PARAM_FLAGS = ("A1", "A2", "A3", "lambda", "beta", "alpha")


@dataclass
class RunConfig:
    group: str = ""
    rep_variant: int = 1
    params: dict = field(default_factory=dict)
    ranks: list = field(default_factory=lambda: [1, 2])
    samples: int = 1000
    seed: int = 0
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    output: str | None = None
    exponents: list | None = None  # overrides the solved exponents in verify

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        extra = set(doc) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        cfg = cls(**doc)
        cfg.tolerances = {**DEFAULT_TOLERANCES, **cfg.tolerances}
        return cfg

    def fraction_params(self) -> dict[str, Fraction]:
        return {k: parse_fraction(str(v)) for k, v in self.params.items()}


class UsageError(Exception):
    pass


def _dump(doc) -> str:
    return json.dumps(doc, indent=1, sort_keys=True)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _fracs(xs) -> list[str]:
    return [fraction_str(Fraction(x)) for x in xs]


# --- commands --------------------------------------------------------------------------

def cmd_list(cfg: RunConfig) -> tuple[int, dict]:
    groups = []
    for g in list_groups():
        groups.append({"name": g.name, "symbols": list(g.symbols), "reps": g.rep_count,
                       "aux_params": [list(a) for a in g.aux_symbols],
                       "no_representation": g.no_representation, "alias_of": g.alias_of})
    return 0, {"groups": groups}


def cmd_solve(cfg: RunConfig) -> tuple[int, dict]:
    res = solve_group(cfg.group, cfg.fraction_params(), cfg.rep_variant, tuple(cfg.ranks))
    return 0, {
        "instance": instance_to_json(res.instance),
        "families": {str(r): [family_to_json(f) for f in res.families[r]] for r in sorted(res.families)},
    }


def _constraints_json(monos) -> list[dict]:
    a, names = constraint_matrix(monos)
    labels = [m.label for m in monos]
    out = []
    for name, row in zip(names, a.rows):
        out.append({"name": name, "rhs": "2/1" if name == "degree" else "0/1",
                    "coeffs": {labels[i]: fraction_str(v) for i, v in sorted(row.items())}})
    return out


def cmd_metric(cfg: RunConfig) -> tuple[int, dict]:
    res = solve_group(cfg.group, cfg.fraction_params(), cfg.rep_variant)
    monos, sol = metric_solution(res)
    doc = {
        "group": res.instance.name, "rep_variant": res.instance.rep_variant,
        "params": {k: fraction_str(v) for k, v in res.instance.params.items()},
        "monomials": [{"label": m.label, "degree": m.degree,
                       "weights": {k: fraction_str(v) for k, v in m.weights.items()},
                       "tensor": _fracs(m.tensor.components)} for m in monos],
        "feasible": bool(sol.feasible),
    }
    if not monos:
        doc["reason"] = "no symmetric covariant tensors of rank <= 2"
        return 0, doc
    doc["constraints"] = _constraints_json(monos)
    if not sol.feasible:
        doc["reason"] = "exponent constraints are infeasible"
        return 0, doc
    spec = default_spec(res)
    doc.update({
        "exponents": {m.label: fraction_str(e) for m, e in zip(monos, sol.exponents(sol.min_norm_coeffs()))},
        "kernel": [_fracs(v) for v in sol.kernel.vectors],
        "kernel_dim": sol.kernel.dim,
        "metric": spec.describe(),
        "spec": spec_to_json(spec),
        "zero_degree": [{"exponents": list(z.exponents), "phi": z.expression}
                        for z in zero_degree_invariants(monos)],
    })
    return 0, doc


def _base_clearance(spec: MetricSpec, ys: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(ys, axis=-1)
    out = np.full(len(ys), np.inf)
    for m in spec.monomials:
        out = np.minimum(out, np.abs(monomial_value(m, ys)) / norm**m.degree)
    return out


def _is_riemannian(spec: MetricSpec) -> bool:
    live = [(m, e) for m, e in spec.factors if e != 0]
    return (not spec.parts and spec.modifier is None and len(live) == 1
            and live[0][0].degree == 2 and live[0][1] == 1)


def _check(name, value, tol, info=None) -> dict:
    d = {"name": name, "residual": float(value), "tol": float(tol), "pass": bool(value <= tol)}
    if info:
        d["info"] = info
    return d


def cmd_verify(cfg: RunConfig) -> tuple[int, dict]:
    tol = cfg.tolerances
    res = solve_group(cfg.group, cfg.fraction_params(), cfg.rep_variant)
    monos, sol = metric_solution(res)
    if cfg.exponents is not None:
        exps = [parse_fraction(str(e)) for e in cfg.exponents]
        if len(exps) != len(monos):
            raise UsageError(f"--exponents needs {len(monos)} values ({', '.join(m.label for m in monos)})")
        spec = MetricSpec(tuple(zip(monos, exps)), group=res.instance.name, params=res.instance.params)
    else:
        if not monos or not sol.feasible:
            raise InfeasibleSolution(f"{cfg.group} has no invariant metric to verify")
        spec = default_spec(res)

    checks = []
    inv = invariance_residual(spec, res.instance, cfg.samples, cfg.seed)
    for sym, r in inv.items():
        checks.append(_check(f"invariance[{sym}]", r, tol["invariance"]))
    checks.append(_check("homogeneity", homogeneity_residual(spec, cfg.samples, cfg.seed), tol["homogeneity"]))

    f = field_from_spec(spec)
    rng = np.random.default_rng(cfg.seed + 1)
    n_fd = max(1, min(cfg.samples, 200))
    ys = sample_domain(spec, n_fd, rng, margin=FD_MARGIN)
    xs = np.zeros_like(ys)
    g = fundamental_tensor(f, xs, ys)
    gyy = np.einsum("zij,zi,zj->z", g, ys, ys)
    f2 = evaluate(spec, ys)
    checks.append(_check("fundamental_identity", float(np.max(np.abs(gyy - f2) / np.abs(f2))), tol["fundamental"]))

    # single-point checks at the sample farthest from every base's zero set
    try:
        k = int(np.argmax(_base_clearance(spec, ys)))
        y0, x0 = ys[k], xs[k]
        e1, e2 = euler_residuals(f, x0, y0)
        checks.append(_check("euler", max(e1, e2), tol["euler"]))
        rep = geometry_report(f, x0, y0, generic=True)
        c = rep.cartan
        cmax = float(np.max(np.abs(c)))
        cy = float(np.max(np.abs(np.einsum("abc,c->ab", c, y0)))) / (cmax * np.linalg.norm(y0)) if cmax > 1e-8 else 0.0
        checks.append(_check("cartan_y_contraction", cy, tol["cartan_y"]))
        cs = float(cartan_scalar(f, x0, y0))
        if _is_riemannian(spec):
            checks.append(_check("cartan_scalar", abs(cs), tol["cartan_riemannian"], "quadratic metric"))
        else:
            checks.append({"name": "cartan_scalar", "value": cs, "pass": True, "info": "non-quadratic metric"})
        cert = short_circuit(f)
        checks.append({"name": "flat_short_circuit", "pass": cert is not None, "info": cert or "x-dependent field"})
        checks.append(_check("flat_generic", rep.max_horizontal(), tol["flat_generic"]))
    except SingularMetric as e:
        checks.append({"name": "fundamental_nondegenerate", "pass": False, "info": str(e)})

    passed = all(c["pass"] for c in checks)
    return (0 if passed else 1), {
        "group": res.instance.name, "rep_variant": res.instance.rep_variant,
        "params": {k: fraction_str(v) for k, v in res.instance.params.items()},
        "metric": spec.describe(), "samples": cfg.samples, "seed": cfg.seed,
        "point": y0.tolist(), "checks": checks, "passed": passed,
    }


# --- argument handling ---------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vsr-finsler", description="Invariant tensors and Finsler metrics of "
                                "Poincare subgroups and their deformations.")
    p.add_argument("command", choices=("list", "solve", "metric", "verify", "tables"))
    p.add_argument("--group")
    p.add_argument("--rep", type=int)
    for name in PARAM_FLAGS:
        p.add_argument(f"--{name}", dest=f"p_{name}", metavar="q", help=f"rational value of {name}")
    p.add_argument("--rank", help="comma-separated ranks, e.g. 1,2")
    p.add_argument("--samples", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", action="append", default=[], metavar="name=val")
    p.add_argument("--exponents", help="comma-separated exponents replacing the solved ones (verify)")
    p.add_argument("--out")
    p.add_argument("--config", help="JSON file mirroring RunConfig")
    return p


def build_config(ns: argparse.Namespace) -> RunConfig:
    cfg = RunConfig()
    if ns.config:
        cfg = RunConfig.from_json(json.loads(Path(ns.config).read_text()))
    if ns.group is not None:
        cfg.group = ns.group
    if ns.rep is not None:
        cfg.rep_variant = ns.rep
    for name in PARAM_FLAGS:
        v = getattr(ns, f"p_{name}")
        if v is not None:
            cfg.params[name] = v
    if ns.rank:
        cfg.ranks = [int(r) for r in ns.rank.split(",")]
    if ns.samples is not None:
        cfg.samples = ns.samples
    if ns.seed is not None:
        cfg.seed = ns.seed
    for item in ns.tol:
        key, sep, val = item.partition("=")
        if not sep or key not in DEFAULT_TOLERANCES:
            raise UsageError(f"--tol expects name=val with name in {sorted(DEFAULT_TOLERANCES)}")
        cfg.tolerances[key] = float(val)
    if ns.exponents:
        cfg.exponents = ns.exponents.split(",")
    if ns.out is not None:
        cfg.output = ns.out
    return cfg


COMMANDS = {"list": cmd_list, "solve": cmd_solve, "metric": cmd_metric, "verify": cmd_verify}


def main(argv=None) -> int:
    ns = _parser().parse_args(argv)
    try:
        cfg = build_config(ns)
        if ns.command == "tables":
            rows = reproduce_tables()
            print(to_markdown(rows))
            doc = {"rows": [r.to_json() for r in rows], "ok": tables_ok(rows)}
            if cfg.output:
                Path(cfg.output).write_text(_dump(doc) + "\n")
            return 0 if doc["ok"] else 1
        if ns.command != "list" and not cfg.group:
            raise UsageError("--group is required")
        code, doc = COMMANDS[ns.command](cfg)
    except (CatalogError, InfeasibleSolution, UsageError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    _emit(_dump(doc), cfg.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
