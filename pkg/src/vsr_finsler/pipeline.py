"""Group -> covariant families -> monomials -> exponent solution, with display labels."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .catalog import GroupInstance, instantiate
from .golden import ETA, N_SPURION, T_TIME, X_SPACE, g_iso3, g_iso21, h_te2
from .exact_linalg import SubspaceBasis
from .invariant_solver import CovariantFamily, conformal_covariants
from .metric_builder import (
    ExponentSolution,
    MetricSpec,
    Monomial,
    assemble_metric,
    enumerate_monomials,
    solve_exponents,
)
from .tensor_space import TensorVector

KNOWN_LABELS = (("N", N_SPURION), ("T", T_TIME), ("X", X_SPACE), ("G", ETA))

# Display members for multi-parameter quadric families, tried in order.
DISPLAY_MEMBERS = (
    (("H(-1,1)", h_te2(-1, 1)), ("H(1,1)", h_te2(1, 1))),
    (("G(-1,1)", g_iso3(-1, 1)), ("G(1,1)", g_iso3(1, 1))),
    (("G~(-1,1)", g_iso21(-1, 1)), ("G~(1,1)", g_iso21(1, 1))),
)


def _proportional(a: TensorVector, b: TensorVector) -> bool:
    k = next((i for i, x in enumerate(b.components) if x), None)
    if k is None or not a.components[k]:
        return False
    r = a.components[k] / b.components[k]
    return all(x == r * y for x, y in zip(a.components, b.components))


def _label_for(t: TensorVector, fallback: str) -> str:
    for name, ref in KNOWN_LABELS:
        if ref.rank == t.rank and _proportional(t, ref):
            return name
    return fallback


@dataclass(frozen=True)
class SolveResult:
    instance: GroupInstance
    families: Mapping[int, list[CovariantFamily]]


def solve_group(name: str, params: Mapping[str, object] | None = None, rep: int = 1,
                ranks: Sequence[int] = (1, 2)) -> SolveResult:
    inst = instantiate(name, params or {}, rep)
    cache: dict = {}
    return SolveResult(inst, {r: conformal_covariants(inst, r, _cache=cache) for r in ranks})


def default_choices(families: Sequence[CovariantFamily]) -> dict[int, list[tuple[str, object]]]:
    """Labelled members per family: display members for 2-d quadric families, else the basis."""
    choices: dict[int, list[tuple[str, object]]] = {}
    quad = 0
    for i, fam in enumerate(families):
        if fam.symmetry == "antisymmetric" or fam.derived_from_rank1:
            continue
        sym = [TensorVector(fam.rank, v) for v in fam.symmetric_part().vectors]
        if fam.rank == 2 and fam.dim == 2:
            for members in DISPLAY_MEMBERS:
                if all(fam.contains(t) for _, t in members):
                    choices[i] = list(members)
                    break
            if i in choices:
                continue
        picks = []
        for k, t in enumerate(sym):
            base = "H" if fam.rank == 2 else f"M{fam.rank}"
            if len(sym) > 1 or quad:
                base = f"{base}{quad + k + 1}" if fam.rank == 2 else f"{base}_{i}_{k}"
            label = _label_for(t, base)
            if label in ("N", "T", "X", "G"):
                ref = dict(KNOWN_LABELS)[label]
                t = ref if fam.contains(ref) else t
            picks.append((label, t))
        if fam.rank == 2:
            quad += len(sym)
        choices[i] = picks
    return choices


def monomials_for(result: SolveResult, choices=None) -> list[Monomial]:
    fams: list[CovariantFamily] = []
    for r in sorted(result.families):
        fams.extend(result.families[r])
    return enumerate_monomials(fams, choices if choices is not None else default_choices(fams))


def monomials_from_members(result: SolveResult, members: Sequence[tuple[str, TensorVector]]) -> list[Monomial]:
    """Monomials for explicitly given tensors, each located in the unique family holding it."""
    out = []
    for label, t in members:
        hits = [f for f in result.families.get(t.rank, []) if f.contains(t)]
        if len(hits) != 1:
            raise LookupError(f"{label} lies in {len(hits)} computed families of {result.instance.name}")
        out.append(Monomial(label, t, dict(hits[0].weights)))
    return out


def metric_solution(result: SolveResult, choices=None) -> tuple[list[Monomial], ExponentSolution]:
    monos = monomials_for(result, choices)
    return monos, solve_exponents(monos) if monos else ExponentSolution((), False, None, SubspaceBasis(0, ()))


def default_spec(result: SolveResult, kernel_choice=None, form: str = "signed-abs") -> MetricSpec:
    """Kernel choice defaults to the least-norm exponent vector."""
    monos, sol = metric_solution(result)
    if kernel_choice is None:
        kernel_choice = sol.min_norm_coeffs()
    return assemble_metric(sol, kernel_choice, form, group=result.instance.name, params=result.instance.params)


def exponent_table(sol: ExponentSolution) -> list[tuple[str, Fraction]]:
    return [(m.label, e) for m, e in zip(sol.monomials, sol.particular or ())]
