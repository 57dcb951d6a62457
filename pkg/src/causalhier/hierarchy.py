"""Maps between the three levels: model -> counterfactual table -> interventional family -> observational."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ModelError, PreconditionError
from .scm import (
    EMPTY,
    DistTable,
    Intervention,
    ScmModel,
    Unit,
    Valuation,
    _solve,
    all_interventions,
    bits,
    interventional,
    require_valid,
    sort_interventions,
)

JointKey = tuple[Valuation, ...]


@dataclass(frozen=True)
class CounterfactualTable:
    """Joint law of the outcomes under each listed intervention, sharing exogenous noise."""

    interventions: tuple[Intervention, ...]
    scope: tuple[str, ...]
    cells: Mapping[JointKey, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "interventions", tuple(self.interventions))
        object.__setattr__(self, "scope", tuple(self.scope))
        cleaned = {}
        for key, p in self.cells.items():
            key = tuple(tuple(v) for v in key)
            if len(key) != len(self.interventions) or any(len(v) != len(self.scope) for v in key):
                raise ValueError(f"cell {key} does not match table shape")
            p = Fraction(p)
            if p:
                cleaned[key] = cleaned.get(key, Fraction(0)) + p
        object.__setattr__(self, "cells", dict(sorted(cleaned.items())))

    def __hash__(self):
        return hash((self.interventions, self.scope, tuple(self.cells.items())))

    def total(self) -> Fraction:
        return sum(self.cells.values(), Fraction(0))

    def marginal(self, index: int) -> DistTable:
        out: dict[Valuation, Fraction] = {}
        for key, p in self.cells.items():
            out[key[index]] = out.get(key[index], Fraction(0)) + p
        return DistTable(self.scope, out)

    def prob(self, conjuncts: Sequence[tuple[Intervention, Mapping[str, int]]]) -> Fraction:
        """Mass of the cells satisfying every conjunct; each conjunct's intervention must be listed."""
        checks = []
        for alpha, event in conjuncts:
            try:
                i = self.interventions.index(alpha)
            except ValueError:
                raise ModelError(f"{alpha} is not in the table's intervention list") from None
            checks.append((i, [(self.scope.index(v), val) for v, val in event.items()]))
        return sum(
            (p for key, p in self.cells.items() if all(key[i][j] == val for i, idx in checks for j, val in idx)),
            Fraction(0),
        )

    @staticmethod
    def key_string(key: JointKey) -> str:
        return "|".join(bits(v) for v in key)


@dataclass(frozen=True)
class InterventionalFamily:
    """A Level-2 point restricted to finitely many interventions."""

    scope: tuple[str, ...]
    entries: Mapping[Intervention, DistTable]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        ordered = {a: self.entries[a] for a in sort_interventions(self.entries)}
        object.__setattr__(self, "entries", ordered)

    def __hash__(self):
        return hash((self.scope, tuple(self.entries.items())))

    def __getitem__(self, alpha: Intervention) -> DistTable:
        return self.entries[alpha]

    def __contains__(self, alpha) -> bool:
        return alpha in self.entries

    def problems(self) -> list[str]:
        out = []
        if EMPTY not in self.entries:
            out.append("family lacks the empty intervention")
        for alpha, table in self.entries.items():
            if not table.is_valid():
                out.append(f"entry {alpha} is not a probability table")
            for name, value in alpha.items:
                if name in table.scope and table.event({name: value}) != 1:
                    out.append(f"entry {alpha} does not put probability 1 on {name}={value}")
        return out


@dataclass(frozen=True)
class TwoVarFamily:
    """The 2VE summary: observational, do(X=0) and do(X=1) laws of (X, Y)."""

    x_var: str
    y_var: str
    obs: DistTable
    do_x0: DistTable
    do_x1: DistTable

    def do(self, x: int) -> DistTable:
        return self.do_x1 if x == 1 else self.do_x0

    @classmethod
    def from_numbers(cls, obs, do_x0, do_x1, x_var="X", y_var="Y") -> "TwoVarFamily":
        """Build from three ``{(x, y): p}`` mappings (or 4-sequences ordered 00, 01, 10, 11)."""

        def table(cells):
            if not isinstance(cells, Mapping):
                cells = dict(zip([(0, 0), (0, 1), (1, 0), (1, 1)], cells))
            return DistTable((x_var, y_var), {tuple(k): Fraction(v) for k, v in cells.items()})

        return cls(x_var, y_var, table(obs), table(do_x0), table(do_x1))

    def as_family(self) -> InterventionalFamily:
        return InterventionalFamily(
            (self.x_var, self.y_var),
            {
                EMPTY: self.obs,
                Intervention.of({self.x_var: 0}): self.do_x0,
                Intervention.of({self.x_var: 1}): self.do_x1,
            },
        )


def _check_interventions(model: ScmModel, interventions: Sequence[Intervention]) -> None:
    if len(set(interventions)) != len(interventions):
        raise ModelError("intervention list has duplicates")
    for alpha in interventions:
        for name in alpha.variables:
            model.index(name)


def twin_model(model: ScmModel, interventions: Sequence[Intervention]) -> ScmModel:
    """One copy of the endogenous variables per intervention, all driven by the same units.

    Copy variables are named ``"<intervention key>|<variable>"``; the passive copy
    has an empty key, e.g. ``"|Y"``.
    """
    require_valid(model)
    if not interventions:
        raise ModelError("twin model needs at least one intervention")
    _check_interventions(model, interventions)
    variables, parents, exo_parents, mechanisms = [], {}, {}, {}
    for alpha in interventions:
        a = alpha.assignments
        prefix = alpha.key + "|"
        for v in model.variables:
            name = prefix + v
            variables.append(name)
            if v in a:
                parents[name], exo_parents[name] = (), ()
                mechanisms[name] = {((), ()): a[v]}
            else:
                parents[name] = tuple(prefix + p for p in model.parents[v])
                exo_parents[name] = model.exo_parents[v]
                mechanisms[name] = model.mechanisms[v]
    return ScmModel(tuple(variables), parents, model.exo, exo_parents, model.units, mechanisms)


def project_l3(model: ScmModel, interventions: Sequence[Intervention] | None = None) -> CounterfactualTable:
    """Counterfactual table of ``model`` over ``interventions`` (default: all 3^n)."""
    require_valid(model)
    if interventions is None:
        interventions = all_interventions(model.variables)
    interventions = tuple(interventions)
    _check_interventions(model, interventions)
    fixed = [a.vector(model.variables) for a in interventions]
    cells: dict[JointKey, Fraction] = {}
    for unit in model.units:
        key = tuple(_solve(model, f, unit.values) for f in fixed)
        cells[key] = cells.get(key, Fraction(0)) + unit.p
    return CounterfactualTable(interventions, model.variables, cells)


def project_l2(table: CounterfactualTable) -> InterventionalFamily:
    if EMPTY not in table.interventions:
        raise PreconditionError("counterfactual table lacks the empty intervention; Level 1 would be undefined")
    return InterventionalFamily(
        table.scope, {alpha: table.marginal(i) for i, alpha in enumerate(table.interventions)}
    )


def project_l1(family: InterventionalFamily) -> DistTable:
    return family.entries[EMPTY]


def project_2ve(family: InterventionalFamily, x_var: str, y_var: str) -> TwoVarFamily:
    needed = [EMPTY, Intervention.of({x_var: 0}), Intervention.of({x_var: 1})]
    missing = [str(a) for a in needed if a not in family.entries]
    if missing:
        raise PreconditionError(f"family lacks required entries: {', '.join(missing)}")
    scope = (x_var, y_var)
    obs, d0, d1 = (family.entries[a].marginal(scope) for a in needed)
    return TwoVarFamily(x_var, y_var, obs, d0, d1)


def interventional_family(model: ScmModel, interventions: Sequence[Intervention] | None = None) -> InterventionalFamily:
    """Level-2 point of ``model`` directly, without materializing the joint table."""
    require_valid(model)
    if interventions is None:
        interventions = all_interventions(model.variables)
    _check_interventions(model, list(interventions))
    return InterventionalFamily(model.variables, {a: interventional(model, a) for a in interventions})


def relabel_exogenous(model: ScmModel, permutations: Mapping[str, Sequence[int]]) -> ScmModel:
    """Rename exogenous values: value ``u`` of ``E`` becomes ``permutations[E][u]``.

    Mechanism tables are rewritten to match, so every level of the hierarchy is unchanged.
    """
    ranges = dict(model.exo)
    perms = {}
    for name, perm in permutations.items():
        if name not in ranges:
            raise ModelError(f"unknown exogenous variable {name!r}")
        if sorted(perm) != list(range(ranges[name])):
            raise ModelError(f"{list(perm)} is not a permutation of range({ranges[name]})")
        perms[name] = tuple(perm)

    def remap(names: Sequence[str], values: Sequence[int]) -> tuple[int, ...]:
        return tuple(perms[n][v] if n in perms else v for n, v in zip(names, values))

    units = tuple(Unit(remap(model.exo_names, u.values), u.p) for u in model.units)
    mechanisms = {
        v: {(pv, remap(model.exo_parents[v], ev)): val for (pv, ev), val in table.items()}
        for v, table in model.mechanisms.items()
    }
    return ScmModel(model.variables, model.parents, model.exo, model.exo_parents, units, mechanisms)


__all__ = [
    "CounterfactualTable",
    "InterventionalFamily",
    "TwoVarFamily",
    "Unit",
    "interventional_family",
    "relabel_exogenous",
    "project_2ve",
    "project_l1",
    "project_l2",
    "project_l3",
    "twin_model",
]
