"""Finite binary structural causal models with exact rational noise."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ModelError, ValidationError

Valuation = tuple[int, ...]


def bits(valuation: Sequence[int]) -> str:
    return "".join(str(v) for v in valuation)


def from_bits(key: str) -> Valuation:
    if any(c not in "01" for c in key):
        raise ValueError(f"not a bitstring: {key!r}")
    return tuple(int(c) for c in key)


def all_valuations(k: int) -> list[Valuation]:
    return list(itertools.product((0, 1), repeat=k))


@dataclass(frozen=True, order=True)
class Intervention:
    """A finite partial assignment ``W := w``; the empty one is passive observation."""

    items: tuple[tuple[str, int], ...] = ()

    def __post_init__(self):
        items = tuple(sorted(dict(self.items).items()))
        if len(items) != len(self.items):
            raise ValueError(f"duplicate variable in intervention {self.items}")
        for name, value in items:
            if value not in (0, 1):
                raise ValueError(f"intervention value for {name} must be 0 or 1, got {value!r}")
        object.__setattr__(self, "items", items)

    @classmethod
    def of(cls, assignments: Mapping[str, int] | None = None, **kw: int) -> "Intervention":
        merged = dict(assignments or {})
        merged.update(kw)
        return cls(tuple(merged.items()))

    @property
    def assignments(self) -> dict[str, int]:
        return dict(self.items)

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(name for name, _ in self.items)

    def is_empty(self) -> bool:
        return not self.items

    def union(self, other: "Intervention") -> "Intervention":
        merged = self.assignments
        for name, value in other.items:
            if merged.get(name, value) != value:
                raise ValueError(f"conflicting assignments to {name}")
            merged[name] = value
        return Intervention.of(merged)

    def vector(self, order: Sequence[str]) -> tuple[int | None, ...]:
        a = self.assignments
        return tuple(a.get(v) for v in order)

    @property
    def key(self) -> str:
        return ",".join(f"{n}={v}" for n, v in self.items)

    @classmethod
    def parse(cls, text: str) -> "Intervention":
        """Parse ``"X=1,Y=0"``, optionally prefixed with ``do``; blank means empty."""
        text = text.strip()
        if text.startswith("do"):
            text = text[2:]
        text = text.strip().strip("()").strip()
        if not text or text in ("{}", "∅"):
            return cls()
        out = {}
        for part in text.replace(" ", ",").split(","):
            if not part:
                continue
            name, _, value = part.replace(":=", "=").replace("≔", "=").partition("=")
            out[name.strip()] = int(value)
        return cls.of(out)

    def __str__(self) -> str:
        return f"do({self.key})" if self.items else "do()"


EMPTY = Intervention()


def all_interventions(order: Sequence[str]) -> list[Intervention]:
    """Every partial assignment over ``order`` (3^n of them), canonically sorted."""
    out = []
    for choice in itertools.product((None, 0, 1), repeat=len(order)):
        out.append(Intervention.of({v: c for v, c in zip(order, choice) if c is not None}))
    return sort_interventions(out)


def sort_interventions(interventions: Iterable[Intervention]) -> list[Intervention]:
    return sorted(interventions, key=lambda a: (len(a.items), a.items))


@dataclass(frozen=True)
class Unit:
    values: tuple[int, ...]
    p: Fraction


@dataclass(frozen=True)
class ScmModel:
    """Explicit finite SCM.

    ``variables`` fixes the total order. Mechanism tables map
    ``(parent valuation, exogenous-parent valuation)`` to a value, each
    valuation ordered as in ``parents[V]`` and ``exo_parents[V]``.
    """

    variables: tuple[str, ...]
    parents: Mapping[str, tuple[str, ...]]
    exo: tuple[tuple[str, int], ...]
    exo_parents: Mapping[str, tuple[str, ...]]
    units: tuple[Unit, ...]
    mechanisms: Mapping[str, Mapping[tuple[Valuation, Valuation], int]]
    _plan: tuple = field(default=(), init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "exo", tuple((n, int(r)) for n, r in self.exo))
        object.__setattr__(self, "parents", {v: tuple(self.parents.get(v, ())) for v in self.variables})
        object.__setattr__(
            self, "exo_parents", {v: tuple(self.exo_parents.get(v, ())) for v in self.variables}
        )
        object.__setattr__(
            self, "units", tuple(u if isinstance(u, Unit) else Unit(tuple(u[0]), Fraction(u[1])) for u in self.units)
        )

    @property
    def exo_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.exo)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise ModelError(f"unknown variable {name!r}") from None

    def _eval_plan(self):
        # (var, parent indices, exo indices, table) per variable, computed lazily
        if not self._plan:
            pos = {v: i for i, v in enumerate(self.variables)}
            epos = {n: i for i, n in enumerate(self.exo_names)}
            plan = tuple(
                (
                    v,
                    tuple(pos[p] for p in self.parents[v]),
                    tuple(epos[e] for e in self.exo_parents[v]),
                    self.mechanisms[v],
                )
                for v in self.variables
            )
            object.__setattr__(self, "_plan", plan)
        return self._plan


@dataclass
class ValidationReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def __str__(self) -> str:
        return "valid" if self.ok else "\n".join(self.violations)


def validate_model(model: ScmModel) -> ValidationReport:
    """Collect every structural problem in ``model`` without raising."""
    report = ValidationReport()
    out = report.violations
    seen = set()
    for v in model.variables:
        if v in seen:
            out.append(f"duplicate variable {v}")
        seen.add(v)
    exo_ranges = dict(model.exo)
    if len(exo_ranges) != len(model.exo):
        out.append("duplicate exogenous variable")
    for name, r in model.exo:
        if r < 1:
            out.append(f"exogenous {name} has empty range")
        if name in seen:
            out.append(f"exogenous {name} shadows an endogenous variable")

    pos = {v: i for i, v in enumerate(model.variables)}
    for v in model.variables:
        for p in model.parents.get(v, ()):
            if p not in pos:
                out.append(f"parent {p} of {v} is not a variable")
            elif pos[p] >= pos[v]:
                out.append(f"acyclicity: parent {p} of {v} does not precede it in the order")
        for e in model.exo_parents.get(v, ()):
            if e not in exo_ranges:
                out.append(f"exogenous parent {e} of {v} is not declared")
    for v in model.parents:
        if v not in pos:
            out.append(f"parents declared for unknown variable {v}")

    total = Fraction(0)
    width = len(model.exo)
    unit_keys = set()
    for i, unit in enumerate(model.units):
        if unit.p < 0:
            out.append(f"unit {i} has negative probability {unit.p}")
        total += unit.p
        if len(unit.values) != width:
            out.append(f"unit {i} assigns {len(unit.values)} exogenous values, expected {width}")
            continue
        for (name, r), val in zip(model.exo, unit.values):
            if not 0 <= val < r:
                out.append(f"unit {i}: {name}={val} outside range {r}")
        if unit.values in unit_keys:
            out.append(f"unit {i} repeats exogenous valuation {unit.values}")
        unit_keys.add(unit.values)
    if total != 1:
        out.append(f"unit probabilities sum to {total}, not 1")

    for v in model.variables:
        table = model.mechanisms.get(v)
        if table is None:
            out.append(f"no mechanism for {v}")
            continue
        pars = [p for p in model.parents.get(v, ()) if p in pos]
        exos = [e for e in model.exo_parents.get(v, ()) if e in exo_ranges]
        missing = 0
        for pv in all_valuations(len(pars)):
            for ev in itertools.product(*(range(exo_ranges[e]) for e in exos)):
                value = table.get((pv, tuple(ev)))
                if value is None:
                    missing += 1
                elif value not in (0, 1):
                    out.append(f"mechanism {v} row {bits(pv)}|{ev} has non-binary value {value}")
        if missing:
            out.append(f"mechanism for {v} is partial: {missing} row(s) missing")
    return report


def require_valid(model: ScmModel) -> None:
    report = validate_model(model)
    if not report.ok:
        raise ValidationError(report)


def solve_unit(
    model: ScmModel, intervention: Intervention, unit: Sequence[int] | Mapping[str, int] | Unit
) -> Valuation:
    """Solve the (manipulated) structural equations for one exogenous valuation, in order."""
    if isinstance(unit, Unit):
        u = unit.values
    elif isinstance(unit, Mapping):
        u = tuple(unit[n] for n in model.exo_names)
    else:
        u = tuple(unit)
    if not any(u == x.values for x in model.units):
        raise ModelError(f"exogenous valuation {u} is not a unit of the model")
    return _solve(model, intervention.vector(model.variables), u)


def _solve(model: ScmModel, fixed: tuple[int | None, ...], u: tuple[int, ...]) -> Valuation:
    vals: list[int] = []
    for (_, pidx, eidx, table), f in zip(model._eval_plan(), fixed):
        if f is not None:
            vals.append(f)
        else:
            vals.append(table[(tuple(vals[i] for i in pidx), tuple(u[j] for j in eidx))])
    return tuple(vals)


def outcomes(model: ScmModel, intervention: Intervention) -> list[tuple[Valuation, Fraction]]:
    """(solution, probability) for every unit under ``intervention``."""
    for name in intervention.variables:
        model.index(name)
    fixed = intervention.vector(model.variables)
    return [(_solve(model, fixed, u.values), u.p) for u in model.units]


def manipulate(model: ScmModel, intervention: Intervention) -> ScmModel:
    """The model with every intervened variable's mechanism replaced by a constant."""
    a = intervention.assignments
    for name in a:
        model.index(name)
    if not a:
        return model
    parents = dict(model.parents)
    exo_parents = dict(model.exo_parents)
    mechanisms = dict(model.mechanisms)
    for name, value in a.items():
        parents[name] = ()
        exo_parents[name] = ()
        mechanisms[name] = {((), ()): value}
    return ScmModel(model.variables, parents, model.exo, exo_parents, model.units, mechanisms)


@dataclass(frozen=True)
class DistTable:
    """Distribution over joint valuations of ``scope``; zero cells are not stored."""

    scope: tuple[str, ...]
    cells: Mapping[Valuation, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "scope", tuple(self.scope))
        cleaned = {}
        for k, p in self.cells.items():
            k = tuple(k)
            if len(k) != len(self.scope):
                raise ValueError(f"cell {k} does not match scope {self.scope}")
            p = Fraction(p)
            if p:
                cleaned[k] = cleaned.get(k, Fraction(0)) + p
        object.__setattr__(self, "cells", dict(sorted(cleaned.items())))

    def __hash__(self):
        return hash((self.scope, tuple(self.cells.items())))

    def prob(self, valuation: Sequence[int]) -> Fraction:
        return self.cells.get(tuple(valuation), Fraction(0))

    def total(self) -> Fraction:
        return sum(self.cells.values(), Fraction(0))

    def is_valid(self) -> bool:
        return all(p >= 0 for p in self.cells.values()) and self.total() == 1

    def event(self, assignment: Mapping[str, int]) -> Fraction:
        idx = [(self.scope.index(v), val) for v, val in assignment.items()]
        return sum((p for k, p in self.cells.items() if all(k[i] == val for i, val in idx)), Fraction(0))

    def marginal(self, scope: Sequence[str]) -> "DistTable":
        idx = [self.scope.index(v) for v in scope]
        out: dict[Valuation, Fraction] = {}
        for k, p in self.cells.items():
            key = tuple(k[i] for i in idx)
            out[key] = out.get(key, Fraction(0)) + p
        return DistTable(tuple(scope), out)

    def dense(self) -> dict[Valuation, Fraction]:
        return {k: self.prob(k) for k in all_valuations(len(self.scope))}


def observational(model: ScmModel) -> DistTable:
    cells: dict[Valuation, Fraction] = {}
    for sol, p in outcomes(model, EMPTY):
        cells[sol] = cells.get(sol, Fraction(0)) + p
    return DistTable(model.variables, cells)


def interventional(model: ScmModel, intervention: Intervention) -> DistTable:
    cells: dict[Valuation, Fraction] = {}
    for sol, p in outcomes(model, intervention):
        cells[sol] = cells.get(sol, Fraction(0)) + p
    return DistTable(model.variables, cells)


Conjunct = tuple[Intervention, Mapping[str, int]]


def counterfactual_joint(model: ScmModel, conjuncts: Sequence[Conjunct]) -> Fraction:
    """Total probability of the units satisfying every ``(intervention, event)`` conjunct."""
    checks = []
    for alpha, event in conjuncts:
        fixed = alpha.vector(model.variables)
        checks.append((fixed, [(model.index(v), val) for v, val in event.items()]))
    total = Fraction(0)
    for unit in model.units:
        for fixed, idx in checks:
            sol = _solve(model, fixed, unit.values)
            if any(sol[i] != val for i, val in idx):
                break
        else:
            total += unit.p
    return total


def make_model(
    variables: Sequence[str],
    parents: Mapping[str, Sequence[str]],
    exo: Sequence[tuple[str, int]],
    exo_parents: Mapping[str, Sequence[str]],
    units: Iterable[tuple[Sequence[int], Fraction | int | str]],
    functions: Mapping[str, object],
) -> ScmModel:
    """Build a model from Python callables ``f(parent_values..., exo_values...)``.

    Tables are materialized eagerly, so the result is an ordinary explicit model.
    """
    ranges = dict(exo)
    mechanisms = {}
    for v in variables:
        pars = tuple(parents.get(v, ()))
        exos = tuple(exo_parents.get(v, ()))
        f = functions[v]
        table = {}
        for pv in all_valuations(len(pars)):
            for ev in itertools.product(*(range(ranges[e]) for e in exos)):
                table[(pv, tuple(ev))] = int(f(*pv, *ev))
        mechanisms[v] = table
    return ScmModel(
        tuple(variables),
        {v: tuple(parents.get(v, ())) for v in variables},
        tuple(exo),
        {v: tuple(exo_parents.get(v, ())) for v in variables},
        tuple(Unit(tuple(vals), Fraction(p)) for vals, p in units),
        mechanisms,
    )
