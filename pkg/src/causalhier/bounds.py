"""Counterfactual bounds from Level-2 data by exact LP over response atoms."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InfeasibleError, ModelError, PreconditionError
from .hierarchy import CounterfactualTable, InterventionalFamily, TwoVarFamily
from .lp import LpProblem, lp_solve
from .scm import DistTable, Intervention, Valuation, all_interventions, all_valuations, bits
from .standard_form import DEFAULT_CAP, Atom, StandardFormModel, enumerate_atoms, solve_atom

Conjunct = tuple[Intervention, Mapping[str, int]]


@dataclass(frozen=True)
class CfQuery:
    """Conjunction of ``(intervention, partial outcome)`` events, optionally conditioned."""

    conjuncts: tuple[Conjunct, ...]
    condition: tuple[Conjunct, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "conjuncts", tuple((a, dict(e)) for a, e in self.conjuncts))
        object.__setattr__(self, "condition", tuple((a, dict(e)) for a, e in self.condition))

    def __hash__(self):
        return hash(tuple((a, tuple(sorted(e.items()))) for a, e in self.conjuncts + self.condition))


@dataclass
class QueryBounds:
    lo: Fraction
    hi: Fraction
    argmin: StandardFormModel
    argmax: StandardFormModel

    @property
    def collapsed(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def _as_data(l2) -> tuple[tuple[str, ...], list[tuple[Intervention, DistTable]]]:
    if isinstance(l2, TwoVarFamily):
        l2 = l2.as_family()
    if isinstance(l2, InterventionalFamily):
        return l2.scope, list(l2.entries.items())
    if isinstance(l2, Mapping):
        items = list(l2.items())
        return items[0][1].scope if items else (), items
    raise TypeError(f"unsupported Level-2 data: {type(l2).__name__}")


@dataclass
class Polytope:
    """Atom distributions reproducing the supplied Level-2 cells.

    Atoms pinned to zero by a zero-probability cell are dropped up front.
    """

    order: tuple[str, ...]
    atoms: list[Atom]
    rows: list[list[Fraction]]
    rhs: list[Fraction]
    labels: list[str]
    dropped: int = 0
    _cache: dict = field(default_factory=dict, repr=False)

    def problem(self, objective: Sequence[Fraction]) -> LpProblem:
        return LpProblem(self.rows, self.rhs, list(objective), list(self.labels))

    def indicator(self, conjuncts: Sequence[Conjunct]) -> list[Fraction]:
        checks = []
        for alpha, event in conjuncts:
            for v in list(alpha.variables) + list(event):
                if v not in self.order:
                    raise ModelError(f"unknown variable {v!r}")
            checks.append(
                (alpha.vector(self.order), [(self.order.index(v), val) for v, val in event.items()])
            )
        out = []
        for atom in self.atoms:
            ok = True
            for fixed, idx in checks:
                sol = solve_atom(atom, fixed)
                if any(sol[i] != val for i, val in idx):
                    ok = False
                    break
            out.append(Fraction(int(ok)))
        return out

    def vertex_model(self, x: Sequence[Fraction]) -> StandardFormModel:
        return StandardFormModel(self.order, {a: v for a, v in zip(self.atoms, x) if v})

    def optimize(self, objective: Sequence[Fraction], sense: str):
        key = (tuple(objective), sense)
        if key not in self._cache:
            self._cache[key] = lp_solve(self.problem(objective), sense)
        return self._cache[key]


def build_polytope(order: Sequence[str] | None, l2, cap: int = DEFAULT_CAP) -> Polytope:
    scope, data = _as_data(l2)
    order = tuple(order or scope)
    all_atoms = enumerate_atoms(order, cap)
    zero: set[int] = set()
    rows: dict[frozenset, tuple[str, Fraction]] = {}
    pending = []
    for alpha, table in data:
        for v in list(alpha.variables) + list(table.scope):
            if v not in order:
                raise ModelError(f"Level-2 data mentions {v!r}, which is not in the order {order}")
        fixed = alpha.vector(order)
        idx = [order.index(v) for v in table.scope]
        groups: dict[Valuation, list[int]] = {c: [] for c in all_valuations(len(idx))}
        for k, atom in enumerate(all_atoms):
            sol = solve_atom(atom, fixed)
            groups[tuple(sol[i] for i in idx)].append(k)
        for cell, members in groups.items():
            label = f"{alpha}:{','.join(table.scope)}={bits(cell)}"
            value = table.prob(cell)
            if value == 0:
                zero.update(members)
            else:
                pending.append((label, frozenset(members), value))
    keep = [k for k in range(len(all_atoms)) if k not in zero]
    pos = {k: i for i, k in enumerate(keep)}
    for label, members, value in pending:
        live = frozenset(members) - zero
        prev = rows.get(live)
        if prev is not None:
            if prev[1] != value:
                raise InfeasibleError(
                    f"cells {prev[0]} and {label} cover the same atoms but carry {prev[1]} and {value}",
                    certificate={prev[0]: Fraction(1), label: Fraction(-1)},
                    violated=[prev[0], label],
                )
            continue
        rows[live] = (label, value)
    A, b, labels = [], [], []
    for live, (label, value) in rows.items():
        row = [Fraction(0)] * len(keep)
        for k in live:
            row[pos[k]] = Fraction(1)
        A.append(row)
        b.append(value)
        labels.append(label)
    A.append([Fraction(1)] * len(keep))
    b.append(Fraction(1))
    labels.append("total")
    return Polytope(order, [all_atoms[k] for k in keep], A, b, labels, dropped=len(zero))


def _feasible_point(poly: Polytope):
    return poly.optimize([Fraction(0)] * len(poly.atoms), "min")


def bound_query(order: Sequence[str] | None, l2, query: CfQuery, cap: int = DEFAULT_CAP,
                polytope: Polytope | None = None) -> QueryBounds:
    """Exact [min, max] of the query over all atom distributions matching ``l2``."""
    poly = polytope or build_polytope(order, l2, cap)
    _feasible_point(poly)
    if query.condition:
        cond = poly.indicator(query.condition)
        c_lo, c_hi = poly.optimize(cond, "min"), poly.optimize(cond, "max")
        if c_lo.value != c_hi.value:
            raise PreconditionError(
                f"conditioning event is not determined by the Level-2 data (ranges over [{c_lo.value}, {c_hi.value}])"
            )
        denom = c_lo.value
        if denom == 0:
            raise PreconditionError("conditioning event has probability 0; the conditional is undefined")
    else:
        denom = Fraction(1)
    c = poly.indicator(tuple(query.conjuncts) + tuple(query.condition))
    lo, hi = poly.optimize(c, "min"), poly.optimize(c, "max")
    return QueryBounds(lo.value / denom, hi.value / denom, poly.vertex_model(lo.x), poly.vertex_model(hi.x))


@dataclass
class CollapseVerdict:
    collapsed: bool
    interventions: tuple[Intervention, ...]
    cells_checked: int
    witness: tuple[Valuation, ...] | None = None
    interval: tuple[Fraction, Fraction] | None = None

    def witness_key(self) -> str | None:
        return None if self.witness is None else CounterfactualTable.key_string(self.witness)


def check_collapse(order: Sequence[str] | None, l2, interventions: Sequence[Intervention] | None = None,
                   cap: int = DEFAULT_CAP) -> CollapseVerdict:
    """Does the Level-2 data pin every joint cell over ``interventions``?

    Cells no atom can reach are identically zero and are skipped; the rest
    are bounded in canonical key order until one has positive width.
    """
    poly = build_polytope(order, l2, cap)
    _feasible_point(poly)
    if interventions is None:
        interventions = all_interventions(poly.order)
    interventions = tuple(interventions)
    fixed = [a.vector(poly.order) for a in interventions]
    groups: dict[tuple[Valuation, ...], list[int]] = {}
    for k, atom in enumerate(poly.atoms):
        key = tuple(solve_atom(atom, f) for f in fixed)
        groups.setdefault(key, []).append(k)
    checked = 0
    for key in sorted(groups):
        c = [Fraction(0)] * len(poly.atoms)
        for k in groups[key]:
            c[k] = Fraction(1)
        lo, hi = poly.optimize(c, "min").value, poly.optimize(c, "max").value
        checked += 1
        if lo != hi:
            return CollapseVerdict(False, interventions, checked, key, (lo, hi))
    return CollapseVerdict(True, interventions, checked)


def pns_query(x_var: str, y_var: str, x: int = 1, y: int = 1) -> CfQuery:
    return CfQuery(((Intervention.of({x_var: x}), {y_var: y}), (Intervention.of({x_var: 1 - x}), {y_var: 1 - y})))


def tian_pearl_pns_bounds(fam: TwoVarFamily, x: int = 1, y: int = 1) -> tuple[Fraction, Fraction]:
    """Closed-form PNS bounds from observational and both experimental laws."""
    xp, yp = 1 - x, 1 - y
    o = fam.obs
    p_yx = fam.do(x).event({fam.y_var: y})
    p_yxp = fam.do(xp).event({fam.y_var: y})
    p_ypxp = fam.do(xp).event({fam.y_var: yp})
    p_y = o.event({fam.y_var: y})

    def pxy(a, b):
        return o.prob((a, b))

    lo = max(Fraction(0), p_yx - p_yxp, p_y - p_yxp, p_yx - p_y)
    hi = min(p_yx, p_ypxp, pxy(x, y) + pxy(xp, yp), p_yx - p_yxp + pxy(x, yp) + pxy(xp, y))
    return lo, hi
