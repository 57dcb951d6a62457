"""Build a second model that matches a Y-good model on all of Level 2 but not on Level 3.

The continuous construction maps one witness set onto the other with a
measure-preserving bijection.  Between finitely many atoms no such map
exists in general, so the two sets are joined by a transport coupling and
each coupled pair contributes two "heads" units, one per direction.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .causation import QUANTITIES, check_y_good, probabilities_of_causation
from .errors import ModelError, PreconditionError
from .hierarchy import TwoVarFamily
from .scm import (
    EMPTY,
    DistTable,
    Intervention,
    ScmModel,
    Unit,
    all_interventions,
    all_valuations,
    counterfactual_joint,
    interventional,
    require_valid,
)
from .standard_form import Atom, StandardFormModel, _pred_index, solve_atom


@dataclass
class SeparationPlan:
    x_var: str
    y_var: str
    y0: int
    y1: int
    omega1: tuple[Atom, ...]
    omega2: tuple[Atom, ...]
    mass1: Fraction
    mass2: Fraction
    x: int = 1
    delta: Fraction | None = None
    coupling: dict[tuple[Atom, Atom], Fraction] = field(default_factory=dict)

    @property
    def eps1(self) -> Fraction:
        return self.delta / self.mass1

    @property
    def eps2(self) -> Fraction:
        return self.delta / self.mass2

    def default_delta(self) -> Fraction:
        return min(self.mass1, self.mass2) / 2

    def zeta(self) -> list[tuple[Intervention, dict[str, int]]]:
        """The joint event whose probability drops by ``delta``."""
        return [
            (Intervention.of({self.x_var: 0}), {self.y_var: self.y0}),
            (Intervention.of({self.x_var: 1}), {self.y_var: self.y1}),
        ]


def two_var_summary(m: StandardFormModel, x_var: str, y_var: str) -> TwoVarFamily:
    order = m.order
    tables = {}
    for alpha in (EMPTY, Intervention.of({x_var: 0}), Intervention.of({x_var: 1})):
        fixed = alpha.vector(order)
        ix, iy = order.index(x_var), order.index(y_var)
        cells: dict = {}
        for atom, p in m.atoms.items():
            sol = solve_atom(atom, fixed)
            key = (sol[ix], sol[iy])
            cells[key] = cells.get(key, Fraction(0)) + p
        tables[alpha] = cells
    obs, d0, d1 = (DistTable((x_var, y_var), tables[a]) for a in tables)
    return TwoVarFamily(x_var, y_var, obs, d0, d1)


def find_witness_sets(m: StandardFormModel, x_var: str, y_var: str, x: int = 1) -> SeparationPlan:
    """Locate two complementary response classes among atoms with passive X = x'.

    Candidate ``(y0, y1)`` pairs are tried with the value 1 ahead of 0 in each
    coordinate; the first pair giving both classes positive mass wins.
    """
    if not m.order or m.order[0] != x_var:
        raise PreconditionError(f"{x_var} must come first in the order, got {m.order}")
    if y_var not in m.order or y_var == x_var:
        raise ModelError(f"bad outcome variable {y_var!r}")
    report = check_y_good(two_var_summary(m, x_var, y_var), swapped=(x == 0))
    if not report.good:
        why = report.binding or report.violations or ["infeasible"]
        raise PreconditionError(f"(X, Y) summary is not Y-good; binding: {', '.join(why)}")
    xp = 1 - x
    iy = m.order.index(y_var)
    do0, do1 = Intervention.of({x_var: 0}).vector(m.order), Intervention.of({x_var: 1}).vector(m.order)
    pattern = {}
    for atom in m.atoms:
        if atom[0] == (xp,):
            pattern[atom] = (solve_atom(atom, do0)[iy], solve_atom(atom, do1)[iy])
    for y0 in (1, 0):
        for y1 in (1, 0):
            o1 = tuple(a for a, pt in pattern.items() if pt == (y0, y1))
            o2 = tuple(a for a, pt in pattern.items() if pt == (1 - y0, 1 - y1))
            mass1 = sum((m.atoms[a] for a in o1), Fraction(0))
            mass2 = sum((m.atoms[a] for a in o2), Fraction(0))
            if mass1 > 0 and mass2 > 0:
                return SeparationPlan(x_var, y_var, y0, y1, o1, o2, mass1, mass2, x)
    raise AssertionError("Y-good summary without complementary witness classes")


def northwest_corner(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[tuple[int, int, Fraction]]:
    """Greedy coupling of two equal-total weight vectors."""
    if sum(a) != sum(b):
        raise ValueError("marginals must have equal totals")
    a, b = list(a), list(b)
    i = j = 0
    out = []
    while i < len(a) and j < len(b):
        t = min(a[i], b[j])
        if t:
            out.append((i, j, t))
        a[i] -= t
        b[j] -= t
        if a[i] == 0:
            i += 1
        else:
            j += 1
    return out


def plan_coupling(m: StandardFormModel, plan: SeparationPlan, delta: Fraction | None = None) -> SeparationPlan:
    delta = plan.default_delta() if delta is None else Fraction(delta)
    if not 0 < delta < min(plan.mass1, plan.mass2):
        raise PreconditionError(f"delta must lie in (0, {min(plan.mass1, plan.mass2)}), got {delta}")
    a = [m.atoms[f] / plan.mass1 for f in plan.omega1]
    b = [m.atoms[f] / plan.mass2 for f in plan.omega2]
    coupling = {(plan.omega1[i], plan.omega2[j]): t for i, j, t in northwest_corner(a, b)}
    plan.delta = delta
    plan.coupling = coupling
    return plan


def _hybrid(own: Atom, other: Atom, x: int) -> Atom:
    # X keeps its own response; every later variable uses ``other`` wherever the X coordinate is x
    n = len(own)
    out = [own[0]]
    for i in range(1, n):
        width = 2**i
        resp = tuple(
            other[i][k] if (k >> (i - 1)) & 1 == x else own[i][k] for k in range(width)
        )
        out.append(resp)
    return tuple(out)


@dataclass
class SeparatedUnit:
    atom: Atom
    p: Fraction
    kind: str  # "tails", "heads12", "heads21"
    source: tuple[Atom, ...]


def separated_units(m: StandardFormModel, plan: SeparationPlan) -> list[SeparatedUnit]:
    """Exogenous units of the separated model, each with its effective response atom."""
    in1, in2 = set(plan.omega1), set(plan.omega2)
    heads_from: dict[Atom, list[SeparatedUnit]] = {}
    for (f1, f2), c in plan.coupling.items():
        w = plan.delta * c
        heads_from.setdefault(f1, []).append(SeparatedUnit(_hybrid(f1, f2, plan.x), w, "heads12", (f1, f2)))
        heads_from.setdefault(f2, []).append(SeparatedUnit(_hybrid(f2, f1, plan.x), w, "heads21", (f1, f2)))
    units = []
    for f, p in m.atoms.items():
        if f in in1:
            p = (1 - plan.eps1) * p
        elif f in in2:
            p = (1 - plan.eps2) * p
        units.append(SeparatedUnit(f, p, "tails", (f,)))
        units.extend(heads_from.get(f, ()))
    return units


def build_separated(m: StandardFormModel, plan: SeparationPlan, delta: Fraction | None = None) -> ScmModel:
    """Explicit model with the same Level 2 as ``m`` and ``zeta`` lowered by ``delta``."""
    if plan.delta is None or delta is not None:
        plan = plan_coupling(m, plan, delta)
    elif not 0 < plan.delta < min(plan.mass1, plan.mass2):
        raise PreconditionError("plan delta out of range")
    units = separated_units(m, plan)
    order = m.order
    parents = {v: order[:i] for i, v in enumerate(order)}
    mechanisms = {}
    for i, v in enumerate(order):
        mechanisms[v] = {
            (p, (u,)): unit.atom[i][_pred_index(p)] for p in all_valuations(i) for u, unit in enumerate(units)
        }
    return ScmModel(
        order,
        parents,
        (("U", len(units)),),
        {v: ("U",) for v in order},
        tuple(Unit((u,), unit.p) for u, unit in enumerate(units)),
        mechanisms,
    )


@dataclass
class PairReport:
    level2_equal: bool
    interventions_checked: int
    first_l2_difference: str | None
    causation: dict[str, tuple[Fraction | None, Fraction | None]]
    differing: list[str]
    witness: list | None = None
    witness_values: tuple[Fraction, Fraction] | None = None

    @property
    def witness_gap(self) -> Fraction | None:
        if self.witness_values is None:
            return None
        return self.witness_values[0] - self.witness_values[1]


def verify_pair(m1: ScmModel, m2: ScmModel, interventions: Sequence[Intervention] | None = None,
                x_var: str | None = None, y_var: str | None = None, witness=None) -> PairReport:
    """Exact Level-2 comparison plus the six probabilities of causation for both models."""
    require_valid(m1)
    require_valid(m2)
    if m1.variables != m2.variables:
        raise ModelError(f"scope mismatch: {m1.variables} vs {m2.variables}")
    order = m1.variables
    if interventions is None:
        interventions = all_interventions(order)
    x_var = x_var or order[0]
    y_var = y_var or order[-1]
    first_diff = None
    for alpha in interventions:
        if interventional(m1, alpha) != interventional(m2, alpha):
            first_diff = str(alpha)
            break
    c1 = probabilities_of_causation(m1, x_var, y_var).as_dict()
    c2 = probabilities_of_causation(m2, x_var, y_var).as_dict()
    causation = {q: (c1[q], c2[q]) for q in QUANTITIES}
    differing = [q for q in QUANTITIES if c1[q] != c2[q]]
    if witness is None and differing:
        x = 1
        q = differing[0]
        witness = _quantity_event(q, x_var, y_var, x)
    values = None
    if witness is not None:
        values = (counterfactual_joint(m1, witness), counterfactual_joint(m2, witness))
    return PairReport(first_diff is None, len(interventions), first_diff, causation, differing, witness, values)


def _quantity_event(q: str, x_var: str, y_var: str, x: int = 1):
    xp = 1 - x
    do_x, do_xp = Intervention.of({x_var: x}), Intervention.of({x_var: xp})
    return {
        "pns": [(do_x, {y_var: 1}), (do_xp, {y_var: 0})],
        "pns_converse": [(do_x, {y_var: 0}), (do_xp, {y_var: 1})],
        "pn": [(EMPTY, {x_var: x, y_var: 1}), (do_xp, {y_var: 0})],
        "ps": [(EMPTY, {x_var: xp, y_var: 0}), (do_x, {y_var: 1})],
        "p_disable": [(EMPTY, {y_var: 1}), (do_xp, {y_var: 0})],
        "p_enable": [(EMPTY, {y_var: 0}), (do_x, {y_var: 1})],
    }[q]


def separate(m: StandardFormModel, x_var: str, y_var: str, delta: Fraction | None = None, x: int = 1):
    """Plan, build and verify in one go; returns ``(plan, separated model, report)``."""
    plan = plan_coupling(m, find_witness_sets(m, x_var, y_var, x), delta)
    other = build_separated(m, plan)
    report = verify_pair(m.to_scm(), other, x_var=x_var, y_var=y_var, witness=plan.zeta())
    return plan, other, report


__all__ = [
    "PairReport",
    "SeparationPlan",
    "build_separated",
    "find_witness_sets",
    "plan_coupling",
    "separate",
    "verify_pair",
]
