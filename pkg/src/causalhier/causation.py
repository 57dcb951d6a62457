"""Probabilities of causation, 2VE feasibility, and Y-goodness."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from .bounds import build_polytope
from .errors import InfeasibleError, ModelError
from .hierarchy import CounterfactualTable, TwoVarFamily
from .scm import EMPTY, Intervention, ScmModel, counterfactual_joint, require_valid
from .standard_form import StandardFormModel

QUANTITIES = ("pns", "pns_converse", "pn", "ps", "p_disable", "p_enable")


@dataclass
class CausationReport:
    """The six quantities; ``None`` marks a conditional with zero denominator."""

    pns: Optional[Fraction]
    pns_converse: Optional[Fraction]
    pn: Optional[Fraction]
    ps: Optional[Fraction]
    p_disable: Optional[Fraction]
    p_enable: Optional[Fraction]

    def as_dict(self) -> dict[str, Optional[Fraction]]:
        return {q: getattr(self, q) for q in QUANTITIES}


def _ratio(num: Fraction, den: Fraction) -> Optional[Fraction]:
    return None if den == 0 else num / den


def _report(joint, x_var: str, y_var: str, x: int, y: int) -> CausationReport:
    xp, yp = 1 - x, 1 - y
    do_x, do_xp = Intervention.of({x_var: x}), Intervention.of({x_var: xp})
    pns = joint([(do_x, {y_var: y}), (do_xp, {y_var: yp})])
    converse = joint([(do_x, {y_var: yp}), (do_xp, {y_var: y})])
    pn = _ratio(joint([(EMPTY, {x_var: x, y_var: y}), (do_xp, {y_var: yp})]), joint([(EMPTY, {x_var: x, y_var: y})]))
    ps = _ratio(joint([(EMPTY, {x_var: xp, y_var: yp}), (do_x, {y_var: y})]), joint([(EMPTY, {x_var: xp, y_var: yp})]))
    disable = _ratio(joint([(EMPTY, {y_var: y}), (do_xp, {y_var: yp})]), joint([(EMPTY, {y_var: y})]))
    enable = _ratio(joint([(EMPTY, {y_var: yp}), (do_x, {y_var: y})]), joint([(EMPTY, {y_var: yp})]))
    return CausationReport(pns, converse, pn, ps, disable, enable)


def probabilities_of_causation(model: ScmModel, x_var: str, y_var: str, x: int = 1, y: int = 1) -> CausationReport:
    require_valid(model)
    if x_var == y_var:
        raise ModelError("X and Y must differ")
    model.index(x_var)
    model.index(y_var)
    return _report(lambda conj: counterfactual_joint(model, conj), x_var, y_var, x, y)


def causation_from_table(table: CounterfactualTable, x_var: str, y_var: str, x: int = 1, y: int = 1) -> CausationReport:
    """Same quantities read off a Level-3 table listing ``do()``, ``do(X=0)`` and ``do(X=1)``."""
    if x_var == y_var:
        raise ModelError("X and Y must differ")
    return _report(table.prob, x_var, y_var, x, y)


@dataclass
class FeasibilityReport:
    feasible: bool
    violations: list[str] = field(default_factory=list)


def check_feasible_2ve(fam: TwoVarFamily) -> FeasibilityReport:
    """Exact membership test for the 2VE space: intervened X is certain, and
    each experimental P(Y=y) dominates the observational P(X=x, Y=y)."""
    out = []
    for name, table in (("obs", fam.obs), ("do_x0", fam.do_x0), ("do_x1", fam.do_x1)):
        if any(p < 0 for p in table.cells.values()) or table.total() != 1:
            out.append(f"table:{name}")
    for x in (0, 1):
        if fam.do(x).event({fam.x_var: x}) != 1:
            out.append(f"eq5:x={x}")
    for x in (0, 1):
        for y in (0, 1):
            if fam.do(x).event({fam.y_var: y}) < fam.obs.prob((x, y)):
                out.append(f"eq6:x={x},y={y}")
    return FeasibilityReport(not out, out)


MARGIN_NAMES = ("exp_minus_obs", "slack_below_obs_x'", "obs_x'y'", "obs_x'y")


@dataclass
class GoodnessReport:
    feasible: bool
    good: bool
    margins: tuple[Fraction, Fraction, Fraction, Fraction]
    binding: list[str]
    x: int = 1
    violations: list[str] = field(default_factory=list)


def goodness_margins(fam: TwoVarFamily, x: int = 1) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """The four quantities that must all be positive, with y = 1, y' = 0."""
    xp, yp = 1 - x, 0
    obs = fam.obs
    m1 = fam.do(x).event({fam.y_var: yp}) - obs.prob((x, yp))
    obs_xp = obs.event({fam.x_var: xp})
    m2 = obs_xp - m1
    m3 = obs.prob((xp, yp))
    m4 = obs_xp - m3
    return m1, m2, m3, m4


def check_y_good(fam: TwoVarFamily, swapped: bool = False) -> GoodnessReport:
    """``swapped`` exchanges the roles of x and x' (x = 0, x' = 1)."""
    x = 0 if swapped else 1
    feas = check_feasible_2ve(fam)
    margins = goodness_margins(fam, x)
    binding = [name for name, m in zip(MARGIN_NAMES, margins) if m == 0]
    good = feas.feasible and all(m > 0 for m in margins)
    return GoodnessReport(feas.feasible, good, margins, binding, x, feas.violations)


def realize_2ve(fam: TwoVarFamily) -> StandardFormModel:
    """One standard-form model over (X, Y) whose 2VE projection is ``fam``."""
    feas = check_feasible_2ve(fam)
    if not feas.feasible:
        raise InfeasibleError(
            f"family is not realizable: violates {', '.join(feas.violations)}", violated=feas.violations
        )
    poly = build_polytope((fam.x_var, fam.y_var), fam, cap=2)
    res = poly.optimize([Fraction(0)] * len(poly.atoms), "min")
    return poly.vertex_model(res.x)
