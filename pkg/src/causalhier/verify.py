"""Finite-sample tests for open hypotheses about interventional distributions.

A hypothesis is a positive boolean combination of leaves ``mu_alpha(C) > r``.
Each leaf fires when its empirical frequency exceeds ``r`` by the Hoeffding
margin ``sqrt(ln(k / eps) / (2 n))``, with ``eps`` split evenly over all ``k``
leaves.  The margin is irrational, so for every ``(n, r, eps/k)`` the smallest
firing count is settled once with interval arithmetic; after that every
decision is an integer comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence, Union

import mpmath
import numpy as np

from .errors import ModelError, PreconditionError
from .hierarchy import TwoVarFamily
from .scm import (
    EMPTY,
    Intervention,
    ScmModel,
    Valuation,
    all_valuations,
    interventional,
    require_valid,
    sort_interventions,
)

EventTerm = tuple[tuple[str, int], ...]


def _term(assignment: Mapping[str, int]) -> EventTerm:
    return tuple(sorted((str(k), int(v)) for k, v in assignment.items()))


@dataclass(frozen=True)
class Leaf:
    """``mu_alpha(C) > r`` where ``C`` is a union of partial assignments."""

    alpha: Intervention
    event: tuple[EventTerm, ...]
    r: Fraction

    def __post_init__(self):
        ev = self.event
        if isinstance(ev, Mapping):
            ev = (ev,)
        terms = tuple(sorted(set(t if isinstance(t, tuple) else _term(t) for t in ev)))
        if not terms:
            raise ModelError("leaf event must be non-empty")
        object.__setattr__(self, "event", terms)
        r = Fraction(self.r)
        if not 0 <= r <= 1:
            raise ModelError(f"threshold {r} outside [0, 1]")
        object.__setattr__(self, "r", r)

    def contains(self, order: Sequence[str], valuation: Valuation) -> bool:
        return any(all(valuation[order.index(v)] == val for v, val in t) for t in self.event)

    def variables(self) -> set[str]:
        return {v for t in self.event for v, _ in t}


@dataclass(frozen=True)
class Node:
    op: str  # "all" or "any"
    children: tuple["Hypothesis", ...]

    def __post_init__(self):
        if self.op not in ("all", "any"):
            raise ModelError(f"unknown combinator {self.op!r}")
        object.__setattr__(self, "children", tuple(self.children))


Hypothesis = Union[Leaf, Node]


def leaf(alpha: Intervention | Mapping[str, int], event, r) -> Leaf:
    if not isinstance(alpha, Intervention):
        alpha = Intervention.of(alpha)
    return Leaf(alpha, event, Fraction(r))


def all_of(*children: Hypothesis) -> Node:
    return Node("all", children)


def any_of(*children: Hypothesis) -> Node:
    return Node("any", children)


def leaves(h: Hypothesis) -> list[Leaf]:
    if isinstance(h, Leaf):
        return [h]
    return [lf for c in h.children for lf in leaves(c)]


def interventions_of(h: Hypothesis) -> list[Intervention]:
    return sort_interventions({lf.alpha for lf in leaves(h)})


def evaluate(h: Hypothesis, leaf_value) -> bool:
    if isinstance(h, Leaf):
        return leaf_value(h)
    results = (evaluate(c, leaf_value) for c in h.children)
    return all(results) if h.op == "all" else any(results)


def holds(model: ScmModel, h: Hypothesis) -> bool:
    """Exact truth of ``h`` on the model's interventional distributions."""
    tables = {a: interventional(model, a) for a in interventions_of(h)}

    def value(lf: Leaf) -> bool:
        t = tables[lf.alpha]
        mass = sum((p for k, p in t.cells.items() if lf.contains(model.variables, k)), Fraction(0))
        return mass > lf.r

    return evaluate(h, value)


def _rational(v) -> Fraction:
    return Fraction(str(v)) if isinstance(v, float) else Fraction(v)


def margin(n: int, eps_leaf) -> float:
    """Hoeffding margin ``sqrt(ln(1/eps_leaf)/(2n))`` (float, for reporting)."""
    return math.sqrt(math.log(1 / float(eps_leaf)) / (2 * n))


def _exceeds(d: Fraction, n: int, eps_leaf: Fraction) -> bool:
    """Is ``d > sqrt(ln(1/eps_leaf)/(2n))``?  Decided exactly."""
    if d <= 0:
        return False
    lhs = 2 * n * d * d  # rational; compare against ln(1/eps_leaf), which is irrational
    q = 1 / eps_leaf
    iv = mpmath.iv
    saved = iv.prec
    prec = 64
    try:
        while prec <= 1 << 16:  # ln of a rational other than 1 is irrational, so equality never occurs
            iv.prec = prec
            log_q = iv.log(iv.mpf(q.numerator) / iv.mpf(q.denominator))
            lhs_iv = iv.mpf(lhs.numerator) / iv.mpf(lhs.denominator)
            if lhs_iv.a > log_q.b:
                return True
            if lhs_iv.b < log_q.a:
                return False
            prec *= 2
    finally:
        iv.prec = saved
    raise ArithmeticError("could not separate threshold")


@lru_cache(maxsize=None)
def firing_count(n: int, r: Fraction, eps_leaf: Fraction) -> int:
    """Smallest count ``t`` with ``t/n > r + c_n``; ``n + 1`` means never."""
    c = margin(n, eps_leaf)
    t = min(n + 1, max(0, math.floor(n * (float(r) + c)) - 2))
    while t > 0 and _exceeds(Fraction(t - 1, n) - r, n, eps_leaf):
        t -= 1
    while t <= n and not _exceeds(Fraction(t, n) - r, n, eps_leaf):
        t += 1
    return t


@dataclass
class Test:
    """Decision rule for one hypothesis at one sample size."""

    hypothesis: Hypothesis
    epsilon: Fraction
    n: int
    k: int
    thresholds: dict[Leaf, int]

    @property
    def eps_leaf(self) -> Fraction:
        return self.epsilon / self.k

    def leaf_fires(self, lf: Leaf, count: int) -> bool:
        return count >= self.thresholds[lf]

    def decide(self, counts: Mapping[Leaf, int]) -> bool:
        return evaluate(self.hypothesis, lambda lf: self.leaf_fires(lf, counts[lf]))


def make_test(h: Hypothesis, epsilon, n: int) -> Test:
    eps = _rational(epsilon)
    if not 0 < eps < 1:
        raise PreconditionError(f"epsilon must lie in (0, 1), got {eps}")
    if n < 1:
        raise PreconditionError(f"sample size must be positive, got {n}")
    lvs = leaves(h)
    k = len(lvs)
    thresholds = {lf: firing_count(n, lf.r, eps / k) for lf in lvs}
    return Test(h, eps, n, k, thresholds)


def exact_type1_bound(h: Hypothesis, epsilon, n: int, worst_case_value) -> Fraction:
    """Exact probability that a single-leaf test fires when the true mass is ``worst_case_value``."""
    lvs = leaves(h)
    if len(lvs) != 1:
        raise PreconditionError("exact audit needs a single constraint")
    (lf,) = lvs
    v = _rational(worst_case_value)
    if v > lf.r:
        raise PreconditionError(f"value {v} exceeds the threshold {lf.r}; that is the alternative")
    t = make_test(h, epsilon, n).thresholds[lf]
    return binomial_upper_tail(n, v, t)


def binomial_upper_tail(n: int, p: Fraction, t: int) -> Fraction:
    """``P(Binomial(n, p) >= t)`` exactly."""
    if t > n:
        return Fraction(0)
    t = max(t, 0)
    q = 1 - p
    return sum((math.comb(n, j) * p**j * q ** (n - j) for j in range(t, n + 1)), Fraction(0))


def power_threshold(k: int, epsilon, gap) -> int:
    """Sample size beyond which a leaf with true slack ``gap`` fires with probability > 1 - epsilon."""
    eps, gap = float(_rational(epsilon)), float(_rational(gap))
    return math.ceil(2 * math.log(k / eps) / gap**2)


@dataclass
class TestConfig:
    epsilon: Fraction = Fraction(1, 20)
    n_grid: tuple[int, ...] = (10, 100, 1000, 10000)
    trials: int = 100
    seed: int = 0

    def __post_init__(self):
        self.epsilon = _rational(self.epsilon)
        if not 0 < self.epsilon < 1:
            raise PreconditionError(f"epsilon must lie in (0, 1), got {self.epsilon}")
        self.n_grid = tuple(int(n) for n in self.n_grid)
        if not self.n_grid or any(n < 1 for n in self.n_grid):
            raise PreconditionError("sample sizes must be positive")
        if self.trials < 1:
            raise PreconditionError("need at least one trial")


@dataclass
class SimRow:
    n: int
    trials: int
    fired: int

    @property
    def frequency(self) -> float:
        return self.fired / self.trials


@dataclass
class SimReport:
    epsilon: Fraction
    seed: int
    leaves: int
    truth: bool
    rows: list[SimRow] = field(default_factory=list)

    def frequencies(self) -> dict[int, float]:
        return {row.n: row.frequency for row in self.rows}


class _Sampler:
    """Exact inverse-CDF sampling from a rational table with 64-bit uniforms."""

    def __init__(self, probs: Sequence[Fraction]):
        cum = Fraction(0)
        cuts = []
        for p in probs[:-1]:
            cum += p
            t = -((-cum.numerator << 64) // cum.denominator)  # ceil(cum * 2^64)
            if t < 1 << 64:
                cuts.append(t)
        self.cuts = np.array(cuts, dtype=np.uint64)
        self.size = len(probs)

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        u = rng.integers(0, np.iinfo(np.uint64).max, size=n, dtype=np.uint64, endpoint=True)
        idx = np.searchsorted(self.cuts, u, side="right")
        return np.bincount(idx, minlength=self.size)


def simulate_verification(model: ScmModel, h: Hypothesis, cfg: TestConfig) -> SimReport:
    """Fire rate of the test on ``cfg.trials`` fresh datasets per sample size.

    Every dataset has its own generator keyed by (sample-size index, trial,
    intervention index), so trials can run in any order with the same result.
    """
    require_valid(model)
    order = model.variables
    alphas = interventions_of(h)
    for a in alphas:
        for v in a.variables:
            model.index(v)
    for lf in leaves(h):
        for v in lf.variables():
            model.index(v)
    cells = all_valuations(len(order))
    samplers, members = [], {}
    for a in alphas:
        table = interventional(model, a)
        samplers.append(_Sampler([table.prob(c) for c in cells]))
    for lf in leaves(h):
        members[lf] = np.array([lf.contains(order, c) for c in cells], dtype=bool)
    alpha_index = {a: i for i, a in enumerate(alphas)}
    report = SimReport(cfg.epsilon, cfg.seed, len(leaves(h)), holds(model, h))
    for n_idx, n in enumerate(cfg.n_grid):
        test = make_test(h, cfg.epsilon, n)
        fired = 0
        for trial in range(cfg.trials):
            counts_by_alpha = []
            for a_idx, sampler in enumerate(samplers):
                ss = np.random.SeedSequence(cfg.seed, spawn_key=(n_idx, trial, a_idx))
                counts_by_alpha.append(sampler.draw(np.random.Generator(np.random.PCG64(ss)), n))
            counts = {lf: int(counts_by_alpha[alpha_index[lf.alpha]][members[lf]].sum()) for lf in members}
            fired += test.decide(counts)
        report.rows.append(SimRow(n, cfg.trials, fired))
    return report


def _strict_above(alpha: Intervention, b_event, a_event, grid: int) -> Node:
    """``mu_alpha(B) > mu_()(A)`` as a union over rational cut points ``j/grid``."""
    return any_of(
        *(
            all_of(leaf(alpha, b_event, Fraction(j, grid)), leaf(EMPTY, a_event, 1 - Fraction(j, grid)))
            for j in range(1, grid)
        )
    )


def _complement(x_var: str, y_var: str, x: int, y: int) -> list[dict[str, int]]:
    return [{x_var: 1 - x}, {x_var: x, y_var: 1 - y}]


def y_goodness_hypothesis(x_var: str = "X", y_var: str = "Y", swapped: bool = False, grid: int = 4) -> Node:
    """The four strict inequalities of Y-goodness as an open hypothesis.

    The two comparisons between an experimental and an observational mass are
    open unions over the cut grid ``j/grid``; a finer grid catches smaller margins.
    """
    x = 0 if swapped else 1
    do_x = Intervention.of({x_var: x})
    return all_of(
        _strict_above(do_x, {y_var: 0}, _complement(x_var, y_var, x, 0), grid),
        _strict_above(do_x, {y_var: 1}, _complement(x_var, y_var, x, 1), grid),
        leaf(EMPTY, {x_var: 1 - x, y_var: 0}, 0),
        leaf(EMPTY, {x_var: 1 - x, y_var: 1}, 0),
    )


def y_goodness_complement_hypothesis(x_var: str = "X", y_var: str = "Y", swapped: bool = False,
                                     grid: int = 4) -> Node:
    """Open core of the failure of Y-goodness.

    A vanishing observational cell is the closed condition ``mu(not cell) >= 1``;
    its best open stand-in ``> 1`` can never be met.  The experimental inequalities
    reverse to ``mu_x(B) < mu(A)``, which no feasible family satisfies.
    """
    x = 0 if swapped else 1
    do_x = Intervention.of({x_var: x})
    parts = []
    for y in (0, 1):
        for j in range(1, grid):
            r = Fraction(j, grid)
            parts.append(
                all_of(
                    leaf(EMPTY, {x_var: x, y_var: y}, r),
                    leaf(do_x, {y_var: 1 - y}, 1 - r),
                )
            )
    parts.append(leaf(EMPTY, _complement(x_var, y_var, 1 - x, 0), 1))
    parts.append(leaf(EMPTY, _complement(x_var, y_var, 1 - x, 1), 1))
    return any_of(*parts)


def family_holds(fam: TwoVarFamily, h: Hypothesis) -> bool:
    """Exact truth of a hypothesis over a 2VE family's three tables."""
    tables = {EMPTY: fam.obs, Intervention.of({fam.x_var: 0}): fam.do_x0, Intervention.of({fam.x_var: 1}): fam.do_x1}
    scope = (fam.x_var, fam.y_var)

    def value(lf: Leaf) -> bool:
        if lf.alpha not in tables:
            raise ModelError(f"{lf.alpha} is not part of a 2VE family")
        t = tables[lf.alpha]
        return sum((p for k, p in t.cells.items() if lf.contains(scope, k)), Fraction(0)) > lf.r

    return evaluate(h, value)


__all__ = [
    "Hypothesis",
    "Leaf",
    "Node",
    "SimReport",
    "SimRow",
    "Test",
    "TestConfig",
    "all_of",
    "any_of",
    "binomial_upper_tail",
    "exact_type1_bound",
    "family_holds",
    "firing_count",
    "holds",
    "leaf",
    "leaves",
    "make_test",
    "margin",
    "power_threshold",
    "simulate_verification",
    "y_goodness_complement_hypothesis",
    "y_goodness_hypothesis",
]
