import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from causalhier.bounds import (
    CfQuery,
    bound_query,
    build_polytope,
    check_collapse,
    pns_query,
    tian_pearl_pns_bounds,
)
from causalhier.catalog import deterministic_model, example1, figure2_model
from causalhier.errors import InfeasibleError, PreconditionError
from causalhier.hierarchy import TwoVarFamily, interventional_family, project_2ve, project_l3
from causalhier.scm import EMPTY, Intervention, counterfactual_joint
from causalhier.standard_form import monotonic_example

from generators import random_feasible_2ve, random_model, random_y_good

H = F(1, 2)
DO0, DO1 = Intervention.of(X=0), Intervention.of(X=1)
FIG2 = TwoVarFamily.from_numbers([H, H, 0, 0], [H, H, 0, 0], [0, 0, H, H])


def test_figure2_pns_bounds():
    b = bound_query(("X", "Y"), FIG2, pns_query("X", "Y"))
    assert (b.lo, b.hi) == (0, H)
    assert not b.collapsed
    assert tian_pearl_pns_bounds(FIG2) == (0, H)


def test_bounds_vertices_reproduce_data():
    b = bound_query(("X", "Y"), FIG2, pns_query("X", "Y"))
    for vertex in (b.argmin, b.argmax):
        fam = project_2ve(interventional_family(vertex.to_scm()), "X", "Y")
        assert fam == FIG2
    assert counterfactual_joint(b.argmax.to_scm(), pns_query("X", "Y").conjuncts) == H


def test_example1_pns_bounds():
    fam = project_2ve(interventional_family(example1()), "X", "Y")
    b = bound_query(("X", "Y"), fam, pns_query("X", "Y"))
    assert (b.lo, b.hi) == (0, H)
    assert (b.lo, b.hi) == tian_pearl_pns_bounds(fam)


def test_polytope_drops_zero_cells():
    poly = build_polytope(("X", "Y"), FIG2)
    # X is never 1 passively, so every atom answering X = 1 is pinned to zero
    assert poly.dropped == 4
    assert all(atom[0] == (0,) for atom in poly.atoms)
    assert poly.labels[-1] == "total"


def test_inconsistent_data_raises_with_certificate():
    bad = TwoVarFamily.from_numbers([H, 0, 0, H], [0, H, 0, H], [0, 0, H, H])
    with pytest.raises(InfeasibleError) as exc:
        bound_query(("X", "Y"), bad, pns_query("X", "Y"))
    assert exc.value.certificate


def test_conditional_query_determined():
    # consistency: among units with X = 0, Y = 1, setting X to 0 leaves Y = 1
    q = CfQuery(((DO0, {"Y": 1}),), condition=((EMPTY, {"X": 0, "Y": 1}),))
    b = bound_query(("X", "Y"), FIG2, q)
    assert (b.lo, b.hi) == (1, 1)


def test_pn_not_identified_in_example1():
    q = CfQuery(((DO0, {"Y": 0}),), condition=((EMPTY, {"X": 1, "Y": 1}),))
    fam = project_2ve(interventional_family(example1()), "X", "Y")
    b = bound_query(("X", "Y"), fam, q)
    assert (b.lo, b.hi) == (0, 1)


def test_conditional_zero_denominator():
    q = CfQuery(((DO0, {"Y": 0}),), condition=((EMPTY, {"X": 1}),))
    with pytest.raises(PreconditionError, match="probability 0"):
        bound_query(("X", "Y"), FIG2, q)


def test_conditional_undetermined():
    q = CfQuery(((EMPTY, {"Y": 1}),), condition=((DO0, {"Y": 1}), (DO1, {"Y": 1})))
    with pytest.raises(PreconditionError, match="not determined"):
        bound_query(("X", "Y"), FIG2, q)


def test_collapse_figure2():
    v = check_collapse(("X", "Y"), FIG2, [DO0, DO1])
    assert not v.collapsed
    assert v.witness_key() == "00|10"
    assert v.interval == (0, H)
    # the PNS cell has the same interval
    b = bound_query(("X", "Y"), FIG2, CfQuery(((DO0, {"X": 0, "Y": 0}), (DO1, {"X": 1, "Y": 1}))))
    assert (b.lo, b.hi) == (0, H)


@pytest.mark.parametrize("order", [("X", "Y"), ("X", "Y", "Z")])
def test_monotonic_collapses(order):
    fam = interventional_family(monotonic_example(order).to_scm())
    assert check_collapse(order, fam).collapsed


def test_deterministic_collapses():
    m = deterministic_model()
    v = check_collapse(m.variables, interventional_family(m))
    assert v.collapsed
    assert len(v.interventions) == 27


def test_collapse_accepts_mapping():
    fam = interventional_family(example1())
    v = check_collapse(("X", "Y"), dict(fam.entries))
    assert not v.collapsed


@settings(max_examples=120, deadline=None)
@given(st.integers(0, 10**6))
def test_lp_equals_closed_form(seed):
    fam = random_feasible_2ve(random.Random(seed))
    b = bound_query(("X", "Y"), fam, pns_query("X", "Y"))
    assert (b.lo, b.hi) == tian_pearl_pns_bounds(fam)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_true_value_inside_bounds(seed):
    rng = random.Random(seed)
    m = random_model(rng, max_vars=3)
    if len(m.variables) < 2:
        return
    fam = interventional_family(m)
    alphas = [DO0, DO1]
    q = CfQuery(((DO1, {m.variables[-1]: 1}), (DO0, {m.variables[-1]: 0})))
    b = bound_query(m.variables, fam, q)
    truth = counterfactual_joint(m, q.conjuncts)
    assert b.lo <= truth <= b.hi
    v = check_collapse(m.variables, fam, alphas)
    if v.collapsed:
        t = project_l3(m, alphas)
        assert t.prob(q.conjuncts) == b.lo == b.hi


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6))
def test_y_good_families_do_not_collapse(seed):
    m = random_y_good(random.Random(seed))
    fam = interventional_family(m.to_scm())
    assert not check_collapse(m.order, fam).collapsed
