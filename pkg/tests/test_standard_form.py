import itertools
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from causalhier.catalog import example1, figure2_model
from causalhier.errors import ModelError, PreconditionError
from causalhier.hierarchy import interventional_family, project_l3
from causalhier.scm import DistTable, Intervention, all_interventions, counterfactual_joint, interventional, observational
from causalhier.standard_form import (
    StandardFormModel,
    acausal_model,
    atom_count,
    atom_from_responses,
    atom_responses,
    canonicalize,
    enumerate_atoms,
    evaluate_terms,
    monotonic_example,
    monotonic_reduce,
    solve_atom,
    split_l1,
)

from generators import random_model, random_observational

Q = F(1, 4)


def test_atom_counts():
    assert [atom_count(n) for n in (1, 2, 3, 4)] == [2, 8, 128, 32768]
    assert len(enumerate_atoms(["X", "Y"])) == 8
    assert enumerate_atoms(["X"]) == [((0,),), ((1,),)]


def test_atom_cap_names_blowup():
    with pytest.raises(ModelError, match=r"2\^\(2\^5-1\) = 2147483648 atoms"):
        enumerate_atoms(["A", "B", "C", "D", "E"])


def test_solve_atom_reads_predecessor_bits():
    atom = ((1,), (0, 1), (0, 0, 0, 1))  # Y copies X, Z = X and Y
    assert solve_atom(atom, (None, None, None)) == (1, 1, 1)
    assert solve_atom(atom, (None, 0, None)) == (1, 0, 0)
    assert solve_atom(atom, (0, None, None)) == (0, 0, 0)


def test_responses_round_trip():
    atom = ((1,), (0, 1), (1, 0, 0, 1))
    order = ("X", "Y", "Z")
    resp = atom_responses(order, atom)
    assert resp["X"] == {"": 1}
    assert resp["Z"] == {"00": 1, "01": 0, "10": 0, "11": 1}
    assert atom_from_responses(order, resp) == atom


def test_canonicalize_example1():
    sf = canonicalize(example1())
    assert sf.atoms == {
        ((0,), (0, 1)): Q,
        ((0,), (1, 0)): Q,
        ((1,), (0, 1)): Q,
        ((1,), (1, 0)): Q,
    }


def test_canonicalize_figure2():
    sf = canonicalize(figure2_model())
    assert sf.atoms == {((0,), (0, 0)): F(1, 2), ((0,), (1, 1)): F(1, 2)}


def test_standard_form_mass_check():
    with pytest.raises(ModelError):
        StandardFormModel(("X",), {((0,),): F(1, 2)})


def test_acausal_model_has_no_effects():
    obs = DistTable(("X", "Y"), {(0, 0): F(1, 3), (1, 1): F(2, 3)})
    m = acausal_model(obs).to_scm()
    assert observational(m) == obs
    for alpha in all_interventions(("X", "Y")):
        t = interventional(m, alpha)
        for v in ("X", "Y"):
            if v not in alpha.variables:
                assert t.marginal([v]) == obs.marginal([v])


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_form_preserves_counterfactuals(seed):
    m = random_model(random.Random(seed))
    assert project_l3(canonicalize(m).to_scm()) == project_l3(m)


def test_monotonic_example_structure():
    m = monotonic_example(["X", "Y"])
    assert len(m.atoms) == 4
    for atom in m.atoms:
        assert atom[1][1] == 1


def _atom_query(order, values):
    return [(order[i], Intervention.of({p: 0 for p in order[:i]}), v) for i, v in enumerate(values)]


@pytest.mark.parametrize("n", [2, 3])
def test_monotonic_reduce_matches_joint(n):
    order = ("X", "Y", "Z")[:n]
    m = monotonic_example(order)
    scm = m.to_scm()
    fam = interventional_family(scm)
    for k in range(1, n + 1):
        for values in itertools.product((0, 1), repeat=k):
            query = _atom_query(order, values)
            direct = counterfactual_joint(scm, [(a, {v: val}) for v, a, val in query])
            assert evaluate_terms(monotonic_reduce(query, order), fam) == direct


def test_monotonic_reduce_terms_two_vars():
    terms = monotonic_reduce(_atom_query(("X", "Y"), (1, 0)), ("X", "Y"))
    # P(X = 1, Y_{X=0} = 0) = P_{do(X=0)}(Y=0) - P(X=0, Y=0)
    as_tuples = sorted((c, a.key, tuple(sorted(e.items()))) for c, a, e in terms)
    assert as_tuples == [(-1, "", (("X", 0), ("Y", 0))), (1, "X=0", (("Y", 0),))]


def test_monotonic_reduce_rejects_bad_query():
    with pytest.raises(ModelError):
        monotonic_reduce([("Y", Intervention.of(), 1)], ("X", "Y"))


def test_split_l1_example():
    obs = DistTable(("X", "Y"), {(0, 0): F(1, 2), (1, 1): F(1, 2)})
    nu, nu2 = split_l1(obs)
    assert observational(nu.to_scm()) == observational(nu2.to_scm()) == obs
    do1 = Intervention.of(X=1)
    assert interventional(nu.to_scm(), do1).event({"Y": 1}) == F(1, 2)
    assert interventional(nu2.to_scm(), do1).event({"Y": 1}) == 1


def test_split_l1_needs_two_variables():
    with pytest.raises(PreconditionError):
        split_l1(DistTable(("X",), {(1,): 1}))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_split_l1_property(seed):
    obs = random_observational(random.Random(seed))
    nu, nu2 = split_l1(obs)
    a, b = nu.to_scm(), nu2.to_scm()
    assert observational(a) == observational(b) == obs.marginal(nu.order)
    x_star, y_star = next(k for k, p in obs.marginal(obs.scope[:2]).cells.items() if p)
    alpha = Intervention.of({obs.scope[0]: 1 - x_star})
    y_dag = {obs.scope[1]: 1 - y_star}
    assert interventional(b, alpha).event(y_dag) - interventional(a, alpha).event(y_dag) > 0
