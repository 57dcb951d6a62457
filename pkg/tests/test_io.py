import json
import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from causalhier import io
from causalhier.bounds import CfQuery, pns_query
from causalhier.catalog import example1, figure2_model
from causalhier.causation import check_y_good, probabilities_of_causation
from causalhier.errors import ValidationError
from causalhier.hierarchy import TwoVarFamily, interventional_family, project_l3
from causalhier.scm import EMPTY, Intervention, observational
from causalhier.standard_form import canonicalize
from causalhier.verify import TestConfig as Config, leaf, simulate_verification, y_goodness_hypothesis

from generators import random_feasible_2ve, random_model, random_y_good


def roundtrip(obj):
    return json.loads(io.dumps(obj))


def test_model_file_shape():
    obj = io.model_to_json(example1())
    assert obj["exo"] == [{"name": "U1", "range": 2}, {"name": "U2", "range": 2}]
    assert obj["units"][0] == {"p": "1/4", "assign": {"U1": 0, "U2": 0}}
    assert {"parents": {"X": 0}, "exo": {"U2": 1}, "value": 0} in obj["mechanisms"]["Y"]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_model_round_trip(seed):
    m = random_model(random.Random(seed))
    assert io.model_from_json(roundtrip(io.model_to_json(m))) == m


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_level_tables_round_trip(seed):
    m = random_model(random.Random(seed))
    t1 = observational(m)
    assert io.dist_from_json(roundtrip(io.dist_to_json(t1))) == t1
    fam = interventional_family(m)
    assert io.family_from_json(roundtrip(io.family_to_json(fam))) == fam
    t3 = project_l3(m)
    assert io.l3_from_json(roundtrip(io.l3_to_json(t3))) == t3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_standard_form_round_trip(seed):
    sf = random_y_good(random.Random(seed))
    assert io.standard_form_from_json(roundtrip(io.standard_form_to_json(sf))) == sf


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_two_var_round_trip(seed):
    fam = random_feasible_2ve(random.Random(seed))
    assert io.two_var_from_json(roundtrip(io.two_var_to_json(fam))) == fam
    assert io.two_var_from_json(roundtrip(io.family_to_json(fam.as_family()))) == fam


def test_standard_form_shape():
    obj = io.standard_form_to_json(canonicalize(figure2_model()))
    assert obj == {
        "order": ["X", "Y"],
        "atoms": [
            {"p": "1/2", "responses": {"X": {"": 0}, "Y": {"0": 0, "1": 0}}},
            {"p": "1/2", "responses": {"X": {"": 0}, "Y": {"0": 1, "1": 1}}},
        ],
    }


def test_l3_keys():
    t = project_l3(figure2_model(), [Intervention.of(X=1), Intervention.of(X=0)])
    assert io.l3_to_json(t)["cells"] == {"10|00": "1/2", "11|01": "1/2"}


def test_query_round_trip():
    fam = interventional_family(example1())
    q = CfQuery(pns_query("X", "Y").conjuncts, condition=((EMPTY, {"X": 1}),))
    obj = roundtrip(io.query_to_json(q, fam))
    assert obj["maximize"]["conjuncts"][0] == {"do": {"X": 1}, "outcome": {"Y": 1}}
    q2, fam2 = io.query_from_json(obj)
    assert q2 == q and fam2 == fam


def test_causation_undefined_marker():
    r = probabilities_of_causation(figure2_model(), "X", "Y")
    obj = roundtrip(io.causation_to_json(r))
    assert obj["pn"] == "undefined"
    assert io.causation_from_json(obj) == r


def test_goodness_round_trip():
    fam = TwoVarFamily.from_numbers(["1/2", "1/2", 0, 0], ["1/2", "1/2", 0, 0], [0, 0, "1/2", "1/2"])
    r = check_y_good(fam)
    obj = roundtrip(io.goodness_to_json(r))
    assert obj["margins"]["exp_minus_obs"] == "1/2"
    assert io.goodness_from_json(obj) == r


def test_hypothesis_round_trip():
    h = y_goodness_hypothesis()
    assert io.hypothesis_from_json(roundtrip(io.hypothesis_to_json(h))) == h
    obj = {"all": [{"do": {}, "event": {"X": 0, "Y": 0}, "gt": "1/4"}]}
    h2 = io.hypothesis_from_json(obj)
    assert io.hypothesis_to_json(h2) == obj


def test_sim_report_round_trip():
    r = simulate_verification(figure2_model(), leaf({}, {"Y": 1}, F(1, 4)), Config(F(1, 20), (50,), 7))
    obj = roundtrip(io.sim_report_to_json(r))
    assert obj["rows"][0]["fired"] == r.rows[0].fired
    assert io.sim_report_from_json(obj) == r


def test_floats_rejected():
    obj = io.model_to_json(example1())
    obj["units"][0]["p"] = 0.25
    with pytest.raises(ValidationError, match="rational"):
        io.model_from_json(obj)


def test_bad_cell_key():
    with pytest.raises(ValidationError, match="bad cell key"):
        io.dist_from_json({"scope": ["X"], "cells": {"01": "1"}})


def test_partial_rows_collected():
    obj = io.model_to_json(example1())
    obj["mechanisms"]["Y"][0]["parents"] = {}
    problems = []
    io.model_from_json(obj, problems)
    assert len(problems) == 1
    with pytest.raises(ValidationError):
        io.model_from_json(obj)
