import random
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from causalhier.errors import InfeasibleError
from causalhier.lp import LpProblem, UnboundedError, lp_solve


def test_simple_max():
    res = lp_solve(LpProblem([[1, 1]], [1], [1, 0]), "max")
    assert res.value == 1
    assert res.x == [1, 0]


def test_simple_min_with_two_rows():
    # x1 + x2 + x3 = 1, x1 - x2 = 0 ; minimize x3
    res = lp_solve(LpProblem([[1, 1, 1], [1, -1, 0]], [1, 0], [0, 0, 1]))
    assert res.value == 0
    assert res.x[0] == res.x[1] == F(1, 2)


def test_exact_fraction_result():
    res = lp_solve(LpProblem([[3, 1]], [1], [1, 1]), "max")
    assert res.value == 1
    res = lp_solve(LpProblem([[3, 1]], [1], [1, 1]), "min")
    assert res.value == F(1, 3)
    assert isinstance(res.value, F)


def test_negative_rhs_is_handled():
    res = lp_solve(LpProblem([[-1, -1]], [-1], [1, 2]))
    assert res.value == 1


def test_infeasible_certificate():
    prob = LpProblem([[1], [1]], [F(1, 2), F(1, 3)], [0], ["first", "second"])
    with pytest.raises(InfeasibleError) as exc:
        lp_solve(prob)
    cert = exc.value.certificate
    y = [cert.get("first", 0), cert.get("second", 0)]
    # A^T y <= 0 and b^T y > 0
    assert y[0] + y[1] <= 0
    assert F(1, 2) * y[0] + F(1, 3) * y[1] > 0


def test_redundant_rows():
    res = lp_solve(LpProblem([[1, 1], [1, 1], [2, 2]], [1, 1, 2], [1, 0]), "max")
    assert res.value == 1


def test_unbounded():
    with pytest.raises(UnboundedError):
        lp_solve(LpProblem([[1, -1]], [0], [1, 0]), "max")


def test_shape_checks():
    with pytest.raises(ValueError):
        LpProblem([[1, 1]], [1, 2], [0, 0])
    with pytest.raises(ValueError):
        lp_solve(LpProblem([[1]], [1], [1]), "sideways")


def _random_problem(rng, feasible):
    m, n = rng.randint(1, 4), rng.randint(1, 6)
    A = [[F(rng.randint(-3, 3)) for _ in range(n)] for _ in range(m)]
    if feasible:
        x = [F(rng.randint(0, 4), rng.randint(1, 4)) for _ in range(n)]
        b = [sum(a * v for a, v in zip(row, x)) for row in A]
    else:
        b = [F(rng.randint(-4, 4)) for _ in range(m)]
    # a total-mass row keeps the problem bounded
    A.append([F(1)] * n)
    b.append(F(rng.randint(1, 3)) if not feasible else sum(x))
    c = [F(rng.randint(-3, 3)) for _ in range(n)]
    return LpProblem(A, b, c)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_random_lp_certificates(seed, feasible):
    prob = _random_problem(random.Random(seed), feasible)
    try:
        lo = lp_solve(prob, "min")
    except InfeasibleError as exc:
        assert not feasible
        y = [exc.certificate.get(label, F(0)) for label in prob.row_labels]
        for j in range(prob.n):
            assert sum(y[i] * prob.A[i][j] for i in range(len(y))) <= 0
        assert sum(yi * bi for yi, bi in zip(y, prob.b)) > 0
        return
    hi = lp_solve(prob, "max")
    for res in (lo, hi):
        assert all(v >= 0 for v in res.x)
        for row, bi in zip(prob.A, prob.b):
            assert sum(a * v for a, v in zip(row, res.x)) == bi
        assert sum(c * v for c, v in zip(prob.c, res.x)) == res.value
    assert lo.value <= hi.value
