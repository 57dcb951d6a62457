"""Exact two-phase simplex over the rationals (Bland's rule).

Problems are in equality form ``A x = b, x >= 0``.  Arithmetic runs on
``gmpy2.mpq`` internally; every value crossing the module boundary is a
:class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from gmpy2 import mpq

from .errors import InfeasibleError


@dataclass
class LpProblem:
    A: list[list[Fraction]]
    b: list[Fraction]
    c: list[Fraction]
    row_labels: list[str] = field(default_factory=list)

    def __post_init__(self):
        if len(self.A) != len(self.b):
            raise ValueError("A and b disagree on the number of rows")
        if any(len(row) != len(self.c) for row in self.A):
            raise ValueError("every row of A needs one entry per variable")
        if not self.row_labels:
            self.row_labels = [f"row{i}" for i in range(len(self.b))]

    @property
    def n(self) -> int:
        return len(self.c)


@dataclass
class LpResult:
    value: Fraction
    x: list[Fraction]
    basis: list[int]
    pivots: int


class UnboundedError(ArithmeticError):
    pass


def _q(v) -> mpq:
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


def _f(v: mpq) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


class _Tableau:
    def __init__(self, rows: list[list[mpq]], rhs: list[mpq], basis: list[int]):
        self.T = rows
        self.rhs = rhs
        self.basis = basis
        self.pivots = 0

    def pivot(self, r: int, j: int) -> None:
        T, rhs = self.T, self.rhs
        prow = T[r]
        piv = prow[j]
        if piv != 1:
            inv = 1 / piv
            T[r] = prow = [v * inv for v in prow]
            rhs[r] = rhs[r] * inv
        pr_rhs = rhs[r]
        nz = [k for k, v in enumerate(prow) if v]
        for i, row in enumerate(T):
            if i == r:
                continue
            f = row[j]
            if f:
                for k in nz:
                    row[k] -= f * prow[k]
                rhs[i] -= f * pr_rhs
        self.basis[r] = j
        self.pivots += 1

    def reduced_costs(self, c: Sequence[mpq]) -> list[mpq]:
        d = list(c)
        for i, bj in enumerate(self.basis):
            cb = c[bj]
            if cb:
                for k, v in enumerate(self.T[i]):
                    if v:
                        d[k] -= cb * v
        return d

    def run(self, c: Sequence[mpq], allowed: int) -> None:
        """Minimize ``c`` over the first ``allowed`` columns with Bland's rule."""
        d = self.reduced_costs(c)
        T, rhs, basis = self.T, self.rhs, self.basis
        while True:
            j = next((k for k in range(allowed) if d[k] < 0), None)
            if j is None:
                return
            best = None
            for i, row in enumerate(T):
                a = row[j]
                if a > 0:
                    ratio = rhs[i] / a
                    if best is None or ratio < best[0] or (ratio == best[0] and basis[i] < basis[best[1]]):
                        best = (ratio, i)
            if best is None:
                raise UnboundedError("objective is unbounded")
            r = best[1]
            self.pivot(r, j)
            prow = T[r]
            dj = d[j]
            if dj:
                for k, v in enumerate(prow):
                    if v:
                        d[k] -= dj * v


def lp_solve(problem: LpProblem, sense: str = "min") -> LpResult:
    """Exact optimum and an optimal basic feasible solution.

    Raises :class:`InfeasibleError` carrying a Farkas certificate keyed by
    row label when ``A x = b, x >= 0`` has no solution.
    """
    if sense not in ("min", "max"):
        raise ValueError("sense must be 'min' or 'max'")
    n = problem.n
    m = len(problem.b)
    signs = []
    rows, rhs = [], []
    for row, bi in zip(problem.A, problem.b):
        s = -1 if bi < 0 else 1
        signs.append(s)
        rows.append([_q(v) * s for v in row] + [mpq(0)] * m)
        rhs.append(_q(bi) * s)
    for i in range(m):
        rows[i][n + i] = mpq(1)
    tab = _Tableau(rows, rhs, [n + i for i in range(m)])

    phase1 = [mpq(0)] * n + [mpq(1)] * m
    tab.run(phase1, n + m)
    infeas = sum((tab.rhs[i] for i, bj in enumerate(tab.basis) if bj >= n), mpq(0))
    if infeas > 0:
        d = tab.reduced_costs(phase1)
        cert = {}
        for i in range(m):
            y = (1 - d[n + i]) * signs[i]
            if y:
                cert[problem.row_labels[i]] = _f(y)
        raise InfeasibleError(
            "constraints are infeasible", certificate=cert, violated=sorted(cert, key=problem.row_labels.index)
        )

    # drive zero-level artificials out of the basis; rows that cannot pivot are redundant
    i = 0
    while i < len(tab.basis):
        if tab.basis[i] >= n:
            j = next((k for k in range(n) if tab.T[i][k]), None)
            if j is None:
                del tab.T[i], tab.rhs[i], tab.basis[i]
                continue
            tab.pivot(i, j)
        i += 1
    for row in tab.T:
        del row[n:]

    sign = 1 if sense == "min" else -1
    cost = [_q(v) * sign for v in problem.c]
    tab.run(cost, n)
    x = [mpq(0)] * n
    for i, bj in enumerate(tab.basis):
        x[bj] = tab.rhs[i]
    value = sum((_q(cv) * xv for cv, xv in zip(problem.c, x) if xv), mpq(0))
    return LpResult(_f(value), [_f(v) for v in x], list(tab.basis), tab.pivots)
