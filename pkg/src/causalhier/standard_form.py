"""Response-type (standard form) models over a fixed variable order.

An atom fixes, for every variable, its value at every valuation of its
predecessors.  Responses of variable ``i`` are stored as a tuple of length
``2**i`` indexed by the predecessor bitstring read as a binary number.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import ModelError, PreconditionError
from .scm import (
    DistTable,
    Intervention,
    ScmModel,
    Unit,
    Valuation,
    _solve,
    all_valuations,
    bits,
    require_valid,
)

Atom = tuple[tuple[int, ...], ...]

DEFAULT_CAP = 4


def atom_count(n: int) -> int:
    return 2 ** (2**n - 1)


def _pred_index(values: Sequence[int]) -> int:
    idx = 0
    for v in values:
        idx = (idx << 1) | v
    return idx


def enumerate_atoms(order: Sequence[str], cap: int = DEFAULT_CAP) -> list[Atom]:
    """All response atoms for ``order`` in canonical (lexicographic) order."""
    n = len(order)
    if n < 1:
        raise ModelError("need at least one variable")
    if n > cap:
        raise ModelError(
            f"{n} variables exceed the enumeration cap {cap}: there would be "
            f"2^(2^{n}-1) = {atom_count(n)} atoms"
        )
    per_var = [list(itertools.product((0, 1), repeat=2**i)) for i in range(n)]
    return [tuple(a) for a in itertools.product(*per_var)]


def solve_atom(atom: Atom, fixed: Sequence[int | None]) -> Valuation:
    vals: list[int] = []
    idx = 0
    for resp, f in zip(atom, fixed):
        v = resp[idx] if f is None else f
        vals.append(v)
        idx = (idx << 1) | v
    return tuple(vals)


def atom_from_responses(order: Sequence[str], responses: Mapping[str, Mapping[str, int]]) -> Atom:
    out = []
    for i, v in enumerate(order):
        table = responses[v]
        out.append(tuple(int(table[bits(p)]) for p in all_valuations(i)))
    return tuple(out)


def atom_responses(order: Sequence[str], atom: Atom) -> dict[str, dict[str, int]]:
    return {v: {bits(p): atom[i][k] for k, p in enumerate(all_valuations(i))} for i, v in enumerate(order)}


@dataclass(frozen=True)
class StandardFormModel:
    order: tuple[str, ...]
    atoms: Mapping[Atom, Fraction]

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(self.order))
        n = len(self.order)
        cleaned: dict[Atom, Fraction] = {}
        for atom, p in self.atoms.items():
            if len(atom) != n or any(len(r) != 2**i for i, r in enumerate(atom)):
                raise ModelError(f"atom {atom} does not fit order {self.order}")
            p = Fraction(p)
            if p < 0:
                raise ModelError(f"negative atom mass {p}")
            if p:
                cleaned[atom] = cleaned.get(atom, Fraction(0)) + p
        if sum(cleaned.values(), Fraction(0)) != 1:
            raise ModelError("atom masses must sum to 1")
        object.__setattr__(self, "atoms", dict(sorted(cleaned.items())))

    def __hash__(self):
        return hash((self.order, tuple(self.atoms.items())))

    def mass(self, atom: Atom) -> Fraction:
        return self.atoms.get(atom, Fraction(0))

    def outcome(self, atom: Atom, intervention: Intervention) -> Valuation:
        return solve_atom(atom, intervention.vector(self.order))

    def to_scm(self) -> ScmModel:
        """Explicit encoding: one exogenous selector ``U`` ranging over the support atoms."""
        support = list(self.atoms)
        parents = {v: self.order[:i] for i, v in enumerate(self.order)}
        mechanisms = {}
        for i, v in enumerate(self.order):
            mechanisms[v] = {
                (p, (u,)): atom[i][_pred_index(p)] for p in all_valuations(i) for u, atom in enumerate(support)
            }
        units = tuple(Unit((u,), self.atoms[a]) for u, a in enumerate(support))
        return ScmModel(
            self.order, parents, (("U", len(support)),), {v: ("U",) for v in self.order}, units, mechanisms
        )


def canonicalize(model: ScmModel) -> StandardFormModel:
    """Push the unit distribution forward to response types over the model's order."""
    require_valid(model)
    order = model.variables
    n = len(order)
    probes = []
    for i in range(n):
        rows = []
        for p in all_valuations(i):
            rows.append(tuple(p) + (None,) * (n - i))
        probes.append(rows)
    atoms: dict[Atom, Fraction] = {}
    for unit in model.units:
        atom = tuple(
            tuple(_solve(model, fixed, unit.values)[i] for fixed in probes[i]) for i in range(n)
        )
        atoms[atom] = atoms.get(atom, Fraction(0)) + unit.p
    return StandardFormModel(order, atoms)


def _constant_atom(values: Sequence[int]) -> Atom:
    return tuple((v,) * (2**i) for i, v in enumerate(values))


def acausal_model(obs: DistTable, order: Sequence[str] | None = None) -> StandardFormModel:
    """Every variable ignores its predecessors; each outcome's mass sits on its constant atom."""
    order = tuple(order or obs.scope)
    if set(order) != set(obs.scope):
        raise ModelError("order and table scope differ")
    if not obs.is_valid():
        raise ModelError("observational table is not a probability distribution")
    table = obs.marginal(order)
    return StandardFormModel(order, {_constant_atom(k): p for k, p in table.cells.items()})


def monotonic_example(order: Sequence[str], cap: int = DEFAULT_CAP) -> StandardFormModel:
    """Uniform over atoms in which every non-first variable answers 1 off the all-zero predecessor valuation."""
    order = tuple(order)
    n = len(order)
    if n < 1:
        raise ModelError("need at least one variable")
    if n > cap:
        raise ModelError(f"{n} variables exceed the cap {cap}")
    mass = Fraction(1, 2**n)
    atoms = {}
    for free in itertools.product((0, 1), repeat=n):
        atom = [(free[0],)]
        for i in range(1, n):
            atom.append((free[i],) + (1,) * (2**i - 1))
        atoms[tuple(atom)] = mass
    return StandardFormModel(order, atoms)


# (coefficient, intervention, event) with the event asserted under that intervention
Term = tuple[int, Intervention, dict[str, int]]


def monotonic_reduce(query: Sequence[tuple[str, Intervention, int]], order: Sequence[str]) -> list[Term]:
    """Rewrite a zero-baseline response query as a signed sum of interventional probabilities.

    ``query`` lists ``(V_i, do(V_1..V_{i-1} := 0), v_i)`` for an initial segment
    ``V_1..V_k`` of ``order``.  With ``M`` the positions answering 1, peel off
    the event "every position outside M is 0" and subtract the same event
    restricted to each proper subset of M, recursing.  The base event is an
    interventional one: under ``do(V_M := 0)`` every variable outside M sees an
    all-zero past exactly when all earlier outside-M variables are 0.
    """
    order = tuple(order)
    k = len(query)
    if k == 0 or k > len(order):
        raise ModelError("query must cover a non-empty initial segment of the order")
    values = []
    for i, (name, alpha, value) in enumerate(query):
        if name != order[i]:
            raise ModelError(f"query position {i} must be {order[i]}, got {name}")
        if alpha != Intervention.of({p: 0 for p in order[:i]}):
            raise ModelError(f"query position {i} must intervene its predecessors to zero")
        if value not in (0, 1):
            raise ModelError("query values must be 0 or 1")
        values.append(value)
    segment = order[:k]
    ones = frozenset(i for i, v in enumerate(values) if v)

    memo: dict[frozenset, dict[frozenset, int]] = {}

    def expand(m: frozenset) -> dict[frozenset, int]:
        # coefficients over base events g(S) = P(positions outside S are 0 under do(V_S := 0))
        if m in memo:
            return memo[m]
        coeffs = {m: 1}
        for size in range(len(m)):
            for sub in itertools.combinations(sorted(m), size):
                for s, c in expand(frozenset(sub)).items():
                    coeffs[s] = coeffs.get(s, 0) - c
        memo[m] = {s: c for s, c in coeffs.items() if c}
        return memo[m]

    terms = []
    for s, c in sorted(expand(ones).items(), key=lambda kv: (len(kv[0]), sorted(kv[0]))):
        alpha = Intervention.of({segment[i]: 0 for i in s})
        event = {segment[i]: 0 for i in range(k) if i not in s}
        terms.append((c, alpha, event))
    return terms


def evaluate_terms(terms: Sequence[Term], family) -> Fraction:
    """Evaluate reduced terms against an :class:`InterventionalFamily`."""
    total = Fraction(0)
    for c, alpha, event in terms:
        total += c * family.entries[alpha].event(event)
    return total


def split_l1(obs: DistTable, order: Sequence[str] | None = None) -> tuple[StandardFormModel, StandardFormModel]:
    """Two models with the same observational law but different do(X := x†) laws of Y.

    X and Y are the first two variables of ``order``.  The first model is the
    acausal one; the second moves the mass on the observed cell (x*, y*) to
    atoms answering y† when X is set to x†.
    """
    order = tuple(order or obs.scope)
    if len(order) < 2:
        raise PreconditionError("need at least two variables")
    nu = acausal_model(obs, order)
    xy = obs.marginal(order[:2])
    x_star, y_star = next(k for k, p in xy.cells.items() if p > 0)
    x_dag, y_dag = 1 - x_star, 1 - y_star
    moved: dict[Atom, Fraction] = {}
    for atom, p in nu.atoms.items():
        if atom[0] == (x_star,) and atom[1][x_star] == y_star:
            y_resp = list(atom[1])
            y_resp[x_dag] = y_dag
            atom = (atom[0], tuple(y_resp)) + atom[2:]
        moved[atom] = moved.get(atom, Fraction(0)) + p
    return nu, StandardFormModel(order, moved)
