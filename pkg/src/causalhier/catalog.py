"""Small named models used in docs, tests and the CLI."""

from __future__ import annotations

from fractions import Fraction

from .scm import ScmModel, make_model

HALF = Fraction(1, 2)
QUARTER = Fraction(1, 4)


def example1() -> ScmModel:
    """Two fair coins; X copies the first, Y agrees with X iff the second is 1."""
    return make_model(
        ["X", "Y"],
        {"Y": ["X"]},
        [("U1", 2), ("U2", 2)],
        {"X": ["U1"], "Y": ["U2"]},
        [((u1, u2), QUARTER) for u1 in (0, 1) for u2 in (0, 1)],
        {"X": lambda u1: u1, "Y": lambda x, u: u * x + (1 - u) * (1 - x)},
    )


def figure2_model() -> ScmModel:
    """X is always 0; Y ignores X and equals 1 for unit 0, 0 for unit 1."""
    return make_model(
        ["X", "Y"],
        {"Y": ["X"]},
        [("U", 2)],
        {"X": ["U"], "Y": ["U"]},
        [((0,), HALF), ((1,), HALF)],
        {"X": lambda u: 0, "Y": lambda x, u: 1 - u},
    )


def deterministic_model() -> ScmModel:
    """One unit: X = 1, Z = X, Y = 1 - Z."""
    return make_model(
        ["X", "Z", "Y"],
        {"Z": ["X"], "Y": ["Z"]},
        [("U", 1)],
        {},
        [((0,), 1)],
        {"X": lambda: 1, "Z": lambda x: x, "Y": lambda z: 1 - z},
    )


def chain3_model() -> ScmModel:
    """X -> Z -> Y with noisy mechanisms; its (X, Y) summary is Y-good."""
    units = []
    probs = {0: Fraction(1, 6), 1: Fraction(1, 3), 2: Fraction(1, 4), 3: Fraction(1, 4)}
    for u, p in probs.items():
        units.append(((u,), p))
    return make_model(
        ["X", "Z", "Y"],
        {"Z": ["X"], "Y": ["Z"]},
        [("U", 4)],
        {"X": ["U"], "Z": ["U"], "Y": ["U"]},
        units,
        {
            "X": lambda u: 1 if u == 3 else 0,
            "Z": lambda x, u: x if u in (0, 3) else 1 - x,
            "Y": lambda z, u: z if u in (0, 2) else 1,
        },
    )
