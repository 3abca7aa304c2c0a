"""Small economies with known equilibria.

Every ground truth here is re-derived in the test suite (finite ones by
enumeration, continuous ones by a dense grid), never trusted as a constant.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .economy import (
    BoxSpace, Economy, FiniteSpace, FormulaPayoff, Shared, TablePayoff, Unconstrained,
)


@dataclass
class GroundTruth:
    description: str
    method: str
    equilibria: list | None = None          # explicit set for finite economies
    contains: Callable | None = field(default=None, repr=False)


@dataclass
class NamedEconomy:
    name: str
    economy: Economy
    truth: GroundTruth


def _bigger_number_first(M):
    # theta_1((x1, x2), y1): 1 if y1 > x2, 1/2 if equal, 0 otherwise
    n = np.arange(M + 1)
    x2 = n[None, :, None]
    y1 = n[None, None, :]
    vals = np.where(y1 > x2, 1.0, np.where(y1 == x2, 0.5, 0.0))
    return np.broadcast_to(vals, (M + 1, M + 1, M + 1)).copy()


def bigger_number_game(M: int = 9) -> NamedEconomy:
    """Both players name a number in {0..M}; the larger number wins.

    Player 2's payoff is built by the composition
    theta_2((x1, x2), y2) = -theta_1((x1, y2), x1), so its values are
    {0, -1/2, -1} rather than {1, 1/2, 0}; the ordinal ranking is the same.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    first = _bigger_number_first(M)
    k = np.arange(M + 1)
    # second[x1, x2, y2] = -first[x1, y2, x1]
    second = -first[k[:, None, None], k[None, None, :], k[:, None, None]]
    second = np.broadcast_to(second, (M + 1, M + 1, M + 1)).copy()
    space = FiniteSpace.of([str(v) for v in range(M + 1)])
    econ = Economy((space, space), Unconstrained(), (TablePayoff(first), TablePayoff(second)))
    top = str(M)
    return NamedEconomy(f"bigger_number_game:{M}", econ,
                        GroundTruth("only (M, M) survives truncation at M", "enumeration",
                                    [(top, top)]))


_PD = {("C", "C"): 3.0, ("C", "D"): 0.0, ("D", "C"): 5.0, ("D", "D"): 1.0}


def _two_player_tables(labels, own_vs_other):
    """Tables where theta_i(x, y_i) = own_vs_other[y_i, x_opponent]."""
    n = len(labels)
    first = np.zeros((n, n, n))
    second = np.zeros((n, n, n))
    for a, l1 in enumerate(labels):
        for b, l2 in enumerate(labels):
            for c, dev in enumerate(labels):
                first[a, b, c] = own_vs_other(dev, l2, 1)
                second[a, b, c] = own_vs_other(dev, l1, 2)
    return TablePayoff(first), TablePayoff(second)


def prisoners_dilemma() -> NamedEconomy:
    space = FiniteSpace.of(["C", "D"])
    payoffs = _two_player_tables(space.labels, lambda dev, other, _: _PD[(dev, other)])
    econ = Economy((space, space), Unconstrained(), payoffs)
    return NamedEconomy("prisoners_dilemma", econ,
                        GroundTruth("mutual defection", "enumeration", [("D", "D")]))


def matching_pennies() -> NamedEconomy:
    space = FiniteSpace.of(["H", "T"])

    def pay(dev, other, player):
        match = 1.0 if dev == other else -1.0
        return match if player == 1 else -match

    econ = Economy((space, space), Unconstrained(), _two_player_tables(space.labels, pay))
    return NamedEconomy("matching_pennies", econ,
                        GroundTruth("no pure equilibrium", "enumeration", []))


def shared_link_game() -> NamedEconomy:
    """Two users share a unit-capacity link: x1 + x2 <= 1 on [0, 1]^2.

    Each wants y * (2 - y - other); every split (a, 1 - a) is an equilibrium.
    """
    box = BoxSpace.of([0.0], [1.0])
    econ = Economy(
        (box, box),
        Shared.of("x[1][0] + x[2][0] - 1"),
        (FormulaPayoff.of("y[0]*(2 - y[0] - x[2][0])"),
         FormulaPayoff.of("y[0]*(2 - y[0] - x[1][0])")),
    )
    return NamedEconomy("shared_link_game", econ, GroundTruth(
        "{(a, 1 - a) : a in [0, 1]}", "grid",
        contains=lambda x, tol=1e-3: abs(x[0][0] + x[1][0] - 1.0) <= tol))


def locked_pair_game() -> NamedEconomy:
    """Both players pick 0 or 1 and must agree: C = {(0, 0), (1, 1)}."""
    space = FiniteSpace.of(["0", "1"])
    econ = Economy(
        (space, space),
        Shared.of("abs(x[1][0] - x[2][0])"),
        (FormulaPayoff.of("y[0] + x[2][0]"), FormulaPayoff.of("y[0] + x[1][0]")),
    )
    return NamedEconomy("locked_pair_game", econ, GroundTruth(
        "both agreeing profiles; tilde-V is 2 at (0, 0) and 0 at (1, 1)", "enumeration",
        [("0", "0"), ("1", "1")]))


def single_player(name, formula, lower=0.0, upper=1.0, maximizers=(), description=""):
    econ = Economy((BoxSpace.of([lower], [upper]),), Unconstrained(),
                   (FormulaPayoff.of(formula),))
    best = list(maximizers)
    return NamedEconomy(name, econ, GroundTruth(
        description or f"maximizers {best}", "grid",
        contains=lambda x, tol=1e-3: any(abs(x[0][0] - m) <= tol for m in best)))


def concave_bump() -> NamedEconomy:
    return single_player("concave_bump", "y[0]*(1 - y[0])", maximizers=[0.5])


def linear_ramp() -> NamedEconomy:
    return single_player("linear_ramp", "2*y[0] + 1", maximizers=[1.0])


def convex_bump() -> NamedEconomy:
    return single_player("convex_bump", "pow(y[0] - 0.5, 2)", maximizers=[0.0, 1.0])


CORPUS = {
    "prisoners_dilemma": prisoners_dilemma,
    "matching_pennies": matching_pennies,
    "bigger_number_game": bigger_number_game,
    "shared_link_game": shared_link_game,
    "locked_pair_game": locked_pair_game,
    "concave_bump": concave_bump,
    "linear_ramp": linear_ramp,
    "convex_bump": convex_bump,
}


def get(name: str) -> NamedEconomy:
    """Look up a corpus entry; ``bigger_number_game:M`` selects the truncation."""
    base, _, arg = name.partition(":")
    if base not in CORPUS:
        raise KeyError(f"unknown corpus economy {name!r}; available: {', '.join(CORPUS)}")
    if arg:
        if base != "bigger_number_game":
            raise KeyError(f"{base} takes no parameter")
        return bigger_number_game(int(arg))
    return CORPUS[base]()
