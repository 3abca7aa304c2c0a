"""Marginal functions, best replies and direct equilibrium checks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import Config, DEFAULT
from .economy import (
    EmptySliceError, FinitePoints, Shared, TablePayoff, feasible_slice,
    in_slice, is_feasible, own_candidates_mask, payoff_batch, payoff_value,
)
from .search import dedup_points, grid_maximize

EQUILIBRIUM = "equilibrium"
NOT_EQUILIBRIUM = "not equilibrium"
INCONCLUSIVE = "inconclusive"


@dataclass
class BestReplySet:
    player: int
    points: list        # labels (finite) or coordinate tuples (box)
    value: float        # the marginal value phi_i(x)
    exact: bool
    converged: bool
    tol: float

    def __contains__(self, p):
        if self.exact or isinstance(p, str):
            return p in self.points
        return any(max(abs(a - b) for a, b in zip(p, q)) <= self.tol for q in self.points)


@dataclass
class OwnSearch:
    """Everything known about player i's maximization at x."""
    player: int
    exact: bool
    converged: bool
    best_value: float
    best_point: object
    labels: tuple = ()
    values: np.ndarray | None = None
    search: object = None

    def argmax(self, tol):
        if self.labels:
            return [l for l, v in zip(self.labels, self.values) if v >= self.best_value - tol]
        return [tuple(float(c) for c in p) for p in self.search.near_best(tol)]


def ties_tol(econ, i, cfg: Config) -> float:
    """Slack for argmax membership: zero for tables, tol_opt for formulas."""
    return 0.0 if isinstance(econ.payoffs[i - 1], TablePayoff) else cfg.tol_opt


def own_search(econ, i, x, cfg: Config = DEFAULT) -> OwnSearch:
    sl = feasible_slice(econ, i, x, cfg)
    if sl.empty:
        raise EmptySliceError(i, x)
    if isinstance(sl, FinitePoints):
        vals = payoff_batch(econ, i, x, sl.indices)
        k = int(np.argmax(vals))
        return OwnSearch(i, True, True, float(vals[k]), sl.labels[k], sl.labels, vals)

    accept = None
    if isinstance(econ.constraint, Shared):
        def accept(rows):
            return own_candidates_mask(econ, i, x, rows, cfg)
    inject = None
    if in_slice(econ, i, x, x[i - 1], cfg):
        inject = np.array([econ.coords(i, x[i - 1])], float)
    res = grid_maximize(lambda rows: payoff_batch(econ, i, x, rows),
                        sl.lower, sl.upper, cfg, inject=inject, accept=accept)
    if res is None:
        raise EmptySliceError(i, x)
    best = tuple(float(c) for c in res.best_point)
    return OwnSearch(i, False, res.converged, res.best_value, best, search=res)


def marginal_value(econ, i: int, x, cfg: Config = DEFAULT) -> float:
    """phi_i(x): the best payoff player i can reach inside X_i(x)."""
    return own_search(econ, i, x, cfg).best_value


def best_reply(econ, i: int, x, cfg: Config = DEFAULT) -> BestReplySet:
    """Phi_i(x), in label order (finite) or lexicographic order (box)."""
    s = own_search(econ, i, x, cfg)
    if s.exact:
        tol = ties_tol(econ, i, cfg)
        return BestReplySet(i, s.argmax(tol), s.best_value, True, True, tol)
    reps = dedup_points(s.search.near_best(cfg.tol_opt), cfg.tol_dedup)
    points = [tuple(float(c) for c in p) for p in reps]
    return BestReplySet(i, points, s.best_value, False, s.converged, cfg.tol_dedup)


def global_best_reply(econ, x, cfg: Config = DEFAULT) -> list:
    """Phi(x) kept in factored form, one BestReplySet per player."""
    return [best_reply(econ, i, x, cfg) for i in econ.players]


@dataclass
class PlayerCheck:
    player: int
    current: float | None
    best: float | None
    improvement: float | None
    witness: object
    exact: bool
    converged: bool


@dataclass
class EquilibriumReport:
    verdict: str
    point: tuple
    feasible: bool
    players: list
    tol_eq: float
    tol_opt: float

    @property
    def is_equilibrium(self) -> bool:
        return self.verdict == EQUILIBRIUM

    @property
    def worst(self) -> PlayerCheck | None:
        checks = [p for p in self.players if p.improvement is not None]
        return max(checks, key=lambda p: p.improvement) if checks else None


def is_nash_equilibrium(econ, x, tol_eq: float | None = None, cfg: Config = DEFAULT) -> EquilibriumReport:
    """Check every unilateral admissible deviation from x.

    An infeasible x is reported as not an equilibrium without a witness.
    On box spaces an apparent equilibrium whose inner maximization did not
    converge is reported as inconclusive.
    """
    tol_eq = cfg.tol_eq if tol_eq is None else tol_eq
    feasible = is_feasible(econ, x, cfg)
    checks = []
    for i in econ.players:
        try:
            s = own_search(econ, i, x, cfg)
        except EmptySliceError:
            if feasible:
                raise
            checks.append(PlayerCheck(i, None, None, None, None, True, True))
            continue
        current = payoff_value(econ, i, x, x[i - 1])
        checks.append(PlayerCheck(i, current, s.best_value, s.best_value - current,
                                  s.best_point, s.exact, s.converged))
    if not feasible or any(c.improvement is not None and c.improvement > tol_eq for c in checks):
        verdict = NOT_EQUILIBRIUM
    elif all(c.exact or c.converged for c in checks):
        verdict = EQUILIBRIUM
    else:
        verdict = INCONCLUSIVE
    return EquilibriumReport(verdict, x, feasible, checks, tol_eq, cfg.tol_opt)


def is_phi_fixed_point(econ, x, tol: float | None = None, cfg: Config = DEFAULT) -> bool:
    """x in Phi(x). Infeasible points never are, since Phi(x) lies inside X(x)."""
    if not is_feasible(econ, x, cfg):
        return False
    tol = cfg.tol_eq if tol is None else tol
    for i in econ.players:
        s = own_search(econ, i, x, cfg)
        if s.exact:
            if x[i - 1] not in s.argmax(ties_tol(econ, i, cfg)):
                return False
        elif payoff_value(econ, i, x, x[i - 1]) < s.best_value - tol:
            return False
    return True
