"""Nikaido-Isoda function and the equilibrium certificates built on it.

    psi(x, y) = sum_i ( theta_i(x, y_i) - theta_i(x, x_i) )

``big_v``/``r_set`` maximize psi(x, .) over the product X(x) of the
players' slices; ``tilde_v``/``tilde_r_set`` maximize it over the whole
admissible set C of a jointly constrained economy. V(x) = 0 characterizes
equilibria when every X_i(x) ignores x_i; tilde-V(x) = 0 is only sufficient.
"""
from __future__ import annotations

import itertools
import weakref
from dataclasses import dataclass

import numpy as np

from .config import Config, DEFAULT
from .economy import (
    Economy, EconomyError, Shared, Unconstrained, _shared_mask, is_feasible, own_independent, payoff_batch,
    payoff_value,
)
from .reply import own_search, ties_tol
from .search import dedup_points, grid_maximize

CONFIRMED = "equilibrium-confirmed"
REFUTED = "not-equilibrium"
ONE_WAY = "inconclusive-by-direction"
INCONCLUSIVE = "inconclusive"
INAPPLICABLE = "inapplicable"


class NotAdmissibleError(EconomyError):
    """tilde-V requested for an economy that is not in admissible form."""


class InfeasiblePointError(ValueError):
    pass


@dataclass
class NIValue:
    value: float
    terms: tuple


@dataclass
class MarginalResult:
    value: float
    maximizer: tuple
    exact: bool
    converged: bool


class ProductSet:
    """A product of per-player point lists, never expanded unless asked."""

    def __init__(self, factors, tol=0.0):
        self.factors = [list(f) for f in factors]
        self.tol = tol

    def __contains__(self, y):
        for f, p in zip(self.factors, y):
            if isinstance(p, str):
                if p not in f:
                    return False
            elif not any(max(abs(a - b) for a, b in zip(p, q)) <= self.tol for q in f):
                return False
        return True

    def __len__(self):
        return int(np.prod([len(f) for f in self.factors]))

    def points(self) -> list:
        return list(itertools.product(*self.factors))


class PointSet:
    """An explicit list of global decisions."""

    def __init__(self, points, tol=0.0):
        self._points = list(points)
        self.tol = tol

    def __contains__(self, y):
        for q in self._points:
            if all((a == b) if isinstance(a, str) else
                   max(abs(u - v) for u, v in zip(a, b)) <= self.tol
                   for a, b in zip(y, q)):
                return True
        return False

    def __len__(self):
        return len(self._points)

    def points(self) -> list:
        return list(self._points)


def psi(econ: Economy, x, y) -> NIValue:
    """Nikaido-Isoda value, summed in player order."""
    terms = tuple(payoff_value(econ, i, x, y[i - 1]) - payoff_value(econ, i, x, x[i - 1])
                  for i in econ.players)
    return NIValue(sum(terms), terms)


def _ties(econ, cfg):
    return max(ties_tol(econ, i, cfg) for i in econ.players)


def _enumerated_psi(econ, x, cfg):
    """psi(x, y) for every y in the product of finite slices (direct, no decomposition)."""
    if not econ.all_finite:
        raise EconomyError("product enumeration needs every space to be finite")
    slices = []
    terms = []
    for i in econ.players:
        s = own_search(econ, i, x, cfg)
        own = econ.space(i).index[x[i - 1]]
        base = payoff_batch(econ, i, x, [own])[0]
        slices.append(s.labels)
        terms.append(s.values - base)
    total = np.zeros([len(t) for t in terms])
    for axis, t in enumerate(terms):
        shape = [1] * len(terms)
        shape[axis] = len(t)
        total = total + t.reshape(shape)
    return slices, total


def big_v(econ: Economy, x, cfg: Config = DEFAULT, method: str = "decompose") -> MarginalResult:
    """V(x) = sup of psi(x, .) over X(x).

    ``decompose`` adds up the players' separate suprema (valid because X(x)
    is a product); ``enumerate`` scans the whole product directly and is
    available for finite spaces only.
    """
    if method == "enumerate":
        slices, total = _enumerated_psi(econ, x, cfg)
        flat = int(np.argmax(total))
        idx = np.unravel_index(flat, total.shape)
        y = tuple(slices[a][k] for a, k in enumerate(idx))
        return MarginalResult(float(total[idx]), y, True, True)
    if method != "decompose":
        raise ValueError(f"unknown method {method!r}")
    searches = [own_search(econ, i, x, cfg) for i in econ.players]
    y = tuple(s.best_point for s in searches)
    exact = all(s.exact for s in searches)
    converged = all(s.converged for s in searches)
    return MarginalResult(psi(econ, x, y).value, y, exact, converged)


def r_set(econ: Economy, x, tol: float | None = None, cfg: Config = DEFAULT,
          method: str = "decompose"):
    """R(x), the maximizers of psi(x, .) over X(x).

    ``decompose`` returns the product of per-player argmax sets;
    ``enumerate`` (finite only) returns the explicit set of y with
    psi(x, y) >= V(x) - tol.
    """
    if tol is None:
        tol = _ties(econ, cfg)
    if method == "enumerate":
        slices, total = _enumerated_psi(econ, x, cfg)
        best = total.max()
        hits = np.argwhere(total >= best - tol)
        return PointSet([tuple(slices[a][k] for a, k in enumerate(row)) for row in hits])
    if method != "decompose":
        raise ValueError(f"unknown method {method!r}")
    factors = []
    for i in econ.players:
        s = own_search(econ, i, x, cfg)
        if s.exact:
            factors.append(s.argmax(tol))
        else:
            reps = dedup_points(s.search.near_best(tol), cfg.tol_dedup)
            factors.append([tuple(float(c) for c in p) for p in reps])
    return ProductSet(factors, cfg.tol_dedup)


def is_r_fixed_point(econ, x, tol: float | None = None, cfg: Config = DEFAULT,
                     method: str = "decompose") -> bool:
    """x in R(x); infeasible points never are."""
    if not is_feasible(econ, x, cfg):
        return False
    if econ.all_finite:
        return x in r_set(econ, x, tol, cfg, method)
    tol = cfg.tol_eq if tol is None else tol
    return big_v(econ, x, cfg).value <= tol


# ---------------------------------------------------------------- admissible form

def as_admissible(econ: Economy) -> Economy:
    """View an unconstrained economy as admissible form with C = E."""
    if isinstance(econ.constraint, Shared):
        return econ
    if isinstance(econ.constraint, Unconstrained):
        return Economy(econ.spaces, Shared(()), econ.payoffs)
    raise NotAdmissibleError("bound-type constraints have no admissible-set form")


_C_CACHE: "weakref.WeakKeyDictionary[Economy, np.ndarray]" = weakref.WeakKeyDictionary()


def admissible_profiles(econ: Economy) -> np.ndarray:
    """Label-index rows of every profile in C, lexicographic (finite, Shared only)."""
    if econ in _C_CACHE:
        return _C_CACHE[econ]
    grids = np.meshgrid(*(np.arange(s.size) for s in econ.spaces), indexing="ij")
    idx = np.stack([g.ravel() for g in grids], axis=1)
    cols = [[s.array[idx[:, a], k] for k in range(s.dim)] for a, s in enumerate(econ.spaces)]
    mask = np.broadcast_to(_shared_mask(econ, cols, econ.constraint_tol()), (len(idx),))
    rows = idx[mask]
    _C_CACHE[econ] = rows
    return rows


def _require_admissible(econ, x, cfg):
    if not isinstance(econ.constraint, Shared):
        raise NotAdmissibleError(
            "tilde-V needs an economy in admissible form (wrap unconstrained ones with as_admissible)")
    if not is_feasible(econ, x, cfg):
        raise InfeasiblePointError(f"{x!r} is not in the admissible set")


def _joint_layout(econ):
    offsets = np.cumsum([0] + [s.dim for s in econ.spaces])
    lower = np.concatenate([s.lower for s in econ.spaces])
    upper = np.concatenate([s.upper for s in econ.spaces])
    return offsets, lower, upper


def split_joint(econ, row) -> tuple:
    offsets, _, _ = _joint_layout(econ)
    return tuple(tuple(float(v) for v in row[offsets[a]:offsets[a + 1]]) for a in range(econ.n))


def _tilde_finite(econ, x):
    rows = admissible_profiles(econ)
    total = np.zeros(len(rows))
    for a, i in enumerate(econ.players):
        s = econ.space(i)
        vals = payoff_batch(econ, i, x, np.arange(s.size))
        base = vals[s.index[x[a]]]
        total = total + (vals[rows[:, a]] - base)
    return rows, total


def _tilde_box(econ, x, cfg):
    if not econ.all_box:
        raise EconomyError("tilde-V over mixed finite/box spaces is not supported")
    offsets, lower, upper = _joint_layout(econ)
    here = np.concatenate([np.asarray(p, float) for p in x])
    bases = [payoff_batch(econ, i, x, here[None, offsets[a]:offsets[a + 1]])[0]
             for a, i in enumerate(econ.players)]
    tol = econ.constraint_tol(cfg)

    def fn(rows):
        total = np.zeros(len(rows))
        for a, i in enumerate(econ.players):
            total = total + (payoff_batch(econ, i, x, rows[:, offsets[a]:offsets[a + 1]]) - bases[a])
        return total

    def accept(rows):
        cols = [[rows[:, k] for k in range(offsets[a], offsets[a + 1])] for a in range(econ.n)]
        return np.broadcast_to(_shared_mask(econ, cols, tol), (len(rows),)).copy()

    return grid_maximize(fn, lower, upper, cfg, inject=here[None, :], accept=accept)


def tilde_v(econ: Economy, x, cfg: Config = DEFAULT) -> MarginalResult:
    """tilde-V(x) = sup of psi(x, .) over the admissible set C (not a product)."""
    _require_admissible(econ, x, cfg)
    if econ.all_finite:
        rows, total = _tilde_finite(econ, x)
        k = int(np.argmax(total))
        y = tuple(s.labels[j] for s, j in zip(econ.spaces, rows[k]))
        return MarginalResult(float(total[k]), y, True, True)
    res = _tilde_box(econ, x, cfg)
    return MarginalResult(res.best_value, split_joint(econ, res.best_point), False, res.converged)


def tilde_r_set(econ: Economy, x, tol: float | None = None, cfg: Config = DEFAULT) -> PointSet:
    """Maximizers of psi(x, .) over C."""
    _require_admissible(econ, x, cfg)
    if tol is None:
        tol = _ties(econ, cfg)
    if econ.all_finite:
        rows, total = _tilde_finite(econ, x)
        hits = rows[total >= total.max() - tol]
        return PointSet([tuple(s.labels[j] for s, j in zip(econ.spaces, r)) for r in hits])
    res = _tilde_box(econ, x, cfg)
    reps = dedup_points(res.near_best(tol), cfg.tol_dedup)
    return PointSet([split_joint(econ, r) for r in reps], cfg.tol_dedup)


# ---------------------------------------------------------------- certificates

@dataclass
class Certificate:
    kind: str               # "V" or "tilde_V"
    value: float | None
    maximizer: tuple | None
    applicable: bool
    exact: bool
    conclusion: str
    reason: str = ""


def certify(econ: Economy, x, method: str = "v", tol_cert: float | None = None,
            cfg: Config = DEFAULT) -> Certificate:
    """Turn V(x) or tilde-V(x) into a verdict about x.

    ``v`` is applicable only when no X_i depends on x_i; then a zero value
    confirms the equilibrium and, when computed exactly, a positive value
    refutes it. ``tilde_v`` needs admissible form and can only confirm.
    """
    tol = cfg.tol_cert if tol_cert is None else tol_cert
    if not is_feasible(econ, x, cfg):
        raise InfeasiblePointError(f"{x!r} is not a fixed point of the constraint map")
    if method == "v":
        if not all(own_independent(econ, i) for i in econ.players):
            return Certificate("V", None, None, False, False, INAPPLICABLE,
                               "some X_i depends on the player's own decision")
        r = big_v(econ, x, cfg)
        if r.value <= tol:
            conclusion = CONFIRMED if (r.exact or r.converged) else INCONCLUSIVE
        else:
            conclusion = REFUTED if r.exact else INCONCLUSIVE
        return Certificate("V", r.value, r.maximizer, True, r.exact, conclusion)
    if method == "tilde_v":
        if not isinstance(econ.constraint, Shared):
            return Certificate("tilde_V", None, None, False, False, INAPPLICABLE,
                               "economy is not in admissible form")
        r = tilde_v(econ, x, cfg)
        if r.value <= tol:
            conclusion = CONFIRMED if (r.exact or r.converged) else INCONCLUSIVE
        else:
            conclusion = ONE_WAY
        return Certificate("tilde_V", r.value, r.maximizer, True, r.exact, conclusion)
    raise ValueError(f"unknown certificate method {method!r}")
