"""Abstract economies: decision spaces, constraint maps and payoffs.

An economy has N players. Player ``i`` (1-based) picks a point of its
decision space E_i; the constraint map X_i(x) says which of those points
are admissible given the global decision x; the payoff theta_i(x, y_i)
scores the deviation y_i against x.

Global decisions are plain tuples with one entry per player: a label string
for a finite space, a tuple of floats for a box. ``Economy.decision``
normalizes user input into that form.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from . import expr as ex
from .config import Config, DEFAULT
from .search import initial_grid


class EconomyError(ValueError):
    """Structural problem with an economy or a decision."""


class EmptySliceError(RuntimeError):
    """A player has no admissible decision at the given global decision."""

    def __init__(self, player, x):
        self.player = player
        self.x = x
        super().__init__(f"player {player} has no admissible decision at {x!r}")


# ---------------------------------------------------------------- spaces

@dataclass(frozen=True)
class FiniteSpace:
    labels: tuple
    points: tuple

    kind = "finite"

    @classmethod
    def of(cls, labels: Sequence[str], points=None) -> "FiniteSpace":
        labels = tuple(str(l) for l in labels)
        if points is None:
            points = [(float(k),) for k in range(len(labels))]
        return cls(labels, tuple(tuple(float(v) for v in p) for p in points))

    def __post_init__(self):
        if not self.labels:
            raise EconomyError("finite space needs at least one label")
        if len(set(self.labels)) != len(self.labels):
            raise EconomyError(f"duplicate labels in {self.labels}")
        if len(self.points) != len(self.labels):
            raise EconomyError("one point per label required")
        dims = {len(p) for p in self.points}
        if len(dims) != 1 or 0 in dims:
            raise EconomyError("finite space points must share one positive dimension")

    @property
    def dim(self) -> int:
        return len(self.points[0])

    @property
    def size(self) -> int:
        return len(self.labels)

    @cached_property
    def index(self) -> dict:
        return {l: k for k, l in enumerate(self.labels)}

    @cached_property
    def array(self) -> np.ndarray:
        return np.array(self.points, float)


@dataclass(frozen=True)
class BoxSpace:
    lower: tuple
    upper: tuple

    kind = "box"

    @classmethod
    def of(cls, lower, upper) -> "BoxSpace":
        return cls(tuple(float(v) for v in lower), tuple(float(v) for v in upper))

    def __post_init__(self):
        if not self.lower or len(self.lower) != len(self.upper):
            raise EconomyError("box bounds must be non-empty and of equal length")
        for lo, hi in zip(self.lower, self.upper):
            if not (np.isfinite(lo) and np.isfinite(hi)) or lo > hi:
                raise EconomyError(f"invalid box interval [{lo}, {hi}]")

    @property
    def dim(self) -> int:
        return len(self.lower)


# ---------------------------------------------------------------- constraints

@dataclass(frozen=True)
class Unconstrained:
    kind = "unconstrained"


@dataclass(frozen=True)
class Shared:
    """Admissible form: C = {x : g_j(x) <= 0 for all j}."""
    inequalities: tuple = ()

    kind = "shared"

    @classmethod
    def of(cls, *texts) -> "Shared":
        return cls(tuple(ex.parse(t) if isinstance(t, str) else t for t in texts))


@dataclass(frozen=True)
class BoundEntry:
    player: int
    coord: int
    lower: object = None    # Expression or None (space bound)
    upper: object = None


@dataclass(frozen=True)
class BoundExprs:
    entries: tuple = ()

    kind = "bounds"

    def for_player(self, i):
        return [e for e in self.entries if e.player == i]


# ---------------------------------------------------------------- payoffs

@dataclass(frozen=True, eq=False)
class TablePayoff:
    """``values[k_1, ..., k_N, j]`` = theta_i(x, y_i) for label indices k of x and j of y_i."""
    values: np.ndarray

    kind = "table"


@dataclass(frozen=True)
class FormulaPayoff:
    expr: object

    kind = "formula"

    @classmethod
    def of(cls, text) -> "FormulaPayoff":
        return cls(ex.parse(text) if isinstance(text, str) else text)


# ---------------------------------------------------------------- economy

@dataclass(frozen=True, eq=False)
class Economy:
    spaces: tuple
    constraint: object
    payoffs: tuple

    def __post_init__(self):
        object.__setattr__(self, "spaces", tuple(self.spaces))
        object.__setattr__(self, "payoffs", tuple(self.payoffs))
        n = len(self.spaces)
        if n < 1:
            raise EconomyError("an economy needs at least one player")
        if len(self.payoffs) != n:
            raise EconomyError(f"{n} spaces but {len(self.payoffs)} payoffs")
        for i, pay in enumerate(self.payoffs, start=1):
            if isinstance(pay, TablePayoff):
                if not self.all_finite:
                    raise EconomyError("table payoffs require every space to be finite")
                shape = tuple(s.size for s in self.spaces) + (self.spaces[i - 1].size,)
                if pay.values.shape != shape:
                    raise EconomyError(f"player {i} table has shape {pay.values.shape}, expected {shape}")
                if not np.isfinite(pay.values).all():
                    raise EconomyError(f"player {i} table has non-finite entries")
            elif isinstance(pay, FormulaPayoff):
                self._check_vars(pay.expr, f"payoff of player {i}", own=i)
            else:
                raise EconomyError(f"unknown payoff {pay!r}")
        c = self.constraint
        if isinstance(c, Shared):
            for g in c.inequalities:
                self._check_vars(g, "shared inequality")
        elif isinstance(c, BoundExprs):
            for e in c.entries:
                if not 1 <= e.player <= n or not 0 <= e.coord < self.spaces[e.player - 1].dim:
                    raise EconomyError(f"bound entry for x[{e.player}][{e.coord}] out of range")
                for b in (e.lower, e.upper):
                    if b is not None:
                        self._check_vars(b, f"bound of x[{e.player}][{e.coord}]")
        elif not isinstance(c, Unconstrained):
            raise EconomyError(f"unknown constraint {c!r}")

    def _check_vars(self, e, where, own=None):
        for v in ex.free_variables(e):
            if isinstance(v, ex.YVar):
                if own is None:
                    raise EconomyError(f"{where} may not reference deviation variable y[{v.coord}]")
                if v.coord >= self.spaces[own - 1].dim:
                    raise EconomyError(f"{where} references y[{v.coord}] beyond dimension")
            elif not 1 <= v.player <= self.n or v.coord >= self.spaces[v.player - 1].dim:
                raise EconomyError(f"{where} references unknown variable {ex.to_text(v)}")

    @property
    def n(self) -> int:
        return len(self.spaces)

    @property
    def players(self) -> range:
        return range(1, self.n + 1)

    @cached_property
    def all_finite(self) -> bool:
        return all(isinstance(s, FiniteSpace) for s in self.spaces)

    @cached_property
    def all_box(self) -> bool:
        return all(isinstance(s, BoxSpace) for s in self.spaces)

    def space(self, i) -> FiniteSpace | BoxSpace:
        return self.spaces[i - 1]

    def constraint_tol(self, cfg: Config = DEFAULT) -> float:
        # exact comparison when every space is discrete
        return 0.0 if self.all_finite else cfg.tol_feas

    def point(self, i, raw):
        """Normalize one player's entry (label or coordinates) and check membership."""
        s = self.space(i)
        if isinstance(s, FiniteSpace):
            if isinstance(raw, (list, tuple, np.ndarray)) and len(raw) == 1:
                raw = raw[0]
            if isinstance(raw, float) and raw.is_integer():
                raw = int(raw)
            label = str(raw)
            if label not in s.index:
                raise EconomyError(f"{raw!r} is not a label of player {i}'s space {s.labels}")
            return label
        if np.isscalar(raw):
            raw = (raw,)
        coords = tuple(float(v) for v in raw)
        if len(coords) != s.dim:
            raise EconomyError(f"player {i} expects {s.dim} coordinate(s), got {len(coords)}")
        for v, lo, hi in zip(coords, s.lower, s.upper):
            if not lo <= v <= hi:
                raise EconomyError(f"coordinate {v} of player {i} outside [{lo}, {hi}]")
        return coords

    def decision(self, raw) -> tuple:
        if len(raw) != self.n:
            raise EconomyError(f"expected {self.n} entries, got {len(raw)}")
        return tuple(self.point(i, r) for i, r in zip(self.players, raw))

    def coords(self, i, p) -> tuple:
        s = self.space(i)
        if isinstance(s, FiniteSpace):
            return s.points[s.index[p]]
        return tuple(p)

    def binding_x(self, x) -> list:
        return [list(self.coords(i, p)) for i, p in zip(self.players, x)]

    def profile_index(self, x) -> tuple:
        return tuple(s.index[p] for s, p in zip(self.spaces, x))

    def profiles(self):
        """All global decisions of an all-finite economy, in label order."""
        if not self.all_finite:
            raise EconomyError("profiles() requires every space to be finite")
        return itertools.product(*(s.labels for s in self.spaces))

    def replace(self, x, i, p) -> tuple:
        return x[:i - 1] + (p,) + x[i:]


# ---------------------------------------------------------------- slices

@dataclass(frozen=True)
class FinitePoints:
    player: int
    labels: tuple
    indices: tuple

    @property
    def empty(self) -> bool:
        return not self.labels


@dataclass(frozen=True)
class SubBox:
    player: int
    lower: tuple
    upper: tuple
    exact: bool = True
    empty: bool = False


def _subbox(player, lower, upper, exact=True):
    lower = tuple(float(v) for v in lower)
    upper = tuple(float(v) for v in upper)
    return SubBox(player, lower, upper, exact, any(lo > hi for lo, hi in zip(lower, upper)))


def _shared_mask(econ, cols, tol):
    """Boolean mask of g_j <= tol over batched x-columns (list per player)."""
    b = ex.Binding(tuple(tuple(c) for c in cols))
    mask = True
    for g in econ.constraint.inequalities:
        mask = mask & (np.asarray(ex.evaluate(g, b)) <= tol)
    return mask


def own_candidates_mask(econ, i, x, rows, cfg: Config = DEFAULT):
    """Which rows (candidate coordinates for player i) keep x inside C."""
    cols = econ.binding_x(x)
    rows = np.asarray(rows, float)
    cols[i - 1] = [rows[:, k] for k in range(rows.shape[1])]
    mask = _shared_mask(econ, cols, econ.constraint_tol(cfg))
    return np.broadcast_to(mask, (len(rows),)).copy()


def _affine_interval(econ, i, x, space, cfg):
    """Exact per-coordinate interval when every g_j is affine in at most one own coordinate."""
    own = {ex.XVar(i, k) for k in range(space.dim)}
    gs = econ.constraint.inequalities
    if not all(ex.affine_in(g, own) for g in gs):
        return None
    d = space.dim
    rows = np.vstack([np.zeros(d), np.eye(d)])
    cols = econ.binding_x(x)
    cols[i - 1] = [rows[:, k] for k in range(d)]
    b = ex.Binding(tuple(tuple(c) for c in cols))
    lo = list(space.lower)
    hi = list(space.upper)
    tol = econ.constraint_tol(cfg)
    for g in gs:
        vals = np.broadcast_to(np.asarray(ex.evaluate(g, b), float), (d + 1,))
        c = vals[0]
        a = vals[1:] - c
        nz = np.flatnonzero(a)
        if len(nz) > 1:
            return None
        if len(nz) == 0:
            if c > tol:
                return _empty_box(i, space, exact=True)
            continue
        k = nz[0]
        bound = -c / a[k]
        if a[k] > 0:
            hi[k] = min(hi[k], bound)
        else:
            lo[k] = max(lo[k], bound)
    return _subbox(i, lo, hi, exact=True)


def _empty_box(i, space, exact):
    return SubBox(i, tuple(space.upper), tuple(space.lower), exact, True)


def feasible_slice(econ: Economy, i: int, x, cfg: Config = DEFAULT):
    """X_i(x) as a FinitePoints or SubBox value (possibly flagged empty)."""
    space = econ.space(i)
    c = econ.constraint
    if isinstance(space, FiniteSpace):
        if isinstance(c, Unconstrained):
            mask = np.ones(space.size, bool)
        elif isinstance(c, Shared):
            mask = own_candidates_mask(econ, i, x, space.array, cfg)
        else:
            mask = np.ones(space.size, bool)
            cols = econ.binding_x(x)
            b = ex.Binding(tuple(tuple(col) for col in cols))
            for e in c.for_player(i):
                v = space.array[:, e.coord]
                if e.lower is not None:
                    mask &= v >= ex.evaluate(e.lower, b)
                if e.upper is not None:
                    mask &= v <= ex.evaluate(e.upper, b)
        idx = tuple(int(k) for k in np.flatnonzero(mask))
        return FinitePoints(i, tuple(space.labels[k] for k in idx), idx)

    if isinstance(c, Unconstrained):
        return _subbox(i, space.lower, space.upper)
    if isinstance(c, BoundExprs):
        lo = list(space.lower)
        hi = list(space.upper)
        b = ex.Binding(tuple(tuple(col) for col in econ.binding_x(x)))
        for e in c.for_player(i):
            if e.lower is not None:
                lo[e.coord] = max(lo[e.coord], ex.evaluate(e.lower, b))
            if e.upper is not None:
                hi[e.coord] = min(hi[e.coord], ex.evaluate(e.upper, b))
        return _subbox(i, lo, hi)

    box = _affine_interval(econ, i, x, space, cfg)
    if box is not None:
        return box
    # non-affine: tightest enclosure of the feasible grid points, padded by one cell
    grid_cfg = cfg.with_(grid=cfg.slice_grid)
    pts, spacing = initial_grid(space.lower, space.upper, grid_cfg)
    pts = np.vstack([np.array(econ.coords(i, x[i - 1]), float)[None, :], pts])
    ok = pts[own_candidates_mask(econ, i, x, pts, cfg)]
    if len(ok) == 0:
        return _empty_box(i, space, exact=False)
    lo = np.maximum(ok.min(axis=0) - spacing, space.lower)
    hi = np.minimum(ok.max(axis=0) + spacing, space.upper)
    return _subbox(i, lo, hi, exact=False)


def in_slice(econ: Economy, i: int, x, p, cfg: Config = DEFAULT) -> bool:
    """Is p (an entry of player i) admissible for player i at x?"""
    c = econ.constraint
    if isinstance(c, Shared):
        return bool(own_candidates_mask(econ, i, x, [econ.coords(i, p)], cfg)[0])
    sl = feasible_slice(econ, i, x, cfg)
    if isinstance(sl, FinitePoints):
        return p in sl.labels
    tol = cfg.tol_feas
    return all(lo - tol <= v <= hi + tol for v, lo, hi in zip(p, sl.lower, sl.upper))


def is_feasible(econ: Economy, x, cfg: Config = DEFAULT) -> bool:
    """x in X(x), i.e. x lies in the fixed-point set C of the constraint map."""
    c = econ.constraint
    if isinstance(c, Unconstrained):
        return True
    if isinstance(c, Shared):
        cols = econ.binding_x(x)
        return bool(np.all(_shared_mask(econ, cols, econ.constraint_tol(cfg))))
    return all(in_slice(econ, i, x, x[i - 1], cfg) for i in econ.players)


# ---------------------------------------------------------------- payoffs

def payoff_batch(econ: Economy, i: int, x, candidates) -> np.ndarray:
    """theta_i(x, y) for many deviations y of player i.

    ``candidates`` are label indices for a finite player, coordinate rows
    (m, d_i) for a box player.
    """
    pay = econ.payoffs[i - 1]
    space = econ.space(i)
    if isinstance(pay, TablePayoff):
        row = pay.values[econ.profile_index(x)]
        return row[np.asarray(candidates, int)]
    if isinstance(space, FiniteSpace):
        rows = space.array[np.asarray(candidates, int)]
    else:
        rows = np.asarray(candidates, float).reshape(-1, space.dim)
    b = ex.Binding(tuple(tuple(c) for c in econ.binding_x(x)),
                   tuple(rows[:, k] for k in range(rows.shape[1])))
    vals = np.asarray(ex.evaluate(pay.expr, b), float)
    return np.broadcast_to(vals, (len(rows),)).copy()


def payoff_value(econ: Economy, i: int, x, y_i) -> float:
    """theta_i(x, y_i); y_i need not be admissible (payoffs are total on E x E_i)."""
    pay = econ.payoffs[i - 1]
    space = econ.space(i)
    if isinstance(pay, TablePayoff):
        return float(pay.values[econ.profile_index(x) + (space.index[y_i],)])
    b = ex.Binding(tuple(tuple(c) for c in econ.binding_x(x)), tuple(econ.coords(i, y_i)))
    return ex.evaluate(pay.expr, b)


def own_independent(econ: Economy, i: int) -> bool:
    """Whether X_i(x) is syntactically independent of player i's own decision."""
    c = econ.constraint
    if not isinstance(c, BoundExprs):
        return True
    for e in c.for_player(i):
        for b in (e.lower, e.upper):
            if b is not None and any(isinstance(v, ex.XVar) and v.player == i
                                     for v in ex.free_variables(b)):
                return False
    return True


# ---------------------------------------------------------------- validation

@dataclass
class ValidationReport:
    fixed_point_found: bool
    fixed_point: tuple | None
    exhaustive: bool
    points_checked: int
    strict: bool
    empty_slice_witness: dict | None
    own_independent: list
    warnings: list = field(default_factory=list)


def _sample_decisions(econ, count, seed):
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        x = []
        for s in econ.spaces:
            if isinstance(s, FiniteSpace):
                x.append(s.labels[int(rng.integers(s.size))])
            elif k == 0:
                x.append(tuple(float(v) for v in s.lower))
            else:
                lo, hi = np.array(s.lower), np.array(s.upper)
                x.append(tuple(float(v) for v in lo + rng.random(s.dim) * (hi - lo)))
        out.append(tuple(x))
    return out


def validate(econ: Economy, probe_budget: int = 1000, cfg: Config = DEFAULT) -> ValidationReport:
    """Check that the economy can be played.

    Looks for a feasible x in X(x) and for decisions where some X_i(x) is
    empty: exhaustively when all spaces are finite, otherwise over
    ``probe_budget`` sampled decisions. Missing a fixed point is a warning.
    """
    if probe_budget < 1:
        raise ValueError("probe_budget must be positive")
    exhaustive = econ.all_finite
    candidates = econ.profiles() if exhaustive else _sample_decisions(econ, probe_budget, cfg.seed)
    fixed = None
    witness = None
    checked = 0
    for x in candidates:
        checked += 1
        if fixed is None and is_feasible(econ, x, cfg):
            fixed = x
        if witness is None:
            for i in econ.players:
                if feasible_slice(econ, i, x, cfg).empty:
                    witness = {"x": x, "player": i}
                    break
    warnings = []
    if fixed is None:
        warnings.append("no global decision with x in X(x) was found"
                        + ("" if exhaustive else f" among {checked} samples"))
    if witness is not None:
        warnings.append(f"player {witness['player']} has no admissible decision at {witness['x']}")
    return ValidationReport(
        fixed_point_found=fixed is not None,
        fixed_point=fixed,
        exhaustive=exhaustive,
        points_checked=checked,
        strict=witness is None,
        empty_slice_witness=witness,
        own_independent=[own_independent(econ, i) for i in econ.players],
        warnings=warnings,
    )
