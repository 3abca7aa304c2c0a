"""Deterministic derivative-free search over boxes.

Two primitives back every continuous computation in the package:
``grid_maximize`` (coarse grid, then multi-start local grids shrinking
around the incumbents) for inner suprema, and ``pattern_search`` (compass
polling with step halving) for the outer minimization of V / tilde-V.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import Config, DEFAULT


@dataclass
class SearchResult:
    points: np.ndarray      # every accepted candidate, (m, d)
    values: np.ndarray      # objective at each candidate, (m,)
    best_point: np.ndarray
    best_value: float
    converged: bool
    evaluations: int
    rounds: int

    def near_best(self, tol: float) -> np.ndarray:
        return self.points[self.values >= self.best_value - tol]


def _axes_resolution(active: int, cfg: Config) -> int:
    if active == 0:
        return 1
    n = cfg.grid
    while n > 2 and n ** active > cfg.grid_cap:
        n -= 1
    return n


def initial_grid(lower, upper, cfg: Config = DEFAULT):
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    active = upper > lower
    n = _axes_resolution(int(active.sum()), cfg)
    axes = [np.linspace(lo, hi, n) if a else np.array([lo])
            for lo, hi, a in zip(lower, upper, active)]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    spacing = np.where(active, (upper - lower) / max(n - 1, 1), 0.0)
    return pts, spacing


def _local_offsets(d, active, shrink):
    ticks = np.linspace(-1.0, 1.0, 2 * shrink + 1)
    k = int(active.sum())
    if (2 * shrink + 1) ** k <= 4096:
        grids = [ticks if a else np.zeros(1) for a in active]
        mesh = np.meshgrid(*grids, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)
    # too many dimensions for a full local grid: axis-aligned stencil
    rows = [np.zeros(d)]
    for axis in np.flatnonzero(active):
        for t in ticks:
            if t != 0:
                row = np.zeros(d)
                row[axis] = t
                rows.append(row)
    return np.array(rows)


def _incumbents(points, values, count, radius):
    order = np.argsort(-values, kind="stable")
    chosen = []
    for idx in order:
        p = points[idx]
        if all(np.max(np.abs(p - points[c])) > radius for c in chosen):
            chosen.append(idx)
            if len(chosen) == count:
                break
    return points[chosen]


def grid_maximize(fn, lower, upper, cfg: Config = DEFAULT, inject=None, accept=None):
    """Maximize ``fn`` (vectorized over rows) on the box [lower, upper].

    ``inject`` rows are always evaluated alongside the initial grid;
    ``accept`` filters candidates (boolean mask over rows). Returns None
    when no candidate is accepted. ``converged`` is set when the best value
    moved by at most ``cfg.tol_opt`` in the final round.
    """
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    d = lower.size
    cand, spacing = initial_grid(lower, upper, cfg)
    if inject is not None and len(inject):
        cand = np.vstack([np.asarray(inject, float).reshape(-1, d), cand])
    if accept is not None:
        cand = cand[accept(cand)]
    if len(cand) == 0:
        return None
    vals = np.asarray(fn(cand), float)
    all_pts, all_vals = [cand], [vals]
    best_i = int(np.argmax(vals))
    best_pt, best = cand[best_i], float(vals[best_i])
    evaluations = len(cand)
    active = upper > lower
    offsets = _local_offsets(d, active, cfg.shrink)
    converged = not active.any()
    rounds = 0
    pts_cat, vals_cat = cand, vals
    while not converged and rounds < cfg.max_rounds:
        rounds += 1
        width = spacing / cfg.shrink ** (rounds - 1)
        incs = _incumbents(pts_cat, vals_cat, cfg.starts, float(np.min(width[active])) / cfg.shrink)
        new = (incs[:, None, :] + offsets[None, :, :] * width).reshape(-1, d)
        new = np.clip(new, lower, upper)
        if accept is not None:
            new = new[accept(new)]
        improvement = 0.0
        if len(new):
            nv = np.asarray(fn(new), float)
            evaluations += len(new)
            all_pts.append(new)
            all_vals.append(nv)
            pts_cat = np.vstack(all_pts)
            vals_cat = np.concatenate(all_vals)
            j = int(np.argmax(nv))
            if nv[j] > best:
                improvement = float(nv[j]) - best
                best, best_pt = float(nv[j]), new[j]
        if rounds >= cfg.rounds and improvement <= cfg.tol_opt:
            converged = True
    return SearchResult(np.vstack(all_pts), np.concatenate(all_vals), best_pt, best,
                        converged, evaluations, rounds)


def dedup_points(points, tol: float):
    """Lexicographically sorted rows with near-duplicates (inf-norm <= tol) merged."""
    pts = np.asarray(points, float)
    if len(pts) == 0:
        return pts
    order = np.lexsort(pts.T[::-1])
    kept = []
    for idx in order:
        p = pts[idx]
        if all(np.max(np.abs(p - q)) > tol for q in kept):
            kept.append(p)
    return np.array(kept)


def compass_directions(d: int) -> np.ndarray:
    """All {-1,0,1}^d directions for small d, else the 2d coordinate ones."""
    if d <= 4:
        dirs = [v for v in itertools.product((-1, 0, 1), repeat=d) if any(v)]
        return np.array(dirs, float)
    eye = np.eye(d)
    return np.vstack([eye, -eye])


def pattern_search(fn, start, value, lower, upper, step, budget, accept=None,
                   min_step=1e-12, target=0.0):
    """Minimize scalar ``fn`` from ``start`` by compass polling.

    Returns (trace, evaluations) where trace lists every evaluated
    (point, value) in order. Stops once the step falls below ``min_step``
    (relative to the box width), the value reaches ``target`` or the budget
    is spent.
    """
    lower = np.asarray(lower, float)
    upper = np.asarray(upper, float)
    width = np.where(upper > lower, upper - lower, 0.0)
    dirs = compass_directions(lower.size)
    x = np.asarray(start, float)
    h = float(step)
    trace = []
    used = 0
    while used < budget and h >= min_step and value > target:
        polls = np.clip(x + h * dirs * width, lower, upper)
        moved = False
        best_x, best_v = x, value
        for p in polls:
            if used >= budget:
                break
            if np.array_equal(p, x) or (accept is not None and not accept(p)):
                continue
            v = fn(p)
            used += 1
            trace.append((p, v))
            if v < best_v:
                best_x, best_v, moved = p, v, True
        if moved:
            x, value = best_x, best_v
        else:
            h /= 2
    return trace, used
