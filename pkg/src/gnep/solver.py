"""Equilibrium search: enumeration, best-response sweeps, V / tilde-V minimization,
and sampling probes of quasi-concavity."""
from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import qmc

from . import niso
from .config import Config, DEFAULT
from .economy import (
    EconomyError, FiniteSpace, FinitePoints, Shared, feasible_slice, is_feasible,
    own_independent, payoff_batch,
)
from .reply import EQUILIBRIUM, INCONCLUSIVE, best_reply, is_nash_equilibrium
from .search import pattern_search

FOUND = "found"
NONE_EXIST = "none-exist"
EXHAUSTED = "budget-exhausted"
DIVERGED = "diverged"


class UnsupportedOperation(EconomyError):
    pass


class InapplicableMethodError(EconomyError):
    pass


@dataclass
class Found:
    point: tuple
    value: float | None
    report: object
    certificate: object = None


@dataclass
class SolveResult:
    algorithm: str
    status: str
    equilibria: list
    trace: list                 # (point, value) pairs
    evaluations: int
    best: tuple | None = None   # (point, value) of the best candidate seen
    notes: list = field(default_factory=list)


def _certificate(econ, x, cfg):
    if all(own_independent(econ, i) for i in econ.players):
        return niso.certify(econ, x, "v", cfg=cfg)
    if isinstance(econ.constraint, Shared):
        return niso.certify(econ, x, "tilde_v", cfg=cfg)
    return None


def enumerate_equilibria(econ, cfg: Config = DEFAULT) -> SolveResult:
    """Check every global profile of a finite economy, in label order."""
    if not econ.all_finite:
        raise UnsupportedOperation("enumeration requires every decision space to be finite")
    found = []
    count = 0
    for x in econ.profiles():
        count += 1
        if not is_feasible(econ, x, cfg):
            continue
        report = is_nash_equilibrium(econ, x, cfg=cfg)
        if report.verdict == EQUILIBRIUM:
            found.append(Found(x, None, report, _certificate(econ, x, cfg)))
    return SolveResult("enumerate", FOUND if found else NONE_EXIST, found, [], count)


# ---------------------------------------------------------------- best response

def _distance(econ, a, b) -> float:
    d = 0.0
    for s, p, q in zip(econ.spaces, a, b):
        if isinstance(s, FiniteSpace):
            if p != q:
                return math.inf
        else:
            d = max(d, max(abs(u - v) for u, v in zip(p, q)))
    return d


def best_response_iteration(econ, x0, max_iter: int | None = None, tol_eq: float | None = None,
                            cfg: Config = DEFAULT) -> SolveResult:
    """Gauss-Seidel best-response sweeps from x0.

    Each player in turn moves to the first point of its best-reply set.
    Stops on a sweep that changes nothing (then x is re-verified), on a
    revisited profile, or after ``max_iter`` sweeps.
    """
    max_iter = cfg.max_iter if max_iter is None else max_iter
    tol_eq = cfg.tol_eq if tol_eq is None else tol_eq
    track_v = all(own_independent(econ, i) for i in econ.players)

    def value(x):
        if not track_v or not is_feasible(econ, x, cfg):
            return None
        return niso.big_v(econ, x, cfg).value

    x = tuple(x0)
    trace = [(x, value(x))]
    seen = {x: 0}
    recent = deque(maxlen=cfg.cycle_window)
    for sweep in range(1, max_iter + 1):
        prev = x
        for i in econ.players:
            x = econ.replace(x, i, best_reply(econ, i, x, cfg).points[0])
        trace.append((x, value(x)))
        if _distance(econ, prev, x) <= cfg.tol_dedup:
            report = is_nash_equilibrium(econ, x, tol_eq, cfg)
            if report.verdict == EQUILIBRIUM:
                return SolveResult("best-response", FOUND, [Found(x, trace[-1][1], report)],
                                   trace, sweep, (x, trace[-1][1]))
            status = EXHAUSTED if report.verdict == INCONCLUSIVE else DIVERGED
            return SolveResult("best-response", status, [], trace, sweep, (x, trace[-1][1]),
                               [f"sweeps stalled at a point judged '{report.verdict}'"])
        if econ.all_finite:
            if x in seen:
                return SolveResult("best-response", DIVERGED, [], trace, sweep, None,
                                   [f"cycle of length {sweep - seen[x]} detected"])
            seen[x] = sweep
        elif any(_distance(econ, x, r) <= cfg.cycle_tol for r in recent):
            return SolveResult("best-response", DIVERGED, [], trace, sweep, None,
                               ["iterates revisit an earlier point"])
        recent.append(prev)
    return SolveResult("best-response", EXHAUSTED, [], trace, max_iter, None,
                       [f"no convergence within {max_iter} sweeps"])


# ---------------------------------------------------------------- V minimization

def _value_fn(econ, method, cfg):
    if method == "v":
        if not all(own_independent(econ, i) for i in econ.players):
            raise InapplicableMethodError("V needs every X_i to ignore the player's own decision")
        return lambda x: niso.big_v(econ, x, cfg).value
    if method == "tilde_v":
        if not isinstance(econ.constraint, Shared):
            raise InapplicableMethodError("tilde-V needs an economy in admissible form")
        return lambda x: niso.tilde_v(econ, x, cfg).value
    raise ValueError(f"unknown method {method!r}")


def _confirm(econ, candidates, method, cfg):
    out = []
    for x, v in candidates:
        report = is_nash_equilibrium(econ, x, cfg=cfg)
        if report.verdict == EQUILIBRIUM:
            cert = niso.certify(econ, x, method, cfg=cfg)
            out.append(Found(x, v, report, cert))
    return out


def minimize_v(econ, method: str = "tilde_v", budget: int | None = None,
               cfg: Config = DEFAULT) -> SolveResult:
    """Search the feasible set for zeros of V or tilde-V.

    Finite economies are scanned exhaustively. Box economies get a
    scrambled Sobol sample of the feasible set followed by compass searches
    from the best samples. Every point with value <= tol_cert is re-checked
    with ``is_nash_equilibrium`` before it is reported.
    """
    budget = cfg.budget if budget is None else budget
    fn = _value_fn(econ, method, cfg)
    name = "minimize-" + method.replace("_", "-")
    if econ.all_finite:
        if method == "tilde_v":
            pool = [tuple(s.labels[j] for s, j in zip(econ.spaces, row))
                    for row in niso.admissible_profiles(econ)]
        else:
            pool = [x for x in econ.profiles() if is_feasible(econ, x, cfg)]
        trace = [(x, fn(x)) for x in pool]
        zeros = [(x, v) for x, v in trace if v <= cfg.tol_cert]
        found = _confirm(econ, zeros, method, cfg)
        best = min(trace, key=lambda t: t[1]) if trace else None
        notes = []
        if method == "tilde_v":
            missed = [x for x, v in trace if v > cfg.tol_cert
                      and is_nash_equilibrium(econ, x, cfg=cfg).verdict == EQUILIBRIUM]
            if missed:
                notes.append(f"{len(missed)} equilibria have tilde-V > tol_cert and are not "
                             f"reported (tilde-V = 0 is sufficient, not necessary): "
                             + ", ".join(str(m) for m in missed))
        if found:
            status = FOUND
        elif method == "v":
            status = NONE_EXIST
        else:
            status = EXHAUSTED
            notes.append("no admissible point has tilde-V = 0; equilibria may still exist")
        return SolveResult(name, status, found, trace, len(trace), best, notes)

    if not econ.all_box:
        raise UnsupportedOperation("minimization over mixed finite/box spaces is not supported")
    offsets, lower, upper = niso._joint_layout(econ)
    d = lower.size
    m = 2 ** max(0, int(math.log2(max(budget // 2, 1))))
    sample = qmc.Sobol(d, scramble=True, seed=cfg.seed).random(m)
    sample = lower + sample * (upper - lower)

    def split(row):
        return niso.split_joint(econ, row)

    def feasible_row(row):
        return is_feasible(econ, split(row), cfg)

    trace = []
    used = 0
    for row in sample:
        if used >= budget:
            break
        x = split(row)
        if not is_feasible(econ, x, cfg):
            continue
        v = fn(x)
        used += 1
        trace.append((x, v))
    if not trace:
        return SolveResult(name, EXHAUSTED, [], [], used, None,
                           ["no feasible sample point was found"])

    # compass refinement from the best distinct samples
    order = sorted(range(len(trace)), key=lambda k: trace[k][1])
    starts = []
    for k in order:
        row = np.concatenate([np.asarray(p, float) for p in trace[k][0]])
        if all(np.max(np.abs(row - s[0])) > 1e-12 for s in starts):
            starts.append((row, trace[k][1]))
        if len(starts) == cfg.starts:
            break
    step = 1.0 / max(2.0, m ** (1.0 / d))
    for row, v in starts:
        share = (budget - used) // max(1, len(starts))
        if share <= 0:
            break
        steps, spent = pattern_search(lambda r: fn(split(r)), row, v, lower, upper, step,
                                      share, accept=feasible_row)
        used += spent
        trace.extend((split(p), val) for p, val in steps)

    zeros = sorted(((x, v) for x, v in trace if v <= cfg.tol_cert), key=lambda t: t[1])
    keep = []
    for x, v in zeros:
        row = np.concatenate([np.asarray(p, float) for p in x])
        if all(np.max(np.abs(row - r)) > cfg.tol_dedup for r, _ in keep):
            keep.append((row, (x, v)))
        if len(keep) == 32:
            break
    keep = [item for _, item in keep]
    found = _confirm(econ, keep, method, cfg)
    best = min(trace, key=lambda t: t[1])
    notes = [] if found else ["no point with value <= tol_cert was confirmed"]
    return SolveResult(name, FOUND if found else EXHAUSTED, found, trace, used, best, notes)


# ---------------------------------------------------------------- quasi-concavity

@dataclass
class QuasiConcavityReport:
    player: int
    anchor: tuple
    segments: int
    endpoints: list
    violation_count: int
    worst_violation: dict | None
    argmax_indices: list | None
    argmax_contiguous: bool | None
    verdict: str


LAMBDAS = tuple(k / 10 for k in range(1, 10))


def _contiguous(indices) -> bool:
    return bool(indices) and indices[-1] - indices[0] + 1 == len(indices)


def probe_quasiconcavity(econ, i: int, x, samples: int = 200, cfg: Config = DEFAULT
                         ) -> QuasiConcavityReport:
    """Look for segments along which theta_i(x, .) dips below both endpoints.

    Sampling can only refute quasi-concavity, so the best verdict is
    "no violation found". One-dimensional slices are also gridded at 257
    points to test whether the grid argmax is a contiguous run.
    """
    sl = feasible_slice(econ, i, x, cfg)
    if sl.empty:
        raise EconomyError(f"player {i} has an empty slice at {x!r}")
    tol = cfg.tol_qc
    if isinstance(sl, FinitePoints):
        return _probe_finite(econ, i, x, sl, tol)

    lo = np.array(sl.lower)
    hi = np.array(sl.upper)
    rng = np.random.default_rng(cfg.seed)
    a = lo + rng.random((samples, lo.size)) * (hi - lo)
    b = lo + rng.random((samples, lo.size)) * (hi - lo)
    lam = np.array(LAMBDAS)
    fa = payoff_batch(econ, i, x, a)
    fb = payoff_batch(econ, i, x, b)
    mids = (lam[None, :, None] * a[:, None, :] + (1 - lam[None, :, None]) * b[:, None, :])
    fm = payoff_batch(econ, i, x, mids.reshape(-1, lo.size)).reshape(samples, len(lam))
    deficit = np.minimum(fa, fb)[:, None] - fm
    bad = deficit > tol
    worst = None
    if bad.any():
        s, l = np.unravel_index(int(np.argmax(np.where(bad, deficit, -np.inf))), deficit.shape)
        worst = {"a": tuple(a[s]), "b": tuple(b[s]), "lambda": float(lam[l]),
                 "deficit": float(deficit[s, l])}
    indices = contiguous = None
    if lo.size == 1:
        grid = np.linspace(lo[0], hi[0], 257)[:, None]
        vals = payoff_batch(econ, i, x, grid)
        indices = [int(k) for k in np.flatnonzero(vals >= vals.max() - tol)]
        contiguous = _contiguous(indices)
    count = int(bad.sum())
    return QuasiConcavityReport(
        i, x, samples, [(tuple(p), tuple(q)) for p, q in zip(a, b)], count, worst,
        indices, contiguous, "violations found" if count else "no violation found")


def _probe_finite(econ, i, x, sl, tol):
    pts = econ.space(i).array[list(sl.indices)]
    vals = payoff_batch(econ, i, x, sl.indices)
    triples = []
    n = len(pts)
    for p in range(n):
        for q in range(p + 1, n):
            diff = pts[p] - pts[q]
            axis = int(np.argmax(np.abs(diff)))
            if diff[axis] == 0:
                continue
            for r in range(n):
                if r in (p, q):
                    continue
                lam = (pts[r][axis] - pts[q][axis]) / diff[axis]
                if 0 < lam < 1 and np.allclose(lam * pts[p] + (1 - lam) * pts[q], pts[r],
                                               rtol=0, atol=1e-12):
                    triples.append((p, q, r, float(lam)))
    if not triples:
        raise UnsupportedOperation("finite slice has no three collinear points to probe")
    worst = None
    count = 0
    for p, q, r, lam in triples:
        deficit = min(vals[p], vals[q]) - vals[r]
        if deficit > tol:
            count += 1
            if worst is None or deficit > worst["deficit"]:
                worst = {"a": sl.labels[p], "b": sl.labels[q], "lambda": lam,
                         "deficit": float(deficit)}
    indices = contiguous = None
    if pts.shape[1] == 1:
        order = np.argsort(pts[:, 0], kind="stable")
        sorted_vals = vals[order]
        indices = [int(k) for k in np.flatnonzero(sorted_vals >= sorted_vals.max() - tol)]
        contiguous = _contiguous(indices)
    return QuasiConcavityReport(
        i, x, len(triples), [(sl.labels[p], sl.labels[q]) for p, q, _, _ in triples], count,
        worst, indices, contiguous, "violations found" if count else "no violation found")
