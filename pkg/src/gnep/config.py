"""Tolerances, budgets and grid resolutions shared by every module."""
from __future__ import annotations

from dataclasses import asdict, dataclass, replace


@dataclass(frozen=True)
class Config:
    tol_eq: float = 1e-6        # equilibrium slack (per-player improvement)
    tol_opt: float = 1e-8       # optimality slack for best-reply sets
    tol_dedup: float = 1e-6     # distance below which Box points coincide
    tol_feas: float = 1e-9      # g(x) <= tol_feas on continuous spaces
    tol_cert: float = 1e-6      # V / tilde-V certificate threshold
    tol_qc: float = 1e-9        # quasi-concavity probe slack
    grid: int = 33              # initial points per axis, inner maximization
    rounds: int = 4             # mandatory refinement rounds
    max_rounds: int = 12        # extra rounds allowed before giving up on convergence
    shrink: int = 4             # window shrink factor per round
    starts: int = 4             # incumbents refined per round
    grid_cap: int = 1 << 16     # max points of an initial grid
    slice_grid: int = 65        # resolution for non-affine slice enclosures
    budget: int = 10_000        # outer evaluations for minimize_v / probes
    max_iter: int = 100         # best-response sweeps
    cycle_window: int = 16
    cycle_tol: float = 1e-9
    seed: int = 0

    def with_(self, **changes) -> "Config":
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def as_dict(self) -> dict:
        return asdict(self)


DEFAULT = Config()
