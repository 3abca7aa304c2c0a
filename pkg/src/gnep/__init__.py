"""Generalized Nash equilibrium toolkit: abstract economies, best replies,
Nikaido-Isoda certificates and equilibrium search."""
from .config import Config, DEFAULT
from .economy import (
    BoundEntry, BoundExprs, BoxSpace, Economy, EconomyError, EmptySliceError, FinitePoints,
    FiniteSpace, FormulaPayoff, Shared, SubBox, TablePayoff, Unconstrained, ValidationReport,
    feasible_slice, is_feasible, own_independent, payoff_value, validate,
)
from .niso import (
    Certificate, NIValue, as_admissible, big_v, certify, psi, r_set, tilde_r_set, tilde_v,
)
from .reply import (
    BestReplySet, EquilibriumReport, best_reply, global_best_reply, is_nash_equilibrium,
    is_phi_fixed_point, marginal_value,
)
from .solver import (
    QuasiConcavityReport, SolveResult, best_response_iteration, enumerate_equilibria,
    minimize_v, probe_quasiconcavity,
)

__version__ = "0.1.0"
