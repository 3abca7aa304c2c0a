import pytest

from gnep import corpus
from gnep.economy import (
    BoundEntry, BoundExprs, BoxSpace, Economy, FiniteSpace, FormulaPayoff, Unconstrained,
)
from gnep.expr import parse
from gnep.niso import tilde_v
from gnep.reply import EQUILIBRIUM, is_nash_equilibrium
from gnep.solver import (
    DIVERGED, EXHAUSTED, FOUND, NONE_EXIST, InapplicableMethodError, UnsupportedOperation,
    best_response_iteration, enumerate_equilibria, minimize_v, probe_quasiconcavity,
)

from randgames import games


def _points(res):
    return [f.point for f in res.equilibria]


# ---------------------------------------------------------------- enumeration

def test_enumerate_examples(pd, bng):
    assert _points(enumerate_equilibria(pd)) == [("D", "D")]
    res = enumerate_equilibria(corpus.matching_pennies().economy)
    assert res.status == NONE_EXIST and res.equilibria == []
    assert _points(enumerate_equilibria(bng)) == [("9", "9")]


def test_enumerate_rejects_box(link):
    with pytest.raises(UnsupportedOperation):
        enumerate_equilibria(link)


def test_enumerate_matches_oracle_on_random_games():
    for g in games(100, seed=41):
        res = enumerate_equilibria(g.econ)
        assert _points(res) == g.equilibria()
        assert res.status == (FOUND if g.equilibria() else NONE_EXIST)
        for f in res.equilibria:
            assert f.report.verdict == EQUILIBRIUM


# ---------------------------------------------------------------- best response

def test_best_response_pd(pd):
    res = best_response_iteration(pd, ("C", "C"))
    assert res.status == FOUND and _points(res) == [("D", "D")]
    assert res.evaluations <= 2


def test_best_response_matching_pennies_cycles():
    res = best_response_iteration(corpus.matching_pennies().economy, ("H", "H"))
    assert res.status == DIVERGED and res.equilibria == []


def test_best_response_shared_link(link):
    for start in (((0.2,), (0.8,)), ((0.0,), (0.0,)), ((0.3,), (0.1,))):
        res = best_response_iteration(link, start)
        assert res.status == FOUND
        (x,) = _points(res)
        assert abs(x[0][0] + x[1][0] - 1) <= 1e-6
        assert is_nash_equilibrium(link, x).verdict == EQUILIBRIUM


def test_best_response_is_deterministic(link, bng):
    for econ, x0 in ((link, ((0.3,), (0.1,))), (bng, ("0", "0"))):
        a = best_response_iteration(econ, x0)
        b = best_response_iteration(econ, x0)
        assert a.trace == b.trace and a.status == b.status


def test_best_response_budget():
    res = best_response_iteration(corpus.bigger_number_game(30).economy, ("0", "0"), max_iter=3)
    assert res.status == EXHAUSTED and len(res.trace) == 4


def test_best_response_results_are_equilibria():
    for g in games(60, seed=42):
        econ = g.econ
        starts = [x for x in econ.profiles()
                  if g.feasible(tuple(econ.space(i).index[p] for i, p in zip(econ.players, x)))]
        for x0 in starts[:3]:
            res = best_response_iteration(econ, x0)
            for f in res.equilibria:
                assert f.point in g.equilibria()


# ---------------------------------------------------------------- V minimization

def test_minimize_v_pd(pd):
    res = minimize_v(pd, "v")
    assert res.status == FOUND and _points(res) == [("D", "D")]
    assert res.equilibria[0].value == 0


def test_minimize_v_matching_pennies_none_exist():
    assert minimize_v(corpus.matching_pennies().economy, "v").status == NONE_EXIST


def test_minimize_tilde_v_locked_pair(locked):
    res = minimize_v(locked, "tilde_v")
    assert _points(res) == [("1", "1")]
    assert res.notes and "('0', '0')" in res.notes[0]


def test_minimize_tilde_v_shared_link(link):
    res = minimize_v(link, "tilde_v", budget=10_000)
    assert res.status == FOUND and res.equilibria
    for f in res.equilibria:
        x = f.point
        assert f.value <= 1e-6
        assert abs(x[0][0] + x[1][0] - 1) <= 1e-3
        assert is_nash_equilibrium(link, x, tol_eq=1e-4).verdict == EQUILIBRIUM
        assert tilde_v(link, x).value <= 1e-6


def test_minimize_inapplicable(pd):
    with pytest.raises(InapplicableMethodError):
        minimize_v(pd, "tilde_v")
    box = BoxSpace.of([0.0], [1.0])
    econ = Economy((box,), BoundExprs((BoundEntry(1, 0, parse("x[1][0]/2"), None),)),
                   (FormulaPayoff.of("y[0]"),))
    with pytest.raises(InapplicableMethodError):
        minimize_v(econ, "v")


def test_minimize_finds_exactly_equilibria_on_random_games():
    for g in games(50, seed=43):
        res = minimize_v(g.econ, "v")
        assert _points(res) == g.equilibria()


# ---------------------------------------------------------------- quasi-concavity

def test_probe_concave():
    econ = corpus.concave_bump().economy
    rep = probe_quasiconcavity(econ, 1, ((0.5,),))
    assert rep.violation_count == 0 and rep.argmax_contiguous
    assert rep.verdict == "no violation found"


def test_probe_linear():
    econ = corpus.linear_ramp().economy
    rep = probe_quasiconcavity(econ, 1, ((0.5,),))
    assert rep.violation_count == 0 and rep.argmax_contiguous and rep.argmax_indices == [256]


def test_probe_convex_bump():
    econ = corpus.convex_bump().economy
    rep = probe_quasiconcavity(econ, 1, ((0.5,),))
    assert rep.violation_count >= 1
    assert rep.argmax_indices == [0, 256] and not rep.argmax_contiguous
    # the worst violation can be re-checked by direct evaluation
    w = rep.worst_violation
    f = lambda y: (y - 0.5) ** 2
    mid = w["lambda"] * w["a"][0] + (1 - w["lambda"]) * w["b"][0]
    assert f(mid) < min(f(w["a"][0]), f(w["b"][0])) - 1e-9


def test_probe_finite_collinear():
    space = FiniteSpace.of(["a", "b", "c"])
    econ = Economy((space,), Unconstrained(), (FormulaPayoff.of("pow(y[0] - 1, 2)"),))
    rep = probe_quasiconcavity(econ, 1, ("a",))
    assert rep.violation_count == 1 and rep.argmax_indices == [0, 2]
    two = Economy((FiniteSpace.of(["a", "b"]),), Unconstrained(), (FormulaPayoff.of("y[0]"),))
    with pytest.raises(UnsupportedOperation):
        probe_quasiconcavity(two, 1, ("a",))
