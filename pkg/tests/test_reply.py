import numpy as np
import pytest

from gnep import corpus
from gnep.config import Config
from gnep.economy import (
    EmptySliceError, Economy, FiniteSpace, FormulaPayoff, Shared, Unconstrained, payoff_value,
)
from gnep.reply import (
    EQUILIBRIUM, INCONCLUSIVE, NOT_EQUILIBRIUM, best_reply, global_best_reply,
    is_nash_equilibrium, is_phi_fixed_point, marginal_value,
)

from randgames import games


def test_marginal_value_examples(pd, bng):
    assert marginal_value(pd, 1, ("C", "C")) == 5
    assert marginal_value(bng, 1, ("3", "5")) == 1
    bump = corpus.concave_bump().economy
    assert marginal_value(bump, 1, ((0.2,),)) == pytest.approx(0.25, abs=1e-8)


def test_best_reply_examples(pd, bng):
    br = best_reply(pd, 1, ("C", "C"))
    assert br.points == ["D"] and br.value == 5 and br.exact
    br = best_reply(bng, 1, ("3", "5"))
    assert br.points == ["6", "7", "8", "9"] and br.value == 1
    space = FiniteSpace.of(["A", "B"])
    flat = Economy((space,), Unconstrained(), (FormulaPayoff.of("0"),))
    assert best_reply(flat, 1, ("A",)).points == ["A", "B"]


def test_global_best_reply_examples(pd, locked):
    assert [b.points for b in global_best_reply(pd, ("C", "C"))] == [["D"], ["D"]]
    assert [b.points for b in global_best_reply(pd, ("D", "D"))] == [["D"], ["D"]]
    assert [b.points for b in global_best_reply(locked, ("0", "0"))] == [["0"], ["0"]]


def test_box_best_reply_is_admissible_and_near_optimal(link):
    x = ((0.3,), (0.3,))
    br = best_reply(link, 1, x)
    # analytic best reply: min((2 - 0.3)/2, 1 - 0.3) = 0.7 on the binding constraint
    assert len(br.points) >= 1
    for p in br.points:
        assert p[0] + 0.3 <= 1 + 1e-9
        assert payoff_value(link, 1, x, p) >= br.value - 1e-8
    assert br.points[0][0] == pytest.approx(0.7, abs=1e-6)
    assert br.value == pytest.approx(0.7, abs=1e-9)


def test_nash_examples(pd, bng):
    assert is_nash_equilibrium(pd, ("D", "D")).verdict == EQUILIBRIUM
    rep = is_nash_equilibrium(pd, ("C", "C"))
    assert rep.verdict == NOT_EQUILIBRIUM
    assert rep.players[0].witness == "D" and rep.players[0].improvement == 2
    assert is_nash_equilibrium(bng, ("9", "9")).verdict == EQUILIBRIUM


def test_nash_shared_link(link):
    for a in (0.5, 0.3, 0.0, 1.0):
        assert is_nash_equilibrium(link, ((a,), (1 - a,))).verdict == EQUILIBRIUM
    rep = is_nash_equilibrium(link, ((0.3,), (0.3,)))
    assert rep.verdict == NOT_EQUILIBRIUM and rep.feasible
    assert rep.players[0].witness[0] == pytest.approx(0.7, abs=1e-6)
    assert rep.players[0].improvement == pytest.approx(0.70 - 0.42, abs=1e-8)


def test_infeasible_point_is_not_equilibrium(link, locked):
    rep = is_nash_equilibrium(link, ((0.8,), (0.5,)))
    assert rep.verdict == NOT_EQUILIBRIUM and not rep.feasible
    rep = is_nash_equilibrium(locked, ("0", "1"))
    assert rep.verdict == NOT_EQUILIBRIUM and not rep.feasible


def test_unconverged_search_is_inconclusive():
    bump = corpus.concave_bump().economy
    cfg = Config(rounds=3, max_rounds=1)
    assert is_nash_equilibrium(bump, ((0.5,),), cfg=cfg).verdict == INCONCLUSIVE
    assert is_nash_equilibrium(bump, ((0.5,),)).verdict == EQUILIBRIUM
    # a clear improvement is still a definite finding
    assert is_nash_equilibrium(bump, ((0.0,),), cfg=cfg).verdict == NOT_EQUILIBRIUM


def test_empty_slice_raises():
    space = FiniteSpace.of(["0", "1"])
    econ = Economy((space, space), Shared.of("x[2][0] - 0.5"),
                   (FormulaPayoff.of("y[0]"), FormulaPayoff.of("y[0]")))
    with pytest.raises(EmptySliceError):
        marginal_value(econ, 1, ("0", "1"))


def test_phi_fixed_point_examples(pd, locked):
    assert is_phi_fixed_point(pd, ("D", "D"))
    assert not is_phi_fixed_point(pd, ("C", "D"))
    assert is_phi_fixed_point(locked, ("1", "1"))


def test_definitional_equivalence_on_random_games():
    for g in games(100, seed=21):
        econ = g.econ
        for x in econ.profiles():
            prof = tuple(econ.space(i).index[p] for i, p in zip(econ.players, x))
            truth = g.is_equilibrium(prof)
            if not g.feasible(prof):
                assert not truth
                continue
            verdict = is_nash_equilibrium(econ, x).verdict
            assert (verdict == EQUILIBRIUM) == truth
            assert is_phi_fixed_point(econ, x) == truth


def test_marginal_value_dominates_current_payoff():
    for g in games(50, seed=22):
        econ = g.econ
        for x in econ.profiles():
            if not g.feasible(tuple(econ.space(i).index[p] for i, p in zip(econ.players, x))):
                continue
            for i in econ.players:
                br = best_reply(econ, i, x)
                assert br.points
                assert br.value >= payoff_value(econ, i, x, x[i - 1])


def test_box_marginal_dominates_current_payoff(link):
    rng = np.random.default_rng(5)
    for _ in range(50):
        a, b = rng.random(2)
        if a + b > 1:
            a, b = 1 - a, 1 - b
        x = ((float(a),), (float(b),))
        for i in (1, 2):
            assert marginal_value(link, i, x) >= payoff_value(link, i, x, x[i - 1])
