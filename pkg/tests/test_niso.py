import numpy as np
import pytest

from gnep import corpus
from gnep.economy import BoundEntry, BoundExprs, BoxSpace, Economy, FormulaPayoff
from gnep.expr import parse
from gnep.niso import (
    CONFIRMED, INAPPLICABLE, ONE_WAY, REFUTED, InfeasiblePointError, NotAdmissibleError,
    as_admissible, big_v, certify, is_r_fixed_point, psi, r_set, tilde_r_set, tilde_v,
)
from gnep.reply import EQUILIBRIUM, best_reply, is_nash_equilibrium

from randgames import games


def _index(econ, x):
    return tuple(econ.space(i).index[p] for i, p in zip(econ.players, x))


def test_psi_examples(pd):
    assert psi(pd, ("C", "C"), ("D", "D")).value == 4
    assert psi(pd, ("D", "D"), ("C", "C")).value == -2
    v = psi(pd, ("C", "C"), ("D", "C"))
    assert v.terms == (2.0, 0.0) and v.value == sum(v.terms)


def test_psi_diagonal_is_exactly_zero():
    for name in corpus.CORPUS:
        econ = corpus.get(name).economy
        points = econ.profiles() if econ.all_finite else [
            econ.decision(list(p)) for p in np.random.default_rng(0).random((20, econ.n))]
        for x in points:
            assert psi(econ, x, x).value == 0.0


def test_big_v_examples(pd, link):
    r = big_v(pd, ("C", "C"))
    assert (r.value, r.maximizer) == (4, ("D", "D"))
    r = big_v(pd, ("D", "D"))
    assert (r.value, r.maximizer) == (0, ("D", "D"))
    r = big_v(link, ((0.5,), (0.5,)))
    assert r.value == pytest.approx(0.0, abs=1e-8)
    assert r.maximizer[0][0] == pytest.approx(0.5, abs=1e-6)
    assert r.maximizer[1][0] == pytest.approx(0.5, abs=1e-6)


def test_r_set_examples(pd, locked):
    assert r_set(pd, ("D", "D")).points() == [("D", "D")]
    assert r_set(locked, ("0", "0")).points() == [("0", "0")]
    space = pd.spaces[0]
    flat = Economy((space, space), pd.constraint, (FormulaPayoff.of("1"), FormulaPayoff.of("1")))
    assert len(r_set(flat, ("C", "C"))) == 4


def test_decomposition_matches_enumeration():
    for g in games(100, seed=31):
        econ = g.econ
        for x in econ.profiles():
            prof = _index(econ, x)
            if any(not g.slice(a, prof) for a in range(econ.n)):
                continue
            a = big_v(econ, x, method="decompose")
            b = big_v(econ, x, method="enumerate")
            assert a.value == b.value
            assert set(r_set(econ, x).points()) == set(r_set(econ, x, method="enumerate").points())


def test_r_set_is_product_of_best_replies_at_fixed_points():
    for g in games(100, seed=32):
        econ = g.econ
        for x in econ.profiles():
            if not g.feasible(_index(econ, x)):
                continue
            r = r_set(econ, x)
            assert r.factors == [best_reply(econ, i, x).points for i in econ.players]


def test_v_zero_and_r_fixed_points_match_equilibria():
    for g in games(100, seed=33):
        econ = g.econ
        truth = set(g.equilibria())
        feasible = [x for x in econ.profiles() if g.feasible(_index(econ, x))]
        assert {x for x in feasible if big_v(econ, x).value == 0} == truth
        assert {x for x in feasible if is_r_fixed_point(econ, x)} == truth


def test_v_nonnegative_on_box(link):
    rng = np.random.default_rng(3)
    for a, b in rng.random((100, 2)):
        if a + b > 1:
            continue
        assert big_v(link, ((float(a),), (float(b),))).value >= 0.0


def test_tilde_v_examples(locked, pd, link):
    r = tilde_v(locked, ("0", "0"))
    assert (r.value, r.maximizer) == (2, ("1", "1"))
    assert tilde_v(locked, ("1", "1")).value == 0
    assert tilde_v(as_admissible(pd), ("D", "D")).value == 0
    assert tilde_v(link, ((0.5,), (0.5,))).value == pytest.approx(0.0, abs=1e-8)


def test_tilde_v_on_link_equilibrium_line(link):
    # closed form along x1 + x2 = 1: (1 - 2a)^2 / 8
    for a in (0.2, 0.35, 0.5, 0.9):
        got = tilde_v(link, ((a,), (1 - a,))).value
        assert got == pytest.approx((1 - 2 * a) ** 2 / 8, abs=1e-7)


def test_tilde_v_matches_oracle_on_random_shared_games():
    for g in games(100, seed=34, shared=True):
        econ = g.econ
        for x in econ.profiles():
            prof = _index(econ, x)
            if not g.feasible(prof):
                with pytest.raises(InfeasiblePointError):
                    tilde_v(econ, x)
                continue
            assert tilde_v(econ, x).value == g.tilde_v(prof)


def test_tilde_direction_holds_on_random_shared_games():
    for g in games(100, seed=35, shared=True):
        econ = g.econ
        for x in econ.profiles():
            if not g.feasible(_index(econ, x)):
                continue
            if tilde_v(econ, x).value <= 1e-12:
                assert is_nash_equilibrium(econ, x).verdict == EQUILIBRIUM
            if x in tilde_r_set(econ, x):
                assert is_nash_equilibrium(econ, x).verdict == EQUILIBRIUM


def test_tilde_v_requires_admissible_form(pd):
    with pytest.raises(NotAdmissibleError):
        tilde_v(pd, ("D", "D"))
    box = BoxSpace.of([0.0], [1.0])
    bounded = Economy((box,), BoundExprs((BoundEntry(1, 0, None, parse("0.5")),)),
                      (FormulaPayoff.of("y[0]"),))
    with pytest.raises(NotAdmissibleError):
        as_admissible(bounded)


def test_certificates(pd, locked):
    c = certify(pd, ("D", "D"), "v")
    assert c.conclusion == CONFIRMED and c.value == 0 and c.applicable
    c = certify(pd, ("C", "C"), "v")
    assert c.conclusion == REFUTED and c.value == 4 and c.exact
    c = certify(locked, ("0", "0"), "tilde_v")
    assert c.conclusion == ONE_WAY and c.value == 2
    assert is_nash_equilibrium(locked, ("0", "0")).verdict == EQUILIBRIUM
    assert certify(locked, ("1", "1"), "tilde_v").conclusion == CONFIRMED
    assert certify(pd, ("D", "D"), "tilde_v").conclusion == INAPPLICABLE
    with pytest.raises(InfeasiblePointError):
        certify(locked, ("0", "1"), "tilde_v")


def test_v_certificate_inapplicable_without_own_independence():
    box = BoxSpace.of([0.0], [1.0])
    econ = Economy((box,), BoundExprs((BoundEntry(1, 0, parse("x[1][0]/2"), None),)),
                   (FormulaPayoff.of("y[0]"),))
    c = certify(econ, ((1.0,),), "v")
    assert not c.applicable and c.conclusion == INAPPLICABLE


def test_box_v_positive_is_not_a_refutation(link):
    c = certify(link, ((0.3,), (0.3,)), "v")
    assert c.value > 0.1 and c.conclusion != REFUTED
