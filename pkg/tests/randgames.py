"""Random finite economies plus a brute-force oracle that shares no code with gnep.

Payoffs are integers divided by two, inequality coefficients are small
integers, so every comparison in the oracle is exact.
"""
import itertools

import numpy as np

from gnep.economy import Economy, FiniteSpace, Shared, TablePayoff, Unconstrained


class Game:
    def __init__(self, econ, sizes, tables, ineqs):
        self.econ = econ
        self.sizes = sizes
        self.tables = tables      # tables[i][profile + (dev,)]
        self.ineqs = ineqs        # list of (coefs per player, const): sum c_a * k_a + const <= 0

    def labels(self, profile):
        return tuple(f"s{k}" for k in profile)

    def feasible(self, profile):
        return all(sum(c * k for c, k in zip(coefs, profile)) + const <= 0
                   for coefs, const in self.ineqs)

    def profiles(self):
        return list(itertools.product(*(range(n) for n in self.sizes)))

    def slice(self, a, profile):
        out = []
        for k in range(self.sizes[a]):
            q = list(profile)
            q[a] = k
            if self.feasible(q):
                out.append(k)
        return out

    def is_equilibrium(self, profile):
        if not self.feasible(profile):
            return False
        for a in range(len(self.sizes)):
            here = self.tables[a][tuple(profile) + (profile[a],)]
            for k in self.slice(a, profile):
                if self.tables[a][tuple(profile) + (k,)] > here:
                    return False
        return True

    def equilibria(self):
        return [self.labels(p) for p in self.profiles() if self.is_equilibrium(p)]

    def tilde_v(self, profile):
        best = None
        for q in self.profiles():
            if not self.feasible(q):
                continue
            total = 0.0
            for a in range(len(self.sizes)):
                total += (self.tables[a][tuple(profile) + (q[a],)]
                          - self.tables[a][tuple(profile) + (profile[a],)])
            best = total if best is None else max(best, total)
        return best


def _term(c, a):
    return f"{c}*x[{a + 1}][0]"


def random_game(rng, shared=None, max_players=3, max_size=5) -> Game:
    n = int(rng.integers(1, max_players + 1))
    sizes = tuple(int(rng.integers(1, max_size + 1)) for _ in range(n))
    spaces = tuple(FiniteSpace.of([f"s{k}" for k in range(m)]) for m in sizes)
    tables = []
    for a in range(n):
        shape = sizes + (sizes[a],)
        # few distinct values so ties are common
        tables.append(rng.integers(-4, 5, size=shape).astype(float) / 2)
    if shared is None:
        shared = bool(rng.integers(0, 2))
    ineqs = []
    if shared:
        for _ in range(int(rng.integers(1, 3))):
            coefs = [int(c) for c in rng.integers(-1, 3, size=n)]
            const = -int(rng.integers(0, 2 * sum(sizes)))
            ineqs.append((coefs, const))
        constraint = Shared.of(*(" + ".join(_term(c, a) for a, c in enumerate(coefs)) + f" + {const}"
                                 for coefs, const in ineqs))
    else:
        constraint = Unconstrained()
    econ = Economy(spaces, constraint, tuple(TablePayoff(t) for t in tables))
    return Game(econ, sizes, tables, ineqs)


def games(count, seed, **kw):
    rng = np.random.default_rng(seed)
    return [random_game(rng, **kw) for _ in range(count)]
