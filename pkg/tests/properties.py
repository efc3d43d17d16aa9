"""Random-instance checkers for the entropy inequalities.

Each checker draws one instance from ``rng`` and returns ``(small, big)``;
the inequality under test is ``small <= big``.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction as F

from otbounds.dist import JointDist, MultiDist, stat_distance
from otbounds.entropy import binary_entropy, shannon_cond, smooth_max_entropy, smooth_min_entropy

TOL = 1e-9


def random_triple(rng: random.Random, sizes=(3, 2, 2), total=24) -> MultiDist:
    """Integer weights on a random subset of X x Y x Z."""
    cells = [(x, y, z) for x in range(sizes[0]) for y in range(sizes[1]) for z in range(sizes[2])]
    w: dict = {}
    for _ in range(total):
        c = rng.choice(cells)
        w[c] = w.get(c, 0) + 1
    return MultiDist(w, total)


def random_markov(rng: random.Random, nx=3, ny=2, nz=3) -> MultiDist:
    """P(x, y, z) = a(y) b(x|y) c(z|y), so X <-> Y <-> Z holds by construction."""
    masses: dict = {}
    for y in range(ny):
        a = F(rng.randint(1, 4))
        b = [rng.randint(0, 3) for _ in range(nx)]
        c = [rng.randint(0, 3) for _ in range(nz)]
        b[rng.randrange(nx)] += 1
        c[rng.randrange(nz)] += 1
        for x in range(nx):
            for z in range(nz):
                if b[x] and c[z]:
                    masses[x, y, z] = a * F(b[x], sum(b)) * F(c[z], sum(c))
    total = sum(masses.values())
    return MultiDist.from_masses({k: v / total for k, v in masses.items()})


def random_eps(rng: random.Random, cap=F(1)) -> F:
    while True:
        e = F(rng.randint(0, 19), 20)
        if e < cap:
            return e


def _cond(t: MultiDist, left, right) -> JointDist:
    return t.joint(left, right)


def subadditivity(rng):
    t = random_triple(rng)
    e1 = random_eps(rng)
    e2 = random_eps(rng, 1 - e1)
    lhs = smooth_max_entropy(_cond(t, (0, 1), (2,)), e1 + e2).value
    rhs = smooth_max_entropy(_cond(t, (0,), (2,)), e1).value + smooth_max_entropy(_cond(t, (1,), (0, 2)), e2).value
    return lhs, rhs


def min_monotone(rng):
    t = random_triple(rng)
    e = random_eps(rng)
    return smooth_min_entropy(_cond(t, (0,), (1, 2)), e).value, smooth_min_entropy(_cond(t, (0,), (2,)), e).value


def max_monotone(rng):
    """Returns the worse of the two gaps in H(XY|Z) >= H(X|Z) >= H(X|YZ)."""
    t = random_triple(rng)
    e = random_eps(rng)
    a = smooth_max_entropy(_cond(t, (0, 1), (2,)), e).value
    b = smooth_max_entropy(_cond(t, (0,), (2,)), e).value
    c = smooth_max_entropy(_cond(t, (0,), (1, 2)), e).value
    return (b, a) if b - a > c - b else (c, b)


def chain(rng):
    t = random_triple(rng)
    e1 = random_eps(rng)
    e2 = random_eps(rng, 1 - e1)
    lhs = smooth_min_entropy(_cond(t, (0,), (2,)), e1).value - smooth_max_entropy(_cond(t, (0,), (1, 2)), e2).value
    return lhs, smooth_min_entropy(_cond(t, (1,), (2,)), e1 + e2).value


def data_processing_min(rng):
    # coordinates are (X, Y, Z) with X <-> Y <-> Z
    t = random_markov(rng)
    e = random_eps(rng)
    return smooth_min_entropy(_cond(t, (0,), (1,)), e).value, smooth_min_entropy(_cond(t, (0,), (1, 2)), e).value


def data_processing_max(rng):
    t = random_markov(rng)
    e = random_eps(rng)
    return smooth_max_entropy(_cond(t, (0,), (1,)), e).value, smooth_max_entropy(_cond(t, (0,), (1, 2)), e).value


def continuity(rng):
    """H(X'|Y') >= H(X|Y) - eps log|X| - h(eps) with eps the exact distance (kept <= 1/2)."""
    p = random_triple(rng, sizes=(3, 3, 1)).joint((0,), (1,))
    r = random_triple(rng, sizes=(3, 3, 1)).joint((0,), (1,))
    lam = F(rng.randint(0, 10), 20)
    q = JointDist.from_masses({k: (1 - lam) * dict(p.items()).get(k, 0) + lam * dict(r.items()).get(k, 0)
                               for k in set(dict(p.items())) | set(dict(r.items()))})
    eps = stat_distance(p, q)
    nx = len(set(p.support_x()) | set(q.support_x()))
    return shannon_cond(p) - float(eps) * math.log2(nx) - binary_entropy(eps), shannon_cond(q)


def fano(rng):
    t = random_triple(rng, sizes=(4, 4, 1)).joint((0,), (1,))
    eps = sum((v for (x, xh), v in t.items() if x != xh), F(0))
    nx = len(t.support_x())
    return shannon_cond(t), float(eps) * math.log2(nx) + binary_entropy(eps)


def h_concavity(rng):
    c = F(rng.randint(0, 40), 40)
    p = F(rng.randint(0, 40), 40)
    return float(c) * binary_entropy(p), binary_entropy(c * p)


LEMMAS = {
    "subadditivity": subadditivity,
    "min-monotonicity": min_monotone,
    "max-monotonicity": max_monotone,
    "chain": chain,
    "data-processing-min": data_processing_min,
    "data-processing-max": data_processing_max,
    "continuity": continuity,
    "fano": fano,
    "h-concavity": h_concavity,
}


def run_lemma(name: str, n: int = 500, seed: int = 0) -> tuple[int, float]:
    """(violations beyond TOL, worst excess small - big) over ``n`` instances."""
    rng = random.Random(f"{name}:{seed}")
    bad = 0
    worst = -math.inf
    for _ in range(n):
        small, big = LEMMAS[name](rng)
        worst = max(worst, small - big)
        if small > big + TOL:
            bad += 1
    return bad, worst
