"""Independent reference computations used only by the tests.

Nothing here imports the optimizers under test: the smooth min-entropy
oracle is an exact rational simplex, the smooth max-entropy oracle a
search over every set of removable atoms.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction


def simplex_max(c, A, b):
    """max c.z subject to A z <= b, z >= 0, with b >= 0, in exact rationals.

    Dense tableau with Bland's rule, so it terminates on degenerate vertices.
    """
    m, n = len(A), len(c)
    rows = [
        [Fraction(v) for v in A[i]] + [Fraction(int(i == j)) for j in range(m)] + [Fraction(b[i])]
        for i in range(m)
    ]
    obj = [Fraction(-v) for v in c] + [Fraction(0)] * (m + 1)
    basis = [n + i for i in range(m)]
    while True:
        enter = next((j for j in range(n + m) if obj[j] < 0), None)
        if enter is None:
            return obj[-1]
        pick = None
        for i in range(m):
            a = rows[i][enter]
            if a > 0:
                ratio = rows[i][-1] / a
                if pick is None or ratio < pick[0] or (ratio == pick[0] and basis[i] < basis[pick[1]]):
                    pick = (ratio, i)
        if pick is None:
            raise ArithmeticError("unbounded program")
        r = pick[1]
        piv = rows[r][enter]
        rows[r] = [v / piv for v in rows[r]]
        for i in range(m):
            if i != r and rows[i][enter]:
                f = rows[i][enter]
                rows[i] = [a - f * b_ for a, b_ in zip(rows[i], rows[r])]
        if obj[enter]:
            f = obj[enter]
            obj = [a - f * b_ for a, b_ in zip(obj, rows[r])]
        basis[r] = enter


def lp_guessing_probability(masses: dict, eps: Fraction) -> Fraction:
    """min over sub-tables Q <= P with mass removed <= eps of sum_y max_x Q(x, y).

    Written as: remove D(x, y) in [0, P(x, y)], save s_y on column y's cap,
    with s_y - D(x, y) <= M_y - P(x, y), sum D <= eps.  The origin is feasible.
    """
    atoms = [k for k, v in masses.items() if v > 0]
    ys = sorted({y for _, y in atoms}, key=repr)
    cap = {y: max(masses[(x, yy)] for (x, yy) in atoms if yy == y) for y in ys}
    nd = len(atoms)
    nvar = nd + len(ys)
    A, b = [], []
    for i, (x, y) in enumerate(atoms):
        row = [0] * nvar
        row[nd + ys.index(y)] = 1
        row[i] = -1
        A.append(row)
        b.append(cap[y] - masses[(x, y)])
    A.append([1] * nd + [0] * len(ys))
    b.append(eps)
    for i, key in enumerate(atoms):
        row = [0] * nvar
        row[i] = 1
        A.append(row)
        b.append(masses[key])
    c = [0] * nd + [1] * len(ys)
    saved = simplex_max(c, A, b)
    return sum(cap.values()) - saved


def removal_support_profile(masses: dict) -> dict:
    """removed mass -> smallest achievable max column support, over all removal sets."""
    atoms = [k for k, v in masses.items() if v > 0]
    best: dict = {}
    for r in range(len(atoms) + 1):
        for subset in itertools.combinations(range(len(atoms)), r):
            removed = sum((masses[atoms[i]] for i in subset), Fraction(0))
            if removed >= 1:
                continue
            keep = [atoms[i] for i in range(len(atoms)) if i not in subset]
            counts: dict = {}
            for _, y in keep:
                counts[y] = counts.get(y, 0) + 1
            size = max(counts.values())
            if size < best.get(removed, math.inf):
                best[removed] = size
    return best


def brute_max_support(profile: dict, eps: Fraction) -> int:
    return min(s for removed, s in profile.items() if removed <= eps)


def random_table(rng: random.Random, nx: int, ny: int, total: int = 16) -> dict:
    """Integer counts summing to ``total`` on an nx x ny grid, as exact masses."""
    counts = [0] * (nx * ny)
    for _ in range(total):
        counts[rng.randrange(nx * ny)] += 1
    return {(i // ny, i % ny): Fraction(c, total) for i, c in enumerate(counts) if c}


def corpus(seed: int = 20240611, n3: int = 110, n4: int = 110) -> list:
    rng = random.Random(seed)
    tables = [random_table(rng, 3, 3) for _ in range(n3)]
    tables += [random_table(rng, 4, 4) for _ in range(n4)]
    return tables


def shannon(p: dict) -> float:
    return -sum(float(v) * math.log2(v) for v in p.values() if v > 0)


def cond_entropy_direct(masses: dict) -> float:
    """H(X|Y) = sum_y P(y) H(X|Y=y), evaluated row by row."""
    py: dict = {}
    for (_, y), v in masses.items():
        py[y] = py.get(y, 0) + v
    total = 0.0
    for y, pyv in py.items():
        col = {x: v / pyv for (x, yy), v in masses.items() if yy == y}
        total += float(pyv) * shannon(col)
    return total
