"""Shannon, min- and max-entropies of exact tables, with exact smooth optimizers.

Every quantity is computed from exact rational masses; the logarithm is the
last step, in binary64.  Results are accurate to well below 1e-9.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dist import JointDist, MultiDist, _Table, as_fraction
from .errors import DomainError

LOG_TOL = 1e-9


def log2_exact(q) -> float:
    """log2 of a positive rational without first rounding it to a float."""
    q = Fraction(q)
    if q <= 0:
        raise DomainError("log of a non-positive number")
    return math.log2(q.numerator) - math.log2(q.denominator)


def binary_entropy(p) -> float:
    if isinstance(p, (str, Fraction, int)) and not isinstance(p, bool):
        p = as_fraction(p)
        if not 0 <= p <= 1:
            raise DomainError(f"binary entropy needs p in [0, 1], got {p}")
        if p in (0, 1):
            return 0.0
        return -float(p) * log2_exact(p) - float(1 - p) * log2_exact(1 - p)
    p = float(p)
    if not 0.0 <= p <= 1.0 or math.isnan(p):
        raise DomainError(f"binary entropy needs p in [0, 1], got {p}")
    if p in (0.0, 1.0):
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


def _entropy_of_weights(weights, scale) -> float:
    """-sum p log p for masses weight/scale; equal weights are grouped."""
    total = 0.0
    for w, count in Counter(weights).items():
        if w == 0:
            continue
        p = Fraction(w, scale) if not isinstance(w, Fraction) else w / scale
        total -= count * float(p) * log2_exact(p)
    return total


def entropy(d) -> float:
    """H of a Dist, or the joint entropy H(XY) of a table."""
    return _entropy_of_weights(d.weights.values(), d.scale)


def _marginal_weights(j: _Table, side: int) -> dict:
    acc: dict = {}
    for key, v in j.weights.items():
        acc[key[side]] = acc.get(key[side], 0) + v
    return acc


def shannon_cond(j: _Table) -> float:
    """H(X|Y) = H(XY) - H(Y), summed over the support only."""
    hy = _entropy_of_weights(_marginal_weights(j, 1).values(), j.scale)
    return max(entropy(j) - hy, 0.0)


def shannon_cond_rev(j: _Table) -> float:
    """H(Y|X)."""
    hx = _entropy_of_weights(_marginal_weights(j, 0).values(), j.scale)
    return max(entropy(j) - hx, 0.0)


def mutual_info(j: _Table) -> float:
    hx = _entropy_of_weights(_marginal_weights(j, 0).values(), j.scale)
    return max(hx - shannon_cond(j), 0.0)


def mutual_info_cond(
    t: MultiDist,
    x: Sequence[int] = (0,),
    y: Sequence[int] = (1,),
    z: Sequence[int] = (2,),
) -> float:
    """I(X;Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z) over coordinate groups."""

    def h(idx) -> float:
        return _entropy_of_weights(t.marginal(tuple(idx)).weights.values(), t.scale) if idx else 0.0

    val = h(list(x) + list(z)) + h(list(y) + list(z)) - h(list(x) + list(y) + list(z)) - h(z)
    return 0.0 if abs(val) < 1e-12 else val


def guessing_probability(j: _Table) -> Fraction:
    """Sum over y of max_x P(x, y), exactly."""
    best: dict = {}
    for (_, y), v in j.weights.items():
        if v > best.get(y, 0):
            best[y] = v
    return Fraction(sum(best.values())) / j.scale


def min_entropy_cond(j: _Table) -> float:
    return -log2_exact(guessing_probability(j))


def max_support_size(j: _Table) -> int:
    sizes = Counter(y for (_, y) in j.weights)
    return max(sizes.values()) if sizes else 0


def max_entropy_cond(j: _Table) -> float:
    return math.log2(max_support_size(j))


@dataclass(frozen=True)
class EntropyReport:
    """Result of a smooth-entropy optimization.

    ``witness`` maps atoms to event weights; atoms not listed have weight 1,
    so ``apply_event(j, witness)`` rebuilds the optimal sub-table.
    ``optimum`` is the exact optimal guessing probability (min-entropy) or
    support size (max-entropy).
    """

    value: float
    epsilon: Fraction
    witness: Mapping[tuple, Fraction] = field(repr=False)
    optimum: Fraction | int = 0


def _check_eps(eps) -> Fraction:
    eps = as_fraction(eps)
    if not 0 <= eps < 1:
        raise DomainError(f"smoothing parameter must lie in [0, 1), got {eps}")
    return eps


def smooth_min_entropy(j: JointDist, eps) -> EntropyReport:
    """H_min^eps(X|Y) by water-filling the column maxima.

    Lowering column y's cap from one sorted mass level to the next costs
    (tie count) units of removed mass per unit of objective saved, and those
    per-column slopes only grow, so spending the eps budget on the cheapest
    segments first is optimal.
    """
    eps = _check_eps(eps)
    scale = j.scale
    cols = j.columns()
    order = {y: i for i, y in enumerate(j.y_alphabet)}
    segments = []
    levels: dict = {}
    for y, col in cols.items():
        masses = sorted(col.values(), reverse=True)
        levels[y] = Fraction(masses[0])
        masses.append(0)
        for tie in range(1, len(masses)):
            drop = masses[tie - 1] - masses[tie]
            if drop:
                segments.append((tie, order[y], y, Fraction(drop)))
    segments.sort(key=lambda s: (s[0], s[1]))

    budget = eps * scale
    for tie, _, y, drop in segments:
        if budget <= 0:
            break
        cost = tie * drop
        spend = min(budget, cost)
        levels[y] -= spend / tie
        budget -= spend

    witness = {}
    for y, col in cols.items():
        cap = levels[y]
        for x, v in col.items():
            if v > cap:
                witness[(x, y)] = cap / v
    optimum = sum(levels.values()) / scale
    return EntropyReport(-log2_exact(optimum), eps, witness, optimum)


def smooth_max_entropy(j: JointDist, eps) -> EntropyReport:
    """H_max^eps(X|Y): the cheapest atom removals that cap every column's support.

    Only zero event weights shrink a support, so the optimum removes whole
    atoms: for a target size s each column drops its lightest n_y - s atoms.
    """
    eps = _check_eps(eps)
    budget = eps * j.scale
    cols = j.columns()
    rank = {x: i for i, x in enumerate(j.x_alphabet)}
    sorted_cols = {
        y: sorted(col.items(), key=lambda kv: (kv[1], rank[kv[0]])) for y, col in cols.items()
    }
    n_max = max(len(c) for c in sorted_cols.values())
    best = n_max
    for s in range(n_max, 0, -1):
        cost = 0
        for atoms in sorted_cols.values():
            extra = len(atoms) - s
            if extra > 0:
                cost += sum(v for _, v in atoms[:extra])
        if cost <= budget:
            best = s
        else:
            break
    witness = {}
    for y, atoms in sorted_cols.items():
        extra = len(atoms) - best
        for x, _ in atoms[: max(extra, 0)]:
            witness[(x, y)] = Fraction(0)
    return EntropyReport(math.log2(best), eps, witness, best)
