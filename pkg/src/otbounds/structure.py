"""Common part and sufficient statistics of a joint table."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping

from .dist import Dist, JointDist, MultiDist
from .entropy import entropy, mutual_info, mutual_info_cond


@dataclass(frozen=True)
class Partition:
    """Symbol -> class id, where the id is the class's first member in alphabet order."""

    classes: Mapping[Hashable, Hashable]

    def __call__(self, s: Hashable) -> Hashable:
        return self.classes[s]

    def blocks(self) -> dict:
        out: dict = {}
        for s, c in self.classes.items():
            out.setdefault(c, []).append(s)
        return out

    def __len__(self) -> int:
        return len(set(self.classes.values()))

    def is_identity(self) -> bool:
        return all(s == c for s, c in self.classes.items())


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, a):
        self.parent.setdefault(a, a)
        root = a
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[a] != root:
            self.parent[a], a = root, self.parent[a]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def common_part(j: JointDist) -> tuple[Partition, Partition, Dist]:
    """Connected components of the support graph between X and Y.

    Both partitions share class ids (the component's first X symbol), so
    ``px(x) == py(y)`` on every supported atom, and the returned Dist is the
    law of that common random variable C.
    """
    uf = _UnionFind()
    for x, y in j.weights:
        uf.union(("x", x), ("y", y))
    xs = j.support_x()
    ys = j.support_y()
    label: dict = {}
    for x in xs:
        label.setdefault(uf.find(("x", x)), x)
    px = Partition({x: label[uf.find(("x", x))] for x in xs})
    py = Partition({y: label[uf.find(("y", y))] for y in ys})
    acc: dict = {}
    for (x, _), v in j.weights.items():
        c = px(x)
        acc[c] = acc.get(c, 0) + v
    alphabet = tuple(dict.fromkeys(px(x) for x in xs))
    return px, py, Dist(alphabet, acc, j.scale)


def common_part_from_y(j: JointDist) -> Dist:
    """Law of C computed through the Y-side partition."""
    _, py, _ = common_part(j)
    acc: dict = {}
    for (_, y), v in j.weights.items():
        c = py(y)
        acc[c] = acc.get(c, 0) + v
    return Dist(tuple(acc), acc, j.scale)


def with_common_part(j: JointDist) -> MultiDist:
    """The triple (X, Y, C) as a MultiDist."""
    px, _, _ = common_part(j)
    return MultiDist({(x, y, px(x)): v for (x, y), v in j.weights.items()}, j.scale)


def mutual_info_given_common(j: JointDist, via_triple: bool = False) -> float:
    """I(X;Y|C) with C the common part.

    C is a function of X and of Y, so I(X;Y) = I(C;Y) + I(X;Y|C) = H(C) + I(X;Y|C);
    the default path uses that identity.  ``via_triple=True`` evaluates the
    conditional mutual information on the (X, Y, C) table instead.
    """
    if via_triple:
        return mutual_info_cond(with_common_part(j))
    _, _, c = common_part(j)
    val = mutual_info(j) - entropy(c)
    return 0.0 if abs(val) < 1e-12 else val


def _conditional_rows(j: JointDist) -> dict:
    rows = j.rows()
    out = {}
    for x in j.support_x():
        row = rows[x]
        total = sum(row.values())
        out[x] = {y: Fraction(v) / total for y, v in row.items()}
    return out


def sufficient_stat(j: JointDist, tol: float | None = None) -> Partition:
    """Group x by identical conditional rows P_{Y|X=x}.

    Equality is exact by default.  With ``tol`` set, rows within ``tol`` in
    every coordinate of the first member are merged (greedy, in alphabet order).
    """
    cond = _conditional_rows(j)
    classes: dict = {}
    if tol is None:
        seen: dict = {}
        for x, row in cond.items():
            key = frozenset(row.items())
            classes[x] = seen.setdefault(key, x)
        return Partition(classes)
    reps: list = []
    for x, row in cond.items():
        for rep in reps:
            rrow = cond[rep]
            keys = row.keys() | rrow.keys()
            if all(abs(float(row.get(k, 0) - rrow.get(k, 0))) <= tol for k in keys):
                classes[x] = rep
                break
        else:
            reps.append(x)
            classes[x] = x
    return Partition(classes)


def reduce(j: JointDist, part: Partition | None = None) -> JointDist:
    """Replace X by its class under ``part`` (default: the sufficient statistic)."""
    part = part or sufficient_stat(j)
    return j.relabel(fx=lambda x: part.classes.get(x, x))


def is_markov(t: MultiDist, x=(0,), y=(1,), z=(2,)) -> bool:
    """Exact check of X <-> Z <-> Y: P(xyz) P(z) == P(xz) P(yz) on all atoms."""

    def pick(atom, idx):
        return tuple(atom[i] for i in idx)

    pz: dict = {}
    pxz: dict = {}
    pyz: dict = {}
    pxyz: dict = {}
    for atom, v in t.weights.items():
        a, b, c = pick(atom, x), pick(atom, y), pick(atom, z)
        pz[c] = pz.get(c, 0) + v
        pxz[a, c] = pxz.get((a, c), 0) + v
        pyz[b, c] = pyz.get((b, c), 0) + v
        pxyz[a, b, c] = pxyz.get((a, b, c), 0) + v
    for (a, c), vac in pxz.items():
        for (b, c2), vbc in pyz.items():
            if c2 != c:
                continue
            if pxyz.get((a, b, c), 0) * pz[c] != vac * vbc:
                return False
    return True
