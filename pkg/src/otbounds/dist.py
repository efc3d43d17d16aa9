"""Exact finite probability tables.

Masses are stored as nonnegative weights (ints or Fractions) over a shared
integer ``scale``; the mass of an atom is ``weight / scale``.  Uniform tables
therefore keep every weight equal to the small int ``1``, which keeps the
million-atom OT products cheap.  Zero-mass atoms are never stored, but
alphabets may list symbols without support.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Hashable, Iterable, Iterator, Mapping, Sequence

from .errors import AlphabetOverflow, DomainError, ParseError, WeightOutOfRange, ZeroConditioning

ATOM_BUDGET = 2**24

Symbol = Hashable


def as_fraction(value: Any) -> Fraction:
    """Parse an int, Fraction or ``"p/q"`` string as an exact rational.

    Floats are rejected: they are never a source of truth for a table.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"not a rational: {value!r}") from exc
    raise DomainError(f"not an exact rational: {value!r}")


def _ordered_union(*seqs: Iterable[Symbol]) -> tuple:
    seen: dict = {}
    for seq in seqs:
        for s in seq:
            seen.setdefault(s, None)
    return tuple(seen)


def _check_alphabet(alphabet: Sequence[Symbol]) -> tuple:
    alphabet = tuple(alphabet)
    if len(set(alphabet)) != len(alphabet):
        raise DomainError("alphabet labels must be distinct")
    return alphabet


def _common_scale(masses: Mapping[Any, Fraction]) -> tuple[dict, int]:
    """Rewrite rational masses as integer weights over one denominator."""
    scale = 1
    for m in masses.values():
        scale = scale * m.denominator // _gcd(scale, m.denominator)
    return {k: int(m * scale) for k, m in masses.items() if m != 0}, scale


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


class Dist:
    """A normalized distribution over an ordered alphabet."""

    __slots__ = ("alphabet", "_w", "_scale")

    def __init__(self, alphabet: Sequence[Symbol], weights: Mapping[Symbol, Any], scale: int = 1):
        self.alphabet = _check_alphabet(alphabet)
        known = set(self.alphabet)
        w = {}
        for s, v in weights.items():
            if s not in known:
                raise DomainError(f"symbol {s!r} not in alphabet")
            if v < 0:
                raise DomainError(f"negative mass at {s!r}")
            if v:
                w[s] = v
        if sum(w.values()) != scale:
            raise DomainError("distribution does not sum to 1")
        self._w = w
        self._scale = scale

    @classmethod
    def from_masses(cls, masses: Mapping[Symbol, Any], alphabet: Sequence[Symbol] | None = None) -> "Dist":
        fr = {s: as_fraction(m) for s, m in masses.items()}
        w, scale = _common_scale(fr)
        if alphabet is None:
            alphabet = tuple(masses)
        return cls(alphabet, w, scale)

    @classmethod
    def uniform(cls, alphabet: Sequence[Symbol]) -> "Dist":
        alphabet = tuple(alphabet)
        return cls(alphabet, {s: 1 for s in alphabet}, len(alphabet))

    @classmethod
    def point(cls, symbol: Symbol, alphabet: Sequence[Symbol] | None = None) -> "Dist":
        return cls(alphabet if alphabet is not None else (symbol,), {symbol: 1}, 1)

    def mass(self, s: Symbol) -> Fraction:
        return Fraction(self._w.get(s, 0), self._scale)

    __getitem__ = mass

    def items(self) -> Iterator[tuple[Symbol, Fraction]]:
        for s in self.alphabet:
            if s in self._w:
                yield s, Fraction(self._w[s], self._scale)

    @property
    def weights(self) -> Mapping[Symbol, Any]:
        return self._w

    @property
    def scale(self) -> int:
        return self._scale

    def support(self) -> tuple:
        return tuple(s for s in self.alphabet if s in self._w)

    def __len__(self) -> int:
        return len(self._w)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dist):
            return NotImplemented
        return dict(self.items()) == dict(other.items())

    def __repr__(self) -> str:
        body = ", ".join(f"{s!r}: {m}" for s, m in self.items())
        return f"Dist({{{body}}})"


class _Table:
    """Shared storage for joint and sub-normalized tables."""

    __slots__ = ("x_alphabet", "y_alphabet", "_w", "_scale", "_cols", "_rows")

    def __init__(
        self,
        weights: Mapping[tuple, Any],
        scale: int = 1,
        x_alphabet: Sequence[Symbol] | None = None,
        y_alphabet: Sequence[Symbol] | None = None,
    ):
        w = {}
        for key, v in weights.items():
            if v < 0:
                raise DomainError(f"negative mass at {key!r}")
            if v:
                w[key] = v
        if x_alphabet is None:
            x_alphabet = _ordered_union(k[0] for k in w)
        if y_alphabet is None:
            y_alphabet = _ordered_union(k[1] for k in w)
        self.x_alphabet = _check_alphabet(x_alphabet)
        self.y_alphabet = _check_alphabet(y_alphabet)
        xs, ys = set(self.x_alphabet), set(self.y_alphabet)
        for x, y in w:
            if x not in xs or y not in ys:
                raise DomainError(f"atom {(x, y)!r} outside the alphabets")
        self._w = w
        self._scale = scale
        self._cols = None
        self._rows = None

    @classmethod
    def from_masses(
        cls,
        masses: Mapping[tuple, Any],
        x_alphabet: Sequence[Symbol] | None = None,
        y_alphabet: Sequence[Symbol] | None = None,
    ):
        fr = {k: as_fraction(m) for k, m in masses.items()}
        w, scale = _common_scale(fr)
        if x_alphabet is None:
            x_alphabet = _ordered_union(k[0] for k in masses)
        if y_alphabet is None:
            y_alphabet = _ordered_union(k[1] for k in masses)
        return cls(w, scale, x_alphabet, y_alphabet)

    @classmethod
    def from_table(cls, x_alphabet: Sequence[Symbol], y_alphabet: Sequence[Symbol], rows: Sequence[Sequence[Any]]):
        x_alphabet, y_alphabet = tuple(x_alphabet), tuple(y_alphabet)
        if len(rows) != len(x_alphabet) or any(len(r) != len(y_alphabet) for r in rows):
            raise DomainError("mass table shape does not match the alphabets")
        masses = {
            (x, y): as_fraction(rows[i][j])
            for i, x in enumerate(x_alphabet)
            for j, y in enumerate(y_alphabet)
        }
        return cls.from_masses(masses, x_alphabet, y_alphabet)

    # -- access ---------------------------------------------------------

    @property
    def weights(self) -> Mapping[tuple, Any]:
        return self._w

    @property
    def scale(self) -> int:
        return self._scale

    def mass(self, x: Symbol, y: Symbol) -> Fraction:
        return Fraction(self._w.get((x, y), 0), self._scale)

    def items(self) -> Iterator[tuple[tuple, Fraction]]:
        s = self._scale
        for key, v in self._w.items():
            yield key, Fraction(v, s)

    def total_mass(self) -> Fraction:
        return Fraction(sum(self._w.values()), self._scale)

    def __len__(self) -> int:
        return len(self._w)

    def columns(self) -> dict:
        """Map each supported y to ``{x: weight}``; built once, cached."""
        if self._cols is None:
            cols: dict = {}
            for (x, y), v in self._w.items():
                cols.setdefault(y, {})[x] = v
            self._cols = cols
        return self._cols

    def rows(self) -> dict:
        if self._rows is None:
            rows: dict = {}
            for (x, y), v in self._w.items():
                rows.setdefault(x, {})[y] = v
            self._rows = rows
        return self._rows

    def support_x(self) -> tuple:
        rows = self.rows()
        return tuple(x for x in self.x_alphabet if x in rows)

    def support_y(self) -> tuple:
        cols = self.columns()
        return tuple(y for y in self.y_alphabet if y in cols)

    def to_rows(self) -> list[list[Fraction]]:
        return [[self.mass(x, y) for y in self.y_alphabet] for x in self.x_alphabet]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, _Table):
            return NotImplemented
        return (
            self.x_alphabet == other.x_alphabet
            and self.y_alphabet == other.y_alphabet
            and dict(self.items()) == dict(other.items())
        )

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(|X|={len(self.x_alphabet)}, |Y|={len(self.y_alphabet)}, "
            f"atoms={len(self._w)}, total={self.total_mass()})"
        )


class JointDist(_Table):
    """A normalized joint table P_XY."""

    __slots__ = ()

    def __init__(self, weights, scale=1, x_alphabet=None, y_alphabet=None):
        super().__init__(weights, scale, x_alphabet, y_alphabet)
        if sum(self._w.values()) != self._scale:
            raise DomainError("joint table does not sum to 1")

    def swap(self) -> "JointDist":
        w = {(y, x): v for (x, y), v in self._w.items()}
        return JointDist(w, self._scale, self.y_alphabet, self.x_alphabet)

    def relabel(self, fx=None, fy=None) -> "JointDist":
        """Push the table through symbol maps, merging colliding atoms."""
        fx = fx or (lambda s: s)
        fy = fy or (lambda s: s)
        w: dict = {}
        for (x, y), v in self._w.items():
            key = (fx(x), fy(y))
            w[key] = w.get(key, 0) + v
        xa = _ordered_union(fx(x) for x in self.x_alphabet)
        ya = _ordered_union(fy(y) for y in self.y_alphabet)
        return JointDist(w, self._scale, xa, ya)

    def channel(self) -> "Channel":
        """The conditional P_{Y|X} on the support of P_X."""
        rows = self.rows()
        return Channel(
            {x: Dist(self.y_alphabet, rows[x], sum(rows[x].values())) for x in self.support_x()}
        )


class SubDist(_Table):
    """A table with total mass at most 1, e.g. P restricted by an event."""

    __slots__ = ()

    def __init__(self, weights, scale=1, x_alphabet=None, y_alphabet=None):
        super().__init__(weights, scale, x_alphabet, y_alphabet)
        if sum(self._w.values()) > self._scale:
            raise DomainError("sub-normalized table has mass above 1")


@dataclass(frozen=True)
class Channel:
    """P_{Y|X}: for every input symbol a distribution over outputs."""

    rows: Mapping[Symbol, Dist]

    def joint(self, prior: Dist, budget: int = ATOM_BUDGET) -> JointDist:
        return compose(prior, self, budget=budget)


class MultiDist:
    """A joint table over r coordinates, atoms are r-tuples.

    Used for the triples and quadruples that property tests need; any two
    disjoint coordinate groups can be viewed as a :class:`JointDist`.
    """

    __slots__ = ("arity", "_w", "_scale")

    def __init__(self, weights: Mapping[tuple, Any], scale: int = 1):
        w = {k: v for k, v in weights.items() if v}
        arities = {len(k) for k in w}
        if len(arities) != 1:
            raise DomainError("atoms must all have the same arity")
        if any(v < 0 for v in w.values()):
            raise DomainError("negative mass")
        if sum(w.values()) != scale:
            raise DomainError("table does not sum to 1")
        self.arity = arities.pop()
        self._w = w
        self._scale = scale

    @classmethod
    def from_masses(cls, masses: Mapping[tuple, Any]) -> "MultiDist":
        w, scale = _common_scale({k: as_fraction(m) for k, m in masses.items()})
        return cls(w, scale)

    @property
    def weights(self):
        return self._w

    @property
    def scale(self) -> int:
        return self._scale

    def items(self):
        for k, v in self._w.items():
            yield k, Fraction(v, self._scale)

    @staticmethod
    def _pick(atom: tuple, idx: Sequence[int]):
        if len(idx) == 1:
            return atom[idx[0]]
        return tuple(atom[i] for i in idx)

    def joint(self, left: Sequence[int], right: Sequence[int] = ()) -> JointDist:
        """P over (coords ``left``, coords ``right``); one index gives a bare label."""
        w: dict = {}
        for atom, v in self._w.items():
            key = (self._pick(atom, left), self._pick(atom, right))
            w[key] = w.get(key, 0) + v
        return JointDist(w, self._scale)

    def marginal(self, idx: Sequence[int]) -> "MultiDist":
        w: dict = {}
        for atom, v in self._w.items():
            key = tuple(atom[i] for i in idx)
            w[key] = w.get(key, 0) + v
        return MultiDist(w, self._scale)

    def extend(self, fn) -> "MultiDist":
        """Append a deterministic coordinate ``fn(atom)`` to every atom."""
        w: dict = {}
        for atom, v in self._w.items():
            key = atom + (fn(atom),)
            w[key] = w.get(key, 0) + v
        return MultiDist(w, self._scale)


# -- operations ---------------------------------------------------------


def marginal(j: _Table, side: str = "left") -> Dist:
    """Row sums (``left``, P_X) or column sums (``right``, P_Y)."""
    if side in ("left", "x", 0):
        acc: dict = {}
        for (x, _), v in j.weights.items():
            acc[x] = acc.get(x, 0) + v
        alphabet = j.x_alphabet
    elif side in ("right", "y", 1):
        acc = {}
        for (_, y), v in j.weights.items():
            acc[y] = acc.get(y, 0) + v
        alphabet = j.y_alphabet
    else:
        raise DomainError(f"unknown side {side!r}")
    return Dist(alphabet, acc, sum(acc.values()) if isinstance(j, SubDist) else j.scale)


def condition(j: JointDist, y: Symbol) -> Dist:
    """P_{X|Y=y}; raises ZeroConditioning when P_Y(y) = 0."""
    col = j.columns().get(y)
    if not col:
        raise ZeroConditioning(f"P_Y({y!r}) = 0")
    return Dist(j.x_alphabet, col, sum(col.values()))


def compose(prior: Dist, channel: Channel, *, side: str = "left", budget: int = ATOM_BUDGET) -> JointDist:
    """Joint table from a prior and a channel.

    ``side='left'`` puts the prior on X (P_X P_{Y|X}); ``'right'`` puts it on Y,
    which is how a joint is rebuilt from P_Y and the conditionals P_{X|Y=y}.
    """
    w: dict = {}
    scale = None
    out_alphabet: tuple = ()
    for s, pm in prior.items():
        row = channel.rows[s]
        out_alphabet = _ordered_union(out_alphabet, row.alphabet)
        for o, cm in row.items():
            key = (s, o) if side == "left" else (o, s)
            w[key] = pm * cm
    if len(w) > budget:
        raise AlphabetOverflow(f"{len(w)} atoms exceed the budget of {budget}")
    fr, scale = _common_scale(w)
    if side == "left":
        return JointDist(fr, scale, prior.alphabet, out_alphabet)
    return JointDist(fr, scale, out_alphabet, prior.alphabet)


def product(a: JointDist, b: JointDist, budget: int = ATOM_BUDGET) -> JointDist:
    """Independent pair: labels become ``(x1, x2)`` and ``(y1, y2)``."""
    n_atoms = len(a) * len(b)
    if n_atoms > budget:
        raise AlphabetOverflow(f"{n_atoms} atoms exceed the budget of {budget}")
    w = {
        ((x1, x2), (y1, y2)): v1 * v2
        for (x1, y1), v1 in a.weights.items()
        for (x2, y2), v2 in b.weights.items()
    }
    xa = tuple(itertools.product(a.x_alphabet, b.x_alphabet))
    ya = tuple(itertools.product(a.y_alphabet, b.y_alphabet))
    return JointDist(w, a.scale * b.scale, xa, ya)


def power(j: JointDist, m: int, budget: int = ATOM_BUDGET) -> JointDist:
    """m independent copies with flat m-tuple labels; m = 1 keeps labels."""
    if m < 1:
        raise DomainError("need at least one copy")
    if m == 1:
        return j
    n_atoms = len(j) ** m
    if n_atoms > budget:
        raise AlphabetOverflow(f"{n_atoms} atoms exceed the budget of {budget}")
    atoms = list(j.weights.items())
    w = {}
    for combo in itertools.product(atoms, repeat=m):
        key = (tuple(c[0][0] for c in combo), tuple(c[0][1] for c in combo))
        v = 1
        for c in combo:
            v *= c[1]
        w[key] = v
    xa = tuple(itertools.product(j.x_alphabet, repeat=m))
    ya = tuple(itertools.product(j.y_alphabet, repeat=m))
    return JointDist(w, j.scale**m, xa, ya)


def stat_distance(p, q) -> Fraction:
    """Half the L1 distance, exact; works for Dist, JointDist or SubDist.

    Symbols missing from one side count as zero mass there.
    """
    pm = dict(p.items())
    qm = dict(q.items())
    total = Fraction(0)
    for key in pm.keys() | qm.keys():
        total += abs(pm.get(key, 0) - qm.get(key, 0))
    return total / 2


def apply_event(j: _Table, weights: Mapping[tuple, Any]) -> SubDist:
    """Entrywise product of the table with event weights in [0, 1].

    Atoms absent from ``weights`` keep weight 1 (they belong to the event).
    """
    fr = {}
    for key, w in weights.items():
        w = as_fraction(w)
        if not 0 <= w <= 1:
            raise WeightOutOfRange(f"event weight {w} at {key!r} outside [0, 1]")
        fr[key] = w
    out = {}
    for key, v in j.weights.items():
        out[key] = v * fr.get(key, 1)
    return SubDist(out, j.scale, j.x_alphabet, j.y_alphabet)


# -- file format ---------------------------------------------------------


def _label_in(v):
    if isinstance(v, list):
        return tuple(_label_in(e) for e in v)
    return v


def _label_out(v):
    if isinstance(v, tuple):
        return [_label_out(e) for e in v]
    return v


def table_to_obj(j: _Table) -> dict:
    return {
        "x_alphabet": [_label_out(x) for x in j.x_alphabet],
        "y_alphabet": [_label_out(y) for y in j.y_alphabet],
        "mass": [[str(m) for m in row] for row in j.to_rows()],
    }


def dumps_table(j: _Table) -> str:
    return json.dumps(table_to_obj(j), sort_keys=True)


def loads_table(text: str, subnormalized: bool = False) -> _Table:
    """Parse the JSON table format; rejects sub-normalized tables by default."""
    try:
        obj = json.loads(text)
        xa = [_label_in(v) for v in obj["x_alphabet"]]
        ya = [_label_in(v) for v in obj["y_alphabet"]]
        rows = obj["mass"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"malformed table: {exc}") from exc
    try:
        return (SubDist if subnormalized else JointDist).from_table(xa, ya, rows)
    except DomainError as exc:
        raise ParseError(str(exc)) from exc


def load_table(path, subnormalized: bool = False) -> _Table:
    with open(path, encoding="utf-8") as fh:
        return loads_table(fh.read(), subnormalized)
