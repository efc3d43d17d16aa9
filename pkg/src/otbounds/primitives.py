"""Two-party primitives as distributed randomness or as function tables.

Label conventions:
  * k-bit strings inside OT tables are ints in ``range(2**k)``;
  * EQ and IP inputs are bit tuples;
  * a 1-out-of-n choice is the int ``c``, a t-out-of-n choice is a sorted tuple;
  * the Rabin erasure is the string ``ERASED`` and the leak placeholder ``HIDDEN``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Any, Callable, Hashable, Mapping, Sequence

from .dist import ATOM_BUDGET, JointDist, as_fraction, power
from .errors import AlphabetOverflow, DomainError, NotAFunction, NotPrime, ParseError

ERASED = "Δ"
HIDDEN = "⊥"


@dataclass(frozen=True)
class PrimitiveSpec:
    """A named primitive: ``kind`` is ``"randomness"`` or ``"function"``."""

    name: str
    kind: str
    joint: JointDist | None = None
    x_domain: tuple = ()
    y_domain: tuple = ()
    table: Mapping[tuple, Hashable] | None = field(default=None, repr=False)
    params: tuple = ()

    def __call__(self, x, y):
        if self.table is None:
            raise NotAFunction(f"{self.name} is not a function primitive")
        return self.table[(x, y)]

    def require_function(self) -> "PrimitiveSpec":
        if self.kind != "function" or self.table is None:
            raise NotAFunction(f"{self.name} is not a function primitive")
        return self

    def require_randomness(self) -> JointDist:
        if self.kind != "randomness" or self.joint is None:
            raise DomainError(f"{self.name} is not distributed randomness")
        return self.joint

    def column(self, y) -> tuple:
        return tuple(self.table[(x, y)] for x in self.x_domain)

    def restrict(self, x_domain: Sequence | None = None, y_domain: Sequence | None = None) -> "PrimitiveSpec":
        """The same function on sub-domains."""
        self.require_function()
        xd = tuple(x_domain) if x_domain is not None else self.x_domain
        yd = tuple(y_domain) if y_domain is not None else self.y_domain
        table = {(x, y): self.table[(x, y)] for x in xd for y in yd}
        return PrimitiveSpec(f"{self.name}|restricted", "function", None, xd, yd, table, self.params)


def _bits(n: int) -> list[tuple]:
    return list(itertools.product((0, 1), repeat=n))


def _choices(n: int, t: int) -> list:
    if t == 1:
        return list(range(n))
    return list(itertools.combinations(range(n), t))


def _pick(x: tuple, c):
    if isinstance(c, int):
        return x[c]
    return tuple(x[i] for i in c)


def is_prime(q: int) -> bool:
    if q < 2:
        return False
    return all(q % d for d in range(2, int(q**0.5) + 1))


# -- distributed randomness ----------------------------------------------


def make_ot_randomness(t: int, n: int, k: int, m: int = 1, budget: int = ATOM_BUDGET) -> PrimitiveSpec:
    """m independent randomized OT_t^n(k): U = (x_0..x_{n-1}), V = (c, x_c)."""
    if not (1 <= t < n and k >= 1 and m >= 1):
        raise DomainError("need 1 <= t < n, k >= 1, m >= 1")
    per_copy = (2 ** (n * k)) * comb(n, t)
    if per_copy**m > budget:
        raise AlphabetOverflow(f"{per_copy**m} atoms exceed the budget of {budget}")
    strings = range(2**k)
    w = {}
    for x in itertools.product(strings, repeat=n):
        for c in _choices(n, t):
            w[(x, (c, _pick(x, c)))] = 1
    ys = [(c, v) for c in _choices(n, t) for v in (strings if t == 1 else itertools.product(strings, repeat=t))]
    one = JointDist(w, len(w), tuple(itertools.product(strings, repeat=n)), tuple(ys))
    return PrimitiveSpec(f"ot:{t},{n},{k},{m}", "randomness", power(one, m, budget), params=(t, n, k, m))


def make_rabin_randomness(p, k: int) -> PrimitiveSpec:
    """U uniform on k bits, V = U with probability p and the erasure otherwise."""
    p = as_fraction(p)
    if not 0 <= p <= 1:
        raise DomainError("Rabin probability must lie in [0, 1]")
    if k < 1:
        raise DomainError("k must be positive")
    num, den = p.numerator, p.denominator
    w = {}
    for u in range(2**k):
        w[(u, u)] = num
        w[(u, ERASED)] = den - num
    ys = tuple(range(2**k)) + (ERASED,)
    return PrimitiveSpec(
        f"rabin:{p},{k}", "randomness", JointDist(w, den * 2**k, tuple(range(2**k)), ys), params=(p, k)
    )


def make_olfe_randomness(q: int, m: int = 1, budget: int = ATOM_BUDGET) -> PrimitiveSpec:
    """U = (a, b) uniform in GF(q)^2, V = (c, a + b c)."""
    if not is_prime(q):
        raise NotPrime(f"{q} is not prime")
    if m < 1:
        raise DomainError("m must be positive")
    w = {((a, b), (c, (a + b * c) % q)): 1 for a in range(q) for b in range(q) for c in range(q)}
    xs = tuple((a, b) for a in range(q) for b in range(q))
    ys = tuple((c, d) for c in range(q) for d in range(q))
    one = JointDist(w, q**3, xs, ys)
    return PrimitiveSpec(f"olfe:{q},{m}", "randomness", power(one, m, budget), params=(q, m))


def make_leaky_ot_randomness(alpha, m: int = 1, budget: int = ATOM_BUDGET) -> PrimitiveSpec:
    """Bit OT whose receiver also gets V' = x_{1-c} with probability 1 - alpha.

    The right-hand label is ``(c, x_c, v')`` so that H(U|V V') is H(X|Y) of the table.
    """
    alpha = as_fraction(alpha)
    if not 0 <= alpha <= 1:
        raise DomainError("alpha must lie in [0, 1]")
    num, den = alpha.numerator, alpha.denominator
    w = {}
    for x in itertools.product((0, 1), repeat=2):
        for c in (0, 1):
            w[(x, (c, x[c], HIDDEN))] = num
            w[(x, (c, x[c], x[1 - c]))] = den - num
    ys = tuple((c, v, leak) for c in (0, 1) for v in (0, 1) for leak in (0, 1, HIDDEN))
    one = JointDist(w, 8 * den, tuple(itertools.product((0, 1), repeat=2)), ys)
    return PrimitiveSpec(f"leaky-ot:{alpha}", "randomness", power(one, m, budget), params=(alpha, m))


def randomness_from_joint(name: str, joint: JointDist) -> PrimitiveSpec:
    return PrimitiveSpec(name, "randomness", joint)


# -- function tables -----------------------------------------------------


def function_from_callable(
    name: str, x_domain: Sequence, y_domain: Sequence, fn: Callable[[Any, Any], Hashable], budget: int = ATOM_BUDGET
) -> PrimitiveSpec:
    xd, yd = tuple(x_domain), tuple(y_domain)
    if len(xd) * len(yd) > budget:
        raise AlphabetOverflow(f"{len(xd) * len(yd)} table entries exceed the budget of {budget}")
    table = {(x, y): fn(x, y) for x in xd for y in yd}
    return PrimitiveSpec(name, "function", None, xd, yd, table)


def make_function(name: str, *params, budget: int = ATOM_BUDGET) -> PrimitiveSpec:
    """EQ(n), IP(n), OT(t, n, k) or OLFE(q) as a total function table."""
    key = name.lower()
    if key == "eq":
        (n,) = params
        dom = _bits(n)
        spec = function_from_callable(f"eq:{n}", dom, dom, lambda x, y: int(x == y), budget)
    elif key == "ip":
        (n,) = params
        dom = _bits(n)
        spec = function_from_callable(
            f"ip:{n}", dom, dom, lambda x, y: sum(a & b for a, b in zip(x, y)) % 2, budget
        )
    elif key == "ot":
        t, n, k = params
        if not (1 <= t < n and k >= 1):
            raise DomainError("need 1 <= t < n and k >= 1")
        size = 2 ** (n * k) * comb(n, t)
        if size > budget:
            raise AlphabetOverflow(f"{size} table entries exceed the budget of {budget}")
        xd = list(itertools.product(range(2**k), repeat=n))
        spec = function_from_callable(f"ot:{t},{n},{k}", xd, _choices(n, t), _pick, budget)
    elif key == "olfe":
        (q,) = params
        if not is_prime(q):
            raise NotPrime(f"{q} is not prime")
        xd = [(a, b) for a in range(q) for b in range(q)]
        spec = function_from_callable(f"olfe:{q}", xd, range(q), lambda x, c: (x[0] + x[1] * c) % q, budget)
    else:
        raise ParseError(f"unknown function primitive {name!r}")
    return PrimitiveSpec(spec.name, "function", None, spec.x_domain, spec.y_domain, spec.table, tuple(params))


def restricted_ot_function(t: int, n: int, k: int) -> PrimitiveSpec:
    """OT_t^n(k) restricted so that one choice reveals everything and one reveals nothing.

    For t <= n/2 Alice's first n - t strings are fixed to zero.  For larger t
    the first 2t - n positions are additionally forced into every choice set,
    which leaves OT_{n-t}^{2n-2t}(k), and that is restricted the same way; in
    both cases the first t strings are fixed.
    """
    f = make_function("ot", t, n, k)
    fixed = n - t if t <= n // 2 else t
    xd = tuple(x for x in f.x_domain if all(v == 0 for v in x[:fixed]))
    if t <= n // 2:
        return f.restrict(x_domain=xd)
    forced = set(range(2 * t - n))
    return f.restrict(x_domain=xd, y_domain=[c for c in f.y_domain if forced <= set(c)])


def check_condition_1(f: PrimitiveSpec) -> bool:
    """Every two distinct x are told apart by some y."""
    f.require_function()
    signatures = {tuple(f.table[(x, y)] for y in f.y_domain) for x in f.x_domain}
    return len(signatures) == len(f.x_domain)


def find_y1_y2(f: PrimitiveSpec) -> tuple | None:
    """A revealing y1 (f(., y1) injective) and a blind y2 (f(., y2) constant)."""
    f.require_function()
    y1 = y2 = None
    for y in f.y_domain:
        values = f.column(y)
        if y1 is None and len(set(values)) == len(values):
            y1 = y
        if y2 is None and len(set(values)) <= 1:
            y2 = y
    if y1 is None or y2 is None:
        return None
    return y1, y2


def derandomize_ot(n: int, k: int):
    """Implement one OT(1, n, k) from one randomized instance; see protocols.classical."""
    from .protocols.classical import derandomize_ot as _build

    return _build(n, k)


# -- names ---------------------------------------------------------------


def _ints(text: str, count: int, name: str) -> list[int]:
    parts = [p.strip() for p in text.split(",")] if text else []
    if len(parts) != count:
        raise ParseError(f"{name} expects {count} parameters")
    try:
        return [int(p) for p in parts]
    except ValueError as exc:
        raise ParseError(f"bad integer in {text!r}") from exc


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad rational {text!r}") from exc


def parse_primitive(ref: str, budget: int = ATOM_BUDGET) -> PrimitiveSpec:
    """Build a primitive from ``ot:t,n,k,m``, ``rabin:p,k``, ``olfe:q,m``,
    ``leaky-ot:alpha``, ``eq:n`` or ``ip:n``."""
    name, _, args = ref.partition(":")
    name = name.strip().lower()
    if name == "ot":
        t, n, k, m = _ints(args, 4, "ot")
        return make_ot_randomness(t, n, k, m, budget)
    if name == "rabin":
        parts = args.split(",")
        if len(parts) != 2:
            raise ParseError("rabin expects p,k")
        return make_rabin_randomness(_rational(parts[0]), _ints(parts[1], 1, "rabin")[0])
    if name == "olfe":
        q, m = _ints(args, 2, "olfe")
        return make_olfe_randomness(q, m, budget)
    if name == "leaky-ot":
        parts = args.split(",")
        alpha = _rational(parts[0])
        m = _ints(parts[1], 1, "leaky-ot")[0] if len(parts) > 1 else 1
        return make_leaky_ot_randomness(alpha, m, budget)
    if name in ("eq", "ip"):
        (n,) = _ints(args, 1, name)
        return make_function(name, n, budget=budget)
    raise ParseError(f"unknown primitive {ref!r}")
