"""The classical semi-honest protocols, each shipped with candidate simulators."""

from __future__ import annotations

import itertools
from functools import reduce
from operator import xor

from ..dist import Dist
from ..primitives import make_ot_randomness
from .framework import (
    ALICE,
    BOB,
    EQ_ORACLE,
    OT_ORACLE,
    Builder,
    Local,
    ProtocolProgram,
    Simulator,
)


def _bits(n: int) -> tuple:
    return tuple(itertools.product((0, 1), repeat=n))


def _xor_all(bits) -> int:
    return reduce(xor, bits, 0)


def _dot(a, b) -> int:
    return _xor_all(x & y for x, y in zip(a, b))


def _bob_gets(value) -> Dist:
    return Dist.point((None, value))


# -- precomputed OT --------------------------------------------------------


def derandomize_ot(n: int, k: int, leak: bool = False) -> ProtocolProgram:
    """OT(1, n, k) from one randomized OT(1, n, k).

    Bob announces the shift d = (c0 - c) mod n, Alice answers with
    e_i = x_i xor u_{(i+d) mod n}, and Bob unmasks e_c with his u_{c0}.
    With ``leak=True`` Alice also sends x_1 in the clear, which breaks
    security for Alice; it exists to exercise the security checker.
    """
    resource = make_ot_randomness(1, n, k, 1).joint
    strings = range(2**k)
    b = Builder(f"derandomized-ot:{n},{k}" + ("+leak" if leak else ""), itertools.product(strings, repeat=n), range(n))
    b.resource = resource

    i_d = b.send(BOB, lambda L: (L.resource[0] - L.input) % n)

    def answer(L: Local):
        d = L.messages[i_d]
        e = tuple(L.input[i] ^ L.resource[(i + d) % n] for i in range(n))
        return (e, L.input[1]) if leak else e

    i_e = b.send(ALICE, answer)

    def out_b(L: Local):
        e = L.messages[i_e][0] if leak else L.messages[i_e]
        return e[L.input] ^ L.resource[1]

    def sim_a(x, _z, coins):
        u, d = tuple(coins[:n]), coins[n]
        e = tuple(x[i] ^ u[(i + d) % n] for i in range(n))
        msg = (e, x[1]) if leak else e
        return (x, u, (None, d, msg), (), ())

    def sim_b(c, z, coins):
        c0, w = coins[0], coins[1]
        rest = iter(coins[2 : 2 + n - 1])
        e = tuple(z ^ w if i == c else next(rest) for i in range(n))
        # the honest simulator cannot know a leaked value, so it guesses one
        msg = (e, coins[-1]) if leak else e
        return (c, (c0, w), (None, (c0 - c) % n, msg), (), ())

    sizes_a = (2**k,) * n + (n,)
    sizes_b = (n, 2**k) + (2**k,) * (n - 1) + ((2**k,) if leak else ())
    return b.build(
        lambda L: None,
        out_b,
        lambda x, c: _bob_gets(x[c]),
        (Simulator(sizes_a, sim_a), Simulator(sizes_b, sim_b)),
    )


# -- AND shares, equality, inner product --------------------------------------


def add_and_gadget(b: Builder, alice_bits, bob_bits):
    """Two OT calls giving XOR shares of (X1 xor Y1) and (X2 xor Y2).

    ``alice_bits(L)`` returns (X1, X2) and ``bob_bits(L)`` returns (Y1, Y2).
    Returns the functions computing Alice's and Bob's new share.
    """
    r1 = b.coin(ALICE, 2)
    r2 = b.coin(ALICE, 2)
    i1 = b.call(
        OT_ORACLE,
        lambda L: (L.coins[r1], L.coins[r1] ^ alice_bits(L)[0]),
        lambda L: bob_bits(L)[1],
    )
    i2 = b.call(
        OT_ORACLE,
        lambda L: (L.coins[r2], L.coins[r2] ^ alice_bits(L)[1]),
        lambda L: bob_bits(L)[0],
    )

    def share_a(L: Local) -> int:
        x1, x2 = alice_bits(L)
        return L.coins[r1] ^ L.coins[r2] ^ (x1 & x2)

    def share_b(L: Local) -> int:
        y1, y2 = bob_bits(L)
        return L.oracle[i1] ^ L.oracle[i2] ^ (y1 & y2)

    return share_a, share_b


def and_share_from_2ot() -> ProtocolProgram:
    """Shares a, b with a xor b = (x1 xor y1) and (x2 xor y2), from two OTs."""
    b = Builder("and-share", _bits(2), _bits(2))
    share_a, share_b = add_and_gadget(b, lambda L: L.input, lambda L: L.input)

    def ideal(x, y):
        val = (x[0] ^ y[0]) & (x[1] ^ y[1])
        return Dist.from_masses({(s, s ^ val): "1/2" for s in (0, 1)})

    def sim_a(x, za, coins):
        r1 = coins[0]
        r2 = za ^ r1 ^ (x[0] & x[1])
        return (x, None, (), (), (r1, r2))

    def sim_b(y, zb, coins):
        z1 = coins[0]
        z2 = zb ^ z1 ^ (y[0] & y[1])
        return (y, None, (), (z1, z2), ())

    return b.build(share_a, share_b, ideal, (Simulator((2,), sim_a), Simulator((2,), sim_b)))


def _add_eq_chain(b: Builder, alice_lits, bob_lits, k: int):
    """Chain k - 1 AND gadgets over literals l_i = alice_lits_i xor bob_lits_i.

    ``alice_lits(L)`` / ``bob_lits(L)`` return length-k bit tuples; the
    starting shares are Alice's and Bob's first literal bits.
    """
    sa = lambda L: alice_lits(L)[0]  # noqa: E731
    sb = lambda L: bob_lits(L)[0]  # noqa: E731
    for i in range(1, k):
        sa, sb = add_and_gadget(
            b,
            lambda L, sa=sa, i=i: (sa(L), alice_lits(L)[i]),
            lambda L, sb=sb, i=i: (sb(L), bob_lits(L)[i]),
        )
    return sa, sb


def eq_from_ot(k: int) -> ProtocolProgram:
    """EQ_k to Bob from 2(k-1) bit OTs.

    The literal not(x_i xor y_i) is shared as (x_i xor 1, y_i); the AND chain
    runs left to right and Alice finally sends her share to Bob.
    """
    if k < 2:
        raise ValueError("eq_from_ot needs k >= 2")
    b = Builder(f"eq-from-ot:{k}", _bits(k), _bits(k))
    sa, sb = _add_eq_chain(
        b,
        lambda L: tuple(v ^ 1 for v in L.input),
        lambda L: L.input,
        k,
    )
    i_msg = b.send(ALICE, sa)

    def sim_a(x, _z, coins):
        return (x, None, (sa(Local(x, None, coins, ())),), (), coins)

    def sim_b(y, z, coins):
        b_share = sb(Local(y, None, (), (), coins))
        return (y, None, (z ^ b_share,), coins, ())

    n_coins = 2 * (k - 1)
    return b.build(
        lambda L: None,
        lambda L: L.messages[i_msg] ^ sb(L),
        lambda x, y: _bob_gets(int(x == y)),
        (Simulator((2,) * n_coins, sim_a), Simulator((2,) * n_coins, sim_b)),
    )


def eq_amplify(n: int, k: int, compose: bool = False) -> ProtocolProgram:
    """EQ_n from one EQ_k by comparing k random inner products.

    Alice draws the k random n-bit strings and sends them first.  With
    ``compose=True`` the EQ_k call is replaced by the OT chain of
    :func:`eq_from_ot`, which then costs 2(k - 1) OT calls in total.
    """
    b = Builder(f"eq-amplify:{n},{k}" + ("+ot" if compose else ""), _bits(n), _bits(n))
    coins = b.coin_block(ALICE, (2,) * (n * k))

    def strings(L: Local) -> tuple:
        return tuple(tuple(L.coins[coins[j * n + i]] for i in range(n)) for j in range(k))

    i_s = b.send(ALICE, strings)

    def a_bits(L: Local) -> tuple:
        return tuple(_dot(L.input, s) for s in L.messages[i_s])

    def b_bits(L: Local) -> tuple:
        return tuple(_dot(L.input, s) for s in L.messages[i_s])

    if compose:
        sa, sb = _add_eq_chain(b, lambda L: tuple(v ^ 1 for v in a_bits(L)), b_bits, k)
        i_msg = b.send(ALICE, sa)
        out_b = lambda L: L.messages[i_msg] ^ sb(L)  # noqa: E731
    else:
        i_eq = b.call(EQ_ORACLE, a_bits, b_bits)
        out_b = lambda L: L.oracle[i_eq]  # noqa: E731
    return b.build(lambda L: None, out_b, lambda x, y: _bob_gets(int(x == y)))


def ip_from_ot(n: int) -> ProtocolProgram:
    """Inner product mod 2 to Bob from n bit OTs.

    Alice masks with r_1..r_{n-1} and r_n = xor of the others; OT i hands Bob
    z_i = r_i xor x_i y_i, whose XOR is the inner product.
    """
    b = Builder(f"ip-from-ot:{n}", _bits(n), _bits(n))
    rs = b.coin_block(ALICE, (2,) * (n - 1))

    def mask(L: Local, i: int) -> int:
        if i < n - 1:
            return L.coins[rs[i]]
        return _xor_all(L.coins[r] for r in rs)

    calls = [
        b.call(
            OT_ORACLE,
            lambda L, i=i: (mask(L, i), mask(L, i) ^ L.input[i]),
            lambda L, i=i: L.input[i],
        )
        for i in range(n)
    ]

    def sim_a(x, _z, coins):
        return (x, None, (), (), coins)

    def sim_b(y, z, coins):
        zs = tuple(coins) + (z ^ _xor_all(coins),)
        return (y, None, (), zs, ())

    return b.build(
        lambda L: None,
        lambda L: _xor_all(L.oracle[c] for c in calls),
        lambda x, y: _bob_gets(_dot(x, y)),
        (Simulator((2,) * (n - 1), sim_a), Simulator((2,) * (n - 1), sim_b)),
    )
