"""Multi-commitment from kappa string OTs, with a pluggable sender.

Bit strings of length k are Python ints (bit i is position i); an index
set T is either an iterable of positions or an int mask.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

import numpy as np

from ..errors import DomainError, MalformedOpening


def to_mask(positions: Iterable[int] | int, k: int) -> int:
    if isinstance(positions, (int, np.integer)) and not isinstance(positions, bool):
        mask = int(positions)
    else:
        mask = 0
        for i in positions:
            if not 0 <= i < k:
                raise MalformedOpening(f"position {i} outside [0, {k})")
            mask |= 1 << i
    if mask < 0 or mask >> k:
        raise MalformedOpening("opening set is not a subset of the committed positions")
    return mask


def random_bits(rng: np.random.Generator, k: int) -> int:
    if k == 0:
        return 0
    raw = rng.integers(0, 256, size=(k + 7) // 8, dtype=np.uint8).tobytes()
    return int.from_bytes(raw, "little") & ((1 << k) - 1)


@dataclass(frozen=True)
class SenderState:
    """Everything the committer knows after Commit."""

    b: int
    x0: tuple
    x1: tuple


@dataclass(frozen=True)
class ReceiverState:
    """Everything the receiver holds after Commit: choices, OT outputs, messages."""

    c: tuple
    y: tuple
    m: tuple


@dataclass(frozen=True)
class Opening:
    mask: int
    b_T: int
    x0_T: tuple
    x1_T: tuple


# -- sender behaviours --------------------------------------------------------
#
# A sender is a pair (commit_messages, open) of functions; neither sees the
# receiver's choice bits, which is what makes the exact analysis over c valid.


@dataclass(frozen=True)
class Sender:
    name: str
    messages: Callable[[SenderState], tuple]
    opening: Callable[[SenderState, int], Opening]


def _honest_messages(s: SenderState) -> tuple:
    return tuple(a ^ b ^ s.b for a, b in zip(s.x0, s.x1))


def _honest_opening(s: SenderState, mask: int) -> Opening:
    return Opening(mask, s.b & mask, tuple(a & mask for a in s.x0), tuple(a & mask for a in s.x1))


HONEST = Sender("honest", _honest_messages, _honest_opening)


def flip_one_bit(j: int) -> Sender:
    """Commit honestly, then open b with bit j flipped.

    To pass the message check in every instance the sender changes bit j of
    x0 in even instances and of x1 in odd ones; each change is caught when the
    receiver's choice hits the altered string.
    """

    def opening(s: SenderState, mask: int) -> Opening:
        x0 = list(s.x0)
        x1 = list(s.x1)
        for i in range(len(x0)):
            if i % 2 == 0:
                x0[i] ^= 1 << j
            else:
                x1[i] ^= 1 << j
        return Opening(mask, (s.b ^ (1 << j)) & mask, tuple(a & mask for a in x0), tuple(a & mask for a in x1))

    return Sender(f"flip-one-bit:{j}", _honest_messages, opening)


def split_commit(j: int) -> Sender:
    """Equivocate on bit j: half the messages encode b, half encode b with bit j flipped.

    At opening time the sender reveals the flipped value and only has to
    alter the instances that committed to b, i.e. the first half.
    """

    def messages(s: SenderState) -> tuple:
        half = len(s.x0) // 2
        return tuple(a ^ b ^ s.b ^ ((1 << j) if i >= half else 0) for i, (a, b) in enumerate(zip(s.x0, s.x1)))

    def opening(s: SenderState, mask: int) -> Opening:
        half = len(s.x0) // 2
        x0 = list(s.x0)
        for i in range(half):
            x0[i] ^= 1 << j
        return Opening(mask, (s.b ^ (1 << j)) & mask, tuple(a & mask for a in x0), tuple(a & mask for a in s.x1))

    return Sender(f"split-commit:{j}", messages, opening)


# -- the protocol -------------------------------------------------------------


@dataclass
class MCOM:
    """Commit to k bits using kappa instances of OT(1, 2, k) from committer to receiver."""

    k: int
    kappa: int

    def __post_init__(self):
        if self.k < 0 or self.kappa < 1:
            raise DomainError("need k >= 0 and kappa >= 1")

    @property
    def ot_calls(self) -> int:
        return self.kappa

    def sender_randomness(self, b: int, rng: np.random.Generator) -> SenderState:
        if b < 0 or b >> self.k:
            raise DomainError(f"commitment must be a {self.k}-bit string")
        x0 = tuple(random_bits(rng, self.k) for _ in range(self.kappa))
        x1 = tuple(random_bits(rng, self.k) for _ in range(self.kappa))
        return SenderState(b, x0, x1)

    def receive(self, s: SenderState, c: Sequence[int], sender: Sender = HONEST) -> ReceiverState:
        """The OT calls plus the sender's messages, for receiver choices ``c``."""
        if len(c) != self.kappa:
            raise DomainError("one choice bit per OT instance")
        y = tuple(s.x1[i] if c[i] else s.x0[i] for i in range(self.kappa))
        m = tuple(sender.messages(s))
        if len(m) != self.kappa:
            raise MalformedOpening("the sender must send one message per instance")
        return ReceiverState(tuple(c), y, m)

    def commit(self, b: int, rng: np.random.Generator, sender: Sender = HONEST):
        s = self.sender_randomness(b, rng)
        c = tuple(int(v) for v in rng.integers(0, 2, size=self.kappa))
        return s, self.receive(s, c, sender)

    def _check_shape(self, o: Opening) -> None:
        full = (1 << self.k) - 1
        if o.mask < 0 or o.mask & ~full:
            raise MalformedOpening("opening set is not a subset of the committed positions")
        if len(o.x0_T) != self.kappa or len(o.x1_T) != self.kappa:
            raise MalformedOpening(f"an opening carries {self.kappa} pairs of strings")
        for v in (o.b_T, *o.x0_T, *o.x1_T):
            if not isinstance(v, int) or v < 0 or v & ~o.mask:
                raise MalformedOpening("opened values must be supported on T")

    def verify(self, r: ReceiverState, o: Opening) -> bool:
        """The receiver's check; returns acceptance and raises on malformed input."""
        self._check_shape(o)
        T = o.mask
        for i in range(self.kappa):
            if r.m[i] & T != o.x0_T[i] ^ o.x1_T[i] ^ o.b_T:
                return False
            opened = o.x1_T[i] if r.c[i] else o.x0_T[i]
            if r.y[i] & T != opened:
                return False
        return True

    def open(self, s: SenderState, positions, sender: Sender = HONEST) -> Opening:
        return sender.opening(s, to_mask(positions, self.k))

    def extract(self, s: SenderState, r: ReceiverState) -> int:
        """Per-position majority of m_i xor x0_i xor x1_i; ties resolve to 0."""
        out = 0
        for pos in range(self.k):
            ones = sum((r.m[i] ^ s.x0[i] ^ s.x1[i]) >> pos & 1 for i in range(self.kappa))
            if 2 * ones > self.kappa:
                out |= 1 << pos
        return out

    def acceptance_probability(self, s: SenderState, positions, sender: Sender = HONEST) -> Fraction:
        """Exact probability, over all 2^kappa choice vectors, that the receiver accepts."""
        if self.kappa > 20:
            raise DomainError("exact analysis enumerates 2^kappa choice vectors; keep kappa <= 20")
        o = self.open(s, positions, sender)
        hits = 0
        for c in itertools.product((0, 1), repeat=self.kappa):
            if self.verify(self.receive(s, c, sender), o):
                hits += 1
        return Fraction(hits, 2**self.kappa)


@dataclass(frozen=True)
class SoundnessReport:
    sender: str
    kappa: int
    committed: int
    extracted: int
    opened: int
    deviates: bool
    acceptance: Fraction
    bound: Fraction


def soundness(k: int, kappa: int, sender: Sender, b: int = 0, positions=None, seed: int = 0) -> SoundnessReport:
    """Acceptance of ``sender``'s opening against the majority-extracted value."""
    scheme = MCOM(k, kappa)
    rng = np.random.default_rng(seed)
    s = scheme.sender_randomness(b, rng)
    mask = to_mask(range(k) if positions is None else positions, k)
    r = scheme.receive(s, (0,) * kappa, sender)
    extracted = scheme.extract(s, r)
    o = scheme.open(s, mask, sender)
    return SoundnessReport(
        sender.name,
        kappa,
        b,
        extracted,
        o.b_T,
        o.b_T != extracted & mask,
        scheme.acceptance_probability(s, mask, sender),
        Fraction(1, 2 ** (kappa // 2)),
    )
