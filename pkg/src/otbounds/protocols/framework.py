"""Round-based semi-honest two-party execution.

A program is a list of steps.  ``Send`` steps carry a message from one party
to the other; ``Call`` steps query an ideal oracle (e.g. one OT instance) on
inputs from both parties and hand the result to Bob.  Messages always
alternate starting with Alice; :class:`Builder` inserts empty (``None``)
messages where a party has nothing to say.

Views follow the usual layout ``(input, resource output, messages, oracle
outputs, coins)``.  Alice never receives oracle outputs, so that slot is the
empty tuple on her side.
"""

from __future__ import annotations

import bisect
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Any, Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from ..dist import ATOM_BUDGET, Dist, JointDist, MultiDist
from ..errors import AlphabetOverflow, DomainError

ALICE = "A"
BOB = "B"


@dataclass(frozen=True)
class Local:
    """What one party knows when it computes its next move."""

    input: Any
    resource: Any
    coins: tuple
    messages: tuple
    oracle: tuple = ()


@dataclass(frozen=True)
class Oracle:
    name: str
    fn: Callable[[Any, Any], Any]


OT_ORACLE = Oracle("ot", lambda pair, c: pair[c])
EQ_ORACLE = Oracle("eq", lambda a, b: int(a == b))


@dataclass(frozen=True)
class Send:
    sender: str
    fn: Callable[[Local], Hashable]


@dataclass(frozen=True)
class Call:
    oracle: Oracle
    alice_fn: Callable[[Local], Any]
    bob_fn: Callable[[Local], Any]


def _silent(_: Local) -> None:
    return None


@dataclass(frozen=True)
class ProtocolProgram:
    """A complete protocol: steps, outputs, coin spaces, resource and ideal functionality.

    ``ideal(x, y)`` returns a :class:`Dist` over pairs ``(z_A, z_B)``.
    """

    name: str
    steps: tuple
    output_a: Callable[[Local], Any]
    output_b: Callable[[Local], Any]
    x_domain: tuple
    y_domain: tuple
    ideal: Callable[[Any, Any], Dist]
    coins_a: tuple = ()
    coins_b: tuple = ()
    resource: JointDist | None = None
    simulators: tuple | None = field(default=None, repr=False)

    @property
    def rounds(self) -> int:
        return sum(isinstance(s, Send) for s in self.steps)

    @property
    def oracle_calls(self) -> int:
        return sum(isinstance(s, Call) for s in self.steps)

    def calls_to(self, oracle_name: str) -> int:
        return sum(isinstance(s, Call) and s.oracle.name == oracle_name for s in self.steps)


class Builder:
    """Incremental construction of a :class:`ProtocolProgram`."""

    def __init__(self, name: str, x_domain: Iterable, y_domain: Iterable):
        self.name = name
        self.x_domain = tuple(x_domain)
        self.y_domain = tuple(y_domain)
        self.steps: list = []
        self.coins = {ALICE: [], BOB: []}
        self.n_messages = 0
        self.n_calls = 0
        self.resource: JointDist | None = None

    def coin(self, party: str, size: int) -> int:
        """Reserve one uniform coin in ``range(size)``; returns its index."""
        self.coins[party].append(size)
        return len(self.coins[party]) - 1

    def coin_block(self, party: str, sizes: Sequence[int]) -> list[int]:
        return [self.coin(party, s) for s in sizes]

    def send(self, sender: str, fn: Callable[[Local], Hashable]) -> int:
        """Append a message; returns its index in the message tuple."""
        expected = ALICE if self.n_messages % 2 == 0 else BOB
        if sender != expected:
            self.steps.append(Send(expected, _silent))
            self.n_messages += 1
        self.steps.append(Send(sender, fn))
        self.n_messages += 1
        return self.n_messages - 1

    def call(self, oracle: Oracle, alice_fn, bob_fn) -> int:
        """Append an oracle query; returns the index of Bob's result."""
        self.steps.append(Call(oracle, alice_fn, bob_fn))
        self.n_calls += 1
        return self.n_calls - 1

    def build(self, output_a, output_b, ideal, simulators=None) -> ProtocolProgram:
        return ProtocolProgram(
            self.name,
            tuple(self.steps),
            output_a,
            output_b,
            self.x_domain,
            self.y_domain,
            ideal,
            tuple(self.coins[ALICE]),
            tuple(self.coins[BOB]),
            self.resource,
            simulators,
        )


@dataclass(frozen=True)
class Transcript:
    x: Any
    y: Any
    u: Any
    v: Any
    coins_a: tuple
    coins_b: tuple
    messages: tuple
    oracle_out: tuple
    out_a: Any
    out_b: Any

    @property
    def view_a(self) -> tuple:
        return (self.x, self.u, self.messages, (), self.coins_a)

    @property
    def view_b(self) -> tuple:
        return (self.y, self.v, self.messages, self.oracle_out, self.coins_b)


def execute(p: ProtocolProgram, x, y, u=None, v=None, coins_a: tuple = (), coins_b: tuple = ()) -> Transcript:
    """One deterministic run given inputs, resource outputs and coins."""
    messages: list = []
    oracle: list = []
    for step in p.steps:
        if isinstance(step, Send):
            if step.sender == ALICE:
                local = Local(x, u, coins_a, tuple(messages))
            else:
                local = Local(y, v, coins_b, tuple(messages), tuple(oracle))
            messages.append(step.fn(local))
        else:
            la = Local(x, u, coins_a, tuple(messages))
            lb = Local(y, v, coins_b, tuple(messages), tuple(oracle))
            oracle.append(step.oracle.fn(step.alice_fn(la), step.bob_fn(lb)))
    msgs, orc = tuple(messages), tuple(oracle)
    out_a = p.output_a(Local(x, u, coins_a, msgs))
    out_b = p.output_b(Local(y, v, coins_b, msgs, orc))
    return Transcript(x, y, u, v, coins_a, coins_b, msgs, orc, out_a, out_b)


def _coin_space(sizes: Sequence[int]):
    return itertools.product(*(range(s) for s in sizes))


def _space_size(p: ProtocolProgram) -> int:
    n_res = len(p.resource) if p.resource is not None else 1
    return n_res * prod(p.coins_a) * prod(p.coins_b)


def _resource_atoms(p: ProtocolProgram) -> list:
    if p.resource is None:
        return [((None, None), 1)]
    return list(p.resource.weights.items())


def enumerate_runs(p: ProtocolProgram, x, y, budget: int = ATOM_BUDGET):
    """Yield ``(transcript, weight)``; weights sum to :func:`run_scale`."""
    size = _space_size(p)
    if size > budget:
        raise AlphabetOverflow(f"{size} executions exceed the budget of {budget}")
    atoms = _resource_atoms(p)
    for (u, v), w in atoms:
        for ca in _coin_space(p.coins_a):
            for cb in _coin_space(p.coins_b):
                yield execute(p, x, y, u, v, ca, cb), w


def run_scale(p: ProtocolProgram) -> int:
    res_scale = p.resource.scale if p.resource is not None else 1
    return res_scale * prod(p.coins_a) * prod(p.coins_b)


@dataclass(frozen=True)
class ExactRun:
    """Exact joint laws of one execution on fixed inputs."""

    alice: JointDist  # (view_A, out_B)
    bob: JointDist  # (out_A, view_B)
    outputs: JointDist  # (out_A, out_B)


def run_exact(p: ProtocolProgram, x, y, budget: int = ATOM_BUDGET) -> ExactRun:
    wa: dict = {}
    wb: dict = {}
    wo: dict = {}
    for t, w in enumerate_runs(p, x, y, budget):
        ka = (t.view_a, t.out_b)
        kb = (t.out_a, t.view_b)
        ko = (t.out_a, t.out_b)
        wa[ka] = wa.get(ka, 0) + w
        wb[kb] = wb.get(kb, 0) + w
        wo[ko] = wo.get(ko, 0) + w
    s = run_scale(p)
    return ExactRun(JointDist(wa, s), JointDist(wb, s), JointDist(wo, s))


def transcript_table(p: ProtocolProgram, budget: int = ATOM_BUDGET) -> MultiDist:
    """Joint law of (x, u, coins_A, y, v, coins_B, messages, oracle outputs, out_A, out_B)
    with uniform inputs."""
    w: dict = {}
    for x in p.x_domain:
        for y in p.y_domain:
            for t, wt in enumerate_runs(p, x, y, budget):
                key = (t.x, t.u, t.coins_a, t.y, t.v, t.coins_b, t.messages, t.oracle_out, t.out_a, t.out_b)
                w[key] = w.get(key, 0) + wt
    return MultiDist(w, run_scale(p) * len(p.x_domain) * len(p.y_domain))


# -- security -------------------------------------------------------------


@dataclass(frozen=True)
class Simulator:
    """A candidate simulator: ``fn(input, ideal output, coins) -> view``."""

    coin_sizes: tuple
    fn: Callable[[Any, Any, tuple], tuple]

    def law(self, inp, out) -> dict:
        n = prod(self.coin_sizes)
        acc: dict = {}
        for coins in _coin_space(self.coin_sizes):
            view = self.fn(inp, out, coins)
            acc[view] = acc.get(view, 0) + Fraction(1, n)
        return acc


@dataclass(frozen=True)
class SecurityReport:
    correctness: Fraction
    alice: Fraction
    bob: Fraction
    worst_inputs: Mapping[str, Any] = field(default_factory=dict)

    def as_tuple(self) -> tuple:
        return (self.correctness, self.alice, self.bob)


def _half_l1(p: Mapping, q: Mapping) -> Fraction:
    return sum((abs(p.get(k, 0) - q.get(k, 0)) for k in p.keys() | q.keys()), Fraction(0)) / 2


def _masses(j: JointDist) -> dict:
    return dict(j.items())


def verify_security(p: ProtocolProgram, simulators: tuple | None = None, budget: int = ATOM_BUDGET) -> SecurityReport:
    """Exact correctness error and simulator distances, maximized over all inputs.

    Alice's side compares (View_A, Out_B) with (S_A(x, z_A), z_B) and Bob's
    side (Out_A, View_B) with (z_A, S_B(y, z_B)), where (z_A, z_B) is drawn
    from the ideal functionality.
    """
    sims = simulators or p.simulators
    if sims is None:
        raise DomainError(f"no simulators supplied for {p.name}")
    sim_a, sim_b = sims
    worst = {"correctness": Fraction(0), "alice": Fraction(0), "bob": Fraction(0)}
    where: dict = {}
    for x in p.x_domain:
        for y in p.y_domain:
            run = run_exact(p, x, y, budget)
            ideal = p.ideal(x, y)
            ideal_out = {k: m for k, m in ideal.items()}
            ideal_a: dict = {}
            ideal_b: dict = {}
            for (za, zb), pm in ideal.items():
                for view, q in sim_a.law(x, za).items():
                    key = (view, zb)
                    ideal_a[key] = ideal_a.get(key, 0) + pm * q
                for view, q in sim_b.law(y, zb).items():
                    key = (za, view)
                    ideal_b[key] = ideal_b.get(key, 0) + pm * q
            d = {
                "correctness": _half_l1(_masses(run.outputs), ideal_out),
                "alice": _half_l1(_masses(run.alice), ideal_a),
                "bob": _half_l1(_masses(run.bob), ideal_b),
            }
            for key, val in d.items():
                if val > worst[key]:
                    worst[key] = val
                    where[key] = (x, y)
    return SecurityReport(worst["correctness"], worst["alice"], worst["bob"], where)


def correctness_error(p: ProtocolProgram, budget: int = ATOM_BUDGET) -> Fraction:
    """max over inputs of the distance between real and ideal output pairs."""
    worst = Fraction(0)
    for x in p.x_domain:
        for y in p.y_domain:
            run = run_exact(p, x, y, budget)
            worst = max(worst, _half_l1(_masses(run.outputs), dict(p.ideal(x, y).items())))
    return worst


# -- sampling -------------------------------------------------------------


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Generator for one trial, derived from (seed, trial) alone.

    Trials are therefore reproducible one by one and independent of the
    order in which they are run.
    """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


class _ResourceSampler:
    def __init__(self, joint: JointDist | None):
        self.joint = joint
        if joint is not None:
            self.atoms = list(joint.weights.items())
            self.cum = list(itertools.accumulate(int(w) for _, w in self.atoms))
            if self.cum[-1] != joint.scale:
                raise DomainError("sampled resources need integer weights")

    def draw(self, rng: np.random.Generator):
        if self.joint is None:
            return None, None
        r = int(rng.integers(0, self.cum[-1]))
        return self.atoms[bisect.bisect_right(self.cum, r)][0]


def _draw_coins(rng: np.random.Generator, sizes: tuple) -> tuple:
    if not sizes:
        return ()
    return tuple(int(c) for c in rng.integers(0, np.asarray(sizes)))


def sample_transcript(p: ProtocolProgram, x, y, seed: int, trial: int) -> Transcript:
    rng = trial_rng(seed, trial)
    u, v = _ResourceSampler(p.resource).draw(rng)
    ca = _draw_coins(rng, p.coins_a)
    cb = _draw_coins(rng, p.coins_b)
    return execute(p, x, y, u, v, ca, cb)


@dataclass(frozen=True)
class SampledStats:
    trials: int
    seed: int
    outputs: Mapping[tuple, int]
    correct: int
    first: Transcript | None = field(default=None, repr=False)

    @property
    def correct_frequency(self) -> float:
        return self.correct / self.trials

    def frequency(self, predicate: Callable[[tuple], bool]) -> float:
        return sum(c for o, c in self.outputs.items() if predicate(o)) / self.trials


def run_sampled(p: ProtocolProgram, x, y, trials: int, seed: int) -> SampledStats:
    """Monte Carlo execution; trial i uses :func:`trial_rng` (seed, i)."""
    if trials < 1:
        raise DomainError("need at least one trial")
    sampler = _ResourceSampler(p.resource)
    ideal_support = {k for k, _ in p.ideal(x, y).items()}
    counts: Counter = Counter()
    correct = 0
    first = None
    for i in range(trials):
        rng = trial_rng(seed, i)
        u, v = sampler.draw(rng)
        t = execute(p, x, y, u, v, _draw_coins(rng, p.coins_a), _draw_coins(rng, p.coins_b))
        if first is None:
            first = t
        key = (t.out_a, t.out_b)
        counts[key] += 1
        correct += key in ideal_support
    return SampledStats(trials, seed, dict(counts), correct, first)
