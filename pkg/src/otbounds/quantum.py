"""Desk-scale simulation of OT from string commitments over EPR pairs.

Two engines produce the per-pair measurement outcomes: a 4x4 density-matrix
engine and a classical fast path that samples the same statistics directly.
Every pair is independent, so nothing beyond one pair is ever simulated
as a quantum state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol

import numpy as np

from .dist import as_fraction
from .entropy import binary_entropy
from .errors import DomainError, InvalidState, LengthMismatch

STATE_TOL = 1e-9

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_I = np.eye(2, dtype=complex)


def _basis_change(theta_a: int, theta_b: int) -> np.ndarray:
    return np.kron(_H if theta_a else _I, _H if theta_b else _I)


# -- one pair -------------------------------------------------------------


@dataclass(frozen=True)
class PairState:
    """Density matrix of Alice's qubit (first factor) and Bob's qubit."""

    rho: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise InvalidState("a pair state is a 4x4 matrix")
        if not np.allclose(rho, rho.conj().T, atol=STATE_TOL):
            raise InvalidState("state is not Hermitian")
        if abs(np.trace(rho) - 1) > STATE_TOL:
            raise InvalidState("state does not have unit trace")
        if np.linalg.eigvalsh(rho).min() < -STATE_TOL:
            raise InvalidState("state is not positive semidefinite")
        object.__setattr__(self, "rho", rho)

    @classmethod
    def epr(cls) -> "PairState":
        phi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
        return cls(np.outer(phi, phi.conj()))

    @classmethod
    def product(cls, a: int, b: int, theta_a: int = 0, theta_b: int = 0) -> "PairState":
        """The BB84 product state H^theta_a|a> (x) H^theta_b|b>."""
        ket = np.zeros(4, dtype=complex)
        ket[2 * a + b] = 1
        ket = _basis_change(theta_a, theta_b) @ ket
        return cls(np.outer(ket, ket.conj()))


def outcome_probabilities(s: PairState, theta_a: int, theta_b: int) -> np.ndarray:
    """2x2 array of Pr[a, b] when Alice measures in theta_a and Bob in theta_b."""
    u = _basis_change(theta_a, theta_b)
    probs = np.real(np.diag(u.conj().T @ s.rho @ u))
    return np.clip(probs, 0, None).reshape(2, 2)


def fast_pair_probabilities(theta_a: int, theta_b: int) -> np.ndarray:
    """The same table for an EPR pair, written down directly."""
    if theta_a == theta_b:
        return np.array([[0.5, 0.0], [0.0, 0.5]])
    return np.full((2, 2), 0.25)


def measure_pair(s: PairState, theta_a: int, theta_b: int, rng: np.random.Generator):
    """Born-rule sample; returns (a, b, post-measurement state)."""
    probs = outcome_probabilities(s, theta_a, theta_b).ravel()
    idx = int(rng.choice(4, p=probs / probs.sum()))
    u = _basis_change(theta_a, theta_b)
    ket = u[:, idx]
    return idx >> 1, idx & 1, PairState(np.outer(ket, ket.conj()))


def sample_outcomes(alice_basis: np.ndarray, bob_basis: np.ndarray, rng: np.random.Generator, engine: str = "fast"):
    """Outcomes of measuring m fresh EPR pairs in the given bases."""
    m = len(alice_basis)
    if engine == "fast":
        a = rng.integers(0, 2, size=m, dtype=np.uint8)
        other = rng.integers(0, 2, size=m, dtype=np.uint8)
        b = np.where(alice_basis == bob_basis, a, other).astype(np.uint8)
        return a, b
    if engine == "density":
        epr = PairState.epr()
        a = np.empty(m, dtype=np.uint8)
        b = np.empty(m, dtype=np.uint8)
        for i in range(m):
            a[i], b[i], _ = measure_pair(epr, int(alice_basis[i]), int(bob_basis[i]), rng)
        return a, b
    raise DomainError(f"unknown engine {engine!r}")


# -- configuration and hashing --------------------------------------------


@dataclass(frozen=True)
class SessionConfig:
    m: int = 256
    kappa: int = 16
    alpha: Fraction = Fraction(1, 4)
    k: int = 8
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        if self.m < 1 or self.kappa < 1 or self.m % self.kappa:
            raise DomainError("kappa must divide m")
        if not 0 < self.alpha < 1 or (self.alpha * self.kappa).denominator != 1:
            raise DomainError("alpha * kappa must be an integer with 0 < alpha < 1")
        if self.k < 1:
            raise DomainError("k must be positive")

    @property
    def b(self) -> int:
        return self.m // self.kappa

    @property
    def checked_blocks(self) -> int:
        return int(self.alpha * self.kappa)

    @property
    def checked_positions(self) -> int:
        return self.checked_blocks * self.b


@dataclass(frozen=True)
class HashSpec:
    """Binary Toeplitz matrix, k x n, with T[i, j] = seed[i - j + n - 1]."""

    seed: np.ndarray = field(repr=False)
    n: int
    k: int

    def __post_init__(self):
        if self.k < 1 or self.n < 0:
            raise DomainError("need k >= 1 and n >= 0")
        seed = np.asarray(self.seed, dtype=np.uint8)
        if len(seed) != max(self.n + self.k - 1, 0):
            raise LengthMismatch(f"a Toeplitz seed for {self.n} -> {self.k} bits has {self.n + self.k - 1} bits")
        object.__setattr__(self, "seed", seed)

    @classmethod
    def random(cls, n: int, k: int, rng: np.random.Generator) -> "HashSpec":
        return cls(rng.integers(0, 2, size=max(n + k - 1, 0), dtype=np.uint8), n, k)

    def matrix(self) -> np.ndarray:
        i = np.arange(self.k)[:, None]
        j = np.arange(self.n)[None, :]
        return self.seed[i - j + self.n - 1] if self.n else np.zeros((self.k, 0), dtype=np.uint8)


def hash_extract(spec: HashSpec, bits) -> np.ndarray:
    x = np.asarray(bits, dtype=np.int64)
    if len(x) != spec.n:
        raise LengthMismatch(f"hash expects {spec.n} input bits, got {len(x)}")
    if spec.n == 0:
        return np.zeros(spec.k, dtype=np.uint8)
    full = np.convolve(spec.seed.astype(np.int64), x)
    return (full[spec.n - 1 : spec.n - 1 + spec.k] & 1).astype(np.uint8)


# -- commitments ------------------------------------------------------------


class Commitment(Protocol):
    def commit(self, bits: np.ndarray) -> object: ...

    def open(self, handle: object, positions: np.ndarray) -> tuple[bool, np.ndarray]: ...


class IdealCommitment:
    """A trusted box: opening returns exactly the committed bits."""

    def commit(self, bits: np.ndarray) -> object:
        return np.array(bits, dtype=np.uint8)

    def open(self, handle, positions):
        return True, handle[positions]


@dataclass
class RandomCommitment:
    """The commitment a cheating Bob makes instead of his real values."""

    rng: np.random.Generator

    def commit(self, bits):
        return self.rng.integers(0, 2, size=len(bits), dtype=np.uint8)

    def open(self, handle, positions):
        return True, handle[positions]


# -- sessions -----------------------------------------------------------------


def _bits(rng, n):
    return rng.integers(0, 2, size=n, dtype=np.uint8)


def _check_positions(c: SessionConfig, rng) -> tuple[np.ndarray, np.ndarray]:
    blocks = np.sort(rng.choice(c.kappa, size=c.checked_blocks, replace=False))
    mask = np.zeros(c.m, dtype=bool)
    for blk in blocks:
        mask[blk * c.b : (blk + 1) * c.b] = True
    return blocks, mask


@dataclass
class SessionResult:
    z0: np.ndarray
    z1: np.ndarray
    bob_output: np.ndarray | None
    passed: bool
    transcript: dict = field(repr=False)

    @property
    def correct(self) -> bool:
        c = self.transcript["choice"]
        return self.bob_output is not None and np.array_equal(self.bob_output, (self.z0, self.z1)[c])


def _alice_check(c, theta, theta_hat_open, x_hat_open, x_checked) -> bool:
    same = theta == theta_hat_open
    return bool(np.all(x_checked[same] == x_hat_open[same]))


def _finish(c: SessionConfig, rng, theta, x, passed, partition, transcript, bob_x=None, choice=0):
    """Steps 3 and 4: Alice's keys, and Bob's output from his partition."""
    if not passed:
        z0, z1 = _bits(rng, c.k), _bits(rng, c.k)
        return SessionResult(z0, z1, None, False, transcript)
    I0, I1 = partition
    f0 = HashSpec.random(len(I0), c.k, rng)
    f1 = HashSpec.random(len(I1), c.k, rng)
    z0 = hash_extract(f0, x[I0])
    z1 = hash_extract(f1, x[I1])
    transcript.update(theta=theta, I0=I0, I1=I1, f0=f0, f1=f1)
    bob = None
    if bob_x is not None:
        idx, f = (I0, f0) if choice == 0 else (I1, f1)
        bob = hash_extract(f, bob_x[idx])
    return SessionResult(z0, z1, bob, True, transcript)


def honest_run(
    c: SessionConfig,
    choice: int,
    rng: np.random.Generator,
    engine: str = "fast",
    commitment: Commitment | None = None,
) -> SessionResult:
    """One honest execution; ``commitment`` defaults to an ideal commitment box."""
    if choice not in (0, 1):
        raise DomainError("choice must be a bit")
    commitment = commitment or IdealCommitment()
    m = c.m
    theta_hat = _bits(rng, m)
    theta = _bits(rng, m)
    blocks, checked = _check_positions(c, rng)
    # checked qubits are measured by Alice in Bob's announced basis, the rest in theta
    alice_basis = np.where(checked, theta_hat, theta)
    x, x_hat = sample_outcomes(alice_basis, theta_hat, rng, engine)

    handle = commitment.commit(np.concatenate([theta_hat, x_hat]))
    pos = np.flatnonzero(checked)
    ok, revealed = commitment.open(handle, np.concatenate([pos, pos + m]))
    passed = bool(ok) and _alice_check(c, theta[pos], revealed[: len(pos)], revealed[len(pos) :], x[pos])

    rest = np.flatnonzero(~checked)
    match = theta[rest] == theta_hat[rest]
    I_c, I_other = rest[match], rest[~match]
    partition = (I_c, I_other) if choice == 0 else (I_other, I_c)
    transcript = {"choice": choice, "theta_hat": theta_hat, "blocks": blocks, "x_hat": x_hat}
    return _finish(c, rng, theta, x, passed, partition, transcript, x_hat, choice)


# -- restricted adversaries -------------------------------------------------


@dataclass(frozen=True)
class FixedBasis:
    """Bob measures every qubit in one basis and commits truthfully."""

    theta_star: int = 0
    name: str = "fixed-basis"

    def pass_probability(self, c: SessionConfig) -> float:
        return 1.0


@dataclass(frozen=True)
class NoMeasureRandomCommit:
    """Bob keeps his qubits, commits to random values, and measures in theta afterwards."""

    name: str = "no-measure"

    def pass_probability(self, c: SessionConfig) -> float:
        # a checked position fails only when the bases agree (1/2) and the
        # random commitment disagrees with Alice's outcome (1/2)
        return 0.75 ** c.checked_positions


@dataclass
class AdversaryResult:
    detected: bool
    guessed_both: bool
    session: SessionResult


def adversary_run(c: SessionConfig, strategy, rng: np.random.Generator, engine: str = "fast") -> AdversaryResult:
    m = c.m
    theta = _bits(rng, m)
    blocks, checked = _check_positions(c, rng)
    pos = np.flatnonzero(checked)
    rest = np.flatnonzero(~checked)

    if isinstance(strategy, FixedBasis):
        theta_hat = np.full(m, strategy.theta_star, dtype=np.uint8)
        alice_basis = np.where(checked, theta_hat, theta)
        x, x_hat = sample_outcomes(alice_basis, theta_hat, rng, engine)
        committed = np.concatenate([theta_hat, x_hat])
        known = np.zeros(m, dtype=bool)
        known[rest] = theta[rest] == theta_hat[rest]
    elif isinstance(strategy, NoMeasureRandomCommit):
        committed = RandomCommitment(rng).commit(np.zeros(2 * m))
        theta_hat = committed[:m]
        alice_basis = np.where(checked, theta_hat, theta)
        # Bob's delayed measurement uses Alice's announced theta everywhere
        x, x_bob = sample_outcomes(alice_basis, theta, rng, engine)
        x_hat = committed[m:].copy()
        known = ~checked
        x_hat[rest] = x_bob[rest]
    else:
        raise DomainError(f"unknown strategy {strategy!r}")

    ok, revealed = IdealCommitment().open(committed, np.concatenate([pos, pos + m]))
    passed = bool(ok) and _alice_check(c, theta[pos], revealed[: len(pos)], revealed[len(pos) :], x[pos])

    match = theta[rest] == theta_hat[rest]
    partition = (rest[match], rest[~match])
    transcript = {"choice": 0, "theta_hat": theta_hat, "blocks": blocks, "strategy": strategy.name}
    session = _finish(c, rng, theta, x, passed, partition, transcript)
    guessed = False
    if passed:
        # Bob fills in unknown positions with coin flips
        guess = np.where(known, x_hat, _bits(rng, m))
        I0, I1 = partition
        g0 = hash_extract(transcript["f0"], guess[I0])
        g1 = hash_extract(transcript["f1"], guess[I1])
        guessed = bool(np.array_equal(g0, session.z0) and np.array_equal(g1, session.z1))
    return AdversaryResult(not passed, guessed, session)


def session_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based per-session generator, independent of execution order."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


@dataclass(frozen=True)
class SessionStats:
    strategy: str
    trials: int
    seed: int
    pass_frequency: float
    correct_frequency: float | None
    guess_advantage: float | None
    analytic_pass: float | None
    bound: float | None

    def sigma(self, p: float) -> float:
        return math.sqrt(max(p * (1 - p), 0) / self.trials)


def run_sessions(c: SessionConfig, strategy="honest", trials: int = 1000, seed: int = 0, engine: str = "fast",
                 eps=Fraction(1, 20), delta=Fraction(1, 20)) -> SessionStats:
    if trials < 1:
        raise DomainError("trials must be positive")
    passes = correct = guessed = 0
    for t in range(trials):
        rng = session_rng(seed, t)
        if strategy == "honest":
            r = honest_run(c, int(rng.integers(0, 2)), rng, engine)
            passes += r.passed
            correct += r.correct
        else:
            a = adversary_run(c, strategy, rng, engine)
            passes += not a.detected
            guessed += a.guessed_both
    bound = security_bound_eval(c.m, c.kappa, c.alpha, c.k, eps, delta)
    if strategy == "honest":
        return SessionStats("honest", trials, seed, passes / trials, correct / trials, None, 1.0, bound)
    advantage = max(guessed / trials - 2.0**-c.k, 0.0)
    return SessionStats(strategy.name, trials, seed, passes / trials, None, advantage,
                        strategy.pass_probability(c), bound)


# -- analytic bounds ----------------------------------------------------------


def _pow2(e: float) -> float:
    return math.inf if e > 1023 else 2.0**e


def _unit(name: str, v) -> float:
    v = float(as_fraction(v)) if not isinstance(v, float) else v
    if not 0 < v < 1:
        raise DomainError(f"{name} must lie in (0, 1)")
    return v


def security_bound_terms(m: int, kappa: int, alpha, k: int, eps, delta) -> tuple[float, float, float]:
    """The three summands of the distance-from-uniform bound for Alice's unknown string."""
    if m < 1 or kappa < 1 or k < 1:
        raise DomainError("m, kappa and k must be positive")
    alpha, eps, delta = _unit("alpha", alpha), _unit("eps", eps), _unit("delta", delta)
    rate = 0.25 - eps / 2 - binary_entropy(delta)
    first = _pow2(-0.5 * (rate * (1 - alpha) * m - k) - 1)
    second = 2 * math.exp(-2 * eps**2 * (1 - alpha) * m)
    alpha_prime = (0.5 - delta) * alpha
    third = math.sqrt(3) * math.exp(-alpha_prime * kappa * delta**2 / 16)
    return first, second, third


def security_bound_eval(m: int, kappa: int, alpha, k: int, eps, delta) -> float:
    return sum(security_bound_terms(m, kappa, alpha, k, eps, delta))


def sampling_bound(kappa: int, alpha, delta) -> float:
    alpha, delta = _unit("alpha", alpha), _unit("delta", delta)
    return 3 * math.exp(-(0.5 - delta) * alpha * kappa * delta**2 / 8)


STRING_FAMILIES = ("all-zeros", "all-ones", "half-dense", "block-concentrated", "random")


def adversarial_string(family: str, b: int, kappa: int, rng: np.random.Generator | None = None) -> np.ndarray:
    m = b * kappa
    if family == "all-zeros":
        return np.zeros(m, dtype=np.uint8)
    if family == "all-ones":
        return np.ones(m, dtype=np.uint8)
    if family == "half-dense":
        return (np.arange(m) % 2).astype(np.uint8)
    if family == "block-concentrated":
        # ones fill the first half of the blocks, so one unlucky block choice
        # moves the sampled average a lot
        return (np.arange(m) < b * (kappa // 2)).astype(np.uint8)
    if family == "random":
        rng = rng or np.random.default_rng(0)
        return rng.integers(0, 2, size=m, dtype=np.uint8)
    raise DomainError(f"unknown string family {family!r}")


@dataclass(frozen=True)
class SamplingResult:
    family: str
    trials: int
    failures: int
    bound: float

    @property
    def rate(self) -> float:
        return self.failures / self.trials


def sampling_check(b: int, kappa: int, alpha, delta, family: str, trials: int, seed: int = 0,
                   chunk: int = 8192) -> SamplingResult:
    """Monte Carlo failure rate of the block-sampling estimate.

    A trial fails when the average over T' is at most the average over the
    unchecked positions minus delta; an empty T' counts as a failure.
    Chunk i draws from SeedSequence(seed, spawn_key=(i,)).
    """
    if trials < 1:
        raise DomainError("trials must be positive")
    alpha_f = as_fraction(alpha)
    n_check = alpha_f * kappa
    if n_check.denominator != 1 or not 0 < n_check < kappa:
        raise DomainError("alpha * kappa must be an integer strictly between 0 and kappa")
    n_check = int(n_check)
    y = adversarial_string(family, b, kappa, np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**31,))))
    y_blocks = y.reshape(kappa, b).astype(np.int64)
    d = float(as_fraction(delta)) if not isinstance(delta, float) else delta
    failures = 0
    done = 0
    idx = 0
    while done < trials:
        n = min(chunk, trials - done)
        rng = session_rng(seed, idx)
        order = np.argsort(rng.random((n, kappa)), axis=1)
        picked = np.zeros((n, kappa), dtype=bool)
        np.put_along_axis(picked, order[:, :n_check], True, axis=1)
        half = rng.random((n, kappa, b)) < 0.5
        sub = half & picked[:, :, None]
        size = sub.sum(axis=(1, 2))
        ones = (sub * y_blocks[None]).sum(axis=(1, 2))
        rest_ones = (~picked * y_blocks.sum(axis=1)[None]).sum(axis=1)
        rest_avg = rest_ones / ((kappa - n_check) * b)
        avg = ones / np.maximum(size, 1)
        fail = (size == 0) | (avg <= rest_avg - d)
        failures += int(fail.sum())
        done += n
        idx += 1
    return SamplingResult(family, trials, failures, sampling_bound(kappa, alpha, delta))
