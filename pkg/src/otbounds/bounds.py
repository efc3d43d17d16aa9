"""Evaluators for the lower bounds on OT reductions and feasibility verdicts.

Each evaluator returns a :class:`BoundReport`.  Where a bound is only proven
for a range of the error parameter, values outside that range give a
``vacuous`` verdict instead of an extrapolated number.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any, Mapping, Sequence

from .dist import JointDist, as_fraction
from .entropy import (
    binary_entropy,
    entropy,
    max_entropy_cond,
    shannon_cond,
    shannon_cond_rev,
    smooth_min_entropy,
)
from .errors import ConditionViolated, DomainError, NoWitness, ParseError, SmoothingOutOfRange
from .primitives import (
    PrimitiveSpec,
    check_condition_1,
    find_y1_y2,
    make_function,
    parse_primitive,
    restricted_ot_function,
)
from .structure import mutual_info_given_common

TOL = 1e-9

SATISFIABLE = "satisfiable"
VIOLATED = "violated"
VACUOUS = "vacuous"
UNCHECKED = "unchecked"


@dataclass(frozen=True)
class BoundReport:
    """One evaluated inequality ``measured >= required``.

    ``verdict`` is ``vacuous`` when the precondition fails or nothing is
    required, ``unchecked`` when no measured value was supplied.
    """

    name: str
    required: float
    measured: float | None
    slack: float | None
    verdict: str
    detail: str = ""
    extras: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["extras"] = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.extras.items()}
        return out


def make_report(
    name: str,
    required,
    measured=None,
    *,
    valid: bool = True,
    detail: str = "",
    extras: Mapping[str, Any] | None = None,
) -> BoundReport:
    req = float(required)
    meas = None if measured is None else float(measured)
    slack = None if meas is None else meas - req
    if not valid or req <= TOL:
        verdict = VACUOUS
    elif meas is None:
        verdict = UNCHECKED
    elif meas >= req - TOL:
        verdict = SATISFIABLE
    else:
        verdict = VIOLATED
    if slack is not None and abs(slack) < TOL:
        slack = 0.0
    return BoundReport(name, req, meas, slack, verdict, detail, dict(extras or {}))


def overall_verdict(reports: Sequence[BoundReport]) -> str:
    verdicts = {r.verdict for r in reports}
    if VIOLATED in verdicts:
        return VIOLATED
    if SATISFIABLE in verdicts:
        return SATISFIABLE
    if UNCHECKED in verdicts:
        return UNCHECKED
    return VACUOUS


def _eps(eps) -> Fraction | float:
    if isinstance(eps, float):
        if not 0.0 <= eps <= 1.0:
            raise DomainError(f"error parameter must lie in [0, 1], got {eps}")
        return eps
    eps = as_fraction(eps)
    if not 0 <= eps <= 1:
        raise DomainError(f"error parameter must lie in [0, 1], got {eps}")
    return eps


def _h(eps) -> float:
    return binary_entropy(eps)


@dataclass(frozen=True)
class ReductionParams:
    """M copies of OT(1, N, K) from m copies of OT(1, n, k) with error eps."""

    M: int
    N: int
    K: int
    m: int
    n: int
    k: int
    eps: Fraction | float = Fraction(0)

    def __post_init__(self):
        if self.N < 2 or self.n < 2:
            raise DomainError("OT arity must be at least 2")
        if min(self.K, self.k, self.M, self.m) < 1:
            raise DomainError("counts and string lengths must be positive")
        object.__setattr__(self, "eps", _eps(self.eps))


# -- OT-specific bounds --------------------------------------------------


def ot_entropy_triple(n: int, k: int, m: int) -> tuple[float, float, float]:
    """H(U|V), H(V|U), I(U;V) of m randomized OT(1, n, k), in closed form."""
    return m * (n - 1) * k, m * math.log2(n), m * k


def thm_impossibility_bounds(n: int, k: int, m: int, eps, measured: Sequence[float] | None = None) -> list[BoundReport]:
    """Required H(U|V), H(V|U), I(U;V|C) for implementing m OT(1, n, k)."""
    eps = _eps(eps)
    e, h = float(eps), _h(eps)
    req = (
        m * (n - 1) * k - (4 * n - 1) * (e * m * k + h),
        m * math.log2(n) - m * (4 * math.log2(n) + 7) * (e + h),
        m * k - 7 * e * m * k - 7 * h,
    )
    names = ("H(U|V)", "H(V|U)", "I(U;V|C)")
    meas = measured if measured is not None else (None, None, None)
    return [make_report(f"ot-impossibility:{nm}", r, mv) for nm, r, mv in zip(names, req, meas)]


def rate_bound_main2(p: ReductionParams) -> BoundReport:
    """Required m/M for OT-from-OT reductions; measured is the actual m/M."""
    ratio = max(
        Fraction((p.N - 1) * p.K, (p.n - 1) * p.k),
        Fraction(p.K, p.k),
    )
    lead = max(float(ratio), math.log2(p.N) / math.log2(p.n))
    required = lead - 7 * p.N * p.K * (float(p.eps) + _h(p.eps))
    return make_report(
        "rate-main2",
        required,
        Fraction(p.m, p.M),
        extras={"ratio_at_zero_error": lead},
    )


def minentropy_feasibility(p: ReductionParams) -> BoundReport:
    """m(n-1)k >= M(N-1)K - (6n+2) eps, proven for eps < 1/(2(3n+1))."""
    limit = Fraction(1, 2 * (3 * p.n + 1))
    target = p.M * (p.N - 1) * p.K
    have = p.m * (p.n - 1) * p.k
    deficit = target - have
    min_eps = min(Fraction(deficit, 6 * p.n + 2), limit) if deficit > 0 else Fraction(0)
    valid = p.eps < limit
    required = target - (6 * p.n + 2) * p.eps
    return make_report(
        "minentropy-feasibility",
        required,
        have,
        valid=valid,
        extras={"min_eps": min_eps, "eps_limit": limit},
    )


def cor_H_imposs_ot(t: int, n: int, k: int, m: int, eps, measured=None) -> BoundReport:
    """H(U|V) >= ((1-eps)n - t)km - (3 ceil(n/t) - 1)(eps m t k + h(eps))."""
    eps = _eps(eps)
    e = float(eps)
    req = ((1 - e) * n - t) * k * m - (3 * math.ceil(n / t) - 1) * (e * m * t * k + _h(eps))
    return make_report("H-imposs-ot", req, measured)


def cor_I_imposs_ot(t: int, n: int, k: int, m: int, eps, measured=None) -> BoundReport:
    eps = _eps(eps)
    base = m * t * k if t <= n // 2 else m * (n - t) * k
    req = base - 7 * (float(eps) * base + _h(eps))
    return make_report("I-imposs-ot", req, measured)


def eq_bound(k: int, eps, m: int | None = None) -> BoundReport:
    """m >= k - 1 - (6 2^k + 2) eps, proven for eps <= 1/(6 2^k + 2)."""
    eps = _eps(eps)
    limit = Fraction(1, 6 * 2**k + 2)
    req = k - 1 - (6 * 2**k + 2) * eps
    return make_report("eq-ot-count", req, m, valid=eps <= limit)


def ip_bound(n: int, eps, m: int | None = None) -> BoundReport:
    """m >= n - 1 - (6n + 2) eps, proven for eps < 1/(6n + 2)."""
    eps = _eps(eps)
    limit = Fraction(1, 6 * n + 2)
    req = n - 1 - (6 * n + 2) * eps
    return make_report("ip-ot-count", req, m, valid=eps < limit)


def olfe_bound(q: int, m: int, eps, resource: JointDist | None = None) -> list[BoundReport]:
    """The three entropy bounds for m instances of OLFE over GF(q)."""
    eps = _eps(eps)
    e, h = float(eps), _h(eps)
    base = m * math.log2(q)
    req = (base - 5 * (e * base + h), base - 5 * (e * base + h), base - 7 * (e * base + h))
    meas = (None, None, None)
    if resource is not None:
        meas = (shannon_cond(resource), shannon_cond_rev(resource), mutual_info_given_common(resource))
    names = ("H(U|V)", "H(V|U)", "I(U;V|C)")
    return [make_report(f"olfe:{nm}", r, mv) for nm, r, mv in zip(names, req, meas)]


# -- bounds for arbitrary functions --------------------------------------


def _input_output_joint(f: PrimitiveSpec, y) -> JointDist:
    """(X, f(X, y)) with X uniform on the function's domain."""
    w: dict = {}
    for x in f.x_domain:
        key = (x, f.table[(x, y)])
        w[key] = w.get(key, 0) + 1
    return JointDist(w, len(f.x_domain))


def max_y_shannon(f: PrimitiveSpec) -> float:
    return max(shannon_cond(_input_output_joint(f, y)) for y in f.y_domain)


def max_y_min_entropy(f: PrimitiveSpec, eps_prime=0) -> float:
    return max(smooth_min_entropy(_input_output_joint(f, y), eps_prime).value for y in f.y_domain)


def general_H_bound(f: PrimitiveSpec, resource: PrimitiveSpec | JointDist, eps, *, use_d_f: bool = True) -> BoundReport:
    """H(U|V) >= max_y H(X|f(X,y)) - (3|Y|-1)(eps L + h(eps)) - eps log|X|.

    ``L`` is d_f = log max_y |f(X, y)| by default, log|Z| with ``use_d_f=False``.
    """
    f.require_function()
    if not check_condition_1(f):
        raise ConditionViolated(f"{f.name} does not separate its inputs")
    eps = _eps(eps)
    e = float(eps)
    if use_d_f:
        size = max(len(set(f.column(y))) for y in f.y_domain)
    else:
        size = len(set(f.table.values()))
    log_size = math.log2(size)
    req = max_y_shannon(f) - (3 * len(f.y_domain) - 1) * (e * log_size + _h(eps)) - e * math.log2(len(f.x_domain))
    joint = resource.require_randomness() if isinstance(resource, PrimitiveSpec) else resource
    return make_report(
        "general-H" + ("" if use_d_f else "[log|Z|]"),
        req,
        shannon_cond(joint),
        extras={"log_output": log_size},
    )


def general_I_bound(f: PrimitiveSpec, resource: PrimitiveSpec | JointDist, eps) -> BoundReport:
    """I(U;V|C) >= log|X| - 7(eps log|X| + h(eps)); needs a (y1, y2) witness."""
    f.require_function()
    witness = find_y1_y2(f)
    if witness is None:
        raise NoWitness(f"{f.name} has no revealing/blind input pair")
    eps = _eps(eps)
    lx = math.log2(len(f.x_domain))
    req = lx - 7 * (float(eps) * lx + _h(eps))
    joint = resource.require_randomness() if isinstance(resource, PrimitiveSpec) else resource
    return make_report("general-I", req, mutual_info_given_common(joint), extras={"y1": witness[0], "y2": witness[1]})


def general_Hmin_bound(
    f: PrimitiveSpec,
    resource: PrimitiveSpec | JointDist,
    eps,
    eps_prime=0,
    *,
    smoothing: str = "compound",
) -> BoundReport:
    """H_min^{s}(U|V) >= max_y H_min^{eps'}(X|f(X,y)).

    ``smoothing="compound"`` uses s = (3|Y|+1) eps + eps', the published smoothing level.
    ``smoothing="direct"`` uses s = eps + eps', the reading under which the
    Rabin question has the threshold 1/4 for every string length.
    """
    f.require_function()
    if not check_condition_1(f):
        raise ConditionViolated(f"{f.name} does not separate its inputs")
    eps, eps_prime = as_fraction(eps), as_fraction(eps_prime)
    if smoothing == "compound":
        s = (3 * len(f.y_domain) + 1) * eps + eps_prime
    elif smoothing == "direct":
        s = eps + eps_prime
    else:
        raise DomainError(f"unknown smoothing mode {smoothing!r}")
    if not 0 <= s < 1:
        raise SmoothingOutOfRange(f"smoothing level {s} is outside [0, 1)")
    joint = resource.require_randomness() if isinstance(resource, PrimitiveSpec) else resource
    req = max_y_min_entropy(f, eps_prime)
    measured = smooth_min_entropy(joint, s).value
    return make_report(f"general-Hmin[{smoothing}]", req, measured, extras={"smoothing": s})


# -- malicious model -----------------------------------------------------


def malicious_transfer(eps, n: int):
    """Error of the semi-honest protocol derived from a malicious one."""
    if isinstance(eps, float):
        return (2 * n + 1) * eps
    return (2 * n + 1) * as_fraction(eps)


def malicious_bounds(resource_with_leak: PrimitiveSpec | JointDist, k: int, eps) -> list[BoundReport]:
    """H_min^{7 eps}(U|VV') >= k and H(U|VV') >= k - 6(k eps + h(eps))."""
    eps = as_fraction(eps) if not isinstance(eps, float) else eps
    joint = (
        resource_with_leak.require_randomness()
        if isinstance(resource_with_leak, PrimitiveSpec)
        else resource_with_leak
    )
    valid = 7 * eps < 1
    hmin = smooth_min_entropy(joint, 7 * as_fraction(eps)).value if valid else None
    first = make_report("malicious-Hmin", k, hmin, valid=valid)
    second = make_report("malicious-H", k - 6 * (k * float(eps) + _h(eps)), shannon_cond(joint), valid=valid)
    return [first, second]


# -- quantum bounds ------------------------------------------------------

QUANTUM_EPS_LIMIT = 0.002


def commitment_rhs(eps, k) -> float:
    """(1 - 3 sqrt(eps)) k - 3 h(sqrt(eps))."""
    r = math.sqrt(float(eps))
    return (1 - 3 * r) * k - 3 * binary_entropy(r)


def extension_chain_lhs(eps_prime: float, m: int) -> float:
    """12 sqrt(e') + 3 h(sqrt(e')) / m; must reach 2 for the iterated extension."""
    r = math.sqrt(eps_prime)
    return 12 * r + 3 * binary_entropy(r) / m


def quantum_bounds(kind: str, **params) -> BoundReport:
    """Closed-form quantum lower bounds.

    kinds: ``imposs:com`` (eps, k, [n]), ``imposs:com-count`` (eps, [n]),
    ``imposs:rand`` (eps, k, [resource]), ``imposs:rand-joint`` (eps, k, [resource]),
    ``imposs4`` (eps, k, [n]), ``imposs1`` (kappa, [eps]), ``extension`` (m, [eps]).
    """
    if kind == "imposs1":
        kappa = int(params["kappa"])
        min_err = Fraction(1, 36 * 2**kappa)
        eps = params.get("eps")
        rep = make_report("imposs1", min_err, None if eps is None else as_fraction(eps), extras={"min_eps": min_err})
        return rep
    if kind == "extension":
        m = int(params["m"])
        lhs = extension_chain_lhs(QUANTUM_EPS_LIMIT, m)
        # the left side grows with eps', so falling short of 2 at the limit
        # rules out every eps' <= 0.002 and forces eps' > 0.002 = 3 m eps
        proven = lhs < 2
        min_err = Fraction(1, 1500 * m) if proven else Fraction(0)
        eps = params.get("eps")
        return make_report(
            "quantum-extension",
            min_err,
            None if eps is None else as_fraction(eps),
            valid=proven,
            extras={"min_eps": min_err, "chain_lhs_at_limit": lhs},
        )
    eps = _eps(params.get("eps", 0))
    valid = float(eps) <= QUANTUM_EPS_LIMIT
    if kind == "imposs:com-count":
        valid = valid and eps > 0
        req = math.log2(1 / float(eps)) - 6 if eps > 0 else math.inf
        return make_report("imposs:com-count", req if valid else 0, params.get("n"), valid=valid)
    k = params["k"]
    rhs = commitment_rhs(eps, k)
    if kind == "imposs:com":
        return make_report("imposs:com", rhs, params.get("n"), valid=valid)
    if kind == "imposs4":
        n = params.get("n")
        return make_report("imposs4", rhs, None if n is None else 2 * n, valid=valid)
    if kind in ("imposs:rand", "imposs:rand-joint"):
        res = params.get("resource")
        measured = None
        if res is not None:
            joint = res.require_randomness() if isinstance(res, PrimitiveSpec) else res
            if kind == "imposs:rand":
                measured = max_entropy_cond(joint) + max_entropy_cond(joint.swap())
            else:
                measured = 2 * entropy(joint)
        return make_report(kind, rhs, measured, valid=valid)
    raise ParseError(f"unknown quantum bound {kind!r}")


# -- reduction checker ---------------------------------------------------


def _ot_params(spec: PrimitiveSpec) -> tuple | None:
    if spec.name.startswith("ot:") and spec.params and spec.params[0] == 1:
        return spec.params
    return None


def _ot_ref(ref: str) -> tuple | None:
    name, _, args = ref.partition(":")
    if name.strip().lower() != "ot":
        return None
    try:
        t, n, k, m = (int(a) for a in args.split(","))
    except ValueError as exc:
        raise ParseError(f"bad OT reference {ref!r}") from exc
    return t, n, k, m


def check_reduction(target: str, resource: str, eps) -> tuple[list[BoundReport], str]:
    """Every applicable bound for implementing ``target`` from ``resource``.

    The target must be an OT reference ``ot:1,N,K,M``.  OT resources are
    evaluated in closed form (they may exceed the atom budget); any other
    resource is built as a table and measured exactly.
    """
    eps = _eps(eps)
    tgt = _ot_ref(target)
    if tgt is None or tgt[0] != 1:
        raise ParseError("target must be ot:1,N,K,M")
    _, N, K, M = tgt
    res_ot = _ot_ref(resource)
    reports: list[BoundReport] = []
    if res_ot is not None and res_ot[0] == 1:
        _, n, k, m = res_ot
        measured = ot_entropy_triple(n, k, m)
        reports += thm_impossibility_bounds(N, K, M, eps, measured)
        p = ReductionParams(M, N, K, m, n, k, eps)
        reports.append(rate_bound_main2(p))
        reports.append(minentropy_feasibility(p))
        return reports, overall_verdict(reports)

    spec = parse_primitive(resource)
    joint = spec.require_randomness()
    measured = (shannon_cond(joint), shannon_cond_rev(joint), mutual_info_given_common(joint))
    reports += thm_impossibility_bounds(N, K, M, eps, measured)
    if M == 1:
        f = make_function("ot", 1, N, K)
        reports.append(general_H_bound(f, joint, eps))
        for mode in ("compound", "direct"):
            try:
                reports.append(general_Hmin_bound(f, joint, eps, smoothing=mode))
            except SmoothingOutOfRange as exc:
                reports.append(make_report(f"general-Hmin[{mode}]", max_y_min_entropy(f), None, valid=False, detail=str(exc)))
        reports.append(general_I_bound(restricted_ot_function(1, N, K), joint, eps))
    return reports, overall_verdict(reports)
