"""Command-line front end: ``otbounds <command> ...``.

Every command builds a Report with the command echo, structured results,
the seed, the package version and the wall time.  Text output prints one
``key: value`` line per result; ``--format structured`` prints the same
fields as sorted JSON, the syntax used by table files.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, is_dataclass
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from . import __version__
from .bounds import (
    BoundReport,
    check_reduction,
    eq_bound,
    ip_bound,
    olfe_bound,
    quantum_bounds,
    thm_impossibility_bounds,
)
from .dist import as_fraction, dumps_table, load_table
from .entropy import (
    max_entropy_cond,
    min_entropy_cond,
    mutual_info,
    shannon_cond,
    shannon_cond_rev,
    smooth_max_entropy,
    smooth_min_entropy,
)
from .errors import DomainError, OTBoundsError, ParseError
from .primitives import parse_primitive
from .structure import mutual_info_given_common

ENTROPY_MEASURES = {
    "shannon": ("H(U|V)", shannon_cond),
    "shannon-rev": ("H(V|U)", shannon_cond_rev),
    "mi": ("I(U;V)", mutual_info),
    "mi-common": ("I(U;V|C)", mutual_info_given_common),
    "min": ("Hmin(U|V)", min_entropy_cond),
    "max": ("Hmax(U|V)", max_entropy_cond),
}


# -- output -----------------------------------------------------------------


def plain(obj: Any) -> Any:
    """Recursively convert results into JSON-friendly values."""
    if isinstance(obj, BoundReport):
        return plain(obj.to_dict())
    if is_dataclass(obj) and not isinstance(obj, type):
        return plain(asdict(obj))
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [plain(v) for v in obj]
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer, np.bool_)):
        return obj.item()
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    return obj


def _flatten(prefix: str, value: Any, out: list) -> None:
    if isinstance(value, dict):
        for k in value:
            _flatten(f"{prefix}.{k}" if prefix else k, value[k], out)
    elif isinstance(value, list) and value and isinstance(value[0], dict):
        for i, v in enumerate(value):
            _flatten(f"{prefix}[{i}]", v, out)
    else:
        out.append(f"{prefix}: {json.dumps(value) if isinstance(value, list) else value}")


def render(report: dict, fmt: str) -> str:
    if fmt == "structured":
        return json.dumps(report, sort_keys=True)
    lines: list = []
    _flatten("", report, lines)
    return "\n".join(lines)


# -- helpers --------------------------------------------------------------------


def _load(ref: str, subnormalized: bool):
    if os.path.exists(ref):
        return load_table(ref, subnormalized)
    return parse_primitive(ref).require_randomness()


def _rational(text: str) -> Fraction:
    try:
        return as_fraction(text)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"bad number {text!r}") from exc


def _fmt_input(v) -> str:
    if isinstance(v, tuple):
        if all(isinstance(b, int) and b in (0, 1) for b in v):
            return "".join(map(str, v))
        return ",".join(map(str, v))
    return str(v)


def _pick_input(text: str | None, domain: tuple):
    if text is None:
        return domain[0]
    for v in domain:
        if _fmt_input(v) == text:
            return v
    raise ParseError(f"input {text!r} is not in the protocol's domain")


# -- commands ---------------------------------------------------------------------


def cmd_entropy(args) -> dict:
    joint = _load(args.primitive, args.subnormalized)
    chosen = [name for name in ENTROPY_MEASURES if args.all or getattr(args, name.replace("-", "_"))]
    smooth = args.smooth or (args.all and args.eps is not None)
    if not chosen and not smooth:
        chosen = ["shannon"]
    results: dict = {}
    for name in chosen:
        label, fn = ENTROPY_MEASURES[name]
        results[label] = fn(joint)
    if smooth:
        eps = _rational(args.eps if args.eps is not None else "0")
        lo = smooth_min_entropy(joint, eps)
        hi = smooth_max_entropy(joint, eps)
        results[f"Hmin^{eps}(U|V)"] = lo.value
        results[f"Hmax^{eps}(U|V)"] = hi.value
    if args.dump:
        with open(args.dump, "w", encoding="utf-8") as fh:
            fh.write(dumps_table(joint))
        results["dumped_to"] = args.dump
    return results


def cmd_check_reduction(args) -> dict:
    reports, overall = check_reduction(args.target, args.resource, _rational(args.eps))
    return {"overall": overall, "bounds": reports}


def cmd_bound(args) -> dict:
    kind = args.kind
    eps = None if args.eps is None else _rational(args.eps)
    if kind in ("imposs1", "extension", "imposs:com", "imposs:com-count", "imposs4", "imposs:rand", "imposs:rand-joint"):
        params = {k: getattr(args, k) for k in ("kappa", "m", "k", "n") if getattr(args, k) is not None}
        if eps is not None:
            params["eps"] = eps
        if args.resource:
            params["resource"] = parse_primitive(args.resource)
        try:
            return {"bounds": [quantum_bounds(kind, **params)]}
        except KeyError as exc:
            raise ParseError(f"bound {kind} needs --{exc.args[0]}") from exc
    eps = eps if eps is not None else Fraction(0)
    if kind == "thm":
        return {"bounds": thm_impossibility_bounds(args.n, args.k, args.m or 1, eps)}
    if kind == "eq":
        return {"bounds": [eq_bound(args.k, eps, args.m)]}
    if kind == "ip":
        return {"bounds": [ip_bound(args.n, eps, args.m)]}
    if kind == "olfe":
        return {"bounds": olfe_bound(args.q, args.m or 1, eps)}
    if kind == "security":
        from .quantum import security_bound_terms

        delta = _rational(args.delta)
        terms = security_bound_terms(args.m, args.kappa, _rational(args.alpha), args.k, eps, delta)
        return {"terms": list(terms), "value": sum(terms), "vacuous": sum(terms) >= 1}
    raise ParseError(f"unknown bound {kind!r}")


def _protocol(args):
    from .protocols import classical

    name = args.protocol
    if name in ("derandomized-ot", "ot"):
        return classical.derandomize_ot(args.n or 2, args.k or 1)
    if name == "leaky-ot":
        return classical.derandomize_ot(args.n or 2, args.k or 1, leak=True)
    if name in ("and-share", "and"):
        return classical.and_share_from_2ot()
    if name == "eq-from-ot":
        return classical.eq_from_ot(args.k or 2)
    if name == "eq-amplify":
        return classical.eq_amplify(args.n or 8, args.k or 8, compose=args.compose)
    if name == "ip":
        return classical.ip_from_ot(args.n or 3)
    raise ParseError(f"unknown protocol {name!r}")


def _simulate_mcom(args) -> dict:
    from .protocols.mcom import HONEST, flip_one_bit, soundness, split_commit

    k = args.k or 4
    senders = {"honest": HONEST, "flip-one-bit": flip_one_bit(0), "split-commit": split_commit(0)}
    if args.sender not in senders:
        raise ParseError(f"unknown sender {args.sender!r}")
    rep = soundness(k, args.kappa or 8, senders[args.sender], positions=range(k), seed=args.seed)
    return {"protocol": "mcom", "soundness": rep, "ot_calls": rep.kappa}


def cmd_simulate(args) -> dict:
    from .protocols.framework import correctness_error, run_sampled, transcript_table, verify_security

    if args.protocol == "mcom":
        return _simulate_mcom(args)
    p = _protocol(args)
    out: dict = {"protocol": p.name, "rounds": p.rounds, "ot_calls": p.calls_to("ot"), "mode": args.mode}
    if args.mode == "exact":
        if p.simulators is not None:
            rep = verify_security(p)
            out.update(correctness=rep.correctness, alice_distance=rep.alice, bob_distance=rep.bob)
        else:
            out["correctness"] = correctness_error(p)
        if args.dump:
            t = transcript_table(p)
            # left: everything Alice holds; right: Bob's side of the run
            joint = t.joint((0, 1, 2, 6, 8), (3, 4, 5, 6, 7, 9))
            with open(args.dump, "w", encoding="utf-8") as fh:
                fh.write(dumps_table(joint))
            out["dumped_to"] = args.dump
        return out
    x = _pick_input(args.x, p.x_domain)
    y = _pick_input(args.y, p.y_domain)
    stats = run_sampled(p, x, y, args.trials, args.seed)
    out.update(
        x=_fmt_input(x),
        y=_fmt_input(y),
        trials=stats.trials,
        correct_frequency=stats.correct_frequency,
        outputs={f"{a},{b}": c for (a, b), c in sorted(stats.outputs.items(), key=str)},
    )
    return out


def cmd_bb84(args) -> dict:
    from .quantum import FixedBasis, NoMeasureRandomCommit, SessionConfig, run_sessions

    cfg = SessionConfig(args.m, args.kappa, _rational(args.alpha), args.k, args.seed)
    strategies = {"honest": "honest", "fixed-basis": FixedBasis(0), "no-measure": NoMeasureRandomCommit()}
    if args.strategy not in strategies:
        raise ParseError(f"unknown strategy {args.strategy!r}")
    stats = run_sessions(cfg, strategies[args.strategy], args.trials, args.seed, args.engine)
    out = plain(stats)
    out["checked_positions"] = cfg.checked_positions
    return out


def cmd_sample_lemma(args) -> dict:
    from .quantum import STRING_FAMILIES, sampling_check

    families = STRING_FAMILIES if args.family == "all" else (args.family,)
    rows = []
    for fam in families:
        r = sampling_check(args.b, args.kappa, _rational(args.alpha), _rational(args.delta), fam, args.trials, args.seed)
        rows.append({"family": fam, "failures": r.failures, "rate": r.rate, "bound": r.bound, "within": r.rate <= r.bound})
    return {"trials": args.trials, "families": rows}


def cmd_reverse_demo(args) -> dict:
    from .protocols.reverse import reverse_ot_demo

    rep = reverse_ot_demo(args.k, args.kappa, m=args.m, choice=args.choice, seed=args.seed)
    return rep.to_dict()


# -- parser -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="otbounds", description="Bounds and simulations for oblivious-transfer reductions.")
    ap.add_argument("--format", choices=("text", "structured"), default="text")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    e = sub.add_parser("entropy", help="entropy measures of a primitive or table file")
    e.add_argument("primitive")
    for name in ENTROPY_MEASURES:
        e.add_argument(f"--{name}", action="store_true")
    e.add_argument("--smooth", action="store_true", help="smooth min and max entropy at --eps")
    e.add_argument("--all", action="store_true")
    e.add_argument("--eps")
    e.add_argument("--dump", help="write the table to this file")
    e.add_argument("--subnormalized", action="store_true")
    e.set_defaults(run=cmd_entropy)

    c = sub.add_parser("check-reduction", help="evaluate every applicable lower bound")
    c.add_argument("target")
    c.add_argument("resource")
    c.add_argument("--eps", default="0")
    c.set_defaults(run=cmd_check_reduction)

    b = sub.add_parser("bound", help="evaluate one closed-form bound")
    b.add_argument("kind")
    for flag in ("kappa", "m", "k", "n", "q"):
        b.add_argument(f"--{flag}", type=int)
    b.add_argument("--eps")
    b.add_argument("--delta", default="1/20")
    b.add_argument("--alpha", default="1/4")
    b.add_argument("--resource")
    b.set_defaults(run=cmd_bound)

    s = sub.add_parser("simulate", help="run a protocol exactly or by sampling")
    s.add_argument("protocol")
    s.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--n", type=int)
    s.add_argument("--k", type=int)
    s.add_argument("--kappa", type=int)
    s.add_argument("--compose", action="store_true")
    s.add_argument("--sender", default="honest")
    s.add_argument("--x")
    s.add_argument("--y")
    s.add_argument("--dump")
    s.set_defaults(run=cmd_simulate)

    q = sub.add_parser("bb84", help="sessions of OT from commitments over EPR pairs")
    q.add_argument("--m", type=int, default=256)
    q.add_argument("--kappa", type=int, default=16)
    q.add_argument("--alpha", default="1/4")
    q.add_argument("--k", type=int, default=8)
    q.add_argument("--strategy", default="honest")
    q.add_argument("--trials", type=int, default=1000)
    q.add_argument("--engine", choices=("fast", "density"), default="fast")
    q.set_defaults(run=cmd_bb84)

    sl = sub.add_parser("sample-lemma", help="Monte Carlo check of the block-sampling bound")
    sl.add_argument("--b", type=int, default=8)
    sl.add_argument("--kappa", type=int, default=32)
    sl.add_argument("--alpha", default="1/4")
    sl.add_argument("--delta", default="1/10")
    sl.add_argument("--family", default="all")
    sl.add_argument("--trials", type=int, default=10000)
    sl.set_defaults(run=cmd_sample_lemma)

    r = sub.add_parser("reverse-demo", help="string OT from reversed OTs via commitments")
    r.add_argument("--k", type=int, default=4096)
    r.add_argument("--kappa", type=int, default=16)
    r.add_argument("--m", type=int)
    r.add_argument("--choice", type=int, default=0)
    r.set_defaults(run=cmd_reverse_demo)
    return ap


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    args = ap.parse_args(argv)
    start = time.perf_counter()
    try:
        results = args.run(args)
    except OTBoundsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DomainError.exit_code
    report = {
        "command": " ".join(argv),
        "results": plain(results),
        "seed": args.seed,
        "version": __version__,
        "wall_time": round(time.perf_counter() - start, 6),
    }
    print(render(report, args.format))
    return 0


if __name__ == "__main__":
    sys.exit(main())
