"""Command-line front end: generation, validation, auditing and attacks
as scriptable commands with machine-readable output.

All field-sized integers are lowercase big-endian hex without prefixes;
small metadata stays decimal.  Every JSON document carries schema_version.
Randomness flows from an explicit --seed; without one the OS supplies a
seed which is echoed in the output.

Exit codes: 0 success / overall pass, 1 operational failure (budget or
cap exhausted), 2 validation failure, 3 indeterminate-only blemishes,
64 usage error, 66 unreadable or malformed file, 70 internal contract
violation.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from typing import Dict, Optional

from . import attacks, cm, counting, randgen, registry
from .curve import BadOrder, CurveParams, CurvePoint, INFINITY, NotPrime, OrderInfo, Singular
from .numtheory import RandomPrime, ShapeExhausted, gen_prime
from .validator import (
    InconsistentSubject,
    Subject,
    ValidationReport,
    ValidatorPolicy,
    Verdict,
    validate,
)

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_OPERATIONAL = 1
EXIT_VALIDATION_FAIL = 2
EXIT_INDETERMINATE = 3
EXIT_USAGE = 64
EXIT_FILE = 66
EXIT_INTERNAL = 70

_OPERATIONAL_ERRORS = (
    attacks.CapExceeded,
    attacks.NotInInterval,
    attacks.DegenerateCollision,
    randgen.RetryBudgetExhausted,
    counting.Ambiguous,
    cm.Restart,
    ShapeExhausted,
)

_CONTRACT_ERRORS = (
    InconsistentSubject,
    counting.HasseViolation,
    BadOrder,
    attacks.OutOfSubgroup,
    attacks.BadFactorization,
    registry.ConsistencyError,
    randgen.ReplayMismatch,
    cm.CmConstructionError,
)

_FILE_ERRORS = (
    OSError,
    json.JSONDecodeError,
    registry.ParseError,
    registry.UnknownCurve,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _hex(value: int) -> str:
    return format(value, "x")


def _point_json(P: CurvePoint) -> Dict:
    if P.infinity:
        return {"infinity": True}
    return {"infinity": False, "x": _hex(P.x), "y": _hex(P.y)}


def _point_from_json(data: Dict) -> CurvePoint:
    if data.get("infinity"):
        return INFINITY
    return CurvePoint(int(data["x"], 16), int(data["y"], 16))


def _curve_json(E: CurveParams) -> Dict:
    return {"p": _hex(E.p), "a": _hex(E.a), "b": _hex(E.b)}


def _curve_from_json(data: Dict) -> CurveParams:
    return CurveParams(int(data["p"], 16), int(data["a"], 16), int(data["b"], 16))


def _order_json(order: OrderInfo) -> Dict:
    return {"N": _hex(order.N), "t": order.t, "n": _hex(order.n), "h": order.h}


def _order_from_json(data: Dict) -> OrderInfo:
    return OrderInfo(
        N=int(data["N"], 16), t=int(data["t"]), n=int(data["n"], 16), h=int(data["h"])
    )


def _subject_from_json(data: Dict) -> Subject:
    return Subject(
        curve=_curve_from_json(data["curve"]),
        order=_order_from_json(data["order"]),
        base_point=_point_from_json(data["base_point"]),
    )


def _report_json(report: ValidationReport) -> Dict:
    return {
        "overall_pass": report.overall_pass,
        "criteria": [
            {
                "id": r.criterion,
                "verdict": r.verdict.value,
                "advisory": r.advisory,
                "evidence": r.evidence,
            }
            for r in report.results
        ],
    }


def _suite_json(suite: randgen.CurveSuite, bits: int) -> Dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "curve_suite",
        "bits": bits,
        "curve": _curve_json(suite.curve),
        "order": _order_json(suite.order),
        "base_point": _point_json(suite.base_point),
        "twist_order": _hex(suite.twist_order),
        "policy": suite.policy.to_dict(),
        "seed_trace": {
            "seed": suite.seed_trace.seed,
            "draws": [list(d) for d in suite.seed_trace.draws],
        },
        "stats": {
            "attempts": suite.stats.attempts,
            "aborts": dict(sorted(suite.stats.aborts.items())),
        },
    }


def _cm_json(result: cm.CmResult) -> Dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "cm_curve",
        "curve": _curve_json(result.curve),
        "order": _order_json(result.order),
        "base_point": _point_json(result.base_point),
        "twist_order": _hex(result.twist_order),
        "cm": {
            "D": result.cm.D,
            "t": result.cm.t,
            "s": result.cm.s,
            "class_number": result.cm.class_number,
            "j_invariant": _hex(result.j_invariant),
        },
    }


def _emit(args, payload: Dict, text_renderer) -> None:
    if args.format == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text_renderer(payload))


def _load_json(path: str) -> Dict:
    with open(path, "r", encoding="utf-8") as handle:
        return json.load(handle)


def _load_policy(args, default: Optional[ValidatorPolicy] = None) -> ValidatorPolicy:
    if getattr(args, "policy", None):
        return ValidatorPolicy.from_dict(_load_json(args.policy))
    return default or ValidatorPolicy()


def _render_report_text(payload: Dict) -> str:
    lines = [f"overall: {'PASS' if payload['report']['overall_pass'] else 'not pass'}"]
    for item in payload["report"]["criteria"]:
        tag = " (advisory)" if item["advisory"] else ""
        lines.append(f"  {item['id']:24s} {item['verdict']:13s}{tag}")
    return "\n".join(lines)


def _render_suite_text(payload: Dict) -> str:
    lines = [
        f"p = {payload['curve']['p']}",
        f"a = {payload['curve']['a']}",
        f"b = {payload['curve']['b']}",
        f"N = {payload['order']['N']} (trace {payload['order']['t']}, cofactor {payload['order']['h']})",
        f"G = ({payload['base_point']['x']}, {payload['base_point']['y']})",
        f"twist order = {payload['twist_order']}",
    ]
    if "seed_trace" in payload:
        lines.append(f"seed = {payload['seed_trace']['seed']}")
        lines.append(f"attempts = {payload['stats']['attempts']}")
    if "cm" in payload:
        cm_data = payload["cm"]
        lines.append(
            f"D = {cm_data['D']}, (t, s) = ({cm_data['t']}, {cm_data['s']}), "
            f"h(D) = {cm_data['class_number']}, j = {cm_data['j_invariant']}"
        )
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_generate_random(args) -> int:
    policy = _load_policy(args, ValidatorPolicy.desk_scale(args.bits))
    seed = args.seed if args.seed is not None else random.SystemRandom().randrange(1 << 63)
    suite = randgen.generate(
        args.bits, policy=policy, seed=seed, retry_budget=args.retry_budget
    )
    _emit(args, _suite_json(suite, args.bits), _render_suite_text)
    return EXIT_OK


def _cmd_generate_cm(args) -> int:
    if args.prime is not None:
        result = cm.cm_generate(
            args.prime, prefer=args.prefer, max_class_number=args.max_class_number
        )
    else:
        seed = args.seed if args.seed is not None else random.SystemRandom().randrange(1 << 63)
        rng = random.Random(seed)
        result = None
        last_reason = "no prime admitted a curve"
        for _ in range(args.retry_budget):
            p = gen_prime(RandomPrime(args.bits), rng).value
            try:
                result = cm.cm_generate(
                    p, prefer=args.prefer, max_class_number=args.max_class_number
                )
                break
            except cm.Restart as exc:
                last_reason = str(exc)
        if result is None:
            raise cm.Restart(last_reason)
    _emit(args, _cm_json(result), _render_suite_text)
    return EXIT_OK


def _cmd_validate(args) -> int:
    data = _load_json(args.curve)
    try:
        subject = _subject_from_json(data)
    except (KeyError, ValueError, Singular, NotPrime) as exc:
        print(f"curvekit: malformed curve file: {exc}", file=sys.stderr)
        return EXIT_FILE
    # Precedence: explicit --policy, then the policy the file was
    # generated under, then the cryptographic defaults.
    if args.policy:
        policy = ValidatorPolicy.from_dict(_load_json(args.policy))
    elif "policy" in data:
        policy = ValidatorPolicy.from_dict(data["policy"])
    else:
        policy = ValidatorPolicy()
    report = validate(subject, policy, threads=args.threads)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "validation_report",
        "policy": policy.to_dict(),
        "report": _report_json(report),
    }
    _emit(args, payload, _render_report_text)
    if report.failures:
        return EXIT_VALIDATION_FAIL
    if report.indeterminates:
        return EXIT_INDETERMINATE
    return EXIT_OK


def _cmd_audit(args) -> int:
    if args.trend:
        trend = registry.trend_report()
        payload = {
            "schema_version": SCHEMA_VERSION,
            "kind": "trend_report",
            "counts": trend.counts,
            "total": trend.total,
            "plurality": trend.plurality,
        }
        _emit(
            args,
            payload,
            lambda data: "\n".join(
                [f"{label}: {count}" for label, count in data["counts"].items()]
                + [f"plurality: {data['plurality']}"]
            ),
        )
        return EXIT_OK
    policy = _load_policy(args)
    outcome = registry.audit(args.name, policy, threads=args.threads)
    record = outcome.record
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "audit_report",
        "curve": {
            "name": record.name,
            "agency": record.agency,
            "year": record.year,
            "security_bits": record.security_bits,
            "approach": record.approach,
            "source": record.source,
        },
        "policy": policy.to_dict(),
        "report": _report_json(outcome.report),
    }
    _emit(
        args,
        payload,
        lambda data: (
            f"{data['curve']['name']} ({data['curve']['agency']}, "
            f"{data['curve']['year']}, {data['curve']['approach']})\n"
            + _render_report_text(data)
        ),
    )
    if outcome.report.failures:
        return EXIT_VALIDATION_FAIL
    if outcome.report.indeterminates:
        return EXIT_INDETERMINATE
    return EXIT_OK


def _cmd_attack(args) -> int:
    data = _load_json(args.instance)
    try:
        inst = attacks.DlpInstance(
            curve=_curve_from_json(data["curve"]),
            base_point=_point_from_json(data["base_point"]),
            n=int(data["n"], 16),
            target=_point_from_json(data["target"]),
        )
    except (KeyError, ValueError, Singular) as exc:
        print(f"curvekit: malformed instance file: {exc}", file=sys.stderr)
        return EXIT_FILE
    seed = args.seed if args.seed is not None else random.SystemRandom().randrange(1 << 63)
    rng = random.Random(seed)
    if args.method == "exhaustive":
        result = attacks.exhaustive_search(inst, cap=args.cap)
    elif args.method == "bsgs":
        result = attacks.bsgs(inst)
    elif args.method == "rho":
        result = attacks.pollard_rho(inst, walkers=args.walkers, rng=rng)
    elif args.method == "lambda":
        low = args.low if args.low is not None else 0
        high = args.high if args.high is not None else inst.n - 1
        result = attacks.pollard_lambda(inst, low, high, rng=rng)
    else:
        factors = None
        if data.get("n_factors"):
            factors = {int(q): e for q, e in data["n_factors"].items()}
        result = attacks.pohlig_hellman(inst, factors)
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "attack_result",
        "method": result.method,
        "l": _hex(result.l),
        "group_ops": result.group_ops,
        "wall_time_s": result.wall_time,
        "seed": seed,
        "verified": True,
    }
    _emit(
        args,
        payload,
        lambda data: (
            f"l = {data['l']} ({data['method']}, {data['group_ops']} group ops, "
            f"{data['wall_time_s']:.6f} s)"
        ),
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> _Parser:
    parser = _Parser(prog="curvekit", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="bound on internal parallelism; results do not depend on it",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="produce a new curve")
    gen_sub = gen.add_subparsers(dest="approach", required=True)

    gen_random = gen_sub.add_parser("random", parents=[common])
    gen_random.add_argument("--bits", type=int, required=True)
    gen_random.add_argument("--seed", type=int)
    gen_random.add_argument("--policy", help="JSON file overriding policy fields")
    gen_random.add_argument("--retry-budget", type=int, default=50_000)
    gen_random.set_defaults(func=_cmd_generate_random)

    gen_cm = gen_sub.add_parser("cm", parents=[common])
    group = gen_cm.add_mutually_exclusive_group(required=True)
    group.add_argument("--prime", type=lambda s: int(s, 0))
    group.add_argument("--bits", type=int)
    gen_cm.add_argument(
        "--prefer",
        choices=cm.PREFERENCES,
        default="prime",
    )
    gen_cm.add_argument("--max-class-number", type=int, default=None)
    gen_cm.add_argument("--seed", type=int)
    gen_cm.add_argument("--retry-budget", type=int, default=512)
    gen_cm.set_defaults(func=_cmd_generate_cm)

    val = sub.add_parser("validate", parents=[common])
    val.add_argument("--curve", required=True, help="curve suite JSON file")
    val.add_argument("--policy")
    val.set_defaults(func=_cmd_validate)

    aud = sub.add_parser("audit", parents=[common])
    aud_group = aud.add_mutually_exclusive_group(required=True)
    aud_group.add_argument("--name")
    aud_group.add_argument("--trend", action="store_true")
    aud.add_argument("--policy")
    aud.set_defaults(func=_cmd_audit)

    atk = sub.add_parser("attack", parents=[common])
    atk.add_argument(
        "--method",
        choices=("exhaustive", "bsgs", "rho", "lambda", "ph"),
        required=True,
    )
    atk.add_argument("--instance", required=True, help="DLP instance JSON file")
    atk.add_argument("--walkers", type=int, default=1)
    atk.add_argument("--seed", type=int)
    atk.add_argument("--cap", type=int)
    atk.add_argument("--low", type=int)
    atk.add_argument("--high", type=int)
    atk.set_defaults(func=_cmd_attack)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _FILE_ERRORS as exc:
        print(f"curvekit: {exc}", file=sys.stderr)
        return EXIT_FILE
    except _CONTRACT_ERRORS as exc:
        print(f"curvekit: internal contract violation: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except _OPERATIONAL_ERRORS as exc:
        print(f"curvekit: {exc}", file=sys.stderr)
        return EXIT_OPERATIONAL
    except ValueError as exc:
        print(f"curvekit: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry()
