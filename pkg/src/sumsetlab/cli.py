"""Unified command-line front end.

Exit codes: 0 success, 1 hypothesis not met (for commands that assert one),
2 internal invariant violation (never expected), 3 argument or I/O error.
Identical invocations produce byte-identical output: floats are formatted to
12 significant digits and all key orders are fixed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction

from . import bounds, entropy, randomsum, setcore, structure
from .errors import ContractViolation, HypothesisNotMet
from .parallel import THREADS_ENV

DEFAULT_SEED = 0


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliError(message)


def _fmt_float(x: float) -> str:
    return f"{x:.12g}"


def _round_floats(obj):
    if isinstance(obj, float):
        return float(_fmt_float(obj))
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit_json(obj, stream=None):
    print(json.dumps(_round_floats(obj), indent=2), file=stream or sys.stdout)


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _load_set(path: str, fmt: str):
    """IntSet from a JSON array / newline-delimited file, CycSet from a dict."""
    if fmt == "lines":
        with open(path, "r", encoding="utf-8") as fh:
            return setcore.IntSet.of(int(line) for line in fh if line.strip())
    data = _load_json(path)
    if isinstance(data, dict):
        return setcore.CycSet.from_json(data)
    return setcore.IntSet.from_json(data)


def _parse_rational(text: str) -> Fraction:
    return Fraction(text)


def _parse_ap(text: str, modulus: int | None) -> bounds.APDescriptor:
    parts = text.split(",")
    if len(parts) != 3:
        raise _CliError(f"expected start,step,length triple, got {text!r}")
    start, step, length = (int(p) for p in parts)
    return bounds.APDescriptor(start=start, step=step, length=length, modulus=modulus)


def build_parser() -> _Parser:
    top = _Parser(prog="sumsetlab", description=__doc__)
    top.add_argument(
        "--threads", type=int, default=None,
        help=f"worker cap (default: available parallelism; env {THREADS_ENV})",
    )
    sub = top.add_subparsers(dest="command")

    def add(name, **kw):
        p = sub.add_parser(name, **kw)
        p.add_argument("--format", choices=["json", "lines"], default="json",
                       help="set-file input format")
        return p

    p = add("sumset", help="pairwise sums of two sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)

    p = add("conv", help="ordered-pair representation counts of 1_A*1_B")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--t", type=int, default=None, help="also report the truncated mass at t")

    p = add("popdouble", help="popular-doubling report of a set against itself")
    p.add_argument("--set", dest="set_path", required=True)
    p.add_argument("--t", type=int, required=True)

    p = add("pollard", help="truncated-mass lower bound in Z/pZ")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--p", type=int, default=None, help="reduce plain integer sets mod p")

    p = add("freiman", help="small-doubling covering progression")
    p.add_argument("--set", dest="set_path", required=True)

    p = add("ap-intersect", help="intersection of two mod-p progressions")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--p-ap", required=True, metavar="START,STEP,LEN")
    p.add_argument("--q-ap", required=True, metavar="START,STEP,LEN")

    p = add("wrap", help="wrap a set modulo a dominant near-end gap")
    p.add_argument("--set", dest="set_path", required=True)
    p.add_argument("--t", type=int, required=True)

    p = add("subgroup", help="subgroup/coset recovery inside Z/nZ")
    p.add_argument("--a", required=True)
    p.add_argument("--b", default=None)
    p.add_argument("--t", type=_parse_rational, required=True)
    p.add_argument("--eta", type=_parse_rational, required=True)

    p = sub.add_parser("structure", help="structure recovery pipeline")
    ssub = p.add_subparsers(dest="structure_command")
    pr = ssub.add_parser("recover", help="recover a covering progression")
    pr.add_argument("--format", choices=["json", "lines"], default="json")
    pr.add_argument("--set", dest="set_path", required=True)
    pr.add_argument("--t", type=int, required=True)
    pr.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("pk", help="normalized missing-sum tail table")
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--exact-budget", type=int, default=randomsum.EXACT_ENUM_BUDGET)
    p.add_argument("--count-forced-miss", choices=["true", "false"], default="true")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", dest="as_json")
    fmt.add_argument("--csv", action="store_true", dest="as_csv")

    p = sub.add_parser("entropy", help="entropy bound checks")
    esub = p.add_subparsers(dest="entropy_command")
    pe = esub.add_parser("check", help="sandwich and tail inequalities")
    pe.add_argument("--nmax", type=int, default=500)
    pe.add_argument("--grid", type=int, default=100)

    p = sub.add_parser("verify", help="run the module property suites")
    p.add_argument("--all", action="store_true")
    p.add_argument("--suite", action="append", default=[],
                   choices=["setcore", "pollard", "apintersect", "freiman",
                            "wrap", "recover", "randomsum", "entropy"])
    p.add_argument("--pollard-pmax", type=int, default=11)
    p.add_argument("--apintersect-pmax", type=int, default=61)
    p.add_argument("--freiman-nmax", type=int, default=14)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    return top


def _cmd_sumset(args) -> int:
    A = _load_set(args.a, args.format)
    B = _load_set(args.b, args.format)
    out = setcore.sumset(A, B)
    _emit_json(out.to_json())
    return 0


def _cmd_conv(args) -> int:
    A = _load_set(args.a, args.format)
    B = _load_set(args.b, args.format)
    table = setcore.convolution(A, B)
    payload = table.to_json()
    if args.t is not None:
        payload["truncated"] = table.truncated_mass(args.t)
    _emit_json(payload)
    return 0


def _cmd_popdouble(args) -> int:
    S = _load_set(args.set_path, args.format)
    rep = setcore.doubling_report(S, args.t)
    _emit_json(
        {"N": rep.N, "t": rep.t, "truncated": rep.truncated,
         "delta": str(rep.delta), "delta_float": rep.delta_float}
    )
    return 0


def _cmd_pollard(args) -> int:
    A = _load_set(args.a, args.format)
    B = _load_set(args.b, args.format)
    if args.p is not None:
        A = A if isinstance(A, setcore.CycSet) else setcore.CycSet.of(args.p, A)
        B = B if isinstance(B, setcore.CycSet) else setcore.CycSet.of(args.p, B)
    chk = bounds.pollard_check(A, B, args.t)
    _emit_json(chk.to_json())
    return 0


def _cmd_freiman(args) -> int:
    S = _load_set(args.set_path, args.format)
    cover = bounds.freiman_3k3_check(S)
    _emit_json({"check": cover.check.to_json(), "progression": cover.progression.to_json()})
    return 0


def _cmd_ap_intersect(args) -> int:
    P = _parse_ap(args.p_ap, args.p)
    Q = _parse_ap(args.q_ap, args.p)
    result = bounds.ap_intersect(P, Q)
    _emit_json(result.to_json())
    return 0


def _cmd_wrap(args) -> int:
    S = _load_set(args.set_path, args.format)
    wr = structure.wrap(S, args.t)
    _emit_json(
        {"n": wr.n, "x": wr.x, "wrapped": wr.wrapped.to_json(),
         "truncated_sum_t": wr.truncated_sum_t,
         "witnesses": {"a": wr.witness_a, "c": wr.witness_c},
         "delta": str(wr.delta)}
    )
    return 0


def _cmd_subgroup(args) -> int:
    A = _load_set(args.a, args.format)
    B = _load_set(args.b, args.format) if args.b else A
    res = structure.find_subgroup(A, B, args.t, args.eta)
    _emit_json(
        {"H": res.H.to_json(), "cosetA": res.coset_a, "cosetB": res.coset_b,
         "outsideA": res.outside_a, "outsideB": res.outside_b}
    )
    return 0


def _cmd_recover(args) -> int:
    S = _load_set(args.set_path, args.format)
    cover = structure.recover_progression(S, args.t)
    payload = {
        "start": cover.progression.start,
        "step": cover.progression.step,
        "length": cover.progression.length,
        "exceptional": list(cover.exceptional),
        "delta": str(cover.delta),
        "bounds": {"lenBound": str(cover.length_bound()), "excBound": str(cover.exceptional_bound())},
    }
    if args.as_json:
        _emit_json(payload)
    else:
        print(
            f"progression start={payload['start']} step={payload['step']} "
            f"length={payload['length']} (bound {payload['bounds']['lenBound']})"
        )
        print(
            f"exceptional ({len(cover.exceptional)} <= {payload['bounds']['excBound']}): "
            f"{payload['exceptional']}"
        )
        print(f"delta = {payload['delta']}")
    return 0


_PK_COLUMNS = ["k", "method", "point", "lower", "upper", "stderr", "p_k", "p_k_sigma"]


def _cmd_pk(args) -> int:
    table = randomsum.pk_table(
        args.kmax,
        args.samples,
        args.seed,
        exact_budget=args.exact_budget,
        count_forced_miss=args.count_forced_miss == "true",
        threads=args.threads,
    )
    if args.as_json:
        _emit_json(
            {
                "rows": [
                    {"k": r.k, "method": r.method, "point": r.point, "lower": r.lower,
                     "upper": r.upper, "stderr": r.stderr, "p_k": r.p_value,
                     "p_k_sigma": r.p_sigma}
                    for r in table.rows
                ],
                "parityEven": list(table.parity_even),
                "parityOdd": list(table.parity_odd),
                "parityFlags": [list(f) for f in table.parity_flags],
            }
        )
        return 0
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_PK_COLUMNS)
    for r in table.rows:
        writer.writerow(
            [r.k, r.method, _fmt_float(r.point), _fmt_float(r.lower), _fmt_float(r.upper),
             "" if r.stderr is None else _fmt_float(r.stderr),
             _fmt_float(r.p_value), "" if r.p_sigma is None else _fmt_float(r.p_sigma)]
        )
    sys.stdout.write(buf.getvalue())
    return 0


def _cmd_entropy_check(args) -> int:
    report = entropy.entropy_sweep(args.nmax, args.grid)
    _emit_json({"instances": report.instances, "violations": [repr(v) for v in report.violations]})
    return 0 if report.ok else 2


def _verify_records(args) -> list[dict]:
    suites = set(args.suite)
    if args.all or not suites:
        suites = {"setcore", "pollard", "apintersect", "freiman",
                  "wrap", "recover", "randomsum", "entropy"}
    records: list[dict] = []

    def record(name: str, instances: int, violations: int, detail=None):
        rec = {"name": name, "lhs": violations, "rhs": 0, "relation": "==",
               "holds": violations == 0, "witness": {"instances": instances}}
        if detail:
            rec["witness"].update(detail)
        records.append(rec)

    if "setcore" in suites:
        record("integer-pollard-bound", 2**12, len(setcore.integer_pollard_violations(12)))
        record("equality-iff-progression-below-top-threshold", 2**12,
               len(setcore.equality_misclassifications(12, include_top_threshold=False)))
        record("top-threshold-equality-iff-symmetric", 2**12,
               len(setcore.symmetric_equality_misclassifications(12)))
        record("scalar-popularity-inequality", 20000,
               len(setcore.scalar_inequality_violations(20000, args.seed)))
        record("intersection-triangle-inequality", 2000,
               len(setcore.triangle_inequality_violations(2000, args.seed)))
        record("truncation-monotonicity", 2000,
               len(setcore.truncation_monotonicity_violations(2000, args.seed)))
    if "pollard" in suites:
        for p in (5, 7, 11):
            if p > args.pollard_pmax:
                continue
            rep = bounds.pollard_exhaustive(p)
            record(rep.name, rep.instances, len(rep.violations))
        rep = bounds.pollard_random(31, 2000, args.seed)
        record(rep.name, rep.instances, len(rep.violations))
    if "apintersect" in suites:
        rep = bounds.ap_intersection_exhaustive(args.apintersect_pmax)
        record(rep.name, rep.instances, len(rep.violations))
    if "freiman" in suites:
        rep = bounds.freiman_exhaustive(args.freiman_nmax)
        record(rep.name, rep.instances, len(rep.violations))
    if "wrap" in suites:
        rep = structure.wrap_contract_exhaustive(10)
        record(rep.name, rep.instances, len(rep.violations))
        rep = structure.wrap_contract_random(200, 300, args.seed)
        record(rep.name, rep.instances, len(rep.violations))
    if "recover" in suites:
        rep = structure.recovery_contract_random(25, args.seed)
        record(rep.name, rep.instances, len(rep.violations))
    if "randomsum" in suites:
        record("bracket-nesting", 9, len(randomsum.bracket_nesting_violations(14, 8)))
        record("shift-identity-exact", 9, len(randomsum.shift_identity_exact_violations(16, 10)))
        record("shift-identity-window", 9, len(randomsum.shift_identity_same_m_violations(16, 10)))
        counts = randomsum.mc_histogram(args.samples, 200, args.seed, threads=args.threads)
        record("parity-monotonicity", 9, len(randomsum.parity_monotonicity_flags(counts, 4, 12)))
        record("cross-parity-band", 6, len(randomsum.cross_parity_ratio_flags(counts, 6, 12)))
        record("gap-decay-beyond-small-k", 11, len(randomsum.decay_flags(counts, 13, 19)))
    if "entropy" in suites:
        rep = entropy.entropy_sweep(200, 100)
        record(rep.name, rep.instances, len(rep.violations))
    return records


def _cmd_verify(args) -> int:
    records = _verify_records(args)
    _emit_json(records)
    checks = len(records)
    violations = sum(0 if r["holds"] else 1 for r in records)
    print(f"summary: {checks} suites, {violations} violations")
    return 0 if violations == 0 else 2


_HANDLERS = {
    "sumset": _cmd_sumset,
    "conv": _cmd_conv,
    "popdouble": _cmd_popdouble,
    "pollard": _cmd_pollard,
    "freiman": _cmd_freiman,
    "ap-intersect": _cmd_ap_intersect,
    "wrap": _cmd_wrap,
    "subgroup": _cmd_subgroup,
    "pk": _cmd_pk,
    "verify": _cmd_verify,
}


def run(args) -> int:
    if args.command == "structure":
        if getattr(args, "structure_command", None) != "recover":
            raise _CliError("usage: sumsetlab structure recover ...")
        return _cmd_recover(args)
    if args.command == "entropy":
        if getattr(args, "entropy_command", None) != "check":
            raise _CliError("usage: sumsetlab entropy check ...")
        return _cmd_entropy_check(args)
    handler = _HANDLERS.get(args.command)
    if handler is None:
        raise _CliError("missing subcommand (see --help)")
    return handler(args)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return run(args)
    except HypothesisNotMet as exc:
        print(f"hypothesis not met [{exc.reason}]: {exc}", file=sys.stderr)
        if exc.payload is not None:
            _emit_json(exc.payload, stream=sys.stderr)
        return 1
    except ContractViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except _CliError as exc:
        print(f"argument error: {exc}", file=sys.stderr)
        return 3
    except (OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
