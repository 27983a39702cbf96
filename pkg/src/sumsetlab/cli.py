"""Command-line front end: ``sumsetlab {dist,formula,check,scan,tail}``.

Exit status is 0 on success, 1 when a ``check`` fails, 2 on bad usage and
3 when the library refuses a request (enumeration guard, bad interval, ...).
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from fractions import Fraction

from . import closed_forms as cf
from . import identities as ident
from .bitset import IntervalSpec, Kind, Preset
from .errors import SumsetLabError
from .exact import DistQuery, Ensemble, exact_pmf
from .montecarlo import mc_pmf
from .serialize import (
    dumps,
    envelope,
    frac,
    gap_to_json,
    pmf_to_csv,
    pmf_to_json,
    tail_to_json,
)

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_ERROR = 0, 1, 2, 3

CONVOLUTION_RULES = [r.value for r in ident.ConvolutionRule]
OTHER_RULES = ["lemma3", "lemma5", "halfline", "tail-forms", "tail-exceptions", "section5"]
FORMULAS = ["eq1", "eq1-oracle", "cond", "cond-via-t", "joint-oracle", "t-closed", "t-recursive", "fib"]
TAIL_EXCEPTIONS = frozenset({1, 2, 3, 5, 9})


class UsageError(Exception):
    pass


def parse_interval(text: str):
    try:
        return Preset(text.lower())
    except ValueError:
        pass
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError
        return IntervalSpec(int(lo), int(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"interval must be a preset ({', '.join(p.value for p in Preset)}) or LO:HI, got {text!r}"
        ) from None


def parse_range(text: str) -> list[int]:
    parts = text.split(":")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        nums = []
    if len(nums) not in (2, 3):
        raise argparse.ArgumentTypeError(f"range must be A:B or A:B:STEP, got {text!r}")
    step = nums[2] if len(nums) == 3 else 1
    return list(range(nums[0], nums[1] + 1, step))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sumsetlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt=("json",)):
        p.add_argument("--workers", type=int, default=1)
        p.add_argument("--format", choices=fmt, default=fmt[0])
        p.add_argument("--out", help="write here instead of stdout")

    def query_args(p):
        p.add_argument("--ensemble", choices=[e.value for e in Ensemble], required=True)
        p.add_argument("--kind", choices=[k.value for k in Kind], required=True)
        p.add_argument("--interval", type=parse_interval, required=True)
        p.add_argument("--n", type=int, required=True)

    def method_args(p):
        p.add_argument("--method", choices=["exact", "mc"], default="exact")
        p.add_argument("--samples", type=int, default=10**6)
        p.add_argument("--seed", type=int)

    p = sub.add_parser("dist", help="distribution of the missing count")
    query_args(p)
    method_args(p)
    common(p, ("json", "csv"))

    p = sub.add_parser("formula", help="evaluate a closed form or its oracle")
    p.add_argument("--which", choices=FORMULAS, required=True)
    p.add_argument("--k", type=int, required=True)
    common(p)

    p = sub.add_parser("check", help="verify an identity; nonzero exit on failure")
    p.add_argument("--rule", choices=CONVOLUTION_RULES + OTHER_RULES, required=True)
    p.add_argument("--n", type=int)
    p.add_argument("--n-range", type=parse_range)
    p.add_argument("--variant", choices=[v.value for v in ident.HalflineVariant], default="lemma9")
    p.add_argument("--diff-interval", choices=["full", "half"], default="full")
    method_args(p)
    common(p)

    p = sub.add_parser("scan", help="tail monotonicity scan across n")
    p.add_argument("--target", choices=list(ident.SCAN_TARGETS) + ["conj10"], required=True)
    p.add_argument("--n-range", type=parse_range, required=True)
    common(p, ("json", "csv"))

    p = sub.add_parser("tail", help="mode and post-mode increases of one distribution")
    query_args(p)
    p.add_argument("--closed-forms", action="store_true", help="also evaluate the p_n(n-2..n-5) formulas")
    common(p)
    return parser


def _inputs(args) -> dict:
    out = {}
    for key, value in vars(args).items():
        if key in ("command", "out", "format"):
            continue
        if isinstance(value, Preset):
            value = value.value
        elif isinstance(value, IntervalSpec):
            value = f"{value.lo}:{value.hi}"
        out[key] = value
    out["format"] = args.format
    return out


def _query(args) -> DistQuery:
    return DistQuery(Ensemble(args.ensemble), Kind(args.kind), args.interval, args.n)


def _need_seed(args):
    if args.method == "mc" and args.seed is None:
        raise UsageError("--seed is required with --method mc")


def cmd_dist(args):
    _need_seed(args)
    q = _query(args)
    if args.method == "exact":
        pmf = exact_pmf(q, workers=args.workers)
    else:
        pmf = mc_pmf(q, args.samples, args.seed, workers=args.workers)
    inputs = _inputs(args)
    inputs.update(q.describe())
    if args.format == "csv":
        header = ["sumsetlab schema_version=1 command=dist"] + [f"{k}={v}" for k, v in inputs.items()]
        return pmf_to_csv(pmf, header), EXIT_OK
    return dumps(envelope("dist", inputs, pmf_to_json(pmf))), EXIT_OK


def cmd_formula(args):
    k, which = args.k, args.which
    extra = {}
    if which == "fib":
        value = Fraction(cf.fibonacci(k))
    elif which == "eq1":
        value = cf.prob_sum_infinite(k)
    elif which == "eq1-oracle":
        value = cf.prob_sum_oracle(k)
    elif which == "cond":
        value = cf.cond_prob_closed(k)
    elif which == "cond-via-t":
        value = cf.cond_prob_from_t(k)
    elif which == "joint-oracle":
        value = cf.joint_event_prob_oracle(k)
    elif which == "t-closed":
        value = cf.t_closed(k)
    else:
        seq = cf.t_recursive(k)
        value = seq.final
        extra["p_table"] = [frac(x) for x in seq.p]
    results = {"k": k, "value_num": value.numerator, "value_den": value.denominator, "value": float(value)}
    results.update(extra)
    return dumps(envelope("formula", _inputs(args), results)), EXIT_OK


def _n_values(args) -> list[int]:
    if args.n_range:
        return args.n_range
    if args.n is None:
        raise UsageError("--n or --n-range is required")
    return [args.n]


def _check_rows(args):
    """Return (results payload, passed).

    Over an n-range, gap rules pass when the gap shrinks strictly with n and
    the largest n is under the frozen tolerance.
    """
    rule = args.rule
    ns = [] if rule == "section5" else _n_values(args)
    kw = dict(method=args.method, samples=args.samples, seed=args.seed or 0, workers=args.workers)

    if rule in CONVOLUTION_RULES:
        diff = Preset.DIFF_FULL if args.diff_interval == "full" else Preset.DIFF_HALF
        reps = [ident.convolution_check(ident.ConvolutionRule(rule), n, diff_interval=diff, **kw) for n in ns]
        trend = all(b.tv_gap < a.tv_gap for a, b in zip(reps, reps[1:]))
        return {"reports": [gap_to_json(r) for r in reps], "tv_gap": reps[-1].tv_gap,
                "decreasing": trend}, trend and reps[-1].passed

    if rule == "halfline":
        variant = ident.HalflineVariant(args.variant)
        reps = [ident.halfline_check(n, variant, **kw) for n in ns]
        trend = all(b.tv_gap < a.tv_gap for a, b in zip(reps, reps[1:]))
        ok = reps[-1].passed and (trend or variant is ident.HalflineVariant.FIG7)
        return {"reports": [gap_to_json(r) for r in reps], "tv_gap": reps[-1].tv_gap, "decreasing": trend}, ok

    if rule == "lemma3":
        rows = []
        for n in ns:
            p, bound = ident.middle_mass(n, **kw)
            rows.append({"n": n, "probability": float(p), "bound": float(bound),
                         "probability_exact": frac(p) if isinstance(p, Fraction) else None,
                         "within_bound": p <= min(1, bound)})
        trend = all(b["probability"] < a["probability"] for a, b in zip(rows, rows[1:]))
        return {"rows": rows, "decreasing": trend}, trend and all(r["within_bound"] for r in rows)

    if rule == "lemma5":
        rows = [{"n": n, "gap": frac(ident.independence_gap(n, workers=args.workers))} for n in ns]
        return {"rows": rows}, all(r["gap"]["num"] == 0 for r in rows)

    if rule == "tail-forms":
        rows = []
        for n in ns:
            pmf = ident.diff_tail_pmf(n, workers=args.workers)
            forms = ident.tail_closed_forms(n).values
            rows.append({"n": n, "equal": all(pmf.prob(m) == v for m, v in forms.items()),
                         "values": {str(m): frac(v) for m, v in forms.items()}})
        return {"rows": rows}, all(r["equal"] for r in rows)

    if rule == "tail-exceptions":
        rows, ok = [], True
        for n in ns:
            rep = ident.tail_report(ident.diff_tail_pmf(n, workers=args.workers))
            expected = n in TAIL_EXCEPTIONS
            ok &= rep.is_nonincreasing_after_mode == expected
            rows.append({"n": n, **tail_to_json(rep), "expected_exception": expected})
        return {"rows": rows}, ok

    # section5
    a = ident.section5_sum_experiment(workers=args.workers)
    b = ident.section5_sum_experiment(workers=max(2, args.workers))
    top = a.max_m()
    return {"sum_experiment": pmf_to_json(a), "diff_experiment": pmf_to_json(ident.section5_diff_experiment()),
            "max_missing": top, "max_count": a.count(top)}, a == b and a.count(top) == 1


def cmd_check(args):
    if args.method == "mc":
        _need_seed(args)
    results, passed = _check_rows(args)
    results["passed"] = bool(passed)
    return dumps(envelope("check", _inputs(args), results)), EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_scan(args):
    rows = ident.scan(args.target, args.n_range, workers=args.workers)
    if args.format == "csv":
        buf = io.StringIO()
        buf.write(f"# sumsetlab schema_version=1 command=scan target={args.target}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n", "m_star", "witnesses", "plateaus", "agrees", "agrees_strict"])
        for r in rows:
            w.writerow([r.n, r.m_star, " ".join(map(str, r.witnesses)), " ".join(map(str, r.plateaus)),
                        int(r.agrees), int(r.agrees_strict)])
        return buf.getvalue(), EXIT_OK
    results = {"rows": [vars(r) for r in rows],
               "disagreements": [r.n for r in rows if not r.agrees]}
    return dumps(envelope("scan", _inputs(args), results)), EXIT_OK


def cmd_tail(args):
    q = _query(args)
    pmf = exact_pmf(q, workers=args.workers)
    results = {"report": tail_to_json(ident.tail_report(pmf)), "pmf": pmf_to_json(pmf)}
    if args.closed_forms:
        forms = ident.tail_closed_forms(args.n).values
        results["closed_forms"] = {str(m): frac(v) for m, v in forms.items()}
    inputs = _inputs(args)
    inputs.update(q.describe())
    return dumps(envelope("tail", inputs, results)), EXIT_OK


COMMANDS = {"dist": cmd_dist, "formula": cmd_formula, "check": cmd_check, "scan": cmd_scan, "tail": cmd_tail}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        text, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"sumsetlab: usage error: {exc}", file=stderr)
        return EXIT_USAGE
    except (SumsetLabError, ValueError) as exc:
        print(f"sumsetlab: error: {exc}", file=stderr)
        return EXIT_ERROR
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
