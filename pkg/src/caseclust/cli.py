"""Command-line interface: ``caseclust <command> ...``.

Exit status is 0 on success, 1 for data or runtime errors and 2 for
usage errors.
"""

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict
from fractions import Fraction

from . import __version__
from .bench import bench_scaling
from .core import (
    ORACLE_LIMIT,
    ClusterParams,
    cluster_oracle,
    cluster_quadratic,
    cluster_stats,
    cluster_windowed,
)
from .exceptions import CaseClusterError, SpecError
from .ingest import (
    GeneratorSpec,
    generate_cases,
    generate_trace,
    parse_cases,
    parse_trace,
    serialize_trace,
)
from .layout import LoweringPlan, build_plan
from .predictor import COMPARE_COLUMNS, Penalties, compare_plans, parse_model, simulate

DEFAULT_DENSITY = Fraction(2, 5)
DEFAULT_MAX = 64
DEFAULT_MODEL = "capacity_k:64"
DEFAULT_WIDTH = 4


def _density(text):
    try:
        d = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a fraction or decimal: {text!r}") from None
    if not 0 < d <= 1:
        raise argparse.ArgumentTypeError(f"density must satisfy 0 < D <= 1, got {d}")
    return d


def _positive(text):
    try:
        v = int(float(text)) if "e" in text.lower() else int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {v}")
    return v


def _list_of(conv):
    def parse(text):
        return [conv(t) for t in text.split(",") if t.strip()]

    return parse


def _range(text):
    try:
        lo, hi = (int(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"range must look like LO:HI, got {text!r}") from None
    return lo, hi


def _penalties(text):
    try:
        a, b, c = (float(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"penalties must be INDIRECT,COND,COMPARE, got {text!r}"
        ) from None
    return Penalties(a, b, c)


def _model(text):
    try:
        parse_model(text)
    except SpecError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _read(path):
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _params(args):
    return ClusterParams(args.density, args.max, args.strict_density, args.paper_literal_range)


def _params_dict(params):
    return {
        "density": str(params.density_min),
        "max_entries": params.max_entries,
        "strict_density": params.strict_density,
        "paper_literal_range": params.paper_literal_range,
    }


def _header(params, **extra):
    parts = [f"density={params.density_min}", f"max={params.max_entries}"]
    if params.strict_density:
        parts.append("strict-density")
    if params.paper_literal_range:
        parts.append("paper-literal-range")
    parts += [f"{k}={v}" for k, v in extra.items()]
    return "# " + " ".join(parts)


def _partition_doc(parsed, params, part, algorithm):
    cases = parsed.cases
    return {
        "schema": "caseclust.partition/1",
        "algorithm": algorithm,
        "params": _params_dict(params),
        "n": cases.n,
        "duplicates_dropped": parsed.duplicates_dropped,
        "cluster_count": part.cluster_count,
        "ranges": [[lo, hi] for lo, hi in part.ranges],
        "clusters": [
            dict(s.to_dict(), low=cases[s.lo], high=cases[s.hi])
            for s in cluster_stats(cases, part)
        ],
    }


def _print_partition(doc, params, out):
    print(_header(params, algorithm=doc["algorithm"]), file=out)
    print(f"n={doc['n']} duplicates_dropped={doc['duplicates_dropped']}", file=out)
    for c in doc["clusters"]:
        print(
            f"[{c['lo']}, {c['hi']}] values {c['low']}..{c['high']} "
            f"count={c['count']} span={c['span']} density={c['density']} {c['kind']}",
            file=out,
        )
    print(f"cluster_count={doc['cluster_count']}", file=out)


def cmd_cluster(args, out):
    parsed = parse_cases(_read(args.input))
    params = _params(args)
    fn = cluster_windowed if args.algo == "windowed" else cluster_quadratic
    part = fn(parsed.cases, params)
    doc = _partition_doc(parsed, params, part, args.algo)
    if args.json:
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        _print_partition(doc, params, out)


def cmd_oracle(args, out):
    parsed = parse_cases(_read(args.input))
    params = _params(args)
    res = cluster_oracle(parsed.cases, params)
    doc = _partition_doc(parsed, params, res.partition, "oracle")
    if args.json:
        json.dump(doc, out, indent=2)
        out.write("\n")
    else:
        _print_partition(doc, params, out)


def cmd_gen(args, out):
    if args.what == "cases":
        spec = GeneratorSpec(
            args.kind, args.n, args.range, args.group_count, args.group_span, args.seed
        )
        values = generate_cases(spec).tolist()
        if args.format == "json":
            out.write(json.dumps({"cases": values}) + "\n")
        elif args.format == "lines":
            out.write("".join(f"{v}\n" for v in values))
        else:
            out.write(" ".join(str(v) for v in values) + "\n")
        return
    cases = parse_cases(_read(args.input)).cases
    trace = generate_trace(cases, args.dist, args.length, args.seed)
    out.write(serialize_trace(trace, "json" if args.format == "json" else "lines"))
    if args.format == "json":
        out.write("\n")


def _traces(args, cases):
    if args.trace:
        return [parse_trace(_read(args.trace))]
    return [generate_trace(cases, args.trace_dist, args.trace_length, args.seed)]


def cmd_simulate(args, out):
    model = parse_model(args.model, args.cond_model)
    if args.plan:
        try:
            plan = LoweringPlan.from_dict(json.loads(_read(args.plan)))
        except json.JSONDecodeError as exc:
            raise CaseClusterError(f"plan is not valid JSON: {exc}") from exc
        header = {"plan": args.plan}
    else:
        if args.input is None:
            raise CaseClusterError("simulate needs --plan or an input case file")
        cases = parse_cases(_read(args.input)).cases
        params = _params(args)
        plan = build_plan(cases, cluster_windowed(cases, params), args.entry_width)
        header = {"params": _params_dict(params), "entry_width": args.entry_width}
    trace = parse_trace(_read(args.trace))
    report = simulate(plan, trace, model, args.penalties)
    doc = report.to_dict()
    doc["source"] = header
    doc["plan_totals"] = plan.totals()
    json.dump(doc, out, indent=2)
    out.write("\n")


def cmd_compare(args, out):
    cases = parse_cases(_read(args.input)).cases
    model = parse_model(args.model, args.cond_model)
    grid = [
        ClusterParams(d, m, args.strict_density, args.paper_literal_range)
        for d in args.densities
        for m in args.maxes
    ]
    rows = compare_plans(cases, _traces(args, cases), grid, model, args.penalties, args.entry_width)
    if args.format == "json":
        doc = {
            "schema": "caseclust.compare/1",
            "model": model.describe(),
            "penalties": asdict(args.penalties),
            "entry_width": args.entry_width,
            "rows": rows,
        }
        json.dump(doc, out, indent=2)
        out.write("\n")
        return
    p = args.penalties
    print(
        f"# model={model.describe()} penalties={p.indirect_miss},{p.cond_miss},{p.compare} "
        f"entry_width={args.entry_width}",
        file=out,
    )
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=COMPARE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    out.write(buf.getvalue())


def cmd_bench(args, out):
    params = ClusterParams(args.density, args.max)
    rows = bench_scaling(
        args.sizes, args.repeats, params, quadratic_max=args.quadratic_max, seed=args.seed
    )
    print(_header(params, repeats=args.repeats, seed=args.seed), file=out)
    print("n,algo,seconds", file=out)
    for n, algo, secs in rows:
        print(f"{n},{algo},{secs:.6f}", file=out)


def cmd_plan(args, out):
    cases = parse_cases(_read(args.input)).cases
    params = _params(args)
    plan = build_plan(cases, cluster_windowed(cases, params), args.entry_width)
    doc = plan.to_dict()
    doc["params"] = _params_dict(params)
    json.dump(doc, out, indent=2)
    out.write("\n")


def _add_cluster_flags(p):
    p.add_argument("--density", "-d", type=_density, default=DEFAULT_DENSITY,
                   help="minimum table density, e.g. 2/5 or 0.4 (default 2/5)")
    p.add_argument("--max", "-m", type=_positive, default=DEFAULT_MAX,
                   help="maximum jump-table entries (default 64)")
    p.add_argument("--strict-density", action="store_true",
                   help="require density strictly greater than D")
    p.add_argument("--paper-literal-range", action="store_true",
                   help="bound max-min by --max instead of the entry count")


def _add_sim_flags(p):
    p.add_argument("--model", type=_model, default=DEFAULT_MODEL,
                   help="capacity_k:K or last_target (default capacity_k:64)")
    p.add_argument("--cond-model", choices=("bimodal_2bit", "always_correct"),
                   default="bimodal_2bit")
    p.add_argument("--penalties", type=_penalties, default=Penalties(),
                   help="INDIRECT,COND,COMPARE weights (default 20,15,1)")
    p.add_argument("--entry-width", type=int, choices=(2, 4, 8), default=DEFAULT_WIDTH)


def build_parser():
    parser = argparse.ArgumentParser(prog="caseclust", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cluster", help="partition case values into jump tables")
    p.add_argument("input", nargs="?", default="-", help="case file, '-' for stdin")
    _add_cluster_flags(p)
    p.add_argument("--algo", choices=("windowed", "quadratic"), default="windowed")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("oracle", help=f"exhaustive minimum (n <= {ORACLE_LIMIT})")
    p.add_argument("input", nargs="?", default="-")
    _add_cluster_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("gen", help="generate case sets or traces")
    gsub = p.add_subparsers(dest="what", required=True)
    g = gsub.add_parser("cases")
    g.add_argument("--kind", choices=("dense_opcode", "sparse_uniform", "grouped"),
                   default="sparse_uniform")
    g.add_argument("--n", type=_positive, default=16)
    g.add_argument("--range", type=_range, default=(0, 1023), help="LO:HI (inclusive)")
    g.add_argument("--group-count", type=_positive, default=4)
    g.add_argument("--group-span", type=_positive, default=8)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("words", "lines", "json"), default="words")
    g.set_defaults(func=cmd_gen)
    g = gsub.add_parser("trace")
    g.add_argument("input", nargs="?", default="-", help="case file to draw selectors from")
    g.add_argument("--dist", default="uniform", help="uniform, cyclic, zipf or zipf(S)")
    g.add_argument("--length", type=_positive, default=1000)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("lines", "json"), default="lines")
    g.set_defaults(func=cmd_gen)

    p = sub.add_parser("simulate", help="replay a trace through a lowering plan")
    p.add_argument("input", nargs="?", default=None, help="case file (unless --plan)")
    p.add_argument("--plan", help="plan JSON written by 'plan'")
    p.add_argument("--trace", "-t", required=True)
    _add_cluster_flags(p)
    _add_sim_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("plan", help="emit the lowering plan as JSON")
    p.add_argument("input", nargs="?", default="-")
    _add_cluster_flags(p)
    p.add_argument("--entry-width", type=int, choices=(2, 4, 8), default=DEFAULT_WIDTH)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("compare", help="simulate a grid of D and Max settings")
    p.add_argument("input", nargs="?", default="-")
    p.add_argument("--densities", "-d", type=_list_of(_density), default=[DEFAULT_DENSITY],
                   help="comma-separated densities")
    p.add_argument("--maxes", "-m", type=_list_of(_positive), default=[DEFAULT_MAX],
                   help="comma-separated table limits")
    p.add_argument("--strict-density", action="store_true")
    p.add_argument("--paper-literal-range", action="store_true")
    p.add_argument("--trace", "-t", help="trace file; otherwise one is generated")
    p.add_argument("--trace-dist", default="uniform")
    p.add_argument("--trace-length", type=_positive, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    _add_sim_flags(p)
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("bench", help="time windowed vs quadratic clustering")
    p.add_argument("--sizes", type=_list_of(_positive), default=[10_000, 20_000, 100_000])
    p.add_argument("--repeats", type=_positive, default=3)
    p.add_argument("--density", type=_density, default=DEFAULT_DENSITY)
    p.add_argument("--max", type=_positive, default=DEFAULT_MAX)
    p.add_argument("--quadratic-max", type=_positive, default=20_000,
                   help="skip the quadratic baseline above this size")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        args.func(args, out)
    except (CaseClusterError, OSError) as exc:
        print(f"caseclust: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
