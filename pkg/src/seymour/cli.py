"""Command-line front end: ``seymour <subcommand> [flags]``.

Exit status is 0 on success, 2 for invalid flags and 1 for runtime failures.
"""

from __future__ import annotations

import argparse
import logging
import secrets
import sys
from fractions import Fraction

from . import analytics, experiments
from .experiments import DEFAULT_SEED, WORKERS_ENV, ExperimentConfig
from .graph import Digraph, eccentricity_at_most_2, neighborhood_profiles
from .models import ModelParams, generate, parse_probability

log = logging.getLogger("seymour")

MC_SCHEMA = f"""\
CSV columns (fixed order): {', '.join(experiments.CSV_COLUMNS)}.
JSON adds mean_ratio_min, frac_fast_path and histogram (|S| -> count)."""


class UsageError(Exception):
    pass


class InputError(RuntimeError):
    """The input data could not be used; reported as a runtime failure."""


def _seed(text: str) -> int:
    if text == "random":
        seed = secrets.randbits(64)
        print(f"seymour: using seed {seed}", file=sys.stderr)
        return seed
    try:
        seed = int(text, 0)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer or 'random', got {text!r}") from None
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return seed


def _prob(text: str):
    try:
        return parse_probability(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seymour", description="Count Seymour vertices (|N2| >= |N1|) in random tournaments and digraphs."
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, metavar="subcommand")

    def common(p, fmt_default):
        p.add_argument("--output", "-o", default="-", help="output path ('-' for stdout)")
        p.add_argument("--format", choices=("csv", "json"), default=fmt_default, help=f"default {fmt_default}")

    def seeded(p):
        p.add_argument("--seed", type=_seed, default=DEFAULT_SEED,
                       help=f"master seed (default {DEFAULT_SEED}); 'random' draws one from OS entropy")

    def model(p):
        p.add_argument("--model", choices=("tournament", "digraph"), default="tournament")
        p.add_argument("--p", type=_prob, help="arc probability per direction, e.g. 0.3 or 3/10 (digraph only)")

    def workers(p):
        p.add_argument("--workers", type=_positive_int,
                       help=f"worker processes (default: ${WORKERS_ENV} or the CPU count)")

    g = sub.add_parser("gen", help="generate one random graph in the text fixture format",
                       description="Write a graph as: a line with n, then n rows of 0/1 (row u, column v = arc u->v).")
    model(g)
    g.add_argument("--n", type=_positive_int, required=True)
    seeded(g)
    g.add_argument("--trial", type=int, default=0, help="trial index selecting the stream (default 0)")
    g.add_argument("--output", "-o", default="-")
    g.add_argument("--format", choices=("text", "csv", "json"), default="text",
                   help="text: the fixture format; csv: one 'u,v' row per arc; json: {n, arcs}")

    c = sub.add_parser("count", help="count Seymour vertices of a graph file",
                       description="Read a graph in the text fixture format and report |S| with per-vertex "
                                   "profiles.  Text output: '|S|=k' then 'vertex n1 n2 indeg outdeg seymour' rows. "
                                   "CSV: the same rows with a header.  JSON: {n, seymour_count, seymour_set, "
                                   "diameter_at_most_2, profiles}.")
    c.add_argument("--input", "-i", default="-", help="graph file ('-' for stdin)")
    c.add_argument("--output", "-o", default="-")
    c.add_argument("--format", choices=("text", "csv", "json"), default="text")

    b = sub.add_parser("bounds", help="closed-form bounds for given n (and p)",
                       description="Tournament: the expectation sandwich, variance asymptote and exact "
                                   "degree-criterion moments.  Digraph: the p window and the expectation lower "
                                   "bound at --p when given.")
    model(b)
    b.add_argument("--n", type=_positive_int, required=True)
    b.add_argument("--epsilon", type=float, default=0.1, help="slack in p_min (default 0.1)")
    b.add_argument("--eta", type=float, default=0.1, help="slack in eps_n (default 0.1)")
    b.add_argument("--strict", action="store_true", help="also use Bin(n-1, p) in the digraph lower bound")
    common(b, "json")

    m = sub.add_parser("mc", help="Monte Carlo estimate of |S| statistics",
                       description="Run independent trials and summarise |S|.\n" + MC_SCHEMA,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    model(m)
    m.add_argument("--n", type=_positive_int, nargs="+", required=True, help="one or more sizes (one row each)")
    m.add_argument("--trials", type=_positive_int, default=1000)
    seeded(m)
    m.add_argument("--A", type=float, help="frac_deviating threshold A*sqrt(n ln n)")
    m.add_argument("--deviation-epsilon", type=float, help="frac_deviating threshold n^(1/2+eps), if no --A")
    m.add_argument("--force-bfs", action="store_true", help="skip the degree-criterion fast path")
    workers(m)
    common(m, "csv")

    e = sub.add_parser("exhaustive", help="exact |S| distribution by full enumeration",
                       description="Enumerate every labelled tournament (n <= 7) or digraph without 2-cycles "
                                   "(n <= 5).  JSON: kind, n, total_graphs, exact_e_s, exact_var_s (as "
                                   "fractions and floats), min_s, histogram.  CSV: n,s,count rows.")
    e.add_argument("--model", choices=("tournament", "digraph"), default="tournament")
    e.add_argument("--n", type=_positive_int, required=True)
    e.add_argument("--allow-large", action="store_true", help="lift the size guard")
    common(e, "json")

    d = sub.add_parser("deviation", help="deviation fractions around the sample mean",
                       description="Columns: " + ", ".join(experiments.DEVIATION_COLUMNS) + ".")
    model(d)
    d.add_argument("--n", type=_positive_int, nargs="+", required=True)
    d.add_argument("--trials", type=_positive_int, default=1000, help="at least 1000")
    seeded(d)
    d.add_argument("--A", type=float, help="threshold A*sqrt(n ln n)")
    d.add_argument("--epsilon", type=float, help="threshold n^(1/2+eps)")
    workers(d)
    common(d, "csv")

    v = sub.add_parser("evolve", help="grow tournaments one vertex at a time",
                       description="Columns: " + ", ".join(experiments.EVOLUTION_COLUMNS) + ".")
    v.add_argument("--n-start", type=_positive_int, required=True)
    v.add_argument("--n-end", type=_positive_int, required=True)
    v.add_argument("--trials", type=_positive_int, default=100)
    seeded(v)
    common(v, "csv")
    return parser


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _check_model(args):
    if args.model == "digraph" and args.p is None:
        raise UsageError("--model digraph requires --p")
    if args.model == "tournament" and args.p is not None:
        raise UsageError("--p applies only to --model digraph")


def cmd_gen(args) -> str:
    _check_model(args)
    g = generate(ModelParams(args.n, args.p, args.seed), args.trial)
    if args.format == "text":
        return g.to_text()
    arcs = [[int(u), int(v)] for u, v in zip(*g.to_matrix().nonzero())]
    if args.format == "json":
        return experiments.to_json({"n": g.n, "arcs": arcs})
    return "u,v\n" + "".join(f"{u},{v}\n" for u, v in arcs)


def cmd_count(args) -> str:
    try:
        g = Digraph.from_text(_read(args.input))
    except (OSError, ValueError) as exc:
        raise InputError(f"cannot read graph from {args.input!r}: {exc}") from exc
    profiles = neighborhood_profiles(g)
    s = [pr.vertex for pr in profiles if pr.is_seymour]
    if args.format == "json":
        return experiments.to_json({
            "n": g.n,
            "seymour_count": len(s),
            "seymour_set": s,
            "diameter_at_most_2": eccentricity_at_most_2(g),
            "profiles": [pr.__dict__ for pr in profiles],
        })
    header = "vertex,n1,n2,indeg,outdeg,seymour" if args.format == "csv" else "vertex n1 n2 indeg outdeg seymour"
    sep = "," if args.format == "csv" else " "
    lines = [] if args.format == "csv" else [f"|S|={len(s)}"]
    lines.append(header)
    for pr in profiles:
        lines.append(sep.join(map(str, (pr.vertex, pr.n1, pr.n2, pr.indeg, pr.outdeg, int(pr.is_seymour)))))
    return "\n".join(lines) + "\n"


def cmd_bounds(args) -> str:
    _check_model(args)
    if args.model == "tournament":
        rep = analytics.tournament_expectation_bounds(args.n)
        mean, var = analytics.degree_criterion_moments(args.n)
        out = rep.to_dict()
        out["degree_criterion_mean"] = float(mean)
        out["degree_criterion_var"] = float(var)
        out["model"] = "tournament"
    else:
        if args.n < 2:
            raise UsageError("--model digraph needs --n >= 2")
        win = analytics.digraph_window(args.n, args.epsilon, args.eta)
        out = win.to_dict()
        out["model"] = "digraph"
        if args.p is not None:
            if not 0 < args.p < Fraction(1, 2):
                raise UsageError("--p must lie in (0, 1/2) for the lower bound")
            out["p"] = str(args.p)
            out["e_s_lower"] = win.e_s_lower_at(args.p)
            if args.strict:
                out["e_s_lower_strict"] = win.e_s_lower_at(args.p, strict=True)
    if args.format == "json":
        return experiments.to_json({k: (None if isinstance(v, float) and v != v else v) for k, v in out.items()})
    keys = list(out)
    return ",".join(keys) + "\n" + ",".join(repr(out[k]) if isinstance(out[k], float) else str(out[k]) for k in keys) + "\n"


def cmd_mc(args) -> str:
    _check_model(args)
    stats = []
    for n in args.n:
        cfg = ExperimentConfig(args.model, n, args.p, args.trials, args.seed, args.deviation_epsilon, args.A,
                               args.workers, args.force_bfs)
        stats.append(experiments.run_trials(cfg))
        log.info("n=%d mean_s=%.4f var_s=%.4f", n, stats[-1].mean_s, stats[-1].var_s)
    if args.format == "json":
        return experiments.to_json([st.to_dict() for st in stats])
    return experiments.stats_csv(stats)


def cmd_exhaustive(args) -> str:
    fn = experiments.exhaustive_tournaments if args.model == "tournament" else experiments.exhaustive_digraphs
    summary = fn(args.n, allow_large=args.allow_large)
    if args.format == "json":
        return experiments.to_json(summary.to_dict())
    rows = ["n,s,count"] + [f"{summary.n},{k},{c}" for k, c in summary.histogram.items()]
    return "\n".join(rows) + "\n"


def cmd_deviation(args) -> str:
    _check_model(args)
    if args.A is None and args.epsilon is None:
        raise UsageError("deviation needs --A and/or --epsilon")
    if args.trials < 1000:
        raise UsageError("deviation needs --trials >= 1000")
    cfg = ExperimentConfig(args.model, tuple(args.n), args.p, args.trials, args.seed, args.epsilon, args.A,
                           args.workers)
    rows = experiments.deviation_experiment(cfg)
    if args.format == "json":
        return experiments.to_json(experiments.deviation_dicts(rows))
    return experiments.deviation_csv(rows)


def cmd_evolve(args) -> str:
    if args.n_start >= args.n_end:
        raise UsageError("--n-start must be below --n-end")
    trace = experiments.evolve_experiment(args.n_start, args.n_end, args.trials, args.seed)
    if args.format == "json":
        return experiments.to_json(experiments.evolution_dict(trace))
    return experiments.evolution_csv(trace)


COMMANDS = {
    "gen": cmd_gen,
    "count": cmd_count,
    "bounds": cmd_bounds,
    "mc": cmd_mc,
    "exhaustive": cmd_exhaustive,
    "deviation": cmd_deviation,
    "evolve": cmd_evolve,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        text = COMMANDS[args.command](args)
        _write(args.output, text)
    except (UsageError, ValueError) as exc:
        # ValueError here means a flag combination the library rejected
        parser.print_usage(sys.stderr)
        print(f"seymour {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        print(f"seymour {args.command}: failed: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
