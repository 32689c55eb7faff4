"""Command-line interface.

Subcommands: gen, embed, cluster, oracle, reduce, bench, karp.
Exit codes: 0 success, 2 usage, 3 invalid input, 4 instance too large
for the requested solver.  Errors are emitted as one-line JSON on
stderr so callers can parse them.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import experiments, oracle, reduction
from .clustering import (
    solve_facility_ultrametric,
    solve_ft_kmedian_ultrametric,
    solve_sigma_lp_ultrametric,
)
from .embed import estimate_expected_max_gradient, sample_embedding, max_gradient
from .errors import INFEASIBLE_ERRORS, VALIDATION_ERRORS, TooLargeForOracle
from .metric import (
    FiniteMetric,
    from_graph,
    gen_cycle,
    gen_diamond,
    gen_path,
    gen_random,
    validate,
)
from .ultrametric import UltrametricTree

SIGMA_LP_CLI_CAP = 64  # the rounding DP is polynomial but heavy


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if isinstance(obj, float) and math.isinf(obj):
        return "inf"
    return obj


def _dump(obj, path=None):
    text = json.dumps(_jsonable(obj), sort_keys=True, indent=2) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path):
    with open(path) as fh:
        return json.load(fh)


def _load_metric(path) -> FiniteMetric:
    obj = _load_json(path)
    if "edges" in obj:
        return from_graph(obj["n"], obj["edges"], obj.get("labels"))
    return validate(np.array(obj["dist"], dtype=float), obj.get("labels"))


def _load_tree(path) -> UltrametricTree:
    return UltrametricTree.from_json(_load_json(path))


def _per_point(spec_str, labels, cast):
    """Either a constant ('2', '1.5') or a JSON file mapping label -> value.

    JSON object keys are strings; integer labels are matched through str().
    """
    try:
        const = cast(spec_str)
    except ValueError:
        raw = _load_json(spec_str)
        out = {}
        for lab in labels:
            if lab in raw:
                out[lab] = cast(raw[lab])
            elif str(lab) in raw:
                out[lab] = cast(raw[str(lab)])
            else:
                raise KeyError(f"no value for point {lab!r} in {spec_str}")
        return out
    return {lab: const for lab in labels}


def _parse_p(s):
    if s in ("inf", "infinity"):
        return math.inf
    return float(s)


def solution_json(sol) -> dict:
    out = {
        "centers": list(sol.centers),
        "value": sol.value,
        "objective": sol.objective,
        "params": dict(sol.params),
    }
    if sol.clusters is not None:
        out["clusters"] = [list(c) for c in sol.clusters]
    return out


# ---------------------------------------------------------------- commands


def cmd_gen(args):
    if args.family == "cycle":
        m = gen_cycle(args.n)
    elif args.family == "path":
        m = gen_path(args.n)
    elif args.family == "diamond":
        m = gen_diamond(args.k)
    else:
        m = gen_random(args.n, args.mode, args.seed)
    _dump(m.to_json(), args.out)
    return 0


def cmd_embed(args):
    m = _load_metric(getattr(args, "in"))
    report = estimate_expected_max_gradient(m, args.samples, args.seed)
    sample = sample_embedding(m, args.seed)
    out = {
        "tree": sample.tree.to_json(),
        "report": report.to_json(),
        "first_sample_max_gradient": max_gradient(sample).max_over_points,
    }
    _dump(out, args.out)
    return 0


def _solve_cluster(args, t: UltrametricTree):
    if args.objective == "ft_kmedian":
        profile = _per_point(args.profile, t.labels, int)
        return solve_ft_kmedian_ultrametric(t, args.k, profile)
    if args.objective == "facility":
        profile = _per_point(args.profile, t.labels, int)
        open_cost = _per_point(args.open_cost, t.labels, float)
        return solve_facility_ultrametric(t, profile, open_cost)
    if t.n > SIGMA_LP_CLI_CAP:
        raise TooLargeForOracle(
            f"sigma_lp solver capped at n <= {SIGMA_LP_CLI_CAP}"
        )
    return solve_sigma_lp_ultrametric(t, args.k, _parse_p(args.p), args.eps)


def cmd_cluster(args):
    t = _load_tree(args.ultrametric)
    _dump(solution_json(_solve_cluster(args, t)), args.out)
    return 0


def cmd_oracle(args):
    m = _load_metric(getattr(args, "in"))
    if args.objective == "ft_kmedian":
        sol = oracle.oracle_ft_kmedian(m, args.k, _per_point(args.profile, m.labels, int))
    elif args.objective == "facility":
        sol = oracle.oracle_facility(
            m, _per_point(args.profile, m.labels, int),
            _per_point(args.open_cost, m.labels, float),
        )
    else:
        sol = oracle.oracle_sigma_lp(m, args.k, _parse_p(args.p))
    _dump(solution_json(sol), args.out)
    return 0


def _build_problem(args, labels):
    if args.objective == "ft_kmedian":
        return reduction.ft_kmedian_problem(args.k, _per_point(args.profile, labels, int))
    if args.objective == "facility":
        return reduction.facility_problem(
            _per_point(args.profile, labels, int),
            _per_point(args.open_cost, labels, float),
        )
    return reduction.sigma_lp_problem(args.k, _parse_p(args.p), args.eps)


def cmd_reduce(args):
    m = _load_metric(getattr(args, "in"))
    problem = _build_problem(args, m.labels)
    sol = reduction.reduce_and_solve(m, problem, args.samples, args.seed)
    _dump(solution_json(sol), args.out)
    return 0


def cmd_bench(args):
    sizes = tuple(int(s) for s in args.sizes.split(","))
    config = experiments.ExperimentConfig(
        family=args.family, sizes=sizes, samples=args.samples,
        seed=args.seed, output=args.out,
    )
    rows = experiments.growth_curve(config, threads=args.threads)
    experiments.write_csv(
        rows, args.out,
        extra_comment=f"family={args.family} samples={args.samples} seed={args.seed}",
    )
    if not args.no_figure:
        from .plots import plot_growth_curve

        fig_path = args.out.rsplit(".", 1)[0] + ".png"
        plot_growth_curve(rows, fig_path, title=args.family)
    _dump(experiments.fit_growth(rows))
    return 0


def cmd_karp(args):
    stats = experiments.karp_statistics(args.n)
    out = {
        "n": stats["n"],
        "max_pair_mean_stretch": stats["max_pair_mean_stretch"],
        "expected_max_gradient": stats["expected_max_gradient"],
        "reference_sum": stats["reference_sum"],
    }
    if args.certify:
        t = _load_tree(args.certify)
        edge, stretch = experiments.rr_certificate(t, args.n)
        out["certificate"] = {"edge": list(edge), "tree_distance": stretch}
    _dump(out, args.out)
    return 0


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gradembed",
        description="Random ultrametric embeddings and monotone clustering tools.",
    )
    ap.add_argument("--threads", type=int, default=1,
                    help="max parallel workers for batteries")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p = sub.add_parser("gen", help="generate an instance metric")
    p.add_argument("--family", required=True,
                   choices=["cycle", "path", "diamond", "random"])
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--k", type=int, default=2, help="diamond recursion depth")
    p.add_argument("--mode", default="euclidean_2d",
                   choices=["euclidean_2d", "uniform_perturbed"])
    p.add_argument("--seed", type=int, default=None)
    add_out(p)
    p.set_defaults(func=cmd_gen, needs_seed=lambda a: a.family == "random")

    p = sub.add_parser("embed", help="sample embeddings, report max gradients")
    p.add_argument("--in", required=True)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    add_out(p)
    p.set_defaults(func=cmd_embed, needs_seed=lambda a: True)

    def cluster_flags(p, tree_input):
        p.add_argument("--objective", required=True,
                       choices=["ft_kmedian", "facility", "sigma_lp"])
        if tree_input:
            p.add_argument("--ultrametric", required=True, help="tree JSON")
        else:
            p.add_argument("--in", required=True, help="metric JSON")
        p.add_argument("--k", type=int, default=1)
        p.add_argument("--profile", default="1",
                       help="constant or JSON file of per-point j values")
        p.add_argument("--open-cost", default="0",
                       help="constant or JSON file of per-point opening costs")
        p.add_argument("--p", default="1", help="lp exponent, or 'inf'")
        p.add_argument("--eps", type=float, default=0.1)
        add_out(p)

    p = sub.add_parser("cluster", help="solve on an ultrametric tree")
    cluster_flags(p, tree_input=True)
    p.set_defaults(func=cmd_cluster, needs_seed=lambda a: False)

    p = sub.add_parser("oracle", help="brute-force optimum on a small metric")
    cluster_flags(p, tree_input=False)
    p.set_defaults(func=cmd_oracle, needs_seed=lambda a: False)

    p = sub.add_parser("reduce", help="solve on a general metric via sampling")
    cluster_flags(p, tree_input=False)
    p.add_argument("--samples", type=int, default=16)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_reduce, needs_seed=lambda a: True)

    p = sub.add_parser("bench", help="growth-curve battery, CSV plus figure")
    p.add_argument("--family", required=True,
                   choices=["cycle", "path", "diamond", "random"])
    p.add_argument("--sizes", required=True, help="comma-separated")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", required=True, help="CSV path; figure lands beside it")
    p.add_argument("--no-figure", action="store_true")
    p.set_defaults(func=cmd_bench, needs_seed=lambda a: True)

    p = sub.add_parser("karp", help="cycle-to-path deletion statistics")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--certify", default=None,
                   help="tree JSON to check for a stretched cycle edge")
    add_out(p)
    p.set_defaults(func=cmd_karp, needs_seed=lambda a: False)

    return ap


def _fail(code, kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": message}) + "\n")
    return code


def cli_main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)
    if args.needs_seed(args) and args.seed is None:
        return _fail(2, "UsageError", f"--seed is required for '{args.command}'")
    try:
        return args.func(args)
    except VALIDATION_ERRORS as e:
        return _fail(3, type(e).__name__, str(e))
    except INFEASIBLE_ERRORS as e:
        return _fail(4, type(e).__name__, str(e))
    except (OSError, json.JSONDecodeError, KeyError, ValueError) as e:
        return _fail(2, type(e).__name__, str(e))


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
