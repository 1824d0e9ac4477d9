"""Command-line interface.

Exit codes: 0 success, 2 input error, 3 contract error, 4 a fit did not converge.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import backbone as bb
from . import emotion, pipeline, polarization, statfit
from .bipartite import build_bipartite, project, read_edge_csv, write_edge_csv
from .community import ALGO_CODES, PartitionError, detect
from .data import IngestError, filter_engaged, read_dataset, summarize, write_jsonl
from .io import (dump_json, read_numbers, read_partition_csv, read_points, to_json, write_histogram_csv,
                 write_partition_csv, write_rows)
from .synth import SynthConfig, write_synth

log = logging.getLogger("echochamber")

EXIT_OK, EXIT_INPUT, EXIT_CONTRACT, EXIT_NONCONVERGED = 0, 2, 3, 4


def _out(args, name: str) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out / name


def _dataset(args):
    return read_dataset(args.input, args.format)


def cmd_ingest(args):
    d = _dataset(args)
    dest = Path(args.out) if args.out else _out(args, "dataset.jsonl")
    write_jsonl(d, dest)
    print(to_json(summarize(d).as_dict()))
    return EXIT_OK


def cmd_summarize(args):
    d = _dataset(args)
    summary = {"all": summarize(d).as_dict(), "engaged": summarize(filter_engaged(d)).as_dict()}
    print(to_json(summary))
    return EXIT_OK


def cmd_project(args):
    d = _dataset(args)
    if not args.all_pages:
        d = filter_engaged(d)
    kinds = None if args.kind == "all" else args.kind
    g = project(build_bipartite(d, kinds), args.side)
    dest = Path(args.out) if args.out else _out(args, "edges.csv")
    write_edge_csv(g, dest)
    print(f"{g.n_nodes} nodes, {g.n_edges} edges -> {dest}")
    return EXIT_OK


def cmd_backbone(args):
    g = read_edge_csv(args.input)
    res = bb.disparity_filter(g, args.alpha, args.rule)
    dest = Path(args.out) if args.out else _out(args, "backbone.csv")
    write_edge_csv(res.graph, dest, {"alpha_min": res.kept_alpha})
    print(f"kept {res.graph.n_edges} of {g.n_edges} edges at alpha={args.alpha} -> {dest}")
    return EXIT_OK


def cmd_communities(args):
    g = read_edge_csv(args.input)
    if args.on_backbone is not None:
        g = bb.disparity_filter(g, args.on_backbone).graph
    codes = list(ALGO_CODES) if args.algo == "all" else [args.algo]
    parts = {c: detect(g, c, seed=args.seed, steps=args.steps) for c in codes}
    if len(parts) == 1:
        write_partition_csv(parts[codes[0]], _out(args, "communities.csv"))
    else:
        for c, p in parts.items():
            write_partition_csv(p, _out(args, f"communities_{c}.csv"))
    summary = pipeline.community_summary(parts)
    dump_json(summary["comparison"], _out(args, "comparison.json"))
    print(to_json({c: {"modularity": p.modularity, "n_communities": p.n_communities, "seed": p.rng_seed}
                   for c, p in parts.items()}))
    return EXIT_OK


def _sides(args):
    p = read_partition_csv(args.partition)
    pair = tuple(args.communities) if args.communities else None
    if pair is None and p.n_communities != 2:
        return polarization.two_sides(p)  # raises with guidance
    sides, _ = pipeline.resolve_sides(p, pair)
    return sides


def cmd_polarize(args):
    d = filter_engaged(_dataset(args))
    sides = _sides(args)
    profiles = polarization.polarization_profiles(d, sides, args.kind)
    counts = polarization.classify_polarized(profiles, args.tau)
    write_rows(_out(args, "profiles.csv"), ["user", "x", "y", "rho"],
               ((pr.user_id, pr.x, pr.y, pr.rho) for pr in profiles))
    dump_json({"kind": args.kind, "tau": args.tau, **counts.counts}, _out(args, "counts.json"))
    if profiles:
        write_histogram_csv(_out(args, "histogram.csv"),
                            {args.kind: polarization.pdf([pr.rho for pr in profiles], args.bins)}, key="kind")
    print(to_json(counts.counts))
    return EXIT_OK


def cmd_ccdf(args):
    values = read_numbers(args.input, args.column)
    xs, ys = polarization.ccdf(values)
    dest = Path(args.out) if args.out else _out(args, "ccdf.csv")
    write_rows(dest, ["x", "ccdf"], zip(xs.tolist(), ys.tolist()))
    return EXIT_OK


def cmd_fit(args):
    models = statfit.MODELS if args.models == "all" else tuple(args.models.split(","))
    points = read_points(args.input)
    results = [statfit.fit_model(points, m, max_iter=args.max_iter) for m in models]
    payload = {"fits": [r.as_dict() for r in results]}
    code = EXIT_OK
    try:
        payload["best"] = statfit.select_best(results).model
    except statfit.FitError as exc:
        payload["best"] = None
        payload["error"] = str(exc)
    if any(not r.converged for r in results):
        code = EXIT_NONCONVERGED
    print(to_json(payload))
    if args.out:
        dump_json(payload, args.out)
    return code


def cmd_kstest(args):
    res = statfit.ks_two_sample(read_numbers(args.a, args.column), read_numbers(args.b, args.column))
    print(to_json(res.as_dict()))
    return EXIT_OK


def cmd_emotion(args):
    d = filter_engaged(_dataset(args))
    sides = _sides(args)
    top = emotion.top_concepts(d, sides, args.top)
    panels = emotion.emotional_distance(d, sides, top.shared, args.threshold)
    write_rows(_out(args, "distances.csv"), ["concept", "avg_c1", "avg_c2", "distance", "panel"],
               pipeline.distance_rows(panels))
    response = emotion.emotional_response(d, sides, panels.controversial, args.weight)
    write_rows(_out(args, "responses.csv"), ["concept", "community", "post_avg", "comment_avg", "gap", "n_posts"],
               pipeline.response_rows(response))
    users = emotion.user_response(d, sides, panels.controversial)
    write_rows(_out(args, "user_responses.csv"), ["concept", "community", "n_users", "user_avg"],
               ((u.concept, u.community, u.n_users, u.user_avg_sentiment) for u in users))
    print(to_json({"shared": len(top.shared), "panel_a": len(panels.panel_a), "panel_b": len(panels.panel_b),
                   "non_controversial": len(panels.neutral), "excluded": panels.excluded}))
    return EXIT_OK


def cmd_synth(args):
    raw = json.loads(Path(args.config).read_text(encoding="utf-8")) if args.config else {}
    if args.seed is not None:
        raw["seed"] = args.seed
    cfg = SynthConfig.from_dict(raw)
    data_path, ledger_path = write_synth(cfg, args.out or args.out_dir)
    print(f"wrote {data_path} and {ledger_path}")
    return EXIT_OK


def cmd_run(args):
    result = pipeline.run_pipeline(args.data, args.config, args.out_dir, seed=args.seed, format=args.format)
    print(f"report -> {Path(args.out_dir) / 'report.json'}")
    if not result.ok:
        log.warning("fits did not converge: %s", ", ".join(result.non_converged))
        return EXIT_NONCONVERGED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="random seed (default 42)")
    common.add_argument("--format", choices=["jsonl", "csv"], default=None,
                        help="dataset format (default: csv for a directory, else jsonl)")
    common.add_argument("--out-dir", default=".", help="directory for output files")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="echochamber", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("ingest", cmd_ingest, "validate a dataset and write it as normalized JSONL")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--out")

    sp = add("summarize", cmd_summarize, "dataset counts")
    sp.add_argument("--in", dest="input", required=True)

    sp = add("project", cmd_project, "bipartite projection to an edge-list CSV")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--side", choices=["pages", "users", "left", "right"], default="pages")
    sp.add_argument("--kind", choices=["like", "comment", "all"], default="like")
    sp.add_argument("--all-pages", action="store_true", help="do not restrict to engaged pages")
    sp.add_argument("--out")

    sp = add("backbone", cmd_backbone, "disparity-filter backbone")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--alpha", type=float, default=bb.FIGURE_ALPHA)
    sp.add_argument("--rule", choices=["any", "both"], default="any")
    sp.add_argument("--out")

    sp = add("communities", cmd_communities, "community detection and comparison")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--algo", choices=["fg", "wt", "ml", "lp", "all"], default="all")
    sp.add_argument("--steps", type=int, default=4, help="walktrap walk length")
    sp.add_argument("--on-backbone", type=float, default=None, metavar="ALPHA",
                    help="run on the backbone at this significance level")

    for name, func, help_ in (("polarize", cmd_polarize, "user polarization profiles and counts"),
                              ("emotion", cmd_emotion, "concept emotional distance and response")):
        sp = add(name, func, help_)
        sp.add_argument("--in", dest="input", required=True)
        sp.add_argument("--partition", required=True, help="CSV node,community over pages")
        sp.add_argument("--communities", type=int, nargs=2, default=None, metavar=("C1", "C2"),
                        help="community ids to use as C1 and C2")
        sp.add_argument("--bins", type=int, default=polarization.DEFAULT_BINS)
        if name == "polarize":
            sp.add_argument("--kind", choices=["like", "comment"], default="like")
            sp.add_argument("--tau", type=float, default=1.0)
        else:
            sp.add_argument("--top", type=int, default=100)
            sp.add_argument("--threshold", type=float, default=emotion.DEFAULT_THRESHOLD)
            sp.add_argument("--weight", choices=["post", "comment"], default="post")

    sp = add("ccdf", cmd_ccdf, "empirical CCDF of a numeric column")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--column", default=None)
    sp.add_argument("--out")

    sp = add("fit", cmd_fit, "fit CCDF points with exponential, power-law and log-normal models")
    sp.add_argument("--in", dest="input", required=True)
    sp.add_argument("--models", default="all")
    sp.add_argument("--max-iter", type=int, default=statfit.MAX_ITER)
    sp.add_argument("--out")

    sp = add("kstest", cmd_kstest, "two-sample Kolmogorov-Smirnov test")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)
    sp.add_argument("--column", default=None)

    sp = add("synth", cmd_synth, "generate a synthetic dataset and its ledger")
    sp.add_argument("--config", default=None)
    sp.add_argument("--out", default=None)

    sp = add("run", cmd_run, "full pipeline")
    sp.add_argument("--data", required=True)
    sp.add_argument("--config", default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "seed", None) is None and args.command not in ("run", "synth"):
        args.seed = 42
    try:
        return args.func(args)
    except pipeline.PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        cause = exc.cause
        if isinstance(cause, (PartitionError, statfit.FitError)):
            return EXIT_CONTRACT
        return EXIT_INPUT
    except (PartitionError, statfit.FitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTRACT
    except (IngestError, FileNotFoundError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
