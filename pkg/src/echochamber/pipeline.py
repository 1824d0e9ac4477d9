"""End-to-end analysis: dataset -> projection -> backbone and communities ->
polarization -> tail fits and KS tests -> concept sentiment.

Every stage writes its plot-ready CSV as soon as it finishes, so a failed
run leaves the earlier outputs in place alongside ``report.partial.json``.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import backbone as bb
from . import emotion, polarization, statfit
from .bipartite import WeightedGraph, build_bipartite, project
from .community import ALGO_CODES, comparison_matrix, detect
from .community.partition import Partition
from .data import COMMENT, LIKE, InteractionDataset, filter_engaged, read_dataset, summarize
from .io import dump_json, to_json, write_histogram_csv, write_rows

log = logging.getLogger(__name__)

__all__ = ["DEFAULT_CONFIG", "PipelineError", "PipelineResult", "load_config", "run_pipeline", "analyze"]

DEFAULT_CONFIG = {
    "seed": 42,
    "format": None,
    "projection_kind": LIKE,
    "alpha": bb.FIGURE_ALPHA,
    "backbone_rule": "any",
    "algorithms": ["fg", "wt", "ml", "lp"],
    "primary_algorithm": "fg",
    "walktrap_steps": 4,
    "on_backbone": False,
    "communities": None,
    "tau": 1.0,
    "bins": polarization.DEFAULT_BINS,
    "top": 100,
    "threshold": emotion.DEFAULT_THRESHOLD,
    "weight": "post",
}

FIGURE_FILES = (
    "fig1_backbone.csv",
    "fig2_pdf.csv",
    "fig3_ccdf.csv",
    "fig4_sentiment.csv",
    "fig5_distance.csv",
    "fig6_response.csv",
)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: BaseException | str):
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage {stage!r} failed: {cause}")


@dataclass
class PipelineResult:
    report: dict
    non_converged: list[str]

    @property
    def ok(self) -> bool:
        return not self.non_converged


def load_config(path=None, **overrides) -> dict:
    cfg = dict(DEFAULT_CONFIG)
    if path is not None:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
        unknown = set(raw) - set(DEFAULT_CONFIG)
        if unknown:
            raise ValueError(f"unknown config key(s): {sorted(unknown)}")
        cfg.update(raw)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


# ---------------------------------------------------------------------------
# stage helpers, shared with the CLI subcommands


def page_projection(d: InteractionDataset, kind=LIKE) -> WeightedGraph:
    g = project(build_bipartite(d, kind), "left")
    if g.n_nodes == 0:
        raise ValueError("no engaged pages: nothing to project")
    if g.n_edges == 0:
        raise ValueError("projection has no edges: no user is active on two engaged pages")
    return g


def backbone_rows(res: bb.BackboneResult, partition: Partition | None = None):
    g = res.graph
    labels = partition.assignment if partition is not None else {}
    alphas = res.kept_alpha.tolist()
    rows = []
    for (a, b, w), al in zip(g.edges(), alphas):
        rows.append((a, b, w, al, labels.get(a, ""), labels.get(b, "")))
    return rows


def run_communities(g: WeightedGraph, algos, seed: int, steps: int) -> dict[str, Partition]:
    return {code: detect(g, code, seed=seed, steps=steps) for code in algos}


def community_summary(parts: dict[str, Partition]) -> dict:
    return {
        "partitions": {
            code: {
                "algorithm": p.algorithm,
                "modularity": p.modularity,
                "n_communities": p.n_communities,
                "sizes": p.sizes().tolist(),
                "rng_seed": p.rng_seed,
                "assignment": p.assignment,
            }
            for code, p in parts.items()
        },
        "comparison": comparison_matrix(parts),
    }


def resolve_sides(p: Partition, communities=None) -> tuple[polarization.TwoSides, list[int]]:
    if communities is None:
        pair = (0, 1) if p.n_communities == 2 else polarization.largest_two(p)
    else:
        pair = tuple(communities)
    return polarization.two_sides(p, pair), list(pair)


def polarization_stage(d, sides, tau, bins):
    out = {}
    hist = {}
    for kind in (LIKE, COMMENT):
        profiles = polarization.polarization_profiles(d, sides, kind)
        counts = polarization.classify_polarized(profiles, tau)
        out[kind] = {"profiles": profiles, "classified": counts}
        if profiles:
            hist[kind] = polarization.pdf([pr.rho for pr in profiles], bins)
    return out, hist


def activity_samples(pol: dict) -> dict[tuple[str, str], np.ndarray]:
    """Per-user interaction totals for users polarized to each side."""
    out = {}
    for kind, entry in pol.items():
        by_user = {pr.user_id: pr.x + pr.y for pr in entry["profiles"]}
        cl = entry["classified"]
        out[(kind, polarization.C1)] = np.array([by_user[u] for u in cl.c1], dtype=np.float64)
        out[(kind, polarization.C2)] = np.array([by_user[u] for u in cl.c2], dtype=np.float64)
    return out


def fit_stage(samples) -> tuple[dict, list[str]]:
    fits, bad = {}, []
    for (kind, side), values in samples.items():
        key = f"{kind}s_{side}"
        if values.size == 0:
            fits[key] = {"error": "empty sample"}
            continue
        xs, ys = polarization.ccdf(values)
        results = statfit.fit_all((xs, ys))
        entry = {"n_users": int(values.size), "fits": [r.as_dict() for r in results]}
        if not results:
            entry["error"] = "too few distinct values to fit"
        else:
            bad.extend(f"{key}:{r.model}" for r in results if not r.converged)
            try:
                entry["best"] = statfit.select_best(results).model
            except statfit.FitError as exc:
                entry["error"] = str(exc)
        fits[key] = entry
    return fits, bad


def ks_stage(samples) -> dict:
    out = {}
    for kind in (LIKE, COMMENT):
        a, b = samples[(kind, polarization.C1)], samples[(kind, polarization.C2)]
        key = f"{kind}s_C1_vs_C2"
        if a.size == 0 or b.size == 0:
            out[key] = {"error": "empty sample"}
        else:
            out[key] = statfit.ks_two_sample(a, b).as_dict()
    return out


def distance_rows(panels: emotion.DistancePanels):
    return [(r.concept, r.avg_c1, r.avg_c2, r.distance, r.panel) for r in panels.records]


def response_rows(table: emotion.ResponseTable):
    rows = []
    for side, recs in table.records.items():
        for r in recs:
            rows.append((r.concept, side, r.post_avg_sentiment, r.comment_avg_sentiment, r.response_gap, r.n_posts))
    return rows


# ---------------------------------------------------------------------------


def analyze(d: InteractionDataset, cfg: dict, out_dir) -> PipelineResult:
    """Run every stage on an already-ingested dataset."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report: dict = {"parameters": dict(cfg), "stages_completed": []}
    stage = "filter_engaged"

    def done(name):
        report["stages_completed"].append(name)

    try:
        report["dataset"] = summarize(d).as_dict()
        engaged = filter_engaged(d)
        report["engaged"] = summarize(engaged).as_dict()
        done(stage)

        stage = "project"
        g = page_projection(engaged, cfg["projection_kind"])
        report["projection"] = {"nodes": g.n_nodes, "edges": g.n_edges, "total_weight": g.total_weight,
                                "audience": dict(zip(g.nodes, g.node_weight.tolist()))}
        done(stage)

        stage = "backbone"
        back = bb.disparity_filter(g, cfg["alpha"], cfg["backbone_rule"])
        report["backbone"] = {"alpha": back.alpha, "rule": back.rule, "kept_edges": back.graph.n_edges,
                              "input_edges": g.n_edges}
        done(stage)

        stage = "communities"
        target = back.graph if cfg["on_backbone"] else g
        algos = list(dict.fromkeys(cfg["algorithms"] + [cfg["primary_algorithm"]]))
        for code in algos:
            if code not in ALGO_CODES:
                raise ValueError(f"unknown algorithm code {code!r}")
        parts = run_communities(target, algos, cfg["seed"], cfg["walktrap_steps"])
        primary = parts[cfg["primary_algorithm"]]
        report["communities"] = community_summary(parts)
        report["communities"]["primary"] = cfg["primary_algorithm"]
        write_rows(out / "fig1_backbone.csv", ["node_a", "node_b", "weight", "alpha_min", "community_a", "community_b"],
                   backbone_rows(back, primary))
        sides, pair = resolve_sides(primary, cfg["communities"])
        report["communities"]["sides"] = {"C1": pair[0], "C2": pair[1],
                                          "pages_C1": len(sides.pages("C1")), "pages_C2": len(sides.pages("C2"))}
        done(stage)

        stage = "polarize"
        pol, hist = polarization_stage(engaged, sides, cfg["tau"], cfg["bins"])
        report["polarization"] = {
            kind: {"users": len(e["profiles"]), "tau": cfg["tau"], **e["classified"].counts}
            for kind, e in pol.items()
        }
        write_histogram_csv(out / "fig2_pdf.csv", hist, key="kind")
        done(stage)

        stage = "ccdf"
        samples = activity_samples(pol)
        life_records, skipped = polarization.lifetimes(
            engaged, pol[COMMENT]["classified"].c1 + pol[COMMENT]["classified"].c2)
        life = {r.user_id: r.lifetime_days for r in life_records}
        rows = []
        for (kind, side), values in samples.items():
            if values.size:
                xs, ys = polarization.ccdf(values)
                rows.extend((f"{kind}s", side, float(x), float(y)) for x, y in zip(xs, ys))
        for side, users in ((polarization.C1, pol[COMMENT]["classified"].c1),
                            (polarization.C2, pol[COMMENT]["classified"].c2)):
            vals = [life[u] for u in users if u in life]
            if vals:
                xs, ys = polarization.ccdf(vals)
                rows.extend(("lifetime_days", side, float(x), float(y)) for x, y in zip(xs, ys))
        write_rows(out / "fig3_ccdf.csv", ["quantity", "side", "x", "ccdf"], rows)
        report["lifetime"] = {"users": len(life_records), "skipped_without_comments": skipped}
        done(stage)

        stage = "fit"
        fits, non_converged = fit_stage(samples)
        report["fits"] = fits
        done(stage)

        stage = "kstest"
        report["ks"] = ks_stage(samples)
        done(stage)

        stage = "emotion"
        write_histogram_csv(out / "fig4_sentiment.csv", emotion.sentiment_pdf(engaged, sides, cfg["bins"]),
                            key="community")
        top = emotion.top_concepts(engaged, sides, cfg["top"])
        panels = emotion.emotional_distance(engaged, sides, top.shared, cfg["threshold"])
        write_rows(out / "fig5_distance.csv", ["concept", "avg_c1", "avg_c2", "distance", "panel"],
                   distance_rows(panels))
        response = emotion.emotional_response(engaged, sides, panels.controversial, cfg["weight"])
        write_rows(out / "fig6_response.csv",
                   ["concept", "community", "post_avg", "comment_avg", "gap", "n_posts"], response_rows(response))
        report["emotion"] = {
            "top_lengths": {k: len(v) for k, v in top.ranked.items()},
            "shared": len(top.shared),
            "panel_a": len(panels.panel_a),
            "panel_b": len(panels.panel_b),
            "non_controversial": len(panels.neutral),
            "excluded": panels.excluded,
            "response_sign_change": response.sign_change,
            "posts_without_comments": response.posts_without_comments,
        }
        done(stage)
    except Exception as exc:
        report["failed_stage"] = stage
        report["error"] = str(exc)
        dump_json(report, out / "report.partial.json")
        raise PipelineError(stage, exc) from exc

    report["non_converged_fits"] = non_converged
    dump_json(report, out / "report.json")
    return PipelineResult(report, non_converged)


def run_pipeline(data_path, config_path=None, out_dir="out", **overrides) -> PipelineResult:
    cfg = load_config(config_path, **overrides)
    try:
        d = read_dataset(data_path, cfg["format"])
    except Exception as exc:
        raise PipelineError("ingest", exc) from exc
    return analyze(d, cfg, out_dir)


def report_bytes(result: PipelineResult) -> bytes:
    return (to_json(result.report) + "\n").encode("utf-8")
