"""Command-line entry point: ``cascade-lens <subcommand> [flags]``."""
from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import cascade as cascade_mod
from . import components, contagion, graph_core, reports, synth, user_metrics
from ._kernels import BACKEND
from .errors import (
    CascadeLensError,
    ConfigError,
    EmptyInputError,
    NoDataError,
    ParseError,
    UndefinedMetricError,
)
from .events import load_events, write_events

log = logging.getLogger("cascade_lens")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_MISSING_FILE = 3
EXIT_MALFORMED = 4
EXIT_NO_DATA = 5
EXIT_BAD_CONFIG = 6
EXIT_METRIC = 7

SUBCOMMANDS = ("stats", "bowtie", "roles", "reach", "cascades", "exposure", "synth", "all")
NEEDS_EVENTS = {"roles", "reach", "cascades", "exposure", "all"}


@dataclass(frozen=True)
class RunConfig:
    edges: str | None = None
    events: str | None = None
    out: str = "reports"
    delta_seconds: int = cascade_mod.NINE_DAYS
    min_cascade_size: int = 20
    hits_tolerance: float = 1e-8
    hits_iterations: int = 200
    support_threshold: int = 10
    seed: int = 0
    xmin: int = 1
    max_hops: int = 3
    tokens: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["tokens"] = list(self.tokens)
        return d


def thread_limit() -> int:
    raw = os.environ.get("CASCADE_LENS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise ConfigError(f"CASCADE_LENS_THREADS must be an integer, got {raw!r}") from None
    return os.cpu_count() or 1


class Session:
    """Lazily loaded inputs and intermediate results shared across subcommands."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self._graph = None
        self._ingest = None
        self._log = None
        self._roles = None

    @property
    def graph(self):
        if self._graph is None:
            if not self.cfg.edges:
                raise ConfigError("--edges is required")
            _require_file(self.cfg.edges)
            self._graph, self._ingest = graph_core.load_edges(self.cfg.edges)
            log.info("loaded %d nodes, %d edges", self._graph.node_count, self._graph.edge_count)
        return self._graph

    @property
    def log(self):
        if self._log is None:
            if not self.cfg.events:
                raise ConfigError("--events is required")
            _require_file(self.cfg.events)
            self._log = load_events(self.cfg.events)
        return self._log

    def roles(self):
        if self._roles is None:
            g = self.graph
            activity = user_metrics.activity_summary(self.log, g.ids)
            activity = user_metrics.categorize_by_head_tail(activity)
            scores = user_metrics.hits(g, self.cfg.hits_tolerance, self.cfg.hits_iterations)
            roles = user_metrics.assign_roles(scores)
            self._roles = activity, scores, roles
        return self._roles

    def path(self, name: str) -> str:
        return os.path.join(reports.ensure_dir(self.cfg.out), name)

    def header(self) -> dict:
        return {"config": self.cfg.as_dict(), "kernel_backend": BACKEND}


def _require_file(path: str) -> None:
    if not os.path.isfile(path):
        raise FileNotFoundError(path)


def _fit(samples, xmin):
    samples = np.asarray(samples)
    try:
        f = graph_core.fit_power_law(samples[samples > 0], xmin)
    except CascadeLensError as exc:
        return {"error": str(exc)}
    return dataclasses.asdict(f)


def cmd_stats(s: Session) -> str:
    g = s.graph
    summary = graph_core.degree_summary(g)
    wcc = components.weak_components(g)
    try:
        recip = graph_core.reciprocity(g)
    except UndefinedMetricError:
        recip = None
    payload = {
        **s.header(),
        "node_count": g.node_count,
        "edge_count": g.edge_count,
        "mean_degree": summary.mean_degree,
        "ingest": dataclasses.asdict(s._ingest) if s._ingest else None,
        "in_degree_fit": _fit(g.in_degrees(), s.cfg.xmin),
        "out_degree_fit": _fit(g.out_degrees(), s.cfg.xmin),
        "connected_components": wcc.count,
        "giant_component_size": wcc.sizes[0],
        "giant_component_pct": 100.0 * wcc.sizes[0] / g.node_count,
        "clustering_coefficient": graph_core.clustering_coefficient(g),
        "reciprocity": recip,
    }
    reports.write_json(s.path("stats.json"), payload)
    reports.write_csv(
        s.path("degree_ccdf.csv"), ["direction", "degree", "ccdf"],
        [("in", d, f) for d, f in summary.in_ccdf] + [("out", d, f) for d, f in summary.out_ccdf],
    )
    fit_a = payload["in_degree_fit"].get("alpha")
    fit_b = payload["out_degree_fit"].get("alpha")
    rows = [
        ("Number of nodes", g.node_count),
        ("Number of links", g.edge_count),
        ("Average (in/out) degree", summary.mean_degree),
        ("In-degree exponent", fit_a),
        ("Out-degree exponent", fit_b),
        ("Number of connected components", wcc.count),
        ("Giant component size", wcc.sizes[0]),
        ("Clustering coefficient", payload["clustering_coefficient"]),
        ("Reciprocity", recip),
    ]
    return reports.write_text(s.path("stats.txt"),
                              [reports.format_table("Follower network statistics", ["Property", "Value"], rows)])


def cmd_bowtie(s: Session) -> str:
    g = s.graph
    wcc = components.weak_components(g)
    scc = components.strong_components(g)
    bt = components.bowtie(g)
    payload = {
        **s.header(),
        "weak_components": wcc.count,
        "weak_sizes_top": wcc.sizes[:10],
        "strong_components": scc.count,
        "strong_sizes_top": scc.sizes[:10],
        "bowtie_counts": bt.counts,
        "bowtie_percentages": bt.percentages,
    }
    reports.write_json(s.path("bowtie.json"), payload)
    reports.write_csv(s.path("bowtie_labels.csv"), ["user_id", "component"],
                      zip(g.ids.tolist(), bt.label_names()))
    rows = [(name, bt.counts[name], bt.percentages[name]) for name in components.BOWTIE_LABELS]
    return reports.write_text(s.path("bowtie.txt"), [
        reports.format_table("Bowtie components", ["Component", "Count", "Percentage"], rows)])


def cmd_roles(s: Session) -> str:
    g = s.graph
    activity, scores, roles = s.roles()
    props = user_metrics.role_properties(g, roles, activity)
    active = activity.category == user_metrics.HIGHLY_ACTIVE
    active_by_role = {r: int(np.count_nonzero(active & (roles.roles == r))) for r in user_metrics.ROLES}
    payload = {
        **s.header(),
        "activity": {
            "threshold": activity.threshold,
            "counts": activity.counts(),
        },
        "hits": {"iterations": scores.iterations, "residual": scores.residual, "converged": scores.converged},
        "role_thresholds": {"authority": roles.authority_threshold, "hub": roles.hub_threshold},
        "roles": props,
        "highly_active_by_role": active_by_role,
    }
    reports.write_json(s.path("roles.json"), payload)
    reports.write_csv(
        s.path("user_roles.csv"),
        ["user_id", "tweets", "mean_latency", "activeness", "activity", "hub", "authority", "role"],
        zip(g.ids.tolist(), activity.tweet_count.tolist(), activity.mean_latency.tolist(),
            activity.activeness.tolist(), activity.category.tolist(), scores.hub.tolist(),
            scores.authority.tolist(), roles.roles.tolist()),
    )
    t1 = reports.format_table(
        f"User activity (threshold {activity.threshold:.6g})", ["Category", "Users"],
        [(c, n) for c, n in activity.counts().items()])
    t2 = reports.format_table(
        "User roles", ["Role", "Count", "%", "Mean in-degree", "Mean out-degree", "Highly active"],
        [(r, p["count"], p["percentage"], p["mean_in_degree"], p["mean_out_degree"], active_by_role[r])
         for r, p in props.items()])
    return reports.write_text(s.path("roles.txt"), [t1, t2])


def cmd_reach(s: Session) -> str:
    g = s.graph
    activity, _, roles = s.roles()
    seeds = activity.users[activity.category == user_metrics.HIGHLY_ACTIVE]
    if len(seeds) == 0:
        raise NoDataError("no highly active users to seed reach")
    rows = user_metrics.reach_by_hop(g, seeds.tolist(), roles, s.cfg.max_hops)
    payload = {**s.header(), "seeds": len(seeds), "rows": [dataclasses.asdict(r) for r in rows]}
    reports.write_json(s.path("reach.json"), payload)
    header = ["hop", "new", "cumulative", "cumulative_pct", *user_metrics.ROLES]
    table = [(r.hop, r.new, r.cumulative, r.cumulative_pct, *(r.by_role[x] for x in user_metrics.ROLES))
             for r in rows]
    reports.write_csv(s.path("reach.csv"), header, table)
    return reports.write_text(s.path("reach.txt"), [
        reports.format_table("Reach of highly active users by hop", header, table)])


def _comparison(metrics) -> dict:
    """Averages per initiator group (fringe vs non-fringe)."""
    groups = {"fringe": [], "non_fringe": []}
    for m in metrics:
        groups["fringe" if m.initiator_role == user_metrics.FRINGE else "non_fringe"].append(m)
    fields = ["size", "depth", "max_width_depth", "first_hop_non_fringe", "first_hop_fringe",
              "second_hop_non_fringe_parent", "second_hop_fringe_parent"]
    out = {}
    for name, ms in groups.items():
        row = {"cascades": len(ms)}
        for f in fields:
            vals = [getattr(m, f) for m in ms if getattr(m, f) is not None]
            row[f"mean_{f}"] = float(np.mean(vals)) if vals else None
            row[f"std_{f}"] = float(np.std(vals)) if vals else None
        out[name] = row
    return out


def cmd_cascades(s: Session) -> str:
    g, evlog = s.graph, s.log
    _, _, roles = s.roles()
    rep = cascade_mod.ExtractionReport()
    all_cascades = cascade_mod.extract_cascades(g, evlog, s.cfg.delta_seconds, rep)
    large = cascade_mod.filter_large(all_cascades, s.cfg.min_cascade_size)
    # authors missing from the graph have zero hub and authority scores
    role_map = {}
    for c in large:
        for u in c.members:
            if u not in role_map:
                role_map[u] = roles.role_of(u) if g.has_node(u) else user_metrics.FRINGE
    metrics = [cascade_mod.cascade_metrics(c, role_map) for c in large]
    cascade_mod.write_cascades(s.path("cascades.jsonl"), large, metrics)

    def props(c):
        present = [u for u in c.members if g.has_node(u)]
        if len(present) < 2:
            return None
        sub = components.induced_subgraph(g, present)
        pm = components.path_metrics(sub)
        rec = graph_core.reciprocity(sub) if sub.edge_count else None
        return pm, rec, graph_core.clustering_coefficient(sub)

    with ThreadPoolExecutor(max_workers=thread_limit()) as pool:
        sub_props = list(pool.map(props, large))
    rows = []
    for c, m, p in zip(large, metrics, sub_props):
        pm, rec, clu = p if p else (None, None, None)
        rows.append((c.cascade_id, c.size, m.depth, m.structural_virality,
                     pm.average_shortest_path if pm else None, pm.diameter if pm else None,
                     pm.pair_coverage if pm else None, rec, clu,
                     cascade_mod.one_time_engager_fraction(c)))
    header = ["cascade_id", "size", "depth", "structural_virality", "avg_path", "diameter",
              "pair_coverage", "reciprocity", "clustering", "one_time_engagers"]
    reports.write_csv(s.path("cascade_subgraph.csv"), header, rows)

    binned = []
    for lo, hi in reports.log_bins([r[1] for r in rows]):
        sel = [r for r in rows if lo <= r[1] < hi]
        if not sel:
            continue

        def mean(i):
            vals = [r[i] for r in sel if r[i] is not None]
            return float(np.mean(vals)) if vals else None

        binned.append((lo, hi, len(sel), *(mean(i) for i in range(1, len(header)))))
    reports.write_csv(s.path("cascade_bins.csv"),
                      ["bin_lo", "bin_hi", "count", *(f"mean_{h}" for h in header[1:])], binned)

    sizes = [c.size for c in all_cascades]
    payload = {
        **s.header(),
        "extraction": dataclasses.asdict(rep),
        "max_cascade_size": max(sizes) if sizes else 0,
        "size_ccdf": graph_core.ccdf(sizes),
        "size_fit": _fit(sizes, s.cfg.xmin),
        "large_cascades": len(large),
        "comparison": _comparison(metrics),
    }
    reports.write_json(s.path("cascades_summary.json"), payload)
    cmp_ = payload["comparison"]
    tab = reports.format_table(
        f"Cascades >= {s.cfg.min_cascade_size} members by initiator", ["Property", "Fringe", "Non-fringe"],
        [(k, cmp_["fringe"][k], cmp_["non_fringe"][k]) for k in cmp_["fringe"] if k.startswith(("mean", "casc"))])
    summary = reports.format_table("Cascade extraction", ["Quantity", "Value"], [
        ("events", rep.events), ("cascades", rep.cascades), ("retweets linked", rep.retweets_linked),
        ("unresolved retweets", rep.unresolved_retweets), ("window joins", rep.window_joins),
        ("max size", payload["max_cascade_size"]), ("large cascades", len(large))])
    return reports.write_text(s.path("cascades.txt"), [summary, tab])


def cmd_exposure(s: Session) -> str:
    g, evlog = s.graph, s.log
    tokens = list(s.cfg.tokens) or [None, *evlog.tokens()]
    curves = {}
    for tok in tokens:
        curve = contagion.exposure_curve(g, evlog, tok, s.cfg.support_threshold)
        curves[curve.token] = curve
        reports.write_csv(s.path(f"exposure_{curve.token}.csv"), ["k", "E", "I", "p"], curve.rows())
    payload = {
        **s.header(),
        "curves": {
            t: {"K": c.K, "stickiness": c.stickiness, "argmax_k": c.argmax_k,
                "persistence": c.persistence, "adopters": c.adopters}
            for t, c in curves.items()
        },
    }
    reports.write_json(s.path("exposure_summary.json"), payload)
    rows = [(t, c.K, c.stickiness, c.argmax_k, c.persistence, c.adopters) for t, c in curves.items()]
    return reports.write_text(s.path("exposure.txt"), [reports.format_table(
        "Exposure curves", ["Token", "K", "Stickiness", "Peak k", "Persistence", "Adopters"], rows)])


def cmd_synth(s: Session, args) -> str:
    gcfg = synth.SynthGraphConfig(
        node_count=args.nodes, exponent=args.exponent, min_out_degree=args.min_out_degree,
        reciprocity=args.reciprocity, triad_closure=args.triad, mean_degree=args.mean_degree,
        seed=s.cfg.seed)
    g = synth.generate_graph(gcfg)
    edges_path = s.cfg.edges or s.path("edges.tsv")
    graph_core.write_edge_file(g, edges_path)
    text = [f"graph: {g.node_count} nodes, {g.edge_count} edges -> {edges_path}"]
    if args.roots > 0:
        ccfg = synth.PlantedCascadeConfig(
            n_roots=args.roots, activation_prob=args.activation, max_delay=args.max_delay,
            delta=s.cfg.delta_seconds, retweet_prob=args.retweet_prob, noise_rate=args.noise,
            max_cascade_size=args.max_cascade_size, seed=s.cfg.seed + 1)
        evlog, truth = synth.plant_cascades(g, ccfg)
        events_path = s.cfg.events or s.path("events.jsonl")
        write_events(evlog, events_path)
        truth_payload = {
            "cascades": [
                {"root": pc.root, "token": pc.token, "events": pc.events,
                 "parents": [[u, p] for u, p in pc.parents.items()]}
                for pc in truth.cascades
            ],
        }
        with open(s.path("ground_truth.json"), "w", encoding="utf-8") as fh:
            json.dump(truth_payload, fh, separators=(",", ":"))
        text.append(f"events: {len(evlog)} -> {events_path}")
    reports.write_json(s.path("synth.json"), {
        **s.header(), "graph_config": dataclasses.asdict(gcfg),
        "node_count": g.node_count, "edge_count": g.edge_count})
    return "\n".join(text) + "\n"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--edges", metavar="PATH", help="follower edge TSV (follower<TAB>followee)")
    common.add_argument("--events", metavar="PATH", help="event JSON-lines file")
    common.add_argument("--out", metavar="DIR", default="reports", help="report directory")
    common.add_argument("--delta", type=int, default=cascade_mod.NINE_DAYS, metavar="SECONDS",
                        help="cascade attribution window (default: 9 days)")
    common.add_argument("--min-cascade-size", type=int, default=20, metavar="N")
    common.add_argument("--hits-tol", type=float, default=1e-8, metavar="F")
    common.add_argument("--hits-iters", type=int, default=200, metavar="N")
    common.add_argument("--support", type=int, default=10, metavar="N",
                        help="minimum E(k) kept in exposure curves")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--xmin", type=int, default=1, metavar="N", help="power-law fit cutoff")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cascade-lens", description="Follower-graph, role, cascade and exposure-curve reports.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("stats", "bowtie", "roles", "cascades", "all"):
        p = sub.add_parser(name, parents=[common])
        if name == "all":
            p.add_argument("--max-hops", type=int, default=3)
    p = sub.add_parser("reach", parents=[common])
    p.add_argument("--max-hops", type=int, default=3)
    p = sub.add_parser("exposure", parents=[common])
    p.add_argument("--token", action="append", default=[], help="drug token (repeatable; default: all)")
    p = sub.add_parser("synth", parents=[common])
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--exponent", type=float, default=2.5)
    p.add_argument("--min-out-degree", type=int, default=1)
    p.add_argument("--reciprocity", type=float, default=0.6)
    p.add_argument("--triad", type=float, default=0.3)
    p.add_argument("--mean-degree", type=float, default=None)
    p.add_argument("--roots", type=int, default=20)
    p.add_argument("--activation", type=float, default=0.05)
    p.add_argument("--max-delay", type=int, default=3 * 24 * 3600)
    p.add_argument("--retweet-prob", type=float, default=0.5)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--max-cascade-size", type=int, default=None)
    return parser


def _validate(args) -> RunConfig:
    if args.delta <= 0:
        raise ConfigError("--delta must be positive")
    if args.min_cascade_size < 1:
        raise ConfigError("--min-cascade-size must be >= 1")
    if args.support < 1:
        raise ConfigError("--support must be >= 1")
    if args.hits_tol <= 0 or args.hits_iters < 1:
        raise ConfigError("--hits-tol must be > 0 and --hits-iters >= 1")
    if args.xmin < 1:
        raise ConfigError("--xmin must be >= 1")
    if args.command != "synth":
        if not args.edges:
            raise ConfigError(f"{args.command} requires --edges")
        if args.command in NEEDS_EVENTS and not args.events:
            raise ConfigError(f"{args.command} requires --events")
    max_hops = getattr(args, "max_hops", 3)
    if max_hops < 0:
        raise ConfigError("--max-hops must be >= 0")
    return RunConfig(
        edges=args.edges, events=args.events, out=args.out, delta_seconds=args.delta,
        min_cascade_size=args.min_cascade_size, hits_tolerance=args.hits_tol,
        hits_iterations=args.hits_iters, support_threshold=args.support, seed=args.seed,
        xmin=args.xmin, max_hops=max_hops, tokens=tuple(t.lower() for t in getattr(args, "token", [])),
    )


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help or a usage error
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _validate(args)
        session = Session(cfg)
        steps = {
            "stats": [cmd_stats], "bowtie": [cmd_bowtie], "roles": [cmd_roles],
            "reach": [cmd_reach], "cascades": [cmd_cascades], "exposure": [cmd_exposure],
            "all": [cmd_stats, cmd_bowtie, cmd_roles, cmd_reach, cmd_cascades, cmd_exposure],
        }
        if args.command == "synth":
            sys.stdout.write(cmd_synth(session, args))
        else:
            for step in steps[args.command]:
                try:
                    sys.stdout.write(step(session) + "\n")
                except NoDataError as exc:
                    if args.command != "all" or step is not cmd_reach:
                        raise
                    log.warning("skipping reach: %s", exc)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename or exc}", file=sys.stderr)
        return EXIT_MISSING_FILE
    except (ParseError, EmptyInputError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except NoDataError as exc:
        print(f"error: no data: {exc}", file=sys.stderr)
        return EXIT_NO_DATA
    except ConfigError as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    except CascadeLensError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_METRIC
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
