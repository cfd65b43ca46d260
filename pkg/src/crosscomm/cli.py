"""Command-line front end: the pipeline as scriptable subcommands.

Exit codes: 0 success, 1 usage error, 2 data or convergence error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import mapeq
from .alignment import SeedSet, read_alignment_tsv
from .assignment import read_assignment_tsv, write_assignment_tsv
from .errors import CrosscommError
from .experiments import (OverlapSpec, SweepConfig, run_sweep, sample_overlap,
                          write_sweep_csv)
from .flow import pagerank
from .graph import Graph, ingest_edge_list_file
from .metrics import (contingency, filter_users_only, jaccard_matrix,
                      oracle_accuracy, variation_of_information)
from .multilayer import build, project_assignment
from .seedsel import select_seeds


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(1)


def _read_scores_tsv(path) -> dict[str, float]:
    scores = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            label, value = line.split("\t")
            scores[label] = float(value)
    return scores


# --- subcommand bodies ------------------------------------------------------

def _cmd_ingest(args) -> int:
    g = ingest_edge_list_file(args.edges)
    g.save(args.out)
    print(f"ingested {g.n} vertices, {g.num_edges} edges -> {args.out}")
    return 0


def _cmd_pagerank(args) -> int:
    g = Graph.load(args.input)
    pr = pagerank(g, damping=args.damping, tol=args.tol, max_iter=args.max_iter)
    ranked = sorted(zip(g.labels, (float(x) for x in pr.p)),
                    key=lambda kv: (-kv[1], kv[0]))
    out = sys.stdout if args.out is None else open(args.out, "w", encoding="utf-8")
    try:
        for label, score in ranked:
            out.write(f"{label}\t{score!r}\n")
    finally:
        if args.out is not None:
            out.close()
    return 0


def _cmd_select_seeds(args) -> int:
    truth = read_alignment_tsv(args.truth)
    scores = None
    if args.strategy in ("degree", "pagerank"):
        if args.scores1 and args.scores2:
            scores = (_read_scores_tsv(args.scores1), _read_scores_tsv(args.scores2))
        elif args.scores1:
            scores = _read_scores_tsv(args.scores1)
        elif args.layer1 and args.layer2:
            g1, g2 = Graph.load(args.layer1), Graph.load(args.layer2)
            if args.strategy == "degree":
                scores = ({lab: g1.strength(v) for v, lab in enumerate(g1.labels)},
                          {lab: g2.strength(v) for v, lab in enumerate(g2.labels)})
            else:
                p1, p2 = pagerank(g1), pagerank(g2)
                scores = ({lab: float(p1.p[v]) for v, lab in enumerate(g1.labels)},
                          {lab: float(p2.p[v]) for v, lab in enumerate(g2.labels)})
        else:
            raise SystemExit(_usage(f"strategy {args.strategy} needs --scores1 "
                                    "[--scores2] or --layer1 --layer2"))
    if args.strategy == "random" and args.rng_seed is None:
        raise SystemExit(_usage("random strategy needs --rng-seed"))
    seeds = select_seeds(truth, args.strategy, args.fraction,
                         rng_seed=args.rng_seed, scores=scores)
    if args.out:
        seeds.to_tsv(args.out)
    else:
        for a, b in seeds:
            print(f"{a}\t{b}")
    return 0


def _cmd_sample_overlap(args) -> int:
    base = Graph.load(args.base)
    spec = OverlapSpec(fraction=args.fraction, m=args.m, rng_seed=args.rng_seed)
    g1, g2, truth = sample_overlap(base, spec)
    prefix = Path(args.out_prefix)
    g1.save(f"{prefix}.layer1.json")
    g2.save(f"{prefix}.layer2.json")
    truth.to_tsv(f"{prefix}.truth.tsv")
    print(f"wrote {prefix}.layer1.json {prefix}.layer2.json {prefix}.truth.tsv "
          f"(shared={spec.shared_count()}, truth pairs={len(truth)})")
    return 0


def _cmd_detect(args) -> int:
    if args.input:
        g = Graph.load(args.input)
        assign, cl = mapeq.detect(g, trials=args.trials, rng_seed=args.rng_seed)
        projected = {("*", label): int(c)
                     for label, c in zip(g.labels, assign.membership)}
    else:
        if not (args.layer1 and args.layer2 and args.seeds):
            raise SystemExit(_usage("detect needs --input or --layer1 --layer2 --seeds"))
        g1, g2 = Graph.load(args.layer1), Graph.load(args.layer2)
        seeds = read_alignment_tsv(args.seeds, cls=SeedSet)
        detectable, state_map = build(args.method, g1, g2, seeds, omega=args.omega,
                                      relax_rate=args.relax_rate, combine=args.combine)
        assign, cl = mapeq.detect(detectable, trials=args.trials, rng_seed=args.rng_seed)
        projected = project_assignment(assign, state_map)
    write_assignment_tsv(args.out, projected)
    print(f"codelength_bits={cl.bits!r} communities={assign.num_communities}")
    return 0


def _cmd_metrics(args) -> int:
    test = read_assignment_tsv(args.test)
    if args.users_only:
        test = filter_users_only(test)
    did_something = False
    if args.reference:
        ref = read_assignment_tsv(args.reference)
        if args.users_only:
            ref = filter_users_only(ref)
        N = contingency(ref, test)
        print(f"vi_bits={variation_of_information(N)!r}")
        if args.jaccard_out:
            jaccard_matrix(N).write_csv(args.jaccard_out)
        did_something = True
    if args.truth:
        truth = read_alignment_tsv(args.truth)
        seeds = read_alignment_tsv(args.seeds, cls=SeedSet) if args.seeds else SeedSet([])
        print(f"oracle_accuracy={oracle_accuracy(truth, seeds, test)!r}")
        did_something = True
    if not did_something:
        raise SystemExit(_usage("metrics needs --reference and/or --truth"))
    return 0


def _cmd_sweep(args) -> int:
    with open(args.config, encoding="utf-8") as fh:
        obj = json.load(fh)
    obj["rng_seed"] = args.rng_seed  # explicit flag wins over the config file
    base_dir = Path(args.config).parent

    def load_graph(path):
        return Graph.load(base_dir / path)

    def load_truth(path):
        return read_alignment_tsv(base_dir / path)

    cfg = SweepConfig.from_dict(obj, load_graph=load_graph, load_truth=load_truth)
    results = run_sweep(cfg, jobs=args.jobs)
    write_sweep_csv(results, args.out)
    print(f"wrote {args.out}")
    return 0


def _usage(message: str) -> int:
    sys.stderr.write(f"error: {message}\n")
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="crosscomm",
                     description="Community detection across two partially "
                                 "aligned networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[], help="edge-list TSV -> graph JSON")
    p.add_argument("--edges", required=True,
                   help="TSV: src<TAB>dst<TAB>etype<TAB>count ('//' comments)")
    p.add_argument("--out", required=True, help="output graph JSON")
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("pagerank", help="stationary visit rates of a graph")
    p.add_argument("--input", required=True, help="graph JSON")
    p.add_argument("--damping", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--out", help="write TSV here instead of stdout")
    p.set_defaults(func=_cmd_pagerank)

    p = sub.add_parser("select-seeds", help="pick seed pairs from a truth alignment")
    p.add_argument("--strategy", required=True, choices=["random", "degree", "pagerank"])
    p.add_argument("--fraction", required=True, type=float)
    p.add_argument("--truth", required=True, help="truth alignment TSV")
    p.add_argument("--rng-seed", type=int, help="required for --strategy random")
    p.add_argument("--scores1", help="label<TAB>score TSV (reference network, or layer 1)")
    p.add_argument("--scores2", help="label<TAB>score TSV for layer 2 (enables averaging)")
    p.add_argument("--layer1", help="layer-1 graph JSON (scores computed here)")
    p.add_argument("--layer2", help="layer-2 graph JSON")
    p.add_argument("--out", help="write the seed TSV here instead of stdout")
    p.set_defaults(func=_cmd_select_seeds)

    p = sub.add_parser("sample-overlap",
                       help="draw two overlapping subgraphs plus their truth alignment")
    p.add_argument("--base", required=True, help="base graph JSON")
    p.add_argument("--m", required=True, type=int, help="vertices per layer")
    p.add_argument("--fraction", required=True, type=float, help="shared-vertex fraction")
    p.add_argument("--rng-seed", required=True, type=int)
    p.add_argument("--out-prefix", required=True)
    p.set_defaults(func=_cmd_sample_overlap)

    p = sub.add_parser("detect", help="map-equation community detection")
    p.add_argument("--method", default="aggregation",
                   choices=["aggregation", "linking", "relaxed"])
    p.add_argument("--layer1", help="layer-1 graph JSON")
    p.add_argument("--layer2", help="layer-2 graph JSON")
    p.add_argument("--seeds", help="seed pair TSV")
    p.add_argument("--input", help="detect on a single graph instead of a pair")
    p.add_argument("--out", required=True, help="assignment TSV")
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--rng-seed", required=True, type=int)
    p.add_argument("--omega", type=float, default=1.0, help="linking interlayer weight")
    p.add_argument("--relax-rate", type=float, default=0.85)
    p.add_argument("--combine", default="sum", choices=["sum", "mean"])
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("metrics", help="compare assignments / score seed recall")
    p.add_argument("--test", required=True, help="assignment TSV under evaluation")
    p.add_argument("--reference", help="reference assignment TSV (enables VI)")
    p.add_argument("--jaccard-out", help="write the Jaccard matrix CSV here")
    p.add_argument("--truth", help="truth alignment TSV (enables oracle accuracy)")
    p.add_argument("--seeds", help="seed TSV excluded from oracle accuracy")
    p.add_argument("--users-only", action="store_true",
                   help="ignore hashtag vertices in the comparison")
    p.set_defaults(func=_cmd_metrics)

    p = sub.add_parser("sweep", help="run a (overlap x strategy x fraction x method) grid")
    p.add_argument("--config", required=True, help="sweep config JSON")
    p.add_argument("--out", required=True, help="results CSV")
    p.add_argument("--rng-seed", required=True, type=int, help="master seed")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (CrosscommError, ValueError, TypeError, KeyError, IndexError, OSError,
            json.JSONDecodeError) as exc:
        sys.stderr.write(f"crosscomm: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
