"""Command-line interface: ``relexplain explain|enumerate|gen|bench|eval-dcg``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Optional, Sequence, TextIO

from . import bench as benchmod
from .enumeration import STRATEGIES, general_enum
from .errors import RelExplainError
from .generate import POWER_LAW, UNIFORM, GenSpec, generate
from .kb import format_kb, load_kb
from .measures import ANTI_MONOTONE, DISTRIBUTIONAL, MEASURES, SIZE_LOCAL_DIST
from .pattern import is_minimal, match_instances, pattern_document
from .rank import RankConfig, dcg_score, rank, read_labels, result_document

log = logging.getLogger("relexplain")


def _describe_instance(re, inst) -> str:
    return ", ".join(f"{v}={e}" for v, e in zip(re.pattern.variables, inst))


def _emit_json(doc, out: TextIO) -> None:
    json.dump(doc, out, indent=2, sort_keys=False)
    out.write("\n")


def cmd_explain(args, out: TextIO) -> int:
    kb = load_kb(args.kb)
    kb.check(args.start, args.end)
    prune = args.prune
    if prune is None:
        prune = args.measure in ANTI_MONOTONE | DISTRIBUTIONAL and args.strategy != "naive-enum"
    cfg = RankConfig(
        n=args.max_size,
        k=args.k,
        measure=args.measure,
        strategy=args.strategy,
        prune=prune,
        sample_size=args.sample_size,
        seed=args.seed,
        agg=args.agg,
        workers=args.threads,
    )
    result = rank(kb, args.start, args.end, cfg)
    if args.format == "structured":
        _emit_json(
            {
                "start": args.start,
                "end": args.end,
                "measure": args.measure,
                "results": result_document(result, args.instances),
            },
            out,
        )
        return 0
    if not result.entries:
        out.write(f"no explanations found between {args.start} and {args.end}\n")
        return 0
    for i, (re, s) in enumerate(result.entries, start=1):
        out.write(f"#{i}  score {s}  instances {len(re.instances)}  level {re.level}\n")
        out.write(f"    {re.pattern.describe()}\n")
        for inst in re.instances[: args.instances]:
            out.write(f"    e.g. {_describe_instance(re, inst)}\n")
    return 0


def cmd_enumerate(args, out: TextIO) -> int:
    kb = load_kb(args.kb)
    kb.check(args.start, args.end)
    expls = general_enum(kb, args.start, args.end, args.max_size, args.strategy)
    if args.verify:
        bad = []
        for re in expls:
            if not is_minimal(re.pattern):
                bad.append(f"not minimal: {re.pattern.describe()}")
            elif sorted(re.instances) != match_instances(kb, re.pattern, args.start, args.end):
                bad.append(f"instance mismatch: {re.pattern.describe()}")
        if bad:
            for msg in bad:
                print(f"verify failed: {msg}", file=sys.stderr)
            return 1
        print(f"verified {len(expls)} explanations", file=sys.stderr)
    if args.format == "structured":
        docs = []
        for re in expls:
            doc = pattern_document(re.pattern, re.instances, args.instances)
            docs.append({"level": re.level, "count": len(re.instances), **doc})
        _emit_json({"start": args.start, "end": args.end, "explanations": docs}, out)
        return 0
    if not expls:
        out.write(f"no explanations found between {args.start} and {args.end}\n")
    for re in expls:
        out.write(f"level {re.level}  instances {len(re.instances)}  {re.pattern.describe()}\n")
    return 0


def cmd_gen(args, out: TextIO) -> int:
    spec = GenSpec(
        nodes=args.nodes,
        labels=args.labels,
        undirected_fraction=args.undirected_fraction,
        avg_degree=args.avg_degree,
        shape=args.shape,
        exponent=args.exponent,
        seed=args.seed,
    )
    text = format_kb(generate(spec))
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        out.write(text)
    return 0


def cmd_bench(args, out: TextIO) -> int:
    strategies = [s.strip() for s in args.strategies.split(",") if s.strip()]
    for s in strategies:
        if s not in STRATEGIES:
            raise RelExplainError(f"unknown strategy {s!r}; expected one of {', '.join(STRATEGIES)}")
    kb = load_kb(args.kb)
    pairs = benchmod.sample_pairs(kb, args.pairs, args.seed)
    budget = args.budget if args.budget > 0 else None
    rows = benchmod.run_bench(kb, pairs, strategies, args.max_size, budget)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            benchmod.write_csv(rows, fh)
    else:
        benchmod.write_csv(rows, out)
    return 0


def cmd_eval_dcg(args, out: TextIO) -> int:
    out.write(f"{dcg_score(read_labels(args.labels)):.3f}\n")
    return 0


def _add_pair_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kb", required=True, help="knowledge-base file")
    p.add_argument("--start", required=True, help="start entity id")
    p.add_argument("--end", required=True, help="end entity id")
    p.add_argument("--max-size", type=int, default=5, help="pattern size limit in variables (default 5)")
    p.add_argument("--strategy", default="prioritized+prune", choices=STRATEGIES)
    p.add_argument("--format", choices=("text", "structured"), default="text")
    p.add_argument("--instances", type=int, default=3, help="example instances shown per explanation")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="relexplain", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("explain", help="rank explanations for an entity pair")
    _add_pair_args(p)
    p.add_argument("--measure", default=SIZE_LOCAL_DIST, choices=MEASURES)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--prune", action=argparse.BooleanOptionalAction, default=None,
                   help="top-k pruning (default: on when the measure allows it)")
    p.add_argument("--agg", choices=("count", "monocount"), default="count",
                   help="aggregate behind distributional measures")
    p.add_argument("--sample-size", type=int, default=100, help="start entities for global-dist")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("enumerate", help="list every minimal explanation")
    _add_pair_args(p)
    p.add_argument("--verify", action="store_true", help="re-check instances and minimality")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("gen", help="write a synthetic knowledge base")
    p.add_argument("--nodes", type=int, default=1000)
    p.add_argument("--labels", type=int, default=8)
    p.add_argument("--undirected-fraction", type=float, default=0.25)
    p.add_argument("--avg-degree", type=float, default=4.0)
    p.add_argument("--shape", choices=(UNIFORM, POWER_LAW), default=UNIFORM)
    p.add_argument("--exponent", type=float, default=2.5, help="power-law exponent")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="output file (default stdout)")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("bench", help="time strategies on sampled pairs, CSV out")
    p.add_argument("--kb", required=True)
    p.add_argument("--pairs", type=int, default=10, help="pairs per connectedness class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--strategies", default=",".join(benchmod.default_strategies()))
    p.add_argument("--max-size", type=int, default=5)
    p.add_argument("--budget", type=float, default=60.0, help="seconds per run; 0 disables")
    p.add_argument("-o", "--output", help="CSV file (default stdout)")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval-dcg", help="score a top-10 relevance label file")
    p.add_argument("labels", help="file with 10 lines, one label 0-2 each")
    p.set_defaults(func=cmd_eval_dcg)
    return parser


def main(argv: Optional[Sequence[str]] = None, out: Optional[TextIO] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    out = out if out is not None else sys.stdout
    try:
        return args.func(args, out)
    except (RelExplainError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
