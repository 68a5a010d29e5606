"""Command line entry point: ``semtraj <subcommand> [options]``.

Exit codes: 0 success, 2 input-format error, 3 config error, 4 resource
ceiling exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path

from . import formats
from ._parallel import default_workers
from .baselines import centralized_similar, minhash_similar
from .community import build_graph, maximal_cliques
from .datagen import PlantSpec, gen_forest, gen_trajectories
from .encoder import EncodedCorpus, encode_trajectory, load_forest
from .engine import MODES, run_pipeline
from .evaluation import EvalReport, bench, config_echo, qa1, qa2
from .model import InputFormatError, InvalidConfig, SemtrajError, SimilarityConfig
from .partitioner import candidate_pair_codes, split_codes
from .shingler import shingle_rows
from .similarity import filter_similar, score_rows


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(3, f"{self.prog}: error: {message}\n")


def _weights(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(w) for w in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad weight list {text!r}") from exc


def _zipf(text: str) -> float | None:
    if text == "off":
        return None
    try:
        return float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError("expected an exponent or 'off'") from exc


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--k", type=int, default=3, help="shingle length")
    p.add_argument("--weights", type=_weights, default=None, help="comma-separated per-level weights")
    p.add_argument("--threshold", type=float, default=2.0)
    p.add_argument("--levels", type=int, default=3)
    p.add_argument("--workers", type=int, default=None, help="default: available parallelism")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=MODES, default="staged")
    p.add_argument("--zipf", type=_zipf, default=None, help="place popularity exponent, or 'off'")
    p.add_argument("--max-pairs", type=int, default=None, help="candidate pair ceiling")
    return p


def _inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--forest", required=True, type=Path)
    p.add_argument("--trajectories", required=True, type=Path)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="semtraj", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="write a synthetic forest and trajectory set")
    p.add_argument("--out-dir", required=True, type=Path)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--places", type=int, default=10_000)
    p.add_argument("--types", type=int, default=30)
    p.add_argument("--classes", type=int, default=10, help="classes per type")
    p.add_argument("--min-len", type=int, default=5)
    p.add_argument("--max-len", type=int, default=10)
    p.add_argument("--plant-groups", type=int, default=0)
    p.add_argument("--plant-size", type=int, default=5)
    p.add_argument("--plant-length", type=int, default=4)
    p.add_argument("--plant-level", type=int, default=None, help="default: deepest level")

    p = sub.add_parser("encode", parents=[common], help="encode trajectories against the forest")
    _inputs(p)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("pairs", parents=[common], help="candidate pairs from shingle partitioning")
    _inputs(p)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("score", parents=[common], help="score candidate pairs")
    _inputs(p)
    p.add_argument("--pairs", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--similar-only", action="store_true", help="keep only pairs above the threshold")

    for name, help_ in (("run", "full pipeline"), ("oracle", "exhaustive all-pairs baseline"),
                        ("minhash", "MinHash-LSH baseline")):
        p = sub.add_parser(name, parents=[common], help=help_)
        _inputs(p)
        p.add_argument("--out-dir", required=True, type=Path)
        if name == "minhash":
            p.add_argument("--num-hashes", type=int, default=128)
            p.add_argument("--bands", type=int, default=32)

    p = sub.add_parser("communities", parents=[common], help="maximal cliques from a scored-pairs file")
    p.add_argument("--pairs", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)

    p = sub.add_parser("eval", parents=[common], help="accuracy of a method against the oracle")
    _inputs(p)
    p.add_argument("--method", choices=("run", "minhash"), default="run")
    p.add_argument("--num-hashes", type=int, default=128)
    p.add_argument("--bands", type=int, default=32)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("bench", parents=[common], help="time the pipeline stages")
    _inputs(p)
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", type=Path, default=None)
    return parser


def _config(args) -> SimilarityConfig:
    with warnings.catch_warnings():
        warnings.simplefilter("default")
        return SimilarityConfig(k=args.k, weights=args.weights, threshold=args.threshold, levels=args.levels)


def _load(args):
    try:
        forest = load_forest(formats.read_forest(args.forest))
        trajectories = formats.read_trajectories(args.trajectories)
    except FileNotFoundError as exc:
        raise InputFormatError(f"no such file: {exc.filename}") from exc
    if forest.levels != args.levels:
        raise InvalidConfig(f"forest has {forest.levels} levels but --levels is {args.levels}")
    return forest, trajectories


def _workers(args) -> int:
    return default_workers() if args.workers is None else args.workers


def _write_outputs(out_dir: Path, similar, communities, report: EvalReport | None) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    formats.write_scored(out_dir / "pairs.csv", similar)
    formats.write_communities(out_dir / "communities.jsonl", communities)
    if report is not None:
        formats.write_report(out_dir / "report.json", report)


def _cmd_gen(args) -> None:
    source = gen_forest(args.places, args.types, args.classes, seed=args.seed)
    forest = load_forest(source)
    planted = None
    if args.plant_groups:
        planted = PlantSpec(args.plant_groups, args.plant_size, args.plant_length,
                            args.plant_level or forest.levels)
    trajectories = gen_trajectories(args.n, (args.min_len, args.max_len), forest, seed=args.seed + 1,
                                    planted=planted, zipf=args.zipf)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    formats.write_forest(args.out_dir / "forest.tsv", source)
    formats.write_trajectories(args.out_dir / "trajectories.jsonl", trajectories)


def _cmd_encode(args) -> None:
    forest, trajectories = _load(args)
    formats.write_encoded(args.out, (encode_trajectory(t, forest) for t in sorted(trajectories, key=lambda t: t.id)))


def _cmd_pairs(args) -> None:
    forest, trajectories = _load(args)
    _config(args)
    corpus = EncodedCorpus.from_trajectories(trajectories, forest)
    keys, owners = shingle_rows(corpus.codes[0], corpus.offsets, args.k, corpus.num_types)
    n = max(len(corpus), 1)
    codes = candidate_pair_codes(keys, owners, n, workers=_workers(args), max_pairs=args.max_pairs)
    left, right = split_codes(codes, n)
    formats.write_candidates(args.out, zip(corpus.ids[left].tolist(), corpus.ids[right].tolist()))


def _cmd_score(args) -> None:
    forest, trajectories = _load(args)
    cfg = _config(args)
    corpus = EncodedCorpus.from_trajectories(trajectories, forest)
    pairs = formats.read_candidates(args.pairs)
    try:
        left = corpus.index_of([a for a, _ in pairs])
        right = corpus.index_of([b for _, b in pairs])
    except KeyError as exc:
        raise InputFormatError("candidate file references an unknown trajectory id") from exc
    table = score_rows(corpus, left, right, cfg, _workers(args))
    if args.similar_only:
        table = filter_similar(table, cfg.threshold)
    formats.write_scored(args.out, table)


def _cmd_run(args) -> None:
    forest, trajectories = _load(args)
    result = run_pipeline(trajectories, forest, _config(args), workers=_workers(args), mode=args.mode,
                          max_pairs=args.max_pairs)
    _write_outputs(args.out_dir, result.similar, result.communities, result.report)


def _communities(similar, workers: int):
    return maximal_cliques(build_graph(zip(similar.id1.tolist(), similar.id2.tolist())), workers=workers)


def _cmd_oracle(args) -> None:
    forest, trajectories = _load(args)
    cfg = _config(args)
    similar = centralized_similar(EncodedCorpus.from_trajectories(trajectories, forest), cfg, _workers(args))
    _write_outputs(args.out_dir, similar, _communities(similar, _workers(args)), None)


def _cmd_minhash(args) -> None:
    forest, trajectories = _load(args)
    cfg = _config(args)
    similar = minhash_similar(EncodedCorpus.from_trajectories(trajectories, forest), cfg,
                              args.num_hashes, args.bands, args.seed, _workers(args))
    _write_outputs(args.out_dir, similar, _communities(similar, _workers(args)), None)


def _cmd_communities(args) -> None:
    table = formats.read_scored(args.pairs)
    similar = filter_similar(table, args.threshold)
    formats.write_communities(args.out, _communities(similar, _workers(args)))


def _cmd_eval(args) -> None:
    forest, trajectories = _load(args)
    cfg = _config(args)
    workers = _workers(args)
    corpus = EncodedCorpus.from_trajectories(trajectories, forest)
    truth = centralized_similar(corpus, cfg, workers)
    truth_comms = _communities(truth, workers)
    if args.method == "run":
        result = run_pipeline(trajectories, forest, cfg, workers=workers, mode=args.mode, max_pairs=args.max_pairs)
        report, similar, comms = result.report, result.similar, result.communities
    else:
        similar = minhash_similar(corpus, cfg, args.num_hashes, args.bands, args.seed, workers)
        comms = _communities(similar, workers)
        report = EvalReport(pairs_compared=0, worker_count=workers, mode="minhash", n_trajectories=len(corpus),
                            similar_pairs=len(similar), communities=len(comms), config=config_echo(cfg))
    report.qa1 = qa1(comms, truth_comms) if truth_comms else None
    report.qa2 = qa2(similar, truth) if len(truth) else None
    if args.out:
        formats.write_report(args.out, report)
    print(report.to_json())


def _cmd_bench(args) -> None:
    forest, trajectories = _load(args)
    report = bench(trajectories, forest, _config(args), workers=_workers(args), repeats=args.repeats,
                   mode=args.mode, max_pairs=args.max_pairs)
    if args.out:
        formats.write_report(args.out, report)
    print(report.to_json())


COMMANDS = {
    "gen": _cmd_gen, "encode": _cmd_encode, "pairs": _cmd_pairs, "score": _cmd_score, "run": _cmd_run,
    "oracle": _cmd_oracle, "minhash": _cmd_minhash, "communities": _cmd_communities, "eval": _cmd_eval,
    "bench": _cmd_bench,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "workers", None) is not None and args.workers < 1:
        print("semtraj: error: --workers must be >= 1", file=sys.stderr)
        return 3
    try:
        COMMANDS[args.command](args)
    except SemtrajError as exc:
        print(f"semtraj: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"semtraj: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
