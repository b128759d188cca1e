"""Command-line front end.

Subcommands:

* ``align``  — align frame/token embedding files, write a JSONL alignment file
* ``eval``   — score predicted alignments against references
* ``bench``  — time the trellis aligner against the transport baseline
* ``mixup``  — build mixed sequences from embeddings plus an alignment file
* ``synth``  — generate planted synthetic embeddings with ground truth

Exit codes: 0 success, 1 usage or file-format error, 2 when some items
failed but the run completed (failures are recorded per line in the output).
All randomness flows through explicit ``--seed`` flags; outputs are
byte-identical across runs for identical inputs, flags, and seeds, except
for measured timing fields.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys

import numpy as np

from .bench import make_synthetic_workload, run_bench, speedup
from .dtw import backtrack, build_trellis
from .errors import AlignmentError, FormatError
from .evaluate import accuracy, project_tokens_to_words, synth_planted, validate_path
from .io import (
    alignment_record,
    error_record,
    read_alignment_map,
    read_embedding_file,
    write_alignment_file,
    write_embedding_file,
)
from .mixup import MixupConfig, discrete_mixup, interpolation_mixup
from .ot import SinkhornConfig, plan_to_alignment, similarity_to_cost, sinkhorn
from .sequences import cosine_similarity_matrix

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARTIAL = 2


class _Parser(argparse.ArgumentParser):
    """ArgumentParser that exits with code 1 on usage errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return EXIT_USAGE


def _path_score(sim_values: np.ndarray, assignment: np.ndarray) -> float:
    """Similarity summed along a path in frame order (float64)."""
    picked = sim_values[np.arange(assignment.shape[0]), assignment].astype(np.float64)
    return float(np.cumsum(picked)[-1])


def _item_seed(root: int, uid: str) -> int:
    """Stable per-utterance seed; independent of file order."""
    payload = f"{root}\x00{uid}".encode("utf-8")
    return int.from_bytes(hashlib.sha256(payload).digest()[:8], "little")


def cmd_align(args) -> int:
    frames_map = read_embedding_file(args.frames)
    tokens_map = read_embedding_file(args.tokens)
    config = SinkhornConfig(epsilon=args.epsilon, max_iters=args.max_iters, tol=args.tol)
    records = []
    any_failed = False
    for uid, frames in frames_map.items():
        if uid not in tokens_map:
            return _fail(f"id {uid!r} from the frames file is missing in the tokens file")
        tokens = tokens_map[uid]
        try:
            sim = cosine_similarity_matrix(frames, tokens)
            if args.method == "dtw":
                path = backtrack(build_trellis(sim))
                assignment, score = path.assignment, path.score
            else:
                plan = sinkhorn(
                    similarity_to_cost(sim),
                    epsilon=config.epsilon,
                    max_iters=config.max_iters,
                    tol=config.tol,
                )
                assignment = plan_to_alignment(plan).assignment
                score = _path_score(sim.values, assignment)
        except AlignmentError as exc:
            any_failed = True
            records.append(error_record(uid, f"{type(exc).__name__}: {exc}"))
            print(f"item {uid!r} failed: {exc}", file=sys.stderr)
            continue
        check = validate_path(assignment, tokens.length)
        records.append(
            alignment_record(
                uid, assignment, tokens.length, score, args.method,
                check.monotonic, check.surjective,
            )
        )
    write_alignment_file(args.out, records)
    return EXIT_PARTIAL if any_failed else EXIT_OK


def cmd_eval(args) -> int:
    pred_map = read_alignment_map(args.pred)
    ref_map = read_alignment_map(args.ref)
    predicted: dict[str, np.ndarray] = {}
    reference: dict[str, np.ndarray] = {}
    pre_skipped: list[tuple[str, str]] = []
    for uid, record in pred_map.items():
        if "error" in record:
            pre_skipped.append((uid, f"prediction errored: {record['error']}"))
            continue
        ref_record = ref_map.get(uid)
        assignment = np.asarray(record["alignment"], dtype=np.int64)
        if ref_record is not None and "error" in ref_record:
            pre_skipped.append((uid, f"reference errored: {ref_record['error']}"))
            continue
        if ref_record is not None and "tokens_per_word" in ref_record:
            # Word-level reference: project the token prediction onto words.
            assignment = project_tokens_to_words(assignment, ref_record["tokens_per_word"])
        predicted[uid] = assignment
        if ref_record is not None:
            reference[uid] = np.asarray(ref_record["alignment"], dtype=np.int64)
    report = accuracy(predicted, reference)
    report.skipped = pre_skipped + report.skipped
    print(
        f"micro {100.0 * report.micro_frame_accuracy:.2f}%  "
        f"macro {100.0 * report.macro_utterance_accuracy:.2f}%  "
        f"({report.n_utterances} utterances, {len(report.skipped)} skipped)"
    )
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    if args.figures:
        from .report import write_eval_report

        for written in write_eval_report(report, args.figures):
            print(f"wrote {written}")
    return EXIT_OK


def _bench_dataset(args):
    if args.synthetic:
        return make_synthetic_workload(
            pairs=args.pairs, n_frames=args.n_frames, n_tokens=args.n_tokens,
            dim=args.dim, seed=args.seed,
        )
    frames_path, sep, tokens_path = args.data.partition(":")
    if not sep:
        raise FormatError("--data expects FRAMES_FILE:TOKENS_FILE")
    frames_map = read_embedding_file(frames_path)
    tokens_map = read_embedding_file(tokens_path)
    dataset = []
    for uid, frames in frames_map.items():
        if uid not in tokens_map:
            raise FormatError(f"id {uid!r} from the frames file is missing in the tokens file")
        dataset.append((frames, tokens_map[uid]))
    return dataset


def cmd_bench(args) -> int:
    if bool(args.data) == bool(args.synthetic):
        return _fail("exactly one of --data or --synthetic is required")
    dataset = _bench_dataset(args)
    config = SinkhornConfig(epsilon=args.epsilon, max_iters=args.max_iters, tol=args.tol)
    methods = ["dtw", "ot"] if args.method == "both" else [args.method]
    results = [
        run_bench(dataset, method, method_config=config,
                  warmup=args.warmup, repeats=args.repeats)
        for method in methods
    ]
    by_method = {result.method: result for result in results}
    ratio = None
    if "dtw" in by_method and "ot" in by_method:
        ratio = speedup(by_method["ot"], by_method["dtw"])
    payload = {"results": [result.to_dict() for result in results], "speedup": ratio}
    if args.json:
        print(json.dumps(payload, indent=2))
    else:
        header = f"{'method':>8} {'total (s)':>12} {'median pass (s)':>16} {'per pair (ms)':>14}"
        print(header)
        for result in results:
            print(
                f"{result.method:>8} {result.total_seconds:>12.4f} "
                f"{result.median_pass_seconds:>16.4f} {result.per_pair_ms:>14.4f}"
            )
        if ratio is not None:
            print(f"speedup (ot / dtw total time): {ratio:.2f}x")
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
            fh.write("\n")
    if args.figures:
        from .report import write_bench_report

        for written in write_bench_report(results, args.figures):
            print(f"wrote {written}", file=sys.stderr)
    return EXIT_OK


def cmd_mixup(args) -> int:
    frames_map = read_embedding_file(args.frames)
    tokens_map = read_embedding_file(args.tokens)
    align_map = read_alignment_map(args.alignment)
    out_items = []
    any_failed = False
    for uid, frames in frames_map.items():
        if uid not in tokens_map:
            return _fail(f"id {uid!r} from the frames file is missing in the tokens file")
        if uid not in align_map:
            return _fail(f"id {uid!r} from the frames file is missing in the alignment file")
        record = align_map[uid]
        if "error" in record:
            any_failed = True
            print(f"item {uid!r} skipped: alignment errored: {record['error']}",
                  file=sys.stderr)
            continue
        assignment = np.asarray(record["alignment"], dtype=np.int64)
        try:
            if args.mode == "discrete":
                config = MixupConfig(
                    p_star=args.p_star, mode="discrete",
                    rng_seed=_item_seed(args.seed, uid),
                )
                mixed = discrete_mixup(frames, tokens_map[uid], assignment, config)
            else:
                mixed = interpolation_mixup(frames, tokens_map[uid], assignment, args.p_star)
        except AlignmentError as exc:
            any_failed = True
            print(f"item {uid!r} failed: {type(exc).__name__}: {exc}", file=sys.stderr)
            continue
        out_items.append((uid, mixed))
    write_embedding_file(args.out, out_items)
    return EXIT_PARTIAL if any_failed else EXIT_OK


def cmd_synth(args) -> int:
    frames_items = []
    tokens_items = []
    records = []
    for i in range(args.count):
        uid = f"synth-{i:04d}"
        frames, tokens, ref = synth_planted(
            args.n, args.m, args.dim, args.noise, args.seed + i
        )
        sim = cosine_similarity_matrix(frames, tokens)
        score = _path_score(sim.values, ref.assignment)
        frames_items.append((uid, frames))
        tokens_items.append((uid, tokens))
        records.append(
            alignment_record(uid, ref.assignment, args.m, score, "planted", True, True)
        )
    write_embedding_file(args.out_frames, frames_items)
    write_embedding_file(args.out_tokens, tokens_items)
    write_alignment_file(args.out_ref, records)
    return EXIT_OK


def _add_sinkhorn_flags(parser) -> None:
    parser.add_argument("--epsilon", type=float, default=0.1,
                        help="entropic regularization (default 0.1)")
    parser.add_argument("--max-iters", type=int, default=50,
                        help="scaling sweeps (default 50)")
    parser.add_argument("--tol", type=float, default=1e-6,
                        help="marginal violation tolerance (default 1e-6)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alignkit", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_align = sub.add_parser("align", parents=[], help="align frames to tokens")
    p_align.add_argument("--frames", required=True, help="embedding file of frame sequences")
    p_align.add_argument("--tokens", required=True, help="embedding file of token sequences")
    p_align.add_argument("--method", choices=["dtw", "ot"], default="dtw")
    _add_sinkhorn_flags(p_align)
    p_align.add_argument("--out", required=True, help="output alignment JSONL")
    p_align.set_defaults(func=cmd_align)

    p_eval = sub.add_parser("eval", help="score alignments against references")
    p_eval.add_argument("--pred", required=True, help="predicted alignment JSONL")
    p_eval.add_argument("--ref", required=True, help="reference alignment JSONL")
    p_eval.add_argument("--out", help="write the accuracy report as JSON")
    p_eval.add_argument("--figures", help="directory for the CSV table and PNG figure")
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser("bench", help="time dtw vs ot")
    p_bench.add_argument("--data", help="FRAMES_FILE:TOKENS_FILE embedding pair")
    p_bench.add_argument("--synthetic", action="store_true",
                         help="use the standard synthetic workload")
    p_bench.add_argument("--pairs", type=int, default=64)
    p_bench.add_argument("--n-frames", type=int, default=512)
    p_bench.add_argument("--n-tokens", type=int, default=32)
    p_bench.add_argument("--dim", type=int, default=512)
    p_bench.add_argument("--seed", type=int, default=42)
    p_bench.add_argument("--method", choices=["dtw", "ot", "both"], default="both")
    _add_sinkhorn_flags(p_bench)
    p_bench.add_argument("--warmup", type=int, default=1)
    p_bench.add_argument("--repeats", type=int, default=3)
    p_bench.add_argument("--json", action="store_true", help="print JSON instead of a table")
    p_bench.add_argument("--out", help="also write the JSON payload to a file")
    p_bench.add_argument("--figures", help="directory for the CSV table and PNG figure")
    p_bench.set_defaults(func=cmd_bench)

    p_mixup = sub.add_parser("mixup", help="mix frames with aligned tokens")
    p_mixup.add_argument("--frames", required=True)
    p_mixup.add_argument("--tokens", required=True)
    p_mixup.add_argument("--alignment", required=True, help="alignment JSONL")
    p_mixup.add_argument("--p-star", type=float, default=0.2, dest="p_star")
    p_mixup.add_argument("--mode", choices=["discrete", "interpolation"],
                         default="discrete")
    p_mixup.add_argument("--seed", type=int, default=0)
    p_mixup.add_argument("--out", required=True, help="output embedding file")
    p_mixup.set_defaults(func=cmd_mixup)

    p_synth = sub.add_parser("synth", help="generate planted synthetic data")
    p_synth.add_argument("--n", type=int, required=True, help="frames per utterance")
    p_synth.add_argument("--m", type=int, required=True, help="tokens per utterance")
    p_synth.add_argument("--dim", type=int, required=True)
    p_synth.add_argument("--noise", type=float, default=0.0)
    p_synth.add_argument("--seed", type=int, default=0)
    p_synth.add_argument("--count", type=int, default=1, help="number of utterances")
    p_synth.add_argument("--out-frames", required=True)
    p_synth.add_argument("--out-tokens", required=True)
    p_synth.add_argument("--out-ref", required=True)
    p_synth.set_defaults(func=cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return args.func(args)
    except (FormatError, OSError) as exc:
        return _fail(str(exc))
    except AlignmentError as exc:
        return _fail(f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        return _fail(str(exc))


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
