"""Command-line interface: train, split, eval-sim, eval-analogy, eval-pos, probe.

Reports are TSV on stdout (--pretty for aligned tables). Exit codes: 0 on
success (possibly with per-dataset soft errors), 1 on usage errors, 2 on
data errors.
"""

from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from . import analogy as analogy_mod
from . import embio
from . import pos_probe
from . import similarity as sim_mod
from .corpus import build_vocab, read_tokens
from .model import EmbeddingMatrix, SignSignature
from .trainer import TrainConfig, train

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage problems; the contract here is 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _build_parser() -> _Parser:
    parser = _Parser(prog="splitgram", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train tied-weight SGNS embeddings")
    p_train.add_argument("corpus", help="whitespace-tokenized UTF-8 text file")
    p_train.add_argument("--out", required=True, help="output embedding file")
    p_train.add_argument("--dim", type=int, default=200)
    p_train.add_argument("--window", type=int, default=5)
    p_train.add_argument("--negatives", type=int, default=5)
    p_train.add_argument("--epochs", type=int, default=5)
    p_train.add_argument("--lr", type=float, default=0.025)
    p_train.add_argument("--min-lr", type=float, default=1e-4)
    p_train.add_argument("--min-count", type=int, default=5)
    p_train.add_argument("--subsample", type=float, default=1e-4)
    p_train.add_argument("--threads", type=int, default=1)
    p_train.add_argument("--seed", type=int, default=1)
    p_train.add_argument("--vocab-out", help="also write the vocabulary as TSV")
    p_train.add_argument("--quiet", action="store_true", help="suppress progress lines")

    p_split = sub.add_parser("split", help="write the x or y slice of an embedding file")
    p_split.add_argument("embeddings")
    p_split.add_argument("out")
    p_split.add_argument("--part", choices=("x", "y"), required=True)
    p_split.add_argument("--split-index", type=int, required=True)

    for name, hlp in (
        ("eval-sim", "word-similarity evaluation (Spearman vs human ratings)"),
        ("eval-analogy", "word-analogy evaluation (3CosAdd / 3CosMul)"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("embeddings")
        p.add_argument("datasets", nargs="+")
        p.add_argument("--part", choices=embio.PARTS, default="whole")
        p.add_argument("--split-index", type=int)
        p.add_argument("--pretty", action="store_true")
        if name == "eval-analogy":
            p.add_argument(
                "--columns", default="0,1,2,3",
                help="field indices of a,a*,b,expected (MSR-style TSV remapping)",
            )

    p_pos = sub.add_parser("eval-pos", help="next-word POS probe on frozen embeddings")
    p_pos.add_argument("embeddings")
    p_pos.add_argument("tagged", help="one sentence per line of word_TAG tokens")
    p_pos.add_argument("--part", choices=embio.PARTS, default="whole")
    p_pos.add_argument("--split-index", type=int)
    p_pos.add_argument("--probe-epochs", type=int, default=30)
    p_pos.add_argument("--probe-lr", type=float, default=0.05)
    p_pos.add_argument("--probe-batch", type=int, default=256)
    p_pos.add_argument("--probe-l2", type=float, default=1e-4)
    p_pos.add_argument("--probe-seed", type=int, default=42)
    p_pos.add_argument("--confusion", action="store_true",
                       help="also print gold/predicted tag confusion counts as TSV")
    p_pos.add_argument("--pretty", action="store_true")

    p_probe = sub.add_parser("probe", help="inspect a word's neighbors and dot decompositions")
    p_probe.add_argument("embeddings")
    p_probe.add_argument("word")
    p_probe.add_argument("-k", type=int, default=10)
    p_probe.add_argument("--split-index", type=int)
    p_probe.add_argument("--pretty", action="store_true")

    return parser


def _load_vectors(path):
    words, matrix = embio.load(path)
    ids = {w: i for i, w in enumerate(words)}
    return words, ids, matrix


def _usage_error(message: str) -> SystemExit:
    print(f"splitgram: error: {message}", file=sys.stderr)
    return SystemExit(EXIT_USAGE)


def _signature_for(d: int, split_index: int | None) -> SignSignature:
    """Resolve --split-index, defaulting to the half split for even d."""
    if split_index is not None:
        return SignSignature(d=d, m=split_index)
    if d % 2 == 0:
        return SignSignature.half(d)
    raise _usage_error(f"--split-index is required (dimension {d} is odd)")


def _slice_part(matrix: np.ndarray, part: str, split_index: int | None) -> np.ndarray:
    if part == "whole":
        return matrix
    if split_index is None:
        raise _usage_error("--split-index is required when --part is x or y")
    S = SignSignature(d=matrix.shape[1], m=split_index)
    return matrix[:, : S.m] if part == "x" else matrix[:, S.m :]


def _print_report(rows: list[tuple], pretty: bool) -> None:
    if not pretty:
        for row in rows:
            print("\t".join(str(c) for c in row))
        return
    widths = [max(len(str(r[i])) for r in rows) for i in range(len(rows[0]))]
    for row in rows:
        print("  ".join(str(c).ljust(w) for c, w in zip(row, widths)))


def _cmd_train(args) -> int:
    try:
        cfg = TrainConfig(
            dim=args.dim, window=args.window, negatives=args.negatives,
            epochs=args.epochs, initial_lr=args.lr, min_lr=args.min_lr,
            subsample=args.subsample, min_count=args.min_count,
            seed=args.seed, threads=args.threads,
        )
    except ValueError as exc:
        raise _usage_error(str(exc))
    started = time.monotonic()
    vocab = build_vocab(read_tokens(args.corpus), cfg.min_count)
    stats: dict = {}
    E = train(
        read_tokens(args.corpus), cfg, vocab=vocab,
        verbose=not args.quiet, stats_out=stats,
    )
    embio.save(E, vocab.words, args.out, part="whole")
    if args.vocab_out:
        vocab.save_tsv(args.vocab_out)
    elapsed = time.monotonic() - started
    print(f"vocab_size\t{len(vocab)}")
    print(f"pairs\t{stats['pairs']}")
    print(f"seconds\t{elapsed:.1f}")
    return EXIT_OK


def _cmd_split(args) -> int:
    words, _, matrix = _load_vectors(args.embeddings)
    S = SignSignature(d=matrix.shape[1], m=args.split_index)
    embio.save(EmbeddingMatrix(matrix), words, args.out, part=args.part, S=S)
    return EXIT_OK


def _cmd_eval_sim(args) -> int:
    _, ids, matrix = _load_vectors(args.embeddings)
    vectors = _slice_part(matrix, args.part, args.split_index)
    rows = [("dataset", "metric", "value", "coverage")]
    failures = 0
    for path in args.datasets:
        try:
            dataset = sim_mod.load_word_pairs(path)
            res = sim_mod.evaluate_similarity(vectors, ids, dataset)
            rows.append((path, "spearman", f"{res.rho:.4f}", f"{res.coverage:.4f}"))
        except (ValueError, OSError) as exc:
            rows.append((path, f"error: {exc}", "", ""))
            failures += 1
    _print_report(rows, args.pretty)
    return EXIT_OK if failures < len(args.datasets) else EXIT_DATA


def _cmd_eval_analogy(args) -> int:
    words, ids, matrix = _load_vectors(args.embeddings)
    vectors = _slice_part(matrix, args.part, args.split_index)
    try:
        columns = tuple(int(c) for c in args.columns.split(","))
        if len(columns) != 4:
            raise ValueError
    except ValueError:
        raise _usage_error(f"--columns must be four comma-separated indices, got {args.columns!r}")
    rows = [("dataset", "metric", "value", "coverage")]
    failures = 0
    for path in args.datasets:
        try:
            questions = analogy_mod.load_analogy_questions(path, columns=columns)
            res = analogy_mod.evaluate_analogy(vectors, ids, words, questions)
            cov = f"{res.n_used / (res.n_used + res.n_skipped):.4f}"
            rows.append((path, "accuracy_add", f"{res.accuracy_add:.4f}", cov))
            rows.append((path, "accuracy_mul", f"{res.accuracy_mul:.4f}", cov))
        except (ValueError, OSError) as exc:
            rows.append((path, f"error: {exc}", "", ""))
            failures += 1
    _print_report(rows, args.pretty)
    return EXIT_OK if failures < len(args.datasets) else EXIT_DATA


def _cmd_eval_pos(args) -> int:
    _, ids, matrix = _load_vectors(args.embeddings)
    if args.part != "whole" and args.split_index is None:
        raise _usage_error("--split-index is required when --part is x or y")
    S = (
        SignSignature(d=matrix.shape[1], m=args.split_index)
        if args.split_index is not None
        else None
    )
    corpus = pos_probe.load_tagged_corpus(args.tagged)
    cfg = pos_probe.ProbeConfig(
        epochs=args.probe_epochs, lr=args.probe_lr, batch=args.probe_batch,
        l2=args.probe_l2, seed=args.probe_seed,
    )
    report = pos_probe.run_probe(corpus, ids, matrix, args.part, S, cfg)
    rows = [
        ("dataset", "metric", "value", "coverage"),
        (args.tagged, f"pos_accuracy_{args.part}", f"{report.accuracy:.4f}",
         f"{report.coverage:.4f}"),
    ]
    _print_report(rows, args.pretty)
    if args.confusion:
        print("gold\\pred\t" + "\t".join(corpus.tagset))
        for ti, tag in enumerate(corpus.tagset):
            print(tag + "\t" + "\t".join(str(c) for c in report.confusion[ti]))
    return EXIT_OK


def _edit_distance_at_most(a: str, b: str, limit: int = 2) -> bool:
    if abs(len(a) - len(b)) > limit:
        return False
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        best = cur[0]
        for j, cb in enumerate(b, start=1):
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb))
            best = min(best, cur[j])
        if best > limit:
            return False
        prev = cur
    return prev[-1] <= limit


def _cmd_probe(args) -> int:
    words, ids, matrix = _load_vectors(args.embeddings)
    if args.word not in ids:
        near = [w for w in words if _edit_distance_at_most(args.word, w)][:10]
        print(
            f"splitgram: {args.word!r} is not in the vocabulary"
            + (f"; nearby words: {', '.join(near)}" if near else ""),
            file=sys.stderr,
        )
        return EXIT_DATA
    S = _signature_for(matrix.shape[1], args.split_index)
    wid = ids[args.word]
    mat = matrix.astype(np.float64)
    w = mat[wid]
    xx = mat[:, : S.m] @ w[: S.m]
    yy = mat[:, S.m :] @ w[S.m :]
    ctx = xx - yy
    dot = xx + yy
    k = min(args.k, len(words))
    fmt = "{:.3f}".format if args.pretty else "{:.6f}".format
    for label, key in (("dot", dot), ("xx", xx), ("-yy", -yy), ("ctx", ctx)):
        print(f"# top {k} by {label}")
        rows = [("word", "ctx", "dot", "xx", "-yy")]
        for idx in np.argsort(-key, kind="stable")[:k]:
            rows.append(
                (words[idx], fmt(ctx[idx]), fmt(dot[idx]), fmt(xx[idx]), fmt(-yy[idx]))
            )
        _print_report(rows, args.pretty)
    return EXIT_OK


_HANDLERS = {
    "train": _cmd_train,
    "split": _cmd_split,
    "eval-sim": _cmd_eval_sim,
    "eval-analogy": _cmd_eval_analogy,
    "eval-pos": _cmd_eval_pos,
    "probe": _cmd_probe,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except SystemExit:
        raise
    except (ValueError, OSError, FloatingPointError) as exc:
        print(f"splitgram: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
