"""SGNS training of the tied-weight model.

The hot loop is a numba kernel released from the GIL; parallelism is plain
hogwild: every thread updates the one shared float32 matrix without locks and
lost updates are tolerated. threads=1 with a fixed seed is bit-reproducible.

pair_loss / sgd_step are the reference (numpy, 64-bit accumulation) versions
of what the kernel does per update; tests check the kernel's behavior against
them and against finite differences.
"""

from __future__ import annotations

import math
import sys
import threading
import time
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from numba import njit

from .corpus import NoiseDistribution, Vocab, build_vocab, encode_tokens, keep_probability_table
from .model import EmbeddingMatrix, SignSignature, init_gaussian, score

SCORE_CLIP = 30.0          # scores are clipped to +-SCORE_CLIP inside sigma only
_CHUNK_POSITIONS = 10_000  # kernel positions per call; lr updates at this granularity
_REPORT_EVERY = 1_000_000  # pairs between progress lines on stderr

_MASK64 = (1 << 64) - 1


@dataclass
class TrainConfig:
    """All training hyperparameters. Defaults are standard skip-gram settings."""

    dim: int = 200
    window: int = 5
    negatives: int = 5
    epochs: int = 5
    initial_lr: float = 0.025
    min_lr: float = 1e-4
    subsample: float = 1e-4
    min_count: int = 5
    seed: int = 1
    threads: int = 1

    def __post_init__(self):
        if self.dim < 2 or self.dim % 2 != 0:
            raise ValueError(f"dimension must be even and >= 2, got {self.dim}")
        if self.negatives < 1:
            raise ValueError(f"negatives must be >= 1, got {self.negatives}")
        for name in ("window", "epochs", "initial_lr", "min_lr", "min_count", "threads"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.subsample < 0:
            raise ValueError(f"subsample must be >= 0, got {self.subsample}")
        if self.min_lr > self.initial_lr:
            raise ValueError("min_lr must not exceed initial_lr")


def log_sigmoid(x: float) -> float:
    """log(sigma(x)), overflow-safe for |x| up to 1e3 and beyond."""
    if x >= 0.0:
        return -math.log1p(math.exp(-x))
    return x - math.log1p(math.exp(x))


def sigmoid_clipped(x: float) -> float:
    """sigma(x) with x clipped to +-SCORE_CLIP; this is what gradients use."""
    x = min(SCORE_CLIP, max(-SCORE_CLIP, x))
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def pair_loss(
    E: EmbeddingMatrix, S: SignSignature, j: int, i: int, negatives: Sequence[int]
) -> float:
    """SGNS log-likelihood of one pair: log sigma(s_ji) + sum log sigma(-s_jn).

    Higher is better; 0 is the saturation limit. Accumulated in 64-bit.
    """
    total = log_sigmoid(score(E, S, j, i))
    for nid in negatives:
        total += log_sigmoid(-score(E, S, j, nid))
    return total


def pair_loss_grad(
    E: EmbeddingMatrix, S: SignSignature, j: int, i: int, negatives: Sequence[int]
) -> dict[int, np.ndarray]:
    """Analytic gradient of pair_loss wrt every touched row, in 64-bit.

    Returns {row id: d-vector}; contributions add up when ids repeat
    (weights are tied, so center, context and negatives all live in the
    same matrix).
    """
    grads: dict[int, np.ndarray] = {}

    def add(row: int, vec: np.ndarray) -> None:
        if row in grads:
            grads[row] += vec
        else:
            grads[row] = vec.copy()

    wj = E.data[j].astype(np.float64)
    g_pos = 1.0 - sigmoid_clipped(score(E, S, j, i))
    add(j, g_pos * S.apply(E.data[i].astype(np.float64)))
    add(i, g_pos * S.apply(wj))
    for nid in negatives:
        g_neg = -sigmoid_clipped(score(E, S, j, nid))
        add(j, g_neg * S.apply(E.data[nid].astype(np.float64)))
        add(nid, g_neg * S.apply(wj))
    return grads


def sgd_step(
    E: EmbeddingMatrix, S: SignSignature, j: int, i: int, label: int, lr: float
) -> None:
    """One tied-weight update: row j += lr*g*(D w_i), row i += lr*g*(D w_j).

    g = label - sigma(score). Both deltas are computed from the pre-update
    rows, so the semantics stay simultaneous even when j == i.
    """
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    g = lr * (float(label) - sigmoid_clipped(score(E, S, j, i)))
    delta_j = (g * S.apply(E.data[i].astype(np.float64))).astype(np.float32)
    delta_i = (g * S.apply(E.data[j].astype(np.float64))).astype(np.float32)
    E.data[j] += delta_j
    E.data[i] += delta_i


# --- numba kernels -------------------------------------------------------
# All randomness inside kernels comes from an explicit xorshift64* state so
# each (thread, epoch) stream is self-contained and reproducible.

_U12 = np.uint64(12)
_U25 = np.uint64(25)
_U27 = np.uint64(27)
_U11 = np.uint64(11)
_STAR = np.uint64(0x2545F4914F6CDD1D)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53


@njit(nogil=True, cache=True)
def _rng_next(state):
    state ^= state >> _U12
    state ^= state << _U25
    state ^= state >> _U27
    return state


@njit(nogil=True, cache=True)
def _rng_u53(state):
    return float((state * _STAR) >> _U11) * _INV53


@njit(nogil=True, cache=True)
def _subsample_kernel(token_ids, keep, state):
    out = np.empty(token_ids.shape[0], dtype=np.int32)
    cnt = 0
    for idx in range(token_ids.shape[0]):
        wid = token_ids[idx]
        kp = keep[wid]
        if kp >= 1.0:
            out[cnt] = wid
            cnt += 1
        else:
            state = _rng_next(state)
            if _rng_u53(state) < kp:
                out[cnt] = wid
                cnt += 1
    return out[:cnt], state


@njit(nogil=True, cache=True)
def _update_kernel(data, m, j, i, label, lr):
    d = data.shape[1]
    s = 0.0
    for k in range(m):
        s += data[j, k] * data[i, k]
    for k in range(m, d):
        s -= data[j, k] * data[i, k]
    sc = s
    if sc > 30.0:
        sc = 30.0
    elif sc < -30.0:
        sc = -30.0
    sig = 1.0 / (1.0 + math.exp(-sc))
    g = lr * (label - sig)
    for k in range(m):
        tmp = data[j, k]
        data[j, k] += np.float32(g * data[i, k])
        data[i, k] += np.float32(g * tmp)
    for k in range(m, d):
        tmp = data[j, k]
        data[j, k] -= np.float32(g * data[i, k])
        data[i, k] -= np.float32(g * tmp)
    # negated log-likelihood of this single update, for progress reporting
    if label == 1.0:
        if s >= 0.0:
            return math.log1p(math.exp(-s))
        return -s + math.log1p(math.exp(s))
    if s >= 0.0:
        return s + math.log1p(math.exp(-s))
    return math.log1p(math.exp(s))


@njit(nogil=True, cache=True)
def _train_chunk(data, m, survivors, start, stop, window, negatives,
                 alias_prob, alias_index, lr, state):
    n_surv = survivors.shape[0]
    win_u = np.uint64(window)
    vocab_u = np.uint64(alias_prob.shape[0])
    pairs = 0
    loss_sum = 0.0
    for pos in range(start, stop):
        center = np.int64(survivors[pos])
        state = _rng_next(state)
        b = 1 + np.int64((state * _STAR) % win_u)
        lo = pos - b
        if lo < 0:
            lo = 0
        hi = pos + b
        if hi > n_surv - 1:
            hi = n_surv - 1
        for cpos in range(lo, hi + 1):
            if cpos == pos:
                continue
            ctx = np.int64(survivors[cpos])
            loss_sum += _update_kernel(data, m, center, ctx, 1.0, lr)
            for _ in range(negatives):
                state = _rng_next(state)
                slot = np.int64((state * _STAR) % vocab_u)
                state = _rng_next(state)
                if _rng_u53(state) < alias_prob[slot]:
                    neg = slot
                else:
                    neg = np.int64(alias_index[slot])
                loss_sum += _update_kernel(data, m, center, neg, 0.0, lr)
            pairs += 1
    return state, pairs, loss_sum


def _splitmix64(x: int) -> int:
    x &= _MASK64
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    x = (x ^ (x >> 27)) * 0x94D049BB133111EB & _MASK64
    return x ^ (x >> 31)


def _stream_seed(seed: int, thread: int, epoch: int) -> np.uint64:
    """Distinct, reproducible xorshift state per (thread, epoch)."""
    x = seed & _MASK64
    x = _splitmix64(x + 0x9E3779B97F4A7C15 * (thread + 1))
    x = _splitmix64(x + 0x9E3779B97F4A7C15 * (epoch + 1))
    return np.uint64(x if x != 0 else 1)


class _Progress:
    """Shared pair counter, loss accumulator and stderr reporter."""

    def __init__(self, expected_pairs: float, cfg: TrainConfig, verbose: bool):
        self.lock = threading.Lock()
        self.pairs_done = 0
        self.loss_sum = 0.0
        self.loss_pairs = 0
        self.expected = max(expected_pairs, 1.0)
        self.cfg = cfg
        self.verbose = verbose
        self.started = time.monotonic()
        self._next_report = _REPORT_EVERY

    def lr(self) -> float:
        frac = min(1.0, self.pairs_done / self.expected)
        return max(self.cfg.min_lr, self.cfg.initial_lr * (1.0 - frac))

    def advance(self, pairs: int, loss_sum: float) -> None:
        with self.lock:
            self.pairs_done += pairs
            self.loss_sum += loss_sum
            self.loss_pairs += pairs
            if self.verbose and self.pairs_done >= self._next_report:
                elapsed = time.monotonic() - self.started
                rate = self.pairs_done / elapsed if elapsed > 0 else 0.0
                mean_loss = self.loss_sum / max(self.loss_pairs, 1)
                print(
                    f"pairs={self.pairs_done} pairs/sec={rate:.0f} "
                    f"loss={mean_loss:.4f} lr={self.lr():.5f}",
                    file=sys.stderr,
                    flush=True,
                )
                self.loss_sum = 0.0
                self.loss_pairs = 0
                while self._next_report <= self.pairs_done:
                    self._next_report += _REPORT_EVERY


def _shard_worker(data, m, shard, cfg: TrainConfig, keep, noise: NoiseDistribution,
                  progress: _Progress, thread_id: int, epoch: int) -> None:
    state = _stream_seed(cfg.seed, thread_id, epoch)
    survivors, state = _subsample_kernel(shard, keep, state)
    pos = 0
    total = survivors.shape[0]
    while pos < total:
        stop = min(pos + _CHUNK_POSITIONS, total)
        lr = progress.lr()
        # kernel returns unbox uint64 as a Python int; rewrap for redispatch
        state, pairs, loss_sum = _train_chunk(
            data, m, survivors, pos, stop, cfg.window, cfg.negatives,
            noise.alias_prob, noise.alias_index, lr, np.uint64(state),
        )
        progress.advance(pairs, loss_sum)
        pos = stop


def _warm_kernels() -> None:
    dummy = np.zeros((2, 2), dtype=np.float32)
    toks = np.zeros(2, dtype=np.int32)
    keep = np.ones(2, dtype=np.float64)
    ap = np.ones(2, dtype=np.float64)
    ai = np.zeros(2, dtype=np.int32)
    surv, st = _subsample_kernel(toks, keep, np.uint64(1))
    _train_chunk(dummy, 1, surv, 0, 0, 1, 1, ap, ai, 0.01, st)


def train(
    tokens: Iterable[str],
    config: TrainConfig,
    vocab: Vocab | None = None,
    on_epoch_end: Callable[[int, EmbeddingMatrix], None] | None = None,
    verbose: bool = True,
    stats_out: dict | None = None,
) -> EmbeddingMatrix:
    """Train SGNS with tied weights; returns the final embedding matrix.

    Runs config.epochs passes over the corpus. Every (center, context) pair
    gets one positive update and config.negatives negative updates with
    negatives resampled per pair; the learning rate decays linearly from
    initial_lr toward min_lr over the expected total pair count and never
    falls below min_lr.

    When vocab is None the token stream is materialized to build it first;
    pass a prebuilt vocab to keep streaming ingestion single-pass.
    """
    if vocab is None:
        tokens = list(tokens)
        vocab = build_vocab(tokens, config.min_count)
    token_ids = encode_tokens(tokens, vocab)
    if token_ids.size == 0:
        raise ValueError("empty corpus: no in-vocabulary tokens")
    if token_ids.size < 2:
        raise ValueError("corpus must yield at least one (center, context) pair")

    E = init_gaussian(len(vocab), config.dim, config.seed)
    S = SignSignature.half(config.dim)
    noise = NoiseDistribution(vocab)
    keep = keep_probability_table(vocab, config.subsample)

    expected_survivors = float((vocab.counts * keep).sum())
    expected_pairs = config.epochs * expected_survivors * (config.window + 1)
    progress = _Progress(expected_pairs, config, verbose)

    n_threads = min(config.threads, max(1, token_ids.size // 2))
    shards = np.array_split(token_ids, n_threads)
    _warm_kernels()

    for epoch in range(config.epochs):
        if n_threads == 1:
            _shard_worker(E.data, S.m, shards[0], config, keep, noise, progress, 0, epoch)
        else:
            workers = [
                threading.Thread(
                    target=_shard_worker,
                    args=(E.data, S.m, shards[t], config, keep, noise, progress, t, epoch),
                )
                for t in range(n_threads)
            ]
            for w in workers:
                w.start()
            for w in workers:
                w.join()
        E.assert_finite()
        if on_epoch_end is not None:
            on_epoch_end(epoch, E)
    if stats_out is not None:
        stats_out["pairs"] = progress.pairs_done
        stats_out["vocab_size"] = len(vocab)
    return E
