"""Corpus ingestion: vocabulary, subsampling, and the negative-sampling noise distribution."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

import numpy as np

NOISE_EXPONENT = 0.75


@dataclass
class Vocab:
    """Word <-> id mapping with counts.

    Words are ordered by descending count; ties keep first-occurrence order,
    so the layout is deterministic for a fixed token stream.
    """

    words: list[str]
    ids: dict[str, int]
    counts: np.ndarray          # int64, counts[i] = count of words[i]
    total_tokens: int
    unigram_probs: np.ndarray = field(init=False)  # float64, sums to 1

    def __post_init__(self):
        self.counts = np.asarray(self.counts, dtype=np.int64)
        self.unigram_probs = self.counts / float(self.total_tokens)

    def __len__(self) -> int:
        return len(self.words)

    def __contains__(self, word: str) -> bool:
        return word in self.ids

    def save_tsv(self, path) -> None:
        """Write "word<TAB>count" lines, count-descending order."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for word, count in zip(self.words, self.counts):
                fh.write(f"{word}\t{int(count)}\n")


def build_vocab(tokens: Iterable[str], min_count: int = 5) -> Vocab:
    """Count tokens and keep those occurring at least min_count times.

    Args:
        tokens: token stream (consumed once).
        min_count: minimum raw count for a word to be retained, >= 1.

    Raises:
        ValueError: if min_count < 1 or no word survives the filter.
    """
    if min_count < 1:
        raise ValueError(f"min_count must be >= 1, got {min_count}")
    raw = Counter(tokens)
    # Counter preserves first-occurrence order; stable sort keeps it for ties.
    kept = [(w, c) for w, c in raw.items() if c >= min_count]
    if not kept:
        raise ValueError(
            "empty vocabulary: no word reached min_count="
            f"{min_count} (saw {len(raw)} distinct words)"
        )
    kept.sort(key=lambda wc: -wc[1])
    words = [w for w, _ in kept]
    counts = np.array([c for _, c in kept], dtype=np.int64)
    ids = {w: i for i, w in enumerate(words)}
    return Vocab(words=words, ids=ids, counts=counts, total_tokens=int(counts.sum()))


def keep_probability(word_freq: float, threshold: float) -> float:
    """Probability of keeping a token of relative frequency word_freq.

    min(1, (sqrt(f/t) + 1) * (t/f)); equals 1 for f <= t*(3+sqrt(5))/2.
    """
    ratio = word_freq / threshold
    return min(1.0, (math.sqrt(ratio) + 1.0) / ratio)


def keep_probability_table(vocab: Vocab, threshold: float) -> np.ndarray:
    """Per-word-id keep probabilities; all ones when subsampling is disabled (t <= 0)."""
    if threshold <= 0.0:
        return np.ones(len(vocab), dtype=np.float64)
    probs = vocab.unigram_probs
    ratio = probs / threshold
    return np.minimum(1.0, (np.sqrt(ratio) + 1.0) / ratio)


class NoiseDistribution:
    """Smoothed unigram distribution q_i ~ p_i^0.75, sampled via an alias table.

    The alias table gives exact O(1) draws; `probs`, `alias_prob` and
    `alias_index` are immutable after construction and safe to share across
    threads.
    """

    def __init__(self, vocab: Vocab, exponent: float = NOISE_EXPONENT):
        weights = vocab.unigram_probs ** exponent
        self.probs = weights / weights.sum()
        self.alias_prob, self.alias_index = _build_alias_table(self.probs)

    def __len__(self) -> int:
        return len(self.probs)

    def sample(self, rng: np.random.Generator) -> int:
        """Draw one word id distributed as q."""
        slot = int(rng.integers(len(self.probs)))
        if rng.random() < self.alias_prob[slot]:
            return slot
        return int(self.alias_index[slot])

    def sample_array(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Vectorized draws; same distribution as sample()."""
        slots = rng.integers(len(self.probs), size=size)
        keep = rng.random(size) < self.alias_prob[slots]
        return np.where(keep, slots, self.alias_index[slots]).astype(np.int64)


def sample_negative(noise: NoiseDistribution, rng: np.random.Generator) -> int:
    """Draw a single negative-sample word id from the noise distribution."""
    return noise.sample(rng)


def _build_alias_table(probs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Walker/Vose alias table: (acceptance probability, alias index) per slot."""
    n = len(probs)
    prob = np.zeros(n, dtype=np.float64)
    alias = np.zeros(n, dtype=np.int32)
    scaled = probs * n
    small = [i for i in range(n) if scaled[i] < 1.0]
    large = [i for i in range(n) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        l = large.pop()
        prob[s] = scaled[s]
        alias[s] = l
        scaled[l] = (scaled[l] - 1.0) + scaled[s]
        if scaled[l] < 1.0:
            small.append(l)
        else:
            large.append(l)
    # Leftovers are 1.0 up to rounding.
    for i in large:
        prob[i] = 1.0
    for i in small:
        prob[i] = 1.0
    return prob, alias


def stream_windows(
    tokens: Iterable[str],
    vocab: Vocab,
    window: int,
    subsample: float = 0.0,
    rng: np.random.Generator | None = None,
) -> Iterator[tuple[int, int]]:
    """Yield (center id, context id) pairs from a token stream.

    Out-of-vocab tokens are removed before windowing, then each retained
    token is dropped with probability 1 - keep_probability(f, subsample)
    (subsample <= 0 disables this and consumes no randomness). For every
    surviving position a window size b is drawn uniformly from 1..window and
    the position is paired with each surviving neighbor within distance b.
    """
    if window < 1:
        raise ValueError(f"window must be >= 1, got {window}")
    if rng is None:
        rng = np.random.default_rng()
    keep = keep_probability_table(vocab, subsample)
    ids = vocab.ids
    survivors = []
    for tok in tokens:
        wid = ids.get(tok)
        if wid is None:
            continue
        if keep[wid] >= 1.0 or rng.random() < keep[wid]:
            survivors.append(wid)
    n = len(survivors)
    for pos in range(n):
        b = int(rng.integers(1, window + 1))
        lo = max(0, pos - b)
        hi = min(n - 1, pos + b)
        for ctx in range(lo, hi + 1):
            if ctx != pos:
                yield survivors[pos], survivors[ctx]


def read_tokens(path, chunk_size: int = 1 << 20) -> Iterator[str]:
    """Stream whitespace-delimited tokens from a UTF-8 text file.

    Reads in chunks so a single-line corpus (text8 format) never has to be
    held in memory as one giant string list.
    """
    pending = ""
    with open(path, "r", encoding="utf-8") as fh:
        while True:
            chunk = fh.read(chunk_size)
            if not chunk:
                break
            chunk = pending + chunk
            parts = chunk.split()
            # Last fragment may continue in the next chunk.
            if chunk and not chunk[-1].isspace():
                pending = parts.pop() if parts else ""
            else:
                pending = ""
            yield from parts
    if pending:
        yield pending


def encode_tokens(tokens: Iterable[str], vocab: Vocab) -> np.ndarray:
    """Map tokens to int32 word ids, dropping out-of-vocab tokens."""
    ids = vocab.ids
    return np.fromiter(
        (ids[t] for t in tokens if t in ids), dtype=np.int32
    )
