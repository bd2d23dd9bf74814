"""Word-similarity evaluation: cosine against human ratings via Spearman."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np


@dataclass
class WordPairDataset:
    name: str
    entries: list[tuple[str, str, float]]  # (word1, word2, human score)

    def __post_init__(self):
        if not self.entries:
            raise ValueError(f"dataset {self.name!r} has no entries")

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class SimilarityResult:
    rho: float
    n_used: int
    n_skipped: int

    @property
    def coverage(self) -> float:
        return self.n_used / (self.n_used + self.n_skipped)


def cosine(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|), accumulated in 64-bit; raises on a zero-norm input."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    nu = np.linalg.norm(u)
    nv = np.linalg.norm(v)
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero-norm vector")
    return float(u @ v) / (nu * nv)


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """Ranks 1..n; tied values receive the mean of the ranks they span."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def spearman(a, b) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"inputs must be equal-length 1-D, got {a.shape} and {b.shape}")
    if len(a) < 2:
        raise ValueError("need at least 2 observations")
    ra = _average_ranks(a)
    rb = _average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt((ra @ ra) * (rb @ rb))
    if denom == 0.0:
        raise ValueError("correlation undefined: an input has constant ranks")
    return float(ra @ rb / denom)


def evaluate_similarity(
    vectors: np.ndarray, ids: Mapping[str, int], dataset: WordPairDataset
) -> SimilarityResult:
    """Spearman correlation between model cosines and human scores.

    Pairs with either word out of vocabulary (or with a zero-norm vector)
    are skipped and counted in n_skipped.
    """
    cosines: list[float] = []
    human: list[float] = []
    skipped = 0
    for w1, w2, gold in dataset.entries:
        i1 = ids.get(w1)
        i2 = ids.get(w2)
        if i1 is None or i2 is None:
            skipped += 1
            continue
        try:
            cosines.append(cosine(vectors[i1], vectors[i2]))
        except ValueError:
            skipped += 1
            continue
        human.append(gold)
    if len(cosines) < 2:
        raise ValueError(
            f"dataset {dataset.name!r}: only {len(cosines)} usable pairs "
            f"({skipped} skipped); need at least 2"
        )
    return SimilarityResult(
        rho=spearman(cosines, human), n_used=len(cosines), n_skipped=skipped
    )


def load_word_pairs(path, name: str | None = None) -> WordPairDataset:
    """Parse "word1 word2 score" lines (tab or space separated).

    Lines starting with '#' are ignored; words are lowercased.
    """
    entries: list[tuple[str, str, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.replace("\t", " ").split()
            if len(parts) != 3:
                raise ValueError(f"{path}: line {lineno}: expected 'word1 word2 score'")
            try:
                score = float(parts[2])
            except ValueError:
                raise ValueError(f"{path}: line {lineno}: bad score {parts[2]!r}") from None
            entries.append((parts[0].lower(), parts[1].lower(), score))
    if name is None:
        name = str(path)
    return WordPairDataset(name=name, entries=entries)
