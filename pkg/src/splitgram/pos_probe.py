"""Syntax probe: softmax regression from a word's embedding to the next word's POS tag.

Embeddings stay frozen; the probe only measures what information the vectors
already carry. The whole/x/y variants share one tagged corpus, one
sentence-level train/test split and one hyperparameter configuration.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .model import SignSignature


@dataclass
class TaggedCorpus:
    """Sentences of (token, tag) pairs plus the observed tag inventory."""

    sentences: list[list[tuple[str, str]]]
    tagset: list[str] = field(init=False)

    def __post_init__(self):
        if not self.sentences:
            raise ValueError("tagged corpus has no sentences")
        tags = sorted({tag for sent in self.sentences for _, tag in sent})
        self.tagset = tags
        self.tag_ids = {t: i for i, t in enumerate(tags)}


@dataclass(frozen=True)
class ProbeConfig:
    """Shared probe settings; identical across the whole/x/y runs."""

    epochs: int = 30
    lr: float = 0.05
    batch: int = 256
    l2: float = 1e-4
    seed: int = 42
    test_fraction: float = 0.2

    def config_hash(self) -> str:
        payload = repr(
            (self.epochs, self.lr, self.batch, self.l2, self.seed, self.test_fraction)
        ).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def load_tagged_corpus(path) -> TaggedCorpus:
    """Read one sentence per line, tokens as "word_TAG" separated by spaces.

    The last underscore splits word from tag (underscores inside tags are
    not allowed); words are lowercased, tags kept verbatim.
    """
    sentences: list[list[tuple[str, str]]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            sent: list[tuple[str, str]] = []
            for token in line.split():
                word, sep, tag = token.rpartition("_")
                if not sep or not word or not tag:
                    raise ValueError(
                        f"{path}: line {lineno}: token {token!r} is not 'word_TAG'"
                    )
                sent.append((word.lower(), tag))
            sentences.append(sent)
    if not sentences:
        raise ValueError(f"{path}: no sentences found")
    return TaggedCorpus(sentences)


def split_sentences(
    corpus: TaggedCorpus, cfg: ProbeConfig
) -> tuple[list[list[tuple[str, str]]], list[list[tuple[str, str]]]]:
    """Deterministic shuffled train/test split by sentence.

    Depends only on corpus size and cfg.seed, so whole/x/y probes built from
    the same corpus see the same split.
    """
    order = np.random.default_rng(cfg.seed).permutation(len(corpus.sentences))
    n_test = max(1, int(round(len(order) * cfg.test_fraction)))
    test_idx = set(order[:n_test].tolist())
    train = [corpus.sentences[i] for i in range(len(order)) if i not in test_idx]
    test = [corpus.sentences[i] for i in range(len(order)) if i in test_idx]
    return train, test


def part_vectors(
    vectors: np.ndarray, part: str, S: SignSignature | None
) -> np.ndarray:
    """Select the whole matrix or its x/y column block."""
    if part == "whole":
        return vectors
    if S is None:
        raise ValueError(f"part={part!r} requires a sign signature (split index)")
    if part == "x":
        return vectors[:, : S.m]
    if part == "y":
        return vectors[:, S.m :]
    raise ValueError(f"unknown part {part!r}")


def build_probe_dataset(
    sentences: Sequence[Sequence[tuple[str, str]]],
    ids: Mapping[str, int],
    vectors: np.ndarray,
    tag_ids: Mapping[str, int],
    part: str = "whole",
    S: SignSignature | None = None,
) -> tuple[np.ndarray, np.ndarray, int]:
    """Emit (embedding of word at t, tag id at t+1) examples.

    Positions whose current word is out of vocabulary are skipped (the next
    token itself may be OOV since only its tag is used). Returns
    (features, labels, n_skipped); raises if nothing is emitted.
    """
    block = part_vectors(vectors, part, S)
    feats: list[np.ndarray] = []
    labels: list[int] = []
    skipped = 0
    for sent in sentences:
        for t in range(len(sent) - 1):
            wid = ids.get(sent[t][0])
            if wid is None:
                skipped += 1
                continue
            feats.append(block[wid])
            labels.append(tag_ids[sent[t + 1][1]])
    if not feats:
        raise ValueError("probe dataset is empty: every current word was out of vocabulary")
    return (
        np.asarray(feats, dtype=np.float64),
        np.asarray(labels, dtype=np.int64),
        skipped,
    )


class SoftmaxRegressor:
    """Multinomial logistic regression with weights A (T x d_in) and bias b."""

    def __init__(self, A: np.ndarray, b: np.ndarray):
        self.A = A
        self.b = b
        self.epoch_losses: list[float] = []

    def predict_proba(self, X: np.ndarray) -> np.ndarray:
        logits = X @ self.A.T + self.b
        logits -= logits.max(axis=1, keepdims=True)
        np.exp(logits, out=logits)
        logits /= logits.sum(axis=1, keepdims=True)
        return logits

    def predict(self, X: np.ndarray) -> np.ndarray:
        # argmax takes the first maximum: ties resolve to the lowest tag id.
        return np.argmax(self.predict_proba(X), axis=1)


def softmax_objective(
    A: np.ndarray, b: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> float:
    """Mean cross-entropy plus l2*|A|^2/2; the quantity training minimizes."""
    logits = X @ A.T + b
    logits -= logits.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(logits).sum(axis=1))
    ce = float(np.mean(logsumexp - logits[np.arange(len(y)), y]))
    return ce + 0.5 * l2 * float((A * A).sum())


def softmax_gradients(
    A: np.ndarray, b: np.ndarray, X: np.ndarray, y: np.ndarray, l2: float
) -> tuple[np.ndarray, np.ndarray]:
    """Analytic gradients of softmax_objective wrt A and b."""
    logits = X @ A.T + b
    logits -= logits.max(axis=1, keepdims=True)
    np.exp(logits, out=logits)
    probs = logits / logits.sum(axis=1, keepdims=True)
    probs[np.arange(len(y)), y] -= 1.0
    probs /= len(y)
    return probs.T @ X + l2 * A, probs.sum(axis=0)


def train_softmax(
    X: np.ndarray,
    y: np.ndarray,
    epochs: int = 30,
    lr: float = 0.05,
    batch: int = 256,
    l2: float = 1e-4,
    seed: int = 42,
    n_classes: int | None = None,
) -> SoftmaxRegressor:
    """Mini-batch gradient descent from zero-initialized parameters.

    epoch_losses records the mean per-batch objective of each epoch.
    Raises on degenerate single-label data.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.int64)
    if n_classes is None:
        n_classes = int(y.max()) + 1
    if len(np.unique(y)) < 2:
        raise ValueError("need at least 2 distinct labels to fit the probe")
    A = np.zeros((n_classes, X.shape[1]))
    b = np.zeros(n_classes)
    model = SoftmaxRegressor(A, b)
    rng = np.random.default_rng(seed)
    for _ in range(epochs):
        order = rng.permutation(len(y))
        losses = []
        for lo in range(0, len(order), batch):
            sel = order[lo : lo + batch]
            losses.append(softmax_objective(A, b, X[sel], y[sel], l2))
            gA, gb = softmax_gradients(A, b, X[sel], y[sel], l2)
            A -= lr * gA
            b -= lr * gb
        model.epoch_losses.append(float(np.mean(losses)))
    return model


def evaluate_pos(model: SoftmaxRegressor, X: np.ndarray, y: np.ndarray) -> float:
    """Fraction of examples whose argmax predicted tag equals the gold tag."""
    if len(y) == 0:
        raise ValueError("test set is empty")
    return float(np.mean(model.predict(X) == y))


def confusion_counts(
    model: SoftmaxRegressor, X: np.ndarray, y: np.ndarray, n_tags: int
) -> np.ndarray:
    """n_tags x n_tags matrix: rows gold tag, columns predicted tag."""
    pred = model.predict(X)
    counts = np.zeros((n_tags, n_tags), dtype=np.int64)
    np.add.at(counts, (y, pred), 1)
    return counts


@dataclass
class ProbeReport:
    part: str
    accuracy: float
    n_train: int
    n_test: int
    n_skipped: int
    config_hash: str
    confusion: np.ndarray

    @property
    def coverage(self) -> float:
        used = self.n_train + self.n_test
        return used / (used + self.n_skipped)


def run_probe(
    corpus: TaggedCorpus,
    ids: Mapping[str, int],
    vectors: np.ndarray,
    part: str,
    S: SignSignature | None,
    cfg: ProbeConfig = ProbeConfig(),
) -> ProbeReport:
    """Full protocol for one part: split, build datasets, fit, evaluate."""
    train_sents, test_sents = split_sentences(corpus, cfg)
    X_train, y_train, skip_train = build_probe_dataset(
        train_sents, ids, vectors, corpus.tag_ids, part, S
    )
    X_test, y_test, skip_test = build_probe_dataset(
        test_sents, ids, vectors, corpus.tag_ids, part, S
    )
    model = train_softmax(
        X_train, y_train,
        epochs=cfg.epochs, lr=cfg.lr, batch=cfg.batch, l2=cfg.l2, seed=cfg.seed,
        n_classes=len(corpus.tagset),
    )
    return ProbeReport(
        part=part,
        accuracy=evaluate_pos(model, X_test, y_test),
        n_train=len(y_train),
        n_test=len(y_test),
        n_skipped=skip_train + skip_test,
        config_hash=cfg.config_hash(),
        confusion=confusion_counts(model, X_test, y_test, len(corpus.tagset)),
    )
