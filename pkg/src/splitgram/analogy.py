"""Word-analogy evaluation with 3CosAdd and 3CosMul answer selection."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

EPSILON = 0.001  # denominator guard in 3CosMul


@dataclass
class AnalogyQuestion:
    """a : a_star :: b : expected."""

    a: str
    a_star: str
    b: str
    expected: str


@dataclass
class AnalogyResult:
    accuracy_add: float
    accuracy_mul: float
    n_used: int
    n_skipped: int


def normalize_rows(vectors: np.ndarray) -> np.ndarray:
    """Unit-normalize rows in 64-bit; zero rows are left at zero."""
    out = np.asarray(vectors, dtype=np.float64).copy()
    norms = np.linalg.norm(out, axis=1, keepdims=True)
    np.divide(out, norms, out=out, where=norms > 0)
    return out


def scores_3cosadd(
    normed: np.ndarray, ia: int, ia_star: int, ib: int
) -> np.ndarray:
    """cos(w, a*) - cos(w, a) + cos(w, b) per word; the three inputs get -inf."""
    scores = normed @ (normed[ia_star] - normed[ia] + normed[ib])
    scores[[ia, ia_star, ib]] = -np.inf
    return scores


def scores_3cosmul(
    normed: np.ndarray, ia: int, ia_star: int, ib: int
) -> np.ndarray:
    """c(w,a*)*c(w,b) / (c(w,a)+eps) with c = (cos+1)/2; inputs get -inf."""
    ca = (normed @ normed[ia] + 1.0) / 2.0
    ca_star = (normed @ normed[ia_star] + 1.0) / 2.0
    cb = (normed @ normed[ib] + 1.0) / 2.0
    scores = ca_star * cb / (ca + EPSILON)
    scores[[ia, ia_star, ib]] = -np.inf
    return scores


def _answer(normed, ids, words, a, a_star, b, score_fn) -> str:
    ia, ia_star, ib = ids[a], ids[a_star], ids[b]
    # np.argmax takes the first maximum, which is the lowest word id (the
    # documented tie rule).
    return words[int(np.argmax(score_fn(normed, ia, ia_star, ib)))]


def answer_3cosadd(
    vectors: np.ndarray, ids: Mapping[str, int], words: Sequence[str],
    a: str, a_star: str, b: str,
) -> str:
    """Best additive-rule answer over the whole vocabulary minus {a, a*, b}.

    Raises KeyError for out-of-vocabulary inputs; batch callers treat that
    as a skip, not a failure.
    """
    return _answer(normalize_rows(vectors), ids, words, a, a_star, b, scores_3cosadd)


def answer_3cosmul(
    vectors: np.ndarray, ids: Mapping[str, int], words: Sequence[str],
    a: str, a_star: str, b: str,
) -> str:
    """Best multiplicative-rule answer; same contract as answer_3cosadd."""
    return _answer(normalize_rows(vectors), ids, words, a, a_star, b, scores_3cosmul)


def evaluate_analogy(
    vectors: np.ndarray,
    ids: Mapping[str, int],
    words: Sequence[str],
    questions: Sequence[AnalogyQuestion],
) -> AnalogyResult:
    """Accuracy of both selection rules in one pass over the questions.

    Questions with any word out of vocabulary are skipped. Accuracy is the
    fraction of used questions whose selected word string-equals expected.
    """
    normed = normalize_rows(vectors)
    used = 0
    correct_add = 0
    correct_mul = 0
    skipped = 0
    for q in questions:
        qids = [ids.get(w) for w in (q.a, q.a_star, q.b, q.expected)]
        if any(i is None for i in qids):
            skipped += 1
            continue
        ia, ia_star, ib, _ = qids
        used += 1
        pick_add = words[int(np.argmax(scores_3cosadd(normed, ia, ia_star, ib)))]
        pick_mul = words[int(np.argmax(scores_3cosmul(normed, ia, ia_star, ib)))]
        if pick_add == q.expected:
            correct_add += 1
        if pick_mul == q.expected:
            correct_mul += 1
    if used == 0:
        raise ValueError(f"no usable analogy questions ({skipped} skipped)")
    return AnalogyResult(
        accuracy_add=correct_add / used,
        accuracy_mul=correct_mul / used,
        n_used=used,
        n_skipped=skipped,
    )


def load_analogy_questions(
    path, columns: tuple[int, int, int, int] = (0, 1, 2, 3)
) -> list[AnalogyQuestion]:
    """Parse analogy questions, one per line.

    Lines starting with ':' (section headers, Google file convention) and
    blank lines are skipped; words are lowercased. `columns` maps the
    whitespace-split fields to (a, a_star, b, expected) so tab-separated
    sets with a different column order (MSR) load with a flag instead of a
    converter script.
    """
    questions: list[AnalogyQuestion] = []
    needed = max(columns) + 1
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith(":"):
                continue
            parts = line.split()
            if len(parts) < needed:
                raise ValueError(
                    f"{path}: line {lineno}: expected >= {needed} fields, got {len(parts)}"
                )
            a, a_star, b, expected = (parts[c].lower() for c in columns)
            questions.append(AnalogyQuestion(a, a_star, b, expected))
    return questions
