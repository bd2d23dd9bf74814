"""Text-format embedding persistence (word2vec text layout).

First line "n d", then n lines of "word v1 ... vd" separated by single
spaces, UTF-8, LF endings. Floats are written with six decimal places, so a
save/load round trip reproduces every entry within 1e-6.
"""

from __future__ import annotations

import numpy as np

from .model import EmbeddingMatrix, SignSignature

PARTS = ("whole", "x", "y")


class EmbeddingFormatError(ValueError):
    """Malformed embedding file; message names the offending line."""


def _part_slice(part: str, S: SignSignature | None, d: int) -> slice:
    if part == "whole":
        return slice(0, d)
    if S is None:
        raise ValueError(f"part={part!r} requires a sign signature (split index)")
    if part == "x":
        return slice(0, S.m)
    if part == "y":
        return slice(S.m, d)
    raise ValueError(f"unknown part {part!r}; expected one of {PARTS}")


def save(
    E: EmbeddingMatrix,
    words: list[str],
    path,
    part: str = "whole",
    S: SignSignature | None = None,
) -> None:
    """Write vectors (or their x/y slices) for each word; header reflects width.

    y subvectors are written as stored, without sign flipping.
    """
    if len(words) != E.n:
        raise ValueError(f"{len(words)} words for {E.n} vector rows")
    cols = _part_slice(part, S, E.d)
    block = E.data[:, cols]
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(f"{E.n} {block.shape[1]}\n")
            for word, row in zip(words, block):
                fh.write(word)
                fh.write(" ")
                fh.write(" ".join(f"{v:.6f}" for v in row))
                fh.write("\n")
    except OSError as exc:
        raise OSError(f"cannot write embeddings to {path}: {exc}") from exc


def load(path) -> tuple[list[str], np.ndarray]:
    """Read an embedding file; returns (words in file order, float32 matrix)."""
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read embeddings from {path}: {exc}") from exc
    with fh:
        header = fh.readline()
        if not header.strip():
            raise EmbeddingFormatError(f"{path}: line 1: missing 'n d' header")
        fields = header.split()
        if len(fields) != 2:
            raise EmbeddingFormatError(f"{path}: line 1: expected 'n d', got {header.strip()!r}")
        try:
            n, d = int(fields[0]), int(fields[1])
        except ValueError:
            raise EmbeddingFormatError(
                f"{path}: line 1: non-integer header {header.strip()!r}"
            ) from None
        if n < 1 or d < 1:
            raise EmbeddingFormatError(f"{path}: line 1: invalid shape {n} x {d}")
        words: list[str] = []
        matrix = np.empty((n, d), dtype=np.float32)
        for idx in range(n):
            line = fh.readline()
            if not line:
                raise EmbeddingFormatError(
                    f"{path}: line {idx + 2}: expected {n} vector lines, found {idx}"
                )
            parts = line.split()
            if len(parts) != d + 1:
                raise EmbeddingFormatError(
                    f"{path}: line {idx + 2}: expected {d + 1} fields, got {len(parts)}"
                )
            words.append(parts[0])
            try:
                matrix[idx] = [float(v) for v in parts[1:]]
            except ValueError:
                raise EmbeddingFormatError(
                    f"{path}: line {idx + 2}: non-numeric vector entry"
                ) from None
    return words, matrix
