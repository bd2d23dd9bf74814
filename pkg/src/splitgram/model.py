"""Tied-weight embedding model: sign signature, signed score, and the x/y split.

There is a single trainable matrix. The context vector of word i is D @ w_i
where D = diag(+1,...,+1, -1,...,-1) with m leading +1s, so the training score
w_j . (D w_i) equals x_j.x_i - y_j.y_i for the split w = [x; y].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SignSignature:
    """Split point m inside dimension d; coordinate k has sign +1 iff k < m.

    The implied diagonal matrix is orthogonal, symmetric and involutive.
    """

    d: int
    m: int

    def __post_init__(self):
        if not 0 < self.m < self.d:
            raise ValueError(f"split index must satisfy 0 < m < d, got m={self.m}, d={self.d}")

    @classmethod
    def half(cls, d: int) -> "SignSignature":
        """Default signature splitting the vector exactly in half (d must be even)."""
        if d % 2 != 0:
            raise ValueError(f"dimension must be even for the half split, got d={d}")
        return cls(d=d, m=d // 2)

    def signs(self, dtype=np.float64) -> np.ndarray:
        out = np.ones(self.d, dtype=dtype)
        out[self.m:] = -1
        return out

    def apply(self, vec: np.ndarray) -> np.ndarray:
        """Return D @ vec (sign-flips coordinates >= m); exact, hence involutive."""
        out = vec.copy()
        out[..., self.m:] = -out[..., self.m:]
        return out


@dataclass
class SplitEmbedding:
    """The two subvectors of one word vector; [x; y] concatenates back to w."""

    x: np.ndarray
    y: np.ndarray


class EmbeddingMatrix:
    """n x d row-major float32 matrix, row i = w_i; the single trainable tensor."""

    def __init__(self, data: np.ndarray):
        data = np.ascontiguousarray(data, dtype=np.float32)
        if data.ndim != 2:
            raise ValueError(f"embedding data must be 2-D, got shape {data.shape}")
        self.data = data

    @property
    def n(self) -> int:
        return self.data.shape[0]

    @property
    def d(self) -> int:
        return self.data.shape[1]

    def row(self, i: int) -> np.ndarray:
        return self.data[i]

    def assert_finite(self) -> None:
        if not np.isfinite(self.data).all():
            bad = np.where(~np.isfinite(self.data).all(axis=1))[0]
            raise FloatingPointError(
                f"non-finite embedding entries in rows {bad[:8].tolist()}"
                + ("..." if len(bad) > 8 else "")
            )


def init_gaussian(n: int, d: int, seed: int) -> EmbeddingMatrix:
    """Isotropic Gaussian init: every entry i.i.d. Normal(0, 1/d).

    E||w_i||^2 = 1 regardless of d. d must be even so the default split is
    exactly half.
    """
    if n < 1:
        raise ValueError(f"vocab size must be >= 1, got {n}")
    if d < 2 or d % 2 != 0:
        raise ValueError(f"dimension must be even and >= 2, got {d}")
    rng = np.random.default_rng(seed)
    data = rng.normal(0.0, 1.0 / math.sqrt(d), size=(n, d))
    return EmbeddingMatrix(data)


def _partial_dots(E: EmbeddingMatrix, S: SignSignature, j: int, i: int, dtype):
    wj = E.data[j].astype(dtype, copy=False)
    wi = E.data[i].astype(dtype, copy=False)
    m = S.m
    xx = wj[:m] @ wi[:m]
    yy = wj[m:] @ wi[m:]
    return float(xx), float(yy)


def score(E: EmbeddingMatrix, S: SignSignature, j: int, i: int, dtype=np.float64) -> float:
    """Signed score w_j . (D w_i) = x_j.x_i - y_j.y_i.

    Shares its accumulation with decompose_dot, so score == xx - yy exactly
    at any dtype. Raises IndexError for out-of-range ids.
    """
    xx, yy = _partial_dots(E, S, j, i, dtype)
    return xx - yy


def split(E: EmbeddingMatrix, S: SignSignature, i: int) -> SplitEmbedding:
    """Views of the x (first m) and y (remaining) coordinates of row i."""
    w = E.data[i]
    return SplitEmbedding(x=w[: S.m], y=w[S.m:])


def decompose_dot(
    E: EmbeddingMatrix, S: SignSignature, j: int, i: int, dtype=np.float64
) -> tuple[float, float, float, float]:
    """All four pairwise quantities at once: (xx, yy, score, dot).

    xx = x_j.x_i, yy = y_j.y_i, score = xx - yy (the context score
    w_j . D w_i) and dot = xx + yy (the plain dot product w_j . w_i).
    """
    xx, yy = _partial_dots(E, S, j, i, dtype)
    return xx, yy, xx - yy, xx + yy
