import numpy as np
import pytest

from splitgram import EmbeddingMatrix, SignSignature


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def small_embeddings(rng):
    """8 words, d=6, m=3; random but reproducible."""
    data = rng.normal(0, 0.5, size=(8, 6)).astype(np.float32)
    words = [f"w{i}" for i in range(8)]
    ids = {w: i for i, w in enumerate(words)}
    return EmbeddingMatrix(data), SignSignature(d=6, m=3), words, ids
