"""splitgram: tied-weight SGNS embeddings whose vectors split into a semantic
x-half and a syntactic y-half, plus similarity/analogy/POS evaluation harnesses.
"""

from .analogy import (
    AnalogyQuestion,
    AnalogyResult,
    answer_3cosadd,
    answer_3cosmul,
    evaluate_analogy,
    load_analogy_questions,
)
from .corpus import (
    NoiseDistribution,
    Vocab,
    build_vocab,
    keep_probability,
    read_tokens,
    sample_negative,
    stream_windows,
)
from .embio import EmbeddingFormatError, load, save
from .model import (
    EmbeddingMatrix,
    SignSignature,
    SplitEmbedding,
    decompose_dot,
    init_gaussian,
    score,
    split,
)
from .pos_probe import (
    ProbeConfig,
    SoftmaxRegressor,
    TaggedCorpus,
    build_probe_dataset,
    evaluate_pos,
    load_tagged_corpus,
    run_probe,
    train_softmax,
)
from .similarity import (
    SimilarityResult,
    WordPairDataset,
    cosine,
    evaluate_similarity,
    load_word_pairs,
    spearman,
)
from .trainer import TrainConfig, pair_loss, pair_loss_grad, sgd_step, train

__version__ = "0.1.0"

__all__ = [
    "AnalogyQuestion",
    "AnalogyResult",
    "EmbeddingFormatError",
    "EmbeddingMatrix",
    "NoiseDistribution",
    "ProbeConfig",
    "SignSignature",
    "SimilarityResult",
    "SoftmaxRegressor",
    "SplitEmbedding",
    "TaggedCorpus",
    "TrainConfig",
    "Vocab",
    "WordPairDataset",
    "answer_3cosadd",
    "answer_3cosmul",
    "build_probe_dataset",
    "build_vocab",
    "cosine",
    "decompose_dot",
    "evaluate_analogy",
    "evaluate_pos",
    "evaluate_similarity",
    "init_gaussian",
    "keep_probability",
    "load",
    "load_analogy_questions",
    "load_tagged_corpus",
    "load_word_pairs",
    "pair_loss",
    "pair_loss_grad",
    "read_tokens",
    "run_probe",
    "sample_negative",
    "save",
    "score",
    "sgd_step",
    "split",
    "spearman",
    "stream_windows",
    "train",
    "train_softmax",
]
