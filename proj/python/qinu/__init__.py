"""Quality-in-use prediction from software review text."""

from ._core import (
    Model,
    QinuError,
    build_lexicon,
    cross_validate,
    generate_fixture,
    qinu_score,
    run_cli,
    score_polarity,
    segment,
    sentence_similarity,
    tokenize,
    top_keywords,
    word_similarity,
)

__all__ = [
    "Model",
    "QinuError",
    "build_lexicon",
    "cross_validate",
    "generate_fixture",
    "qinu_score",
    "run_cli",
    "score_polarity",
    "segment",
    "sentence_similarity",
    "tokenize",
    "top_keywords",
    "word_similarity",
]
