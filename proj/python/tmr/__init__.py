"""Translation memory retrieval: edit distance, sentence embeddings and METEOR evaluation."""

from ._core import (
    ArgumentError,
    Error,
    IoError,
    Memory,
    ParseError,
    align_exact,
    cosine,
    deterministic_embed,
    evaluate_sts,
    fuzzy_score,
    levenshtein,
    meteor_score,
    mse,
    normalize,
    pearson,
    run_cli,
    spearman,
    tokenize,
)

__all__ = [
    "ArgumentError",
    "Error",
    "IoError",
    "Memory",
    "ParseError",
    "align_exact",
    "cosine",
    "deterministic_embed",
    "evaluate_sts",
    "fuzzy_score",
    "levenshtein",
    "meteor_score",
    "mse",
    "normalize",
    "pearson",
    "run_cli",
    "spearman",
    "tokenize",
]
