"""Data-centric evaluation: per-instance data dimensions, stratified
significance tests, dataset similarity and out-of-distribution prediction."""

from ._core import (
    IoError,
    ValidationError,
    ambiguity,
    analyze,
    bootstrap_bounds,
    cls_macro_f1,
    compare,
    compare_models,
    difficulty,
    features,
    fit_2pl,
    fit_ood,
    kendall_tau,
    normalize_answer,
    percentile,
    perplexity,
    predict_ood,
    qa_exact,
    qa_token_f1,
    random_samples,
    read_features,
    sample,
    scale_column,
    set_warnings,
    smd,
)

DIMENSIONS = ("ambiguity", "difficulty", "discriminability", "length", "noise", "perplexity")

__all__ = [name for name in dir() if not name.startswith("_")]
