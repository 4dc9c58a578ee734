"""Coverage audit of a bibliographic database against a local publication list."""

from ._covaudit import (
    ConfigError,
    CovauditError,
    delta_histogram,
    exact_query,
    f1,
    format_percent,
    kendall_tau_b,
    load_stopwords,
    mean_ranks,
    normalize_exact_title,
    pearson,
    precision,
    recall,
    report,
    run,
    spearman,
    tokenize_for_words,
    unique_coverage,
    validate,
    words_query,
)

__all__ = [
    "ConfigError",
    "CovauditError",
    "delta_histogram",
    "exact_query",
    "f1",
    "format_percent",
    "kendall_tau_b",
    "load_stopwords",
    "mean_ranks",
    "normalize_exact_title",
    "pearson",
    "precision",
    "recall",
    "report",
    "run",
    "spearman",
    "tokenize_for_words",
    "unique_coverage",
    "validate",
    "words_query",
]
