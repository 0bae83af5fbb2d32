"""Account feature extraction and labeling heuristics."""
from .extract import (
    CLIENT_BUCKETS,
    COLUMN_NAMES,
    FEATURE_NAMES,
    CorpusStats,
    EmptyTimelineError,
    FeatureTable,
    client_tfidf,
    extract_features,
    extract_store,
    features_by_name,
    zip_ratio,
)
from .labels import LabelSuggestion, suggest_labels, write_suggestions
from .simhash import hamming, similar_counts, simhash64, simhash_many
from .timing import chi_square_seconds, longest_breaks

__all__ = [
    "CLIENT_BUCKETS", "COLUMN_NAMES", "FEATURE_NAMES", "CorpusStats", "EmptyTimelineError",
    "FeatureTable", "LabelSuggestion", "chi_square_seconds", "client_tfidf",
    "extract_features", "extract_store", "features_by_name", "hamming", "longest_breaks",
    "similar_counts", "simhash64", "simhash_many", "suggest_labels", "write_suggestions",
    "zip_ratio",
]
