"""Feature extraction, tf-idf corpus index and k-nearest-neighbor search."""

from .features import TermBag, extract_names, extract_nl_terms
from .index import (CorpusIndex, FeatureVector, IndexEntry, QueryWeights, build_index,
                    build_index_from_sources, cosine, jaccard, knn_features, knn_query,
                    load_index, save_index)
from .text import split_identifier

__all__ = [
    "TermBag", "extract_names", "extract_nl_terms", "CorpusIndex", "FeatureVector",
    "IndexEntry", "QueryWeights", "build_index", "build_index_from_sources", "cosine",
    "jaccard", "knn_features", "knn_query", "load_index", "save_index", "split_identifier",
]
