"""tf-idf vectors, cosine similarity, and document embedding providers.

The embedding side is pluggable: the default provider re-uses the tf-idf
model (deterministic, self-contained), while :class:`FileEmbedding` serves
precomputed vectors (e.g. real doc2vec output) from a JSONL file.
"""

from __future__ import annotations

import json
import math
from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .corpus import DEFAULT_TOKENIZER, TokenizerConfig, tokenize_words
from .stopwords import DEFAULT_STOPWORDS

__all__ = [
    "EmbeddingProvider",
    "FileEmbedding",
    "SparseVector",
    "TfIdfModel",
    "TfidfEmbedding",
    "builtin_embedding",
    "cosine",
    "fit_tfidf",
    "transform",
]


@dataclass(frozen=True)
class SparseVector:
    """Sparse vector as parallel (index, weight) tuples, indices strictly
    increasing. Vectors produced by :func:`transform` are L2-normalized or
    all-zero."""

    indices: tuple[int, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.weights):
            raise ValueError("indices and weights must have equal length")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if not all(math.isfinite(w) for w in self.weights):
            raise ValueError("weights must be finite")

    @property
    def norm(self) -> float:
        return math.sqrt(sum(w * w for w in self.weights))

    def dot(self, other: "SparseVector") -> float:
        total = 0.0
        i, j = 0, 0
        while i < len(self.indices) and j < len(other.indices):
            a, b = self.indices[i], other.indices[j]
            if a == b:
                total += self.weights[i] * other.weights[j]
                i += 1
                j += 1
            elif a < b:
                i += 1
            else:
                j += 1
        return total


@dataclass(frozen=True)
class TfIdfModel:
    """Fitted idf weights over a dense, lexicographically ordered vocabulary."""

    vocabulary: dict[str, int]
    idf: tuple[float, ...]
    doc_count: int
    stopwords_applied: bool


def fit_tfidf(
    texts: Sequence[Sequence[str]],
    stopwords: Iterable[str] | None = None,
) -> TfIdfModel:
    """Fit idf weights on token lists: ``idf(t) = ln((1+N)/(1+df(t))) + 1``.

    Stopwords, when given, are excluded from the vocabulary entirely.
    """
    if not texts:
        raise ValueError("fit_tfidf needs at least one text")
    stop = frozenset(stopwords) if stopwords is not None else frozenset()
    df: Counter[str] = Counter()
    for tokens in texts:
        df.update({t for t in tokens if t not in stop})
    if not df:
        raise ValueError("all texts are empty after stopword filtering")
    ordered = sorted(df)
    vocabulary = {token: index for index, token in enumerate(ordered)}
    n = len(texts)
    idf = tuple(math.log((1 + n) / (1 + df[token])) + 1.0 for token in ordered)
    return TfIdfModel(vocabulary, idf, n, stopwords_applied=bool(stop))


def transform(model: TfIdfModel, tokens: Sequence[str]) -> SparseVector:
    """Raw term counts times idf, L2-normalized.

    Out-of-vocabulary tokens are ignored; all-OOV input yields the zero
    vector.
    """
    counts = Counter(t for t in tokens if t in model.vocabulary)
    if not counts:
        return SparseVector((), ())
    pairs = sorted(
        (model.vocabulary[token], count * model.idf[model.vocabulary[token]])
        for token, count in counts.items()
    )
    norm = math.sqrt(sum(w * w for _, w in pairs))
    return SparseVector(
        tuple(i for i, _ in pairs),
        tuple(w / norm for _, w in pairs),
    )


def cosine(a, b) -> float:
    """Cosine similarity between two sparse or two dense vectors.

    Zero vectors compare as 0.0 by convention; mixing sparse with dense or
    mismatched dense shapes is an error.
    """
    sparse_a = isinstance(a, SparseVector)
    sparse_b = isinstance(b, SparseVector)
    if sparse_a and sparse_b:
        norm_a, norm_b = a.norm, b.norm
        if norm_a == 0.0 or norm_b == 0.0:
            return 0.0
        return a.dot(b) / (norm_a * norm_b)
    if sparse_a or sparse_b:
        raise ValueError("cannot compare a sparse vector with a dense one")
    vec_a = np.asarray(a, dtype=float)
    vec_b = np.asarray(b, dtype=float)
    if vec_a.shape != vec_b.shape:
        raise ValueError(f"dimension mismatch: {vec_a.shape} vs {vec_b.shape}")
    norm_a = float(np.linalg.norm(vec_a))
    norm_b = float(np.linalg.norm(vec_b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    return float(np.dot(vec_a, vec_b) / (norm_a * norm_b))


class EmbeddingProvider(ABC):
    """Maps a text to a vector. Same input must always yield the same vector."""

    @abstractmethod
    def embed(self, text: str, text_id: str | None = None):
        """Vector for ``text``. Providers backed by precomputed vector files
        key on ``text_id`` instead of the text body."""


class TfidfEmbedding(EmbeddingProvider):
    """Deterministic stand-in for neural document embeddings: tf-idf vectors
    fit once on a fixed corpus."""

    def __init__(self, model: TfIdfModel, tokenizer: TokenizerConfig = DEFAULT_TOKENIZER):
        self._model = model
        self._tokenizer = tokenizer

    def embed(self, text: str, text_id: str | None = None) -> SparseVector:
        return transform(self._model, tokenize_words(text, self._tokenizer))


class FileEmbedding(EmbeddingProvider):
    """Serves precomputed vectors keyed by text id, loaded from a JSONL file
    of ``{"text_id": str, "vector": [float, ...]}`` lines."""

    def __init__(self, vectors: dict[str, np.ndarray], dimension: int):
        self._vectors = vectors
        self.dimension = dimension

    @classmethod
    def from_file(cls, path: str | Path) -> "FileEmbedding":
        path = Path(path)
        vectors: dict[str, np.ndarray] = {}
        dimension: int | None = None
        with path.open("r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ValueError(
                        f"{path}: line {lineno}: invalid JSON ({exc.msg})"
                    ) from exc
                text_id = obj.get("text_id")
                raw = obj.get("vector")
                if not isinstance(text_id, str) or not isinstance(raw, list):
                    raise ValueError(
                        f"{path}: line {lineno}: expected 'text_id' and 'vector' fields"
                    )
                vector = np.asarray(raw, dtype=float)
                if dimension is None:
                    dimension = vector.shape[0]
                elif vector.shape[0] != dimension:
                    raise ValueError(
                        f"{path}: line {lineno}: vector length {vector.shape[0]} "
                        f"differs from earlier length {dimension}"
                    )
                vectors[text_id] = vector
        if dimension is None:
            raise ValueError(f"{path}: no vectors found")
        return cls(vectors, dimension)

    def embed(self, text: str, text_id: str | None = None) -> np.ndarray:
        key = text_id if text_id is not None else text
        try:
            return self._vectors[key]
        except KeyError:
            raise ValueError(f"no precomputed vector for text id {key!r}") from None


def builtin_embedding(
    texts: Sequence[str],
    stopwords: Iterable[str] | None = DEFAULT_STOPWORDS,
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
) -> TfidfEmbedding:
    """Default embedding provider: tf-idf fit on the given corpus."""
    if not texts:
        raise ValueError("builtin_embedding needs a non-empty corpus")
    token_lists = [tokenize_words(text, tokenizer) for text in texts]
    try:
        model = fit_tfidf(token_lists, stopwords=stopwords)
    except ValueError:
        # Stopword-only corpora would otherwise have no vocabulary at all.
        model = fit_tfidf(token_lists, stopwords=None)
    return TfidfEmbedding(model, tokenizer)
