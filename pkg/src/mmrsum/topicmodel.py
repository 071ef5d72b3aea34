"""Per-document LDA via collapsed Gibbs sampling; top topic words form the query.

A document's sentences act as the pseudo-documents of the topic model, so a
single document is enough to fit on. With one topic the sampler is degenerate
and the extracted query ordering provably equals term-frequency ordering; more
topics run the usual collapsed Gibbs sweeps.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import Document
from .stopwords import DEFAULT_STOPWORDS

__all__ = [
    "LdaConfig",
    "LdaError",
    "LdaState",
    "Query",
    "derive_seed",
    "extract_query",
    "fit_lda",
    "query_to_tokens",
]


class LdaError(ValueError):
    """Raised when a document cannot support topic inference."""


@dataclass(frozen=True)
class LdaConfig:
    """Topic model hyperparameters.

    ``alpha`` and ``beta`` are the symmetric Dirichlet priors on the
    document-topic and topic-word distributions.
    """

    num_topics: int = 1
    words_per_query: int = 5
    alpha: float = 0.1
    beta: float = 0.01
    iterations: int = 200
    seed: int = 0
    filter_stopwords: bool = True

    def __post_init__(self) -> None:
        if self.num_topics < 1:
            raise ValueError(f"num_topics must be positive, got {self.num_topics}")
        if self.words_per_query < 1:
            raise ValueError(f"words_per_query must be positive, got {self.words_per_query}")
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.iterations < 1:
            raise ValueError(f"iterations must be positive, got {self.iterations}")


@dataclass(frozen=True)
class LdaState:
    """Sampler output: topic assignments plus the count aggregates they imply.

    ``doc_tokens[m][n]`` is the vocabulary id of word position ``n`` in
    pseudo-document (sentence) ``m``; ``z[m][n]`` its topic assignment.
    """

    doc_id: str
    vocabulary: tuple[str, ...]
    doc_tokens: tuple[tuple[int, ...], ...]
    z: tuple[tuple[int, ...], ...]
    doc_topic_counts: np.ndarray
    topic_word_counts: np.ndarray
    topic_totals: np.ndarray
    num_topics: int

    def topic_word_posterior(self, beta: float) -> np.ndarray:
        """Smoothed per-topic word distributions; each row sums to 1."""
        counts = self.topic_word_counts.astype(float) + beta
        return counts / counts.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class Query:
    """Ordered (word, posterior weight) terms extracted from one document."""

    terms: tuple[tuple[str, float], ...]
    source_doc_id: str

    def __post_init__(self) -> None:
        if not self.terms:
            raise ValueError("a query needs at least one term")


def fit_lda(doc: Document, config: LdaConfig = LdaConfig()) -> LdaState:
    """Fit the topic model on one document, sentences as pseudo-documents.

    Runs ``config.iterations`` collapsed Gibbs sweeps over every token
    position; deterministic for a fixed seed. Raises :class:`LdaError` when
    stopword filtering leaves no tokens (disable ``filter_stopwords`` or skip
    the document) or when ``num_topics`` exceeds the vocabulary size.
    """
    stop = DEFAULT_STOPWORDS if config.filter_stopwords else frozenset()
    sentence_tokens = [
        [t for t in sentence.tokens if t not in stop] for sentence in doc.sentences
    ]
    types = sorted({t for tokens in sentence_tokens for t in tokens})
    if not types:
        raise LdaError(
            f"document {doc.id!r} has no tokens after stopword filtering; "
            "disable filter_stopwords or skip the document"
        )
    if config.num_topics > len(types):
        raise LdaError(
            f"num_topics={config.num_topics} exceeds the vocabulary size "
            f"{len(types)} of document {doc.id!r}"
        )
    vocab_index = {t: i for i, t in enumerate(types)}
    docs = [[vocab_index[t] for t in tokens] for tokens in sentence_tokens]

    k, v = config.num_topics, len(types)
    doc_topic = np.zeros((len(docs), k), dtype=np.int64)
    topic_word = np.zeros((k, v), dtype=np.int64)
    topic_totals = np.zeros(k, dtype=np.int64)
    z: list[list[int]] = [[0] * len(tokens) for tokens in docs]

    if k == 1:
        # Degenerate case: every assignment is topic 0, no sampling needed.
        for m, tokens in enumerate(docs):
            for w in tokens:
                doc_topic[m, 0] += 1
                topic_word[0, w] += 1
                topic_totals[0] += 1
    else:
        rng = np.random.default_rng(config.seed)
        initial = rng.integers(0, k, size=sum(len(tokens) for tokens in docs))
        position = 0
        for m, tokens in enumerate(docs):
            for n, w in enumerate(tokens):
                t = int(initial[position])
                position += 1
                z[m][n] = t
                doc_topic[m, t] += 1
                topic_word[t, w] += 1
                topic_totals[t] += 1

        v_beta = v * config.beta
        for _ in range(config.iterations):
            for m, tokens in enumerate(docs):
                row = doc_topic[m]
                assignments = z[m]
                for n, w in enumerate(tokens):
                    t = assignments[n]
                    row[t] -= 1
                    topic_word[t, w] -= 1
                    topic_totals[t] -= 1
                    weights = (
                        (row + config.alpha)
                        * (topic_word[:, w] + config.beta)
                        / (topic_totals + v_beta)
                    )
                    cumulative = np.cumsum(weights)
                    draw = rng.random() * cumulative[-1]
                    t = int(np.searchsorted(cumulative, draw, side="right"))
                    if t == k:  # floating-point edge at the top of the range
                        t = k - 1
                    assignments[n] = t
                    row[t] += 1
                    topic_word[t, w] += 1
                    topic_totals[t] += 1

    return LdaState(
        doc_id=doc.id,
        vocabulary=tuple(types),
        doc_tokens=tuple(tuple(tokens) for tokens in docs),
        z=tuple(tuple(assignments) for assignments in z),
        doc_topic_counts=doc_topic,
        topic_word_counts=topic_word,
        topic_totals=topic_totals,
        num_topics=k,
    )


def extract_query(state: LdaState, config: LdaConfig) -> Query:
    """Top ``words_per_query`` words of the dominant topic.

    Words are ordered by smoothed topic-word posterior, ties broken by
    vocabulary order; with several topics the one holding the most
    assignments wins (lowest topic index on ties).
    """
    topic = int(np.argmax(state.topic_totals))
    counts = state.topic_word_counts[topic]
    denominator = float(state.topic_totals[topic]) + len(state.vocabulary) * config.beta
    order = sorted(range(len(state.vocabulary)), key=lambda i: (-int(counts[i]), i))
    top = order[: min(config.words_per_query, len(order))]
    terms = tuple(
        (state.vocabulary[i], float(counts[i] + config.beta) / denominator) for i in top
    )
    return Query(terms, state.doc_id)


def query_to_tokens(query: Query) -> list[str]:
    """Query words in weight order; the weights are dropped."""
    return [word for word, _ in query.terms]


def derive_seed(base_seed: int, unit_id: str) -> int:
    """Stable per-unit seed so units can be processed in any order or in
    parallel without losing reproducibility."""
    digest = hashlib.blake2b(
        f"{base_seed}:{unit_id}".encode("utf-8"), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")
