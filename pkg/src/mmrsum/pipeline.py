"""Three-stage summarization pipeline.

Stage 1 reduces a document cluster to its most summary-relevant members
(relevance/diversity selection against the gold summary). Stage 2 reorders
each document's sentences by relevance to a topic-word query and truncates to
the model input budget. Stage 3 fuses candidate summaries produced by
external models into one final summary with a second selection pass.

External model inference never happens here: candidate summaries arrive as a
JSONL file, one ``{"model", "id", "summary"}`` object per line.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import (
    Cluster,
    DatasetError,
    DebateRecord,
    Document,
    Sentence,
    _iter_jsonl,
    _require_str,
    split_sentences,
    tokenize_words,
)
from .mmr import MmrProblem, mmr_select
from .rouge import RougeReport, score_pair
from .stopwords import DEFAULT_STOPWORDS
from .topicmodel import (
    LdaConfig,
    Query,
    derive_seed,
    extract_query,
    fit_lda,
    query_to_tokens,
)
from .vectorize import (
    EmbeddingProvider,
    builtin_embedding,
    cosine,
    fit_tfidf,
    transform,
)

__all__ = [
    "CandidateSummary",
    "PipelineConfig",
    "PipelineError",
    "PreparedUnit",
    "RankedDocument",
    "UnitResult",
    "check_candidate_coverage",
    "fuse_summaries",
    "group_candidates",
    "load_candidates",
    "pipeline_config_from_dict",
    "pipeline_config_to_dict",
    "prepare_cluster_unit",
    "prepare_debate_unit",
    "preprocess_cluster",
    "rank_document",
    "run_cluster",
    "run_cluster_unit",
    "run_debate",
    "run_debate_unit",
]


class PipelineError(ValueError):
    """Raised when a pipeline stage cannot run on its inputs."""


@dataclass(frozen=True)
class PipelineConfig:
    """Stage parameters. The defaults are the tuned constants the pipeline
    was designed around: 0.75/top-12 preprocessing, 0.76 ranking, 0.83
    fusion, 512-token model input, 15-token minimum summary."""

    preprocess_lambda: float = 0.75
    preprocess_top_k: int = 12
    rank_lambda: float = 0.76
    fusion_lambda: float = 0.83
    input_token_budget: int = 512
    min_summary_tokens: int = 15
    fusion_sentence_budget: int | str = "from_reference"
    lda: LdaConfig = field(default_factory=LdaConfig)
    embedding: str = "tfidf"
    vectors_path: str | None = None
    use_stopwords: bool = True
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("preprocess_lambda", "rank_lambda", "fusion_lambda"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        for name in ("preprocess_top_k", "input_token_budget", "min_summary_tokens"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        budget = self.fusion_sentence_budget
        if budget != "from_reference" and (not isinstance(budget, int) or budget < 1):
            raise ValueError(
                "fusion_sentence_budget must be 'from_reference' or a positive integer"
            )
        if self.embedding not in ("tfidf", "file"):
            raise ValueError(f"embedding must be 'tfidf' or 'file', got {self.embedding!r}")

    def stopword_set(self) -> frozenset[str] | None:
        return DEFAULT_STOPWORDS if self.use_stopwords else None


def pipeline_config_to_dict(cfg: PipelineConfig) -> dict:
    """Config as a plain dict, the same shape the CLI config file uses."""
    return {
        "preprocess_lambda": cfg.preprocess_lambda,
        "preprocess_top_k": cfg.preprocess_top_k,
        "rank_lambda": cfg.rank_lambda,
        "fusion_lambda": cfg.fusion_lambda,
        "input_token_budget": cfg.input_token_budget,
        "min_summary_tokens": cfg.min_summary_tokens,
        "fusion_sentence_budget": cfg.fusion_sentence_budget,
        "embedding": cfg.embedding,
        "vectors_path": cfg.vectors_path,
        "use_stopwords": cfg.use_stopwords,
        "seed": cfg.seed,
        "lda": {
            "num_topics": cfg.lda.num_topics,
            "words_per_query": cfg.lda.words_per_query,
            "alpha": cfg.lda.alpha,
            "beta": cfg.lda.beta,
            "iterations": cfg.lda.iterations,
            "seed": cfg.lda.seed,
            "filter_stopwords": cfg.lda.filter_stopwords,
        },
    }


def pipeline_config_from_dict(data: Mapping) -> PipelineConfig:
    """Inverse of :func:`pipeline_config_to_dict`; unknown keys are errors."""
    data = dict(data)
    lda_data = dict(data.pop("lda", {}))
    lda_fields = {f for f in LdaConfig.__dataclass_fields__}
    unknown = set(lda_data) - lda_fields
    if unknown:
        raise ValueError(f"unknown lda config keys: {sorted(unknown)}")
    cfg_fields = {f for f in PipelineConfig.__dataclass_fields__} - {"lda"}
    unknown = set(data) - cfg_fields
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(lda=LdaConfig(**lda_data), **data)


@dataclass(frozen=True)
class CandidateSummary:
    """One external model's summary for one unit (document or cluster)."""

    model_name: str
    unit_id: str
    text: str
    sentences: tuple[Sentence, ...]

    @classmethod
    def from_text(cls, model_name: str, unit_id: str, text: str) -> "CandidateSummary":
        if not text.strip():
            raise ValueError(f"candidate ({model_name}, {unit_id}) has empty text")
        return cls(model_name, unit_id, text, tuple(split_sentences(text)))


@dataclass(frozen=True)
class RankedDocument:
    """A document's sentences in relevance order plus the truncated model
    input derived from them."""

    source_id: str
    ranked_sentences: tuple[Sentence, ...]
    truncated_tokens: tuple[str, ...]


@dataclass(frozen=True)
class PreparedUnit:
    """Everything the pipeline derives from one unit before fusion."""

    unit_id: str
    kind: str
    query_source: str
    query_tokens: tuple[str, ...]
    query_weights: tuple[float, ...] | None
    selected_doc_ids: tuple[str, ...] | None
    ranked: tuple[RankedDocument, ...]
    input_tokens: tuple[str, ...]


@dataclass(frozen=True)
class UnitResult:
    """A prepared unit together with its fused summary and ROUGE reports."""

    prepared: PreparedUnit
    fused: Document
    fused_report: RougeReport
    model_reports: dict[str, RougeReport]

    @property
    def unit_id(self) -> str:
        return self.prepared.unit_id


def _as_tokens(query) -> list[str]:
    if isinstance(query, Query):
        return query_to_tokens(query)
    return list(query)


def _fit_for_similarity(token_lists, stopwords):
    try:
        return fit_tfidf(token_lists, stopwords=stopwords)
    except ValueError:
        if stopwords is None:
            raise
        # A stopword-only vocabulary would make every similarity undefined.
        return fit_tfidf(token_lists, stopwords=None)


def preprocess_cluster(
    cluster: Cluster, cfg: PipelineConfig, emb: EmbeddingProvider
) -> Cluster:
    """Reduce a cluster to its top documents.

    Selection runs against the gold summary as the query, relevance weight
    ``cfg.preprocess_lambda``, keeping ``min(cfg.preprocess_top_k, |docs|)``
    documents in selection order.
    """
    documents = cluster.documents
    k = min(cfg.preprocess_top_k, len(documents))
    gold = cluster.gold_summary
    gold_vector = emb.embed(gold.raw_text, text_id=gold.id)
    vectors = tuple(emb.embed(doc.raw_text, text_id=doc.id) for doc in documents)
    selection = mmr_select(
        MmrProblem(
            ids=tuple(doc.id for doc in documents),
            items=vectors,
            query=gold_vector,
            lam=cfg.preprocess_lambda,
            sim1=cosine,
            sim2=cosine,
            k=k,
        )
    )
    by_id = {doc.id: doc for doc in documents}
    chosen = tuple(by_id[doc_id] for doc_id in selection.selected_ids)
    return Cluster(cluster.id, chosen, cluster.gold_summary, cluster.query)


def rank_document(doc: Document, query, cfg: PipelineConfig) -> RankedDocument:
    """Reorder a document's sentences by marginal relevance to the query.

    tf-idf is fit on the document's own sentences; the output keeps every
    sentence (a permutation) and separately truncates the reordered token
    stream to ``cfg.input_token_budget``.
    """
    if not doc.sentences:
        raise PipelineError(f"document {doc.id!r} has no sentences to rank")
    query_tokens = _as_tokens(query)
    if not query_tokens:
        raise PipelineError(f"query for document {doc.id!r} has no tokens")
    model = _fit_for_similarity(
        [sentence.tokens for sentence in doc.sentences], cfg.stopword_set()
    )
    vectors = tuple(transform(model, sentence.tokens) for sentence in doc.sentences)
    query_vector = transform(model, query_tokens)
    selection = mmr_select(
        MmrProblem(
            ids=tuple(range(len(doc.sentences))),
            items=vectors,
            query=query_vector,
            lam=cfg.rank_lambda,
            sim1=cosine,
            sim2=cosine,
            k=len(doc.sentences),
        )
    )
    ranked = tuple(doc.sentences[index] for index in selection.selected_ids)
    truncated: list[str] = []
    for sentence in ranked:
        if len(truncated) >= cfg.input_token_budget:
            break
        truncated.extend(sentence.tokens)
    return RankedDocument(doc.id, ranked, tuple(truncated[: cfg.input_token_budget]))


def fuse_summaries(
    candidates: Sequence[CandidateSummary],
    query,
    reference: Document | None,
    cfg: PipelineConfig,
) -> Document:
    """Fuse candidate summaries into one final summary.

    The sentence pool is every candidate sentence in stable order (candidate
    order, then sentence order). tf-idf is fit on the pool plus the query;
    selection keeps as many sentences as the reference has (or the fixed
    budget), then keeps appending picks while the result is shorter than
    ``cfg.min_summary_tokens`` and the pool has more to give. Pure
    extractive fusion: every emitted sentence exists in some candidate.
    """
    if not candidates:
        raise PipelineError("fuse_summaries needs at least one candidate")
    unit_ids = {candidate.unit_id for candidate in candidates}
    if len(unit_ids) != 1:
        raise PipelineError(f"candidates span multiple units: {sorted(unit_ids)}")
    pool: list[Sentence] = []
    for candidate in candidates:
        pool.extend(candidate.sentences)
    if not pool:
        raise PipelineError("candidate pool has no sentences")

    query_tokens = _as_tokens(query)
    if cfg.fusion_sentence_budget == "from_reference":
        if reference is None:
            raise PipelineError(
                "fusion_sentence_budget='from_reference' needs a reference summary"
            )
        budget = len(reference.sentences)
    else:
        budget = int(cfg.fusion_sentence_budget)
    k = min(budget, len(pool))

    model = _fit_for_similarity(
        [sentence.tokens for sentence in pool] + [query_tokens], cfg.stopword_set()
    )
    vectors = tuple(transform(model, sentence.tokens) for sentence in pool)
    query_vector = transform(model, query_tokens)
    # Rank the full pool once; greedy prefixes are stable, so the first k
    # picks match a k-limited run and the tail supplies the length top-up.
    selection = mmr_select(
        MmrProblem(
            ids=tuple(range(len(pool))),
            items=vectors,
            query=query_vector,
            lam=cfg.fusion_lambda,
            sim1=cosine,
            sim2=cosine,
            k=len(pool),
        )
    )
    order = list(selection.selected_ids)
    chosen = order[:k]
    token_count = sum(len(pool[index].tokens) for index in chosen)
    follow = k
    while token_count < cfg.min_summary_tokens and follow < len(order):
        index = order[follow]
        follow += 1
        chosen.append(index)
        token_count += len(pool[index].tokens)

    unit_id = candidates[0].unit_id
    return Document.from_sentences(unit_id, [pool[index] for index in chosen])


def _interleave(ranked: Sequence[RankedDocument]) -> list[Sentence]:
    """Round-robin across documents: everyone's best sentence first."""
    rows = [rd.ranked_sentences for rd in ranked]
    longest = max(len(row) for row in rows)
    out: list[Sentence] = []
    for position in range(longest):
        for row in rows:
            if position < len(row):
                out.append(row[position])
    return out


def _truncate_tokens(sentences: Sequence[Sentence], budget: int) -> tuple[str, ...]:
    tokens: list[str] = []
    for sentence in sentences:
        if len(tokens) >= budget:
            break
        tokens.extend(sentence.tokens)
    return tuple(tokens[:budget])


def _lda_query(doc: Document, cfg: PipelineConfig) -> Query:
    lda_cfg = replace(cfg.lda, seed=derive_seed(cfg.seed, doc.id))
    state = fit_lda(doc, lda_cfg)
    return extract_query(state, lda_cfg)


def prepare_cluster_unit(
    cluster: Cluster, cfg: PipelineConfig, emb: EmbeddingProvider | None = None
) -> PreparedUnit:
    """Stages 1 and 2 for a cluster: preprocess, derive the query, rank each
    kept document, and interleave the ranked sentences round-robin into the
    truncated model input."""
    if emb is None:
        emb = builtin_embedding(
            [doc.raw_text for doc in cluster.documents]
            + [cluster.gold_summary.raw_text],
            stopwords=cfg.stopword_set(),
        )
    reduced = preprocess_cluster(cluster, cfg, emb)

    if cluster.query is not None:
        query: Query = cluster.query
        query_source = "provided"
    else:
        merged = Document.from_sentences(
            cluster.id,
            [sentence for doc in reduced.documents for sentence in doc.sentences],
        )
        query = _lda_query(merged, cfg)
        query_source = "lda"

    ranked = tuple(rank_document(doc, query, cfg) for doc in reduced.documents)
    input_tokens = _truncate_tokens(_interleave(ranked), cfg.input_token_budget)
    return PreparedUnit(
        unit_id=cluster.id,
        kind="cluster",
        query_source=query_source,
        query_tokens=tuple(query_to_tokens(query)),
        query_weights=tuple(weight for _, weight in query.terms),
        selected_doc_ids=tuple(doc.id for doc in reduced.documents),
        ranked=ranked,
        input_tokens=input_tokens,
    )


def prepare_debate_unit(record: DebateRecord, cfg: PipelineConfig) -> PreparedUnit:
    """Stage 2 for a single-document record; no preprocessing happens.

    The record's own query text is used whenever it carries word tokens;
    only then is the topic model skipped.
    """
    provided = tuple(tokenize_words(record.query_text))
    if provided:
        query_tokens = provided
        query_source = "provided"
        query_weights = None
        query = provided
    else:
        lda_query = _lda_query(record.document, cfg)
        query_tokens = tuple(query_to_tokens(lda_query))
        query_source = "lda"
        query_weights = tuple(weight for _, weight in lda_query.terms)
        query = lda_query
    ranked = rank_document(record.document, query, cfg)
    return PreparedUnit(
        unit_id=record.document.id,
        kind="debate",
        query_source=query_source,
        query_tokens=query_tokens,
        query_weights=query_weights,
        selected_doc_ids=None,
        ranked=(ranked,),
        input_tokens=ranked.truncated_tokens,
    )


def _finish_unit(
    prepared: PreparedUnit,
    candidates: Sequence[CandidateSummary],
    reference: Document,
    cfg: PipelineConfig,
) -> UnitResult:
    if not candidates:
        raise PipelineError(f"no candidate summaries supplied for unit {prepared.unit_id!r}")
    stray = sorted({c.unit_id for c in candidates} - {prepared.unit_id})
    if stray:
        raise PipelineError(
            f"candidates for unit {prepared.unit_id!r} carry foreign ids: {stray}"
        )
    fused = fuse_summaries(candidates, prepared.query_tokens, reference, cfg)
    reference_tokens = reference.tokens()
    fused_report = score_pair(tokenize_words(fused.raw_text), reference_tokens)
    model_reports = {
        candidate.model_name: score_pair(
            tokenize_words(candidate.text), reference_tokens
        )
        for candidate in sorted(candidates, key=lambda c: c.model_name)
    }
    return UnitResult(prepared, fused, fused_report, model_reports)


def run_cluster_unit(
    cluster: Cluster,
    candidates: Sequence[CandidateSummary],
    cfg: PipelineConfig,
    emb: EmbeddingProvider | None = None,
) -> UnitResult:
    """Full pipeline for one cluster with its candidate summaries."""
    prepared = prepare_cluster_unit(cluster, cfg, emb)
    return _finish_unit(prepared, candidates, cluster.gold_summary, cfg)


def run_cluster(
    cluster: Cluster,
    candidates: Sequence[CandidateSummary],
    cfg: PipelineConfig,
    emb: EmbeddingProvider | None = None,
) -> tuple[Document, RougeReport]:
    """Final summary and its ROUGE report for one cluster."""
    result = run_cluster_unit(cluster, candidates, cfg, emb)
    return result.fused, result.fused_report


def run_debate_unit(
    record: DebateRecord,
    candidates: Sequence[CandidateSummary],
    cfg: PipelineConfig,
) -> UnitResult:
    """Full pipeline for one (query, document, summary) record."""
    prepared = prepare_debate_unit(record, cfg)
    return _finish_unit(prepared, candidates, record.gold_summary, cfg)


def run_debate(
    record: DebateRecord,
    candidates: Sequence[CandidateSummary],
    cfg: PipelineConfig,
) -> tuple[Document, RougeReport]:
    """Final summary and its ROUGE report for one record."""
    result = run_debate_unit(record, candidates, cfg)
    return result.fused, result.fused_report


def load_candidates(path: str | Path) -> list[CandidateSummary]:
    """Load and validate a candidate-summaries JSONL file.

    Each line is ``{"model": str, "id": str, "summary": str}``; duplicate
    (model, id) pairs are rejected. This is the ingestion boundary for
    external model output.
    """
    path = Path(path)
    candidates: list[CandidateSummary] = []
    seen: set[tuple[str, str]] = set()
    try:
        for lineno, obj in _iter_jsonl(path):
            model = _require_str(obj, "model", path, lineno)
            unit_id = _require_str(obj, "id", path, lineno)
            summary = _require_str(obj, "summary", path, lineno)
            key = (model, unit_id)
            if key in seen:
                raise DatasetError(
                    f"{path}: line {lineno}: duplicate (model, id) pair {key!r}"
                )
            seen.add(key)
            candidates.append(CandidateSummary.from_text(model, unit_id, summary))
    except UnicodeDecodeError as exc:
        raise DatasetError(f"{path}: file is not valid UTF-8 ({exc})") from exc
    return candidates


def group_candidates(
    candidates: Sequence[CandidateSummary],
) -> dict[str, list[CandidateSummary]]:
    """Candidates grouped by unit id, file order preserved inside a unit."""
    grouped: dict[str, list[CandidateSummary]] = {}
    for candidate in candidates:
        grouped.setdefault(candidate.unit_id, []).append(candidate)
    return grouped


def check_candidate_coverage(
    candidates: Sequence[CandidateSummary],
    unit_ids: Sequence[str],
    models: Sequence[str] | None = None,
) -> list[str]:
    """Verify every (model, unit) pair exists before any work starts.

    Returns the sorted model list; raises :class:`PipelineError` naming every
    missing pair otherwise.
    """
    names = sorted({c.model_name for c in candidates}) if models is None else sorted(models)
    if not names:
        raise PipelineError("candidate file declares no models")
    have = {(c.model_name, c.unit_id) for c in candidates}
    missing = [(m, u) for m in names for u in unit_ids if (m, u) not in have]
    if missing:
        listing = ", ".join(f"({model}, {unit})" for model, unit in missing)
        raise PipelineError(
            f"candidate file is missing {len(missing)} (model, id) rows: {listing}"
        )
    return names
