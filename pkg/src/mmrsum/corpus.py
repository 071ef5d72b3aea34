"""Core text types, word/sentence tokenization, and JSONL dataset loaders.

The corpus layer is deliberately lossless: no stopword removal, no stemming.
Everything downstream (tf-idf, topic modeling) decides for itself what to
filter, so the same :class:`Document` can feed similarity ranking and ROUGE
scoring without re-reading the source file.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Iterator, Sequence

if TYPE_CHECKING:
    from .topicmodel import Query

__all__ = [
    "DEFAULT_ABBREVIATIONS",
    "Cluster",
    "DatasetError",
    "DebateRecord",
    "Document",
    "Sentence",
    "TokenizerConfig",
    "load_cluster_dataset",
    "load_debate_dataset",
    "normalize_text",
    "split_sentences",
    "tokenize_words",
]


class DatasetError(ValueError):
    """A dataset file violated the expected JSONL schema."""


#: Words that never terminate a sentence even when followed by ". " and an
#: uppercase letter. Stored lowercase, without the trailing period.
DEFAULT_ABBREVIATIONS = frozenset({"dr", "mr", "mrs", "ms", "u.s", "e.g", "i.e", "etc"})


@dataclass(frozen=True)
class TokenizerConfig:
    """Word tokenizer settings.

    The defaults keep Unicode letters and digits, lowercase everything, and
    preserve ``.`` and ``'`` only between alphanumerics, so ``"U.S."`` becomes
    ``"u.s"`` and ``"don't"`` stays whole. Leading and trailing punctuation is
    always stripped.
    """

    lowercase: bool = True
    interior_chars: str = ".'"


DEFAULT_TOKENIZER = TokenizerConfig()


@lru_cache(maxsize=16)
def _word_pattern(interior_chars: str) -> re.Pattern[str]:
    # [^\W_] = Unicode alphanumeric without the underscore.
    inner = re.escape(interior_chars)
    return re.compile(rf"[^\W_]+(?:[{inner}][^\W_]+)*")


def tokenize_words(text: str, config: TokenizerConfig = DEFAULT_TOKENIZER) -> list[str]:
    """Split ``text`` into word tokens; punctuation never survives.

    Deterministic for a fixed input and config; empty input yields ``[]``.
    """
    if config.lowercase:
        text = text.lower()
    return _word_pattern(config.interior_chars).findall(text)


def normalize_text(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())


@dataclass(frozen=True)
class Sentence:
    """One sentence: 0-based position in its document, raw text, word tokens."""

    index: int
    text: str
    tokens: tuple[str, ...]


def _word_before(text: str, pos: int) -> str:
    """Token-ish characters immediately left of ``text[pos]``."""
    start = pos
    while start > 0 and (text[start - 1].isalnum() or text[start - 1] in ".'"):
        start -= 1
    return text[start:pos].strip(".'")


def split_sentences(
    text: str,
    extra_abbreviations: Iterable[str] = (),
    tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
) -> list[Sentence]:
    """Split text into sentences at ``.``, ``!`` or ``?`` followed by
    whitespace and an uppercase letter.

    Words on the abbreviation exception list (:data:`DEFAULT_ABBREVIATIONS`,
    extendable via ``extra_abbreviations``) never end a sentence. Every
    non-whitespace character lands in exactly one sentence, and fragments
    without any word token are merged into a neighbor so each returned
    sentence carries at least one token. Text with no word tokens at all
    yields an empty list.
    """
    abbrevs = DEFAULT_ABBREVIATIONS | {
        a.lower().rstrip(".") for a in extra_abbreviations
    }

    # (end-of-terminator, start-of-next-sentence) cut positions.
    cuts: list[tuple[int, int]] = []
    for match in re.finditer(r"[.!?]", text):
        end = match.end()
        nxt = end
        while nxt < len(text) and text[nxt].isspace():
            nxt += 1
        if nxt == end or nxt >= len(text):
            continue
        if not text[nxt].isupper():
            continue
        if match.group() == "." and _word_before(text, match.start()).lower() in abbrevs:
            continue
        cuts.append((end, nxt))

    pieces: list[str] = []
    prev = 0
    for end, nxt in cuts:
        pieces.append(text[prev:end])
        prev = nxt
    pieces.append(text[prev:])

    assembled: list[tuple[str, list[str]]] = []
    pending = ""
    for piece in pieces:
        piece = piece.strip()
        if not piece:
            continue
        if pending:
            piece = f"{pending} {piece}"
            pending = ""
        tokens = tokenize_words(piece, tokenizer)
        if not tokens:
            pending = piece
            continue
        assembled.append((piece, tokens))
    if pending and assembled:
        last_text, _ = assembled[-1]
        merged = f"{last_text} {pending}"
        assembled[-1] = (merged, tokenize_words(merged, tokenizer))

    return [
        Sentence(index, sent_text, tuple(tokens))
        for index, (sent_text, tokens) in enumerate(assembled)
    ]


@dataclass(frozen=True)
class Document:
    """A tokenized source text with sentence boundaries."""

    id: str
    raw_text: str
    sentences: tuple[Sentence, ...]

    @classmethod
    def from_text(
        cls,
        doc_id: str,
        text: str,
        extra_abbreviations: Iterable[str] = (),
        tokenizer: TokenizerConfig = DEFAULT_TOKENIZER,
    ) -> "Document":
        return cls(doc_id, text, tuple(split_sentences(text, extra_abbreviations, tokenizer)))

    @classmethod
    def from_sentences(cls, doc_id: str, sentences: Sequence[Sentence]) -> "Document":
        """Build a document from existing sentences, reindexing them."""
        reindexed = tuple(
            Sentence(index, sent.text, sent.tokens) for index, sent in enumerate(sentences)
        )
        return cls(doc_id, " ".join(sent.text for sent in reindexed), reindexed)

    def tokens(self) -> list[str]:
        """All word tokens in sentence order."""
        out: list[str] = []
        for sent in self.sentences:
            out.extend(sent.tokens)
        return out


@dataclass(frozen=True)
class Cluster:
    """Many related documents paired with one gold summary."""

    id: str
    documents: tuple[Document, ...]
    gold_summary: Document
    query: "Query | None" = None

    def __post_init__(self) -> None:
        if not self.documents:
            raise ValueError(f"cluster {self.id!r} has no documents")
        if not self.gold_summary.sentences:
            raise ValueError(f"cluster {self.id!r} gold summary has no sentences")


@dataclass(frozen=True)
class DebateRecord:
    """A (query, document, summary) triple from a single-document dataset."""

    query_text: str
    document: Document
    gold_summary: Document

    def __post_init__(self) -> None:
        if not self.query_text.strip():
            raise ValueError(f"record {self.document.id!r} has an empty query")
        if not self.document.sentences:
            raise ValueError(f"record {self.document.id!r} document has no sentences")
        if not self.gold_summary.sentences:
            raise ValueError(f"record {self.document.id!r} gold summary has no sentences")


def _iter_jsonl(path: Path) -> Iterator[tuple[int, dict]]:
    with path.open("r", encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            if lineno == 1 and line.startswith("﻿"):
                raise DatasetError(
                    f"{path}: file starts with a UTF-8 BOM; save it without one"
                )
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise DatasetError(
                    f"{path}: line {lineno}: invalid JSON ({exc.msg})"
                ) from exc
            if not isinstance(obj, dict):
                raise DatasetError(f"{path}: line {lineno}: expected a JSON object")
            yield lineno, obj


def _require_str(obj: dict, key: str, path: Path, lineno: int) -> str:
    value = obj.get(key)
    if not isinstance(value, str) or not value.strip():
        raise DatasetError(
            f"{path}: line {lineno}: field {key!r} must be a non-empty string"
        )
    return value


def load_cluster_dataset(path: str | Path) -> list[Cluster]:
    """Load clusters from a JSONL file.

    Each line is ``{"id": str, "summary": str, "articles": [{"id": str,
    "text": str}, ...]}``. Document order inside a cluster is preserved.
    """
    path = Path(path)
    clusters: list[Cluster] = []
    try:
        for lineno, obj in _iter_jsonl(path):
            cluster_id = _require_str(obj, "id", path, lineno)
            summary_text = _require_str(obj, "summary", path, lineno)
            articles = obj.get("articles")
            if not isinstance(articles, list) or not articles:
                raise DatasetError(
                    f"{path}: line {lineno}: field 'articles' must be a non-empty list"
                )
            documents: list[Document] = []
            seen_ids: set[str] = set()
            for position, article in enumerate(articles):
                if not isinstance(article, dict):
                    raise DatasetError(
                        f"{path}: line {lineno}: articles[{position}] must be an object"
                    )
                article_id = _require_str(article, "id", path, lineno)
                article_text = _require_str(article, "text", path, lineno)
                if article_id in seen_ids:
                    raise DatasetError(
                        f"{path}: line {lineno}: duplicate article id {article_id!r}"
                    )
                seen_ids.add(article_id)
                documents.append(Document.from_text(article_id, article_text))
            gold = Document.from_text(f"{cluster_id}/summary", summary_text)
            if not gold.sentences:
                raise DatasetError(
                    f"{path}: line {lineno}: field 'summary' has no word tokens"
                )
            clusters.append(Cluster(cluster_id, tuple(documents), gold))
    except UnicodeDecodeError as exc:
        raise DatasetError(f"{path}: file is not valid UTF-8 ({exc})") from exc
    return clusters


def load_debate_dataset(path: str | Path) -> list[DebateRecord]:
    """Load (query, document, summary) triples from a JSONL file.

    Each line is ``{"query": str, "document": str, "summary": str}`` with an
    optional ``"id"``; records without one are named ``debate-<position>``.
    """
    path = Path(path)
    records: list[DebateRecord] = []
    try:
        for lineno, obj in _iter_jsonl(path):
            query_text = _require_str(obj, "query", path, lineno)
            document_text = _require_str(obj, "document", path, lineno)
            summary_text = _require_str(obj, "summary", path, lineno)
            if "id" in obj:
                record_id = _require_str(obj, "id", path, lineno)
            else:
                record_id = f"debate-{len(records)}"
            document = Document.from_text(record_id, document_text)
            if not document.sentences:
                raise DatasetError(
                    f"{path}: line {lineno}: field 'document' has no word tokens"
                )
            gold = Document.from_text(f"{record_id}/summary", summary_text)
            if not gold.sentences:
                raise DatasetError(
                    f"{path}: line {lineno}: field 'summary' has no word tokens"
                )
            records.append(DebateRecord(query_text, document, gold))
    except UnicodeDecodeError as exc:
        raise DatasetError(f"{path}: file is not valid UTF-8 ({exc})") from exc
    return records
