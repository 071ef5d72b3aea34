"""Shared fixtures: data paths, JSONL writers, and the complementary-candidates
fixture generator used by the fusion tests."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from mmrsum import CandidateSummary, Document

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture
def jsonl_writer(tmp_path):
    """Write rows as JSONL under tmp_path and return the file path."""

    def write(name: str, rows) -> Path:
        path = tmp_path / name
        with path.open("w", encoding="utf-8") as handle:
            for row in rows:
                handle.write(json.dumps(row) + "\n")
        return path

    return write


def _sentence(words: list[str]) -> str:
    return " ".join([words[0].capitalize()] + words[1:]) + "."


def make_complementary_fixture(
    rng: np.random.Generator,
    n_refs: int | None = None,
    distractor_ref_overlap: bool = False,
):
    """Build a unit where each reference sentence appears verbatim in exactly
    one candidate, padded with query-free distractor sentences.

    Returns (candidates, query_tokens, reference_document). Every individual
    candidate misses most reference content, so only fusing across candidates
    can reproduce the reference.
    """
    n = int(n_refs) if n_refs is not None else int(rng.integers(2, 5))
    query_terms = [f"theme{chr(97 + i)}{rng.integers(100, 999)}" for i in range(n)]

    ref_sentences = []
    ref_fillers: list[list[str]] = []
    for i in range(n):
        fillers = [f"ref{i}w{j}{rng.integers(10, 99)}" for j in range(int(rng.integers(4, 7)))]
        ref_fillers.append(fillers)
        words = [query_terms[i]] + fillers
        order = rng.permutation(len(words))
        ref_sentences.append(_sentence([words[k] for k in order]))

    candidates = []
    assignment = rng.permutation(n)  # which candidate holds which reference sentence
    for c in range(n):
        ref_index = int(assignment[c])
        sentences = [ref_sentences[ref_index]]
        for d in range(int(rng.integers(1, 3))):
            noise = [f"noise{c}x{d}y{j}{rng.integers(10, 99)}" for j in range(5)]
            if distractor_ref_overlap and rng.random() < 0.5:
                # a non-query reference word may leak into a distractor
                noise[0] = ref_fillers[ref_index][0]
            sentences.append(_sentence(noise))
        if rng.random() < 0.5:
            sentences = sentences[::-1]
        candidates.append(
            CandidateSummary.from_text(f"model-{c}", "unit", " ".join(sentences))
        )

    reference = Document.from_text("unit/summary", " ".join(ref_sentences))
    return candidates, query_terms, reference
