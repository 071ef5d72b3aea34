"""ROUGE-1, ROUGE-2, and ROUGE-L between a system summary and one reference.

Scores operate on token lists so callers control tokenization; here no
stopword removal or stemming is ever applied. ROUGE-L uses the flattened
summary-level LCS.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Sequence

__all__ = [
    "RougeReport",
    "RougeScore",
    "average_reports",
    "evaluate_corpus",
    "rouge_l",
    "rouge_n",
    "score_pair",
]


@dataclass(frozen=True)
class RougeScore:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_overlap(cls, overlap: float, system_total: int, reference_total: int) -> "RougeScore":
        precision = overlap / system_total if system_total > 0 else 0.0
        recall = overlap / reference_total if reference_total > 0 else 0.0
        if precision + recall > 0:
            f1 = 2.0 * precision * recall / (precision + recall)
        else:
            f1 = 0.0
        return cls(precision, recall, f1)

    def as_dict(self) -> dict[str, float]:
        return {"p": self.precision, "r": self.recall, "f1": self.f1}


@dataclass(frozen=True)
class RougeReport:
    r1: RougeScore
    r2: RougeScore
    rl: RougeScore

    def as_dict(self) -> dict[str, dict[str, float]]:
        return {"r1": self.r1.as_dict(), "r2": self.r2.as_dict(), "rl": self.rl.as_dict()}


def _ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def rouge_n(system: Sequence[str], reference: Sequence[str], n: int) -> RougeScore:
    """Clipped n-gram multiset overlap; empty n-gram sets score 0."""
    if n not in (1, 2):
        raise ValueError(f"n must be 1 or 2, got {n}")
    system_grams = _ngram_counts(system, n)
    reference_grams = _ngram_counts(reference, n)
    overlap = sum(
        min(count, reference_grams[gram]) for gram, count in system_grams.items()
    )
    return RougeScore.from_overlap(
        overlap, sum(system_grams.values()), sum(reference_grams.values())
    )


def _lcs_length(a: Sequence[str], b: Sequence[str]) -> int:
    if not a or not b:
        return 0
    previous = [0] * (len(b) + 1)
    for token in a:
        current = [0]
        for j, other in enumerate(b, start=1):
            if token == other:
                current.append(previous[j - 1] + 1)
            else:
                current.append(max(previous[j], current[j - 1]))
        previous = current
    return previous[-1]


def rouge_l(system: Sequence[str], reference: Sequence[str]) -> RougeScore:
    """LCS length over the flattened token sequences; empty input scores 0."""
    lcs = _lcs_length(system, reference)
    return RougeScore.from_overlap(lcs, len(system), len(reference))


def score_pair(system: Sequence[str], reference: Sequence[str]) -> RougeReport:
    """ROUGE-1/2/L for one (system, reference) token pair."""
    return RougeReport(
        r1=rouge_n(system, reference, 1),
        r2=rouge_n(system, reference, 2),
        rl=rouge_l(system, reference),
    )


def average_reports(reports: Sequence[RougeReport]) -> RougeReport:
    """Arithmetic mean of reports, per variant and per P/R/F1 (macro-average)."""
    if not reports:
        raise ValueError("average_reports needs at least one report")

    def average(scores: list[RougeScore]) -> RougeScore:
        n = len(scores)
        return RougeScore(
            sum(s.precision for s in scores) / n,
            sum(s.recall for s in scores) / n,
            sum(s.f1 for s in scores) / n,
        )

    return RougeReport(
        r1=average([r.r1 for r in reports]),
        r2=average([r.r2 for r in reports]),
        rl=average([r.rl for r in reports]),
    )


def evaluate_corpus(
    pairs: Iterable[tuple[Sequence[str], Sequence[str]]],
) -> RougeReport:
    """Macro-average ROUGE over (system, reference) token pairs."""
    reports = [score_pair(system, reference) for system, reference in pairs]
    if not reports:
        raise ValueError("evaluate_corpus needs at least one pair")
    return average_reports(reports)
