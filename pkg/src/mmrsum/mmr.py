"""Greedy maximal-marginal-relevance selection over arbitrary items.

Each round picks the item maximizing

    lam * sim1(item, query) - (1 - lam) * max over selected of sim2(item, .)

with the max over an empty selection counting as 0, so the first round is a
pure relevance argmax. Ties go to the lowest original item index, which makes
runs byte-reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Sequence

__all__ = ["MmrProblem", "MmrSelection", "mmr_score", "mmr_select"]

SimilarityFn = Callable[[Any, Any], float]


@dataclass(frozen=True)
class MmrProblem:
    """One selection instance.

    ``ids`` and ``items`` are parallel; ``sim1(item, query)`` scores
    relevance and ``sim2(item, item)`` redundancy; ``k`` items are selected.
    """

    ids: tuple[Hashable, ...]
    items: tuple[Any, ...]
    query: Any
    lam: float
    sim1: SimilarityFn
    sim2: SimilarityFn
    k: int

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.items):
            raise ValueError("ids and items must have equal length")
        if len(set(self.ids)) != len(self.ids):
            raise ValueError("item ids must be unique")
        if not 0.0 <= self.lam <= 1.0:
            raise ValueError(f"lambda must lie in [0, 1], got {self.lam}")
        if not 1 <= self.k <= len(self.items):
            raise ValueError(f"k must lie in [1, {len(self.items)}], got {self.k}")


@dataclass(frozen=True)
class MmrSelection:
    """Result of :func:`mmr_select`: picked ids with their selection-time
    scores, in pick order, plus the ids that were never picked."""

    selected: tuple[tuple[Hashable, float], ...]
    remaining: tuple[Hashable, ...]

    @property
    def selected_ids(self) -> tuple[Hashable, ...]:
        return tuple(item_id for item_id, _ in self.selected)


def mmr_score(
    candidate: Any,
    query: Any,
    selected: Sequence[Any],
    lam: float,
    sim1: SimilarityFn,
    sim2: SimilarityFn,
) -> float:
    """Marginal relevance of one candidate against the current selection."""
    relevance = sim1(candidate, query)
    redundancy = max((sim2(candidate, chosen) for chosen in selected), default=0.0)
    return lam * relevance - (1.0 - lam) * redundancy


def mmr_select(problem: MmrProblem) -> MmrSelection:
    """Run ``k`` greedy selection rounds.

    Each sim2 pair is evaluated at most once: a running max of redundancy
    against the selected set is kept per remaining item and updated after
    every pick.
    """
    ids, items = problem.ids, problem.items
    relevance: list[float] = []
    for index, item in enumerate(items):
        value = problem.sim1(item, problem.query)
        if not math.isfinite(value):
            raise ValueError(
                f"non-finite sim1 value for item {ids[index]!r} against the query"
            )
        relevance.append(value)

    remaining = list(range(len(items)))
    max_redundancy = [-math.inf] * len(items)
    selected: list[tuple[Hashable, float]] = []

    for _ in range(problem.k):
        best_index = -1
        best_score = -math.inf
        for index in remaining:
            penalty = max_redundancy[index] if selected else 0.0
            score = problem.lam * relevance[index] - (1.0 - problem.lam) * penalty
            if score > best_score:  # strict: keeps the lowest index on ties
                best_index, best_score = index, score
        selected.append((ids[best_index], best_score))
        remaining.remove(best_index)
        picked = items[best_index]
        for index in remaining:
            value = problem.sim2(items[index], picked)
            if not math.isfinite(value):
                raise ValueError(
                    f"non-finite sim2 value for items {ids[index]!r} and {ids[best_index]!r}"
                )
            if value > max_redundancy[index]:
                max_redundancy[index] = value

    return MmrSelection(tuple(selected), tuple(ids[i] for i in remaining))
