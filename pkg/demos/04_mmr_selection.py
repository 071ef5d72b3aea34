"""Greedy relevance/diversity selection.

Each round picks the item maximizing
    lam * sim1(item, query) - (1 - lam) * max over selected of sim2
so lam=1 is a pure relevance sort and small lam punishes redundancy hard.
"""

from mmrsum import MmrProblem, mmr_select

# Three items: the first two are near-duplicates (sim2 = 0.95), the third is
# less relevant but different.
relevance = {"lead": 0.9, "copy": 0.8, "fresh": 0.3}
redundancy = {frozenset(("lead", "copy")): 0.95}


def sim1(item, _query):
    return relevance[item]


def sim2(a, b):
    return redundancy.get(frozenset((a, b)), 0.0)


for lam in (1.0, 0.7, 0.5):
    problem = MmrProblem(
        ids=("lead", "copy", "fresh"),
        items=("lead", "copy", "fresh"),
        query=None,
        lam=lam,
        sim1=sim1,
        sim2=sim2,
        k=3,
    )
    selection = mmr_select(problem)
    order = " -> ".join(f"{item_id} ({score:+.3f})" for item_id, score in selection.selected)
    print(f"lam={lam:.2f}:  {order}")

print()
print("lam=0.70 keeps the near-duplicate second (relevance wins);")
print("lam=0.50 demotes it below the fresh item (diversity wins).")
