"""ROUGE-1/2/L scoring.

Unigram and bigram overlaps use clipped multiset counts; ROUGE-L runs the
longest common subsequence over the flattened token streams.
"""

from mmrsum import evaluate_corpus, score_pair, tokenize_words

system = tokenize_words("the cat sat on the mat")
reference = tokenize_words("the cat is on the mat")

report = score_pair(system, reference)
for name, score in (("R-1", report.r1), ("R-2", report.r2), ("R-L", report.rl)):
    print(f"{name}: P={score.precision:.4f} R={score.recall:.4f} F1={score.f1:.4f}")

print()

# Corpus scores are macro-averages: each pair counts equally.
pairs = [
    (system, reference),
    (tokenize_words("completely unrelated words here"), reference),
    (reference, reference),
]
corpus = evaluate_corpus(pairs)
print(f"macro-averaged R-1 F1 over {len(pairs)} pairs: {corpus.r1.f1:.4f}")
print(f"macro-averaged R-L F1 over {len(pairs)} pairs: {corpus.rl.f1:.4f}")
