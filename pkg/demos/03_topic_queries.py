"""Topic-word queries from a per-document topic model.

Sentences act as the pseudo-documents, so a single document is enough to
fit on. The default configuration (one topic, five words) reduces to a
smoothed term-frequency ranking; with more topics the collapsed Gibbs
sampler separates vocabularies.
"""

import numpy as np

from mmrsum import Document, LdaConfig, extract_query, fit_lda, query_to_tokens

article = (
    "The council approved the solar farm after a long debate. "
    "Supporters said the solar panels will power forty thousand homes. "
    "Opponents of the farm worried about farmland loss. "
    "The council noted the solar site sits on degraded pasture."
)
doc = Document.from_text("article", article)

cfg = LdaConfig()  # one topic, five words, seeded
query = extract_query(fit_lda(doc, cfg), cfg)
print("query terms (word, posterior weight):")
for word, weight in query.terms:
    print(f"  {word:10} {weight:.4f}")
print("as a token bag:", query_to_tokens(query))

print()

# With two topics the sampler splits thematically mixed documents. Here the
# sentences alternate between fruit and machinery vocabularies.
rng = np.random.default_rng(0)
fruit = ["apple", "banana", "cherry", "plum", "grape"]
machine = ["engine", "piston", "clutch", "gear", "brake"]
sentences = []
for i in range(20):
    vocab = fruit if i % 2 == 0 else machine
    words = [vocab[rng.integers(0, 5)] for _ in range(8)]
    sentences.append(" ".join(words).capitalize() + ".")
mixed = Document.from_text("mixed", " ".join(sentences))

cfg2 = LdaConfig(num_topics=2, iterations=200, seed=0)
state = fit_lda(mixed, cfg2)
posterior = state.topic_word_posterior(cfg2.beta)
for topic in range(2):
    top = [state.vocabulary[i] for i in np.argsort(-posterior[topic])[:5]]
    print(f"topic {topic} top words: {top}")
