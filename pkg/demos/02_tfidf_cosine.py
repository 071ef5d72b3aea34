"""tf-idf vectors and cosine similarity.

The recipe is fixed: idf = ln((1+N)/(1+df)) + 1, raw term counts,
L2 normalization. Stopwords are dropped from the vocabulary by default
when a list is passed.
"""

from mmrsum import DEFAULT_STOPWORDS, cosine, fit_tfidf, tokenize_words, transform

sentences = [
    "The council approved the solar farm on Tuesday.",
    "Construction on the solar farm begins next spring.",
    "Rail workers ended the five day strike.",
]
token_lists = [tokenize_words(s) for s in sentences]

model = fit_tfidf(token_lists, stopwords=DEFAULT_STOPWORDS)
print(f"vocabulary size: {len(model.vocabulary)} over {model.doc_count} texts")

# A term in every text gets idf exactly 1.0; rarer terms weigh more.
for term in ("solar", "strike"):
    print(f"  idf({term}) = {model.idf[model.vocabulary[term]]:.4f}")

print()

vectors = [transform(model, tokens) for tokens in token_lists]
for i, a in enumerate(sentences):
    for j in range(i + 1, len(sentences)):
        sim = cosine(vectors[i], vectors[j])
        print(f"cosine(s{i}, s{j}) = {sim:.4f}   # {a[:30]}... vs {sentences[j][:30]}...")

print()

# The query is just another bag of tokens in the same space.
query = transform(model, ["solar", "farm"])
for i, vector in enumerate(vectors):
    print(f"relevance of s{i} to 'solar farm': {cosine(vector, query):.4f}")
