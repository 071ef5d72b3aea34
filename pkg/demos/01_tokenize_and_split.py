"""Tokenization and sentence splitting.

The corpus layer is lossless: lowercase word tokens with interior '.'
and apostrophes preserved, and rule-based sentence boundaries with an
abbreviation exception list.
"""

from mmrsum import Document, split_sentences, tokenize_words

# Word tokens keep "u.s" and "don't" whole; punctuation never survives.
for text in ["The cat sat.", "U.S. policy—2020", "Don't stop 'now'!"]:
    print(f"{text!r:28} -> {tokenize_words(text)}")

print()

# Sentence boundaries: . ! ? followed by whitespace and an uppercase letter.
# "Dr." sits on the built-in abbreviation list, so it never ends a sentence.
passage = (
    "Dr. Reyes briefed the council. The vote passed 7-2! "
    "Was anyone surprised? Not really."
)
for sentence in split_sentences(passage):
    print(f"  [{sentence.index}] {sentence.text}")

print()

# The exception list is extendable when your data uses more abbreviations.
text = "Prof. Lane agreed. The panel closed."
print("default:  ", [s.text for s in split_sentences(text)])
print("extended: ", [s.text for s in split_sentences(text, extra_abbreviations={"prof"})])

print()

# Documents carry their sentences; token order round-trips exactly.
doc = Document.from_text("demo", passage)
print("document tokens:", doc.tokens())
