"""
The built-in toy corpus
=======================

A small template grammar ("the <subject> <verb> the <adjective>
<object>") generates disjoint NLI, QA, unlabeled, similarity, and
ranking splits. Evaluation splits draw from held-out subjects, so a
model only reaches them through synthesis over the unlabeled pool.
The corpus also round-trips through the same file formats the loaders
expect, which is how the command line pipeline consumes it.
"""

import tempfile
from pathlib import Path

from gencontrast import data, evaluation, toydata

corpus = toydata.build_toy_corpus(seed=0, n_nli=60, n_nli_dev=12, n_qa=16,
                                  n_unlabeled=80, n_sts=36, n_ranking=6)

print(f"nli train : {len(corpus.nli)} triplets")
print(f"nli dev   : {len(corpus.nli_dev)} triplets")
print(f"qa        : {len(corpus.qa)} pairs")
print(f"unlabeled : {len(corpus.unlabeled)} sentences")
print(f"sts       : {len(corpus.sts)} scored pairs")
print(f"ranking   : {len(corpus.ranking)} queries")
print()

# Each NLI triplet pairs a premise with one entailed and one
# contradictory rewrite: dropping the adjective entails, inserting
# "does not" contradicts.
t = corpus.nli[0]
print(f"premise      : {t.premise}")
print(f"entailment   : {t.entailment}")
print(f"contradiction: {t.contradiction}")
print()

# Similarity pairs carry gold scores on a 0..5 scale; identical pairs
# sit at 5.0 and negated pairs at 1.0.
for ex in corpus.sts[:4]:
    print(f"gold {ex.gold_score:.1f}: {ex.sentence_a!r} / {ex.sentence_b!r}")
print()

# Ranking queries list five candidates, the first two relevant.
q = corpus.ranking[0]
print(f"query: {q.query}")
for cand, rel in zip(q.candidates, q.relevance):
    print(f"  rel={rel}  {cand}")
print()

# The corpus writes itself in the loader formats and reads back intact.
with tempfile.TemporaryDirectory() as scratch:
    paths = toydata.write_corpus(corpus, scratch)
    for key in sorted(paths):
        print(f"wrote {key}: {Path(paths[key]).name}")
    reloaded = data.load_nli(paths["nli"])
    print(f"nli reload matches: {reloaded == corpus.nli}")
    sts_reloaded, scale = evaluation.load_sts(paths["sts"])
    print(f"sts reload count {len(sts_reloaded)}, scale {scale}")
    unlabeled = data.load_unlabeled(paths["unlabeled"])
    print(f"unlabeled reload: {len(unlabeled)} sentences, "
          f"first source id {unlabeled[0].source_id}")
