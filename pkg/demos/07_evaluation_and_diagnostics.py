"""
Evaluation metrics and embedding-space diagnostics
==================================================

The harness scores a model three ways: Spearman rank correlation
between predicted cosine similarities and gold similarity scores,
mean average precision on duplicate-style ranking queries, and the
alignment/uniformity pair of geometry diagnostics. The metric
implementations work on plain lists, so this script exercises them
on hand-built inputs before touching a model.
"""

import math

from gencontrast import toydata
from gencontrast.backbone import TinyBackbone, WordTokenizer
from gencontrast.evaluation import (
    DiagnosticsConfig,
    FormulaMode,
    alignment_loss,
    average_precision,
    build_report,
    evaluate_ranking,
    evaluate_sts,
    select_alignment_pairs,
    spearman,
    uniformity_loss,
)
from gencontrast.embedding import prompted

# Spearman depends only on ranks: any monotone transform of one side
# leaves it at exactly 1.
x = [0.1, 0.4, 0.2, 0.9, 0.7]
print(f"spearman(x, exp(x))  : {spearman(x, [math.exp(v) for v in x]):.6f}")
print(f"spearman(x, -x)      : {spearman(x, [-v for v in x]):.6f}")
print(f"spearman(x, shuffled): "
      f"{spearman(x, [x[2], x[0], x[4], x[1], x[3]]):.6f}")
print()

# Average precision over a ranked candidate list: mean of
# precision-at-rank at each relevant item, ties broken by input order.
scores = [0.9, 0.8, 0.7, 0.6]
relevance = [1, 0, 1, 0]
# ranks 1 and 3 are relevant: (1/1 + 2/3) / 2 = 5/6
print(f"average precision: {average_precision(scores, relevance):.6f}")
print(f"expected 5/6     : {5 / 6:.6f}")
print()

# A model to feed the full harness. Even untrained, the toy grammar's
# heavy word overlap gives the encoder some signal; training widens the
# gap. Every output is well defined and reproducible either way.
corpus = toydata.build_toy_corpus(seed=0, n_nli=40, n_nli_dev=8, n_qa=12,
                                  n_unlabeled=24, n_sts=36, n_ranking=6)
texts = [prompted("x")]
for ex in corpus.sts:
    texts += [ex.sentence_a, ex.sentence_b]
for q in corpus.ranking:
    texts += [q.query] + list(q.candidates)
tokenizer = WordTokenizer.build(texts)
backbone = TinyBackbone.fresh(tokenizer, hidden_size=32, num_layers=2,
                              num_heads=2, ffn_size=64, max_len=96, seed=3)

sts = evaluate_sts(backbone, corpus.sts)
print(f"sts: spearman {sts['spearman']:.4f} over {sts['n']} pairs")

ranking = evaluate_ranking(backbone, corpus.ranking)
print(f"ranking: map {ranking['map']:.4f} over {ranking['n_queries']} queries "
      f"({ranking['n_skipped']} skipped)")
print()

# Alignment wants positive pairs close together; uniformity wants the
# whole cloud spread over the sphere. Pairs come from the similarity
# data, gold strictly above the threshold.
pairs, at_threshold = select_alignment_pairs(corpus.sts, threshold=4.0)
print(f"alignment pairs: {len(pairs)} above threshold, "
      f"{at_threshold} exactly at it (excluded)")
align = alignment_loss(pairs, backbone)
sentences = sorted({s for ex in corpus.sts
                    for s in (ex.sentence_a, ex.sentence_b)})
uniform = uniformity_loss(sentences, backbone)
print(f"alignment  (lower better): {align:.4f}")
print(f"uniformity (more negative better): {uniform:.4f}")

# The literal formula variant drops the squaring; it exists for
# side-by-side comparison and is flagged in every report.
literal = DiagnosticsConfig(align_threshold=4.0,
                            formula_mode=FormulaMode.LITERAL)
print(f"alignment, literal mode : {alignment_loss(pairs, backbone, literal):.4f}")
print(f"uniformity, literal mode: "
      f"{uniformity_loss(sentences, backbone, literal):.4f}")
print()

# build_report assembles the structure the evaluate command writes.
report = build_report(
    "demo-checkpoint",
    sts_results={"toy-sts": sts},
    ranking_results={"toy-ranking": ranking},
    diagnostics={"alignment": align, "uniformity": uniform},
)
for key in sorted(report):
    print(f"report[{key!r}] = {report[key]}")
