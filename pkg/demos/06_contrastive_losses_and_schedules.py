"""
Prompted embeddings, contrastive losses, and stage schedules
============================================================

Sentence vectors come from the encoder after wrapping the sentence in
the embedding prompt. Training pulls an anchor toward its positive and
pushes it away from in-batch positives of other anchors plus explicit
negatives, with cosine similarities scaled by a temperature. Multi-stage
schedules chain data sources; presets cover the common arrangements.
"""

import json

import numpy as np
import torch

from gencontrast import toydata
from gencontrast.backbone import TinyBackbone, WordTokenizer
from gencontrast.contrastive import (
    PRESET_SCHEDULES,
    LossKind,
    StageConfig,
    pair_loss,
    rows_from_nli,
    run_stage,
    triplet_loss,
)
from gencontrast.embedding import cosine, embed, embed_all, prompted

corpus = toydata.build_toy_corpus(seed=0, n_nli=120, n_nli_dev=12, n_qa=16,
                                  n_unlabeled=40, n_sts=24, n_ranking=4)
texts = []
for t in corpus.nli:
    texts += [t.premise, t.entailment, t.contradiction]
tokenizer = WordTokenizer.build(texts + [prompted("x")])
backbone = TinyBackbone.fresh(tokenizer, hidden_size=32, num_layers=2,
                              num_heads=2, ffn_size=64, max_len=96, seed=3)

# The embedding prompt wraps the sentence before encoding.
sentence = corpus.nli[0].premise
print(f"sentence: {sentence}")
print(f"prompted: {prompted(sentence)}")
vec = embed(sentence, backbone)
print(f"vector dimension: {vec.vector.shape[0]}")
print()

# Cosine similarity between prompted vectors; an untrained encoder gives
# middling values everywhere.
other = corpus.nli[1].premise
print(f"cos(sentence, itself): {cosine(vec.vector, vec.vector):.4f}")
print(f"cos(sentence, other) : "
      f"{cosine(vec.vector, embed(other, backbone).vector):.4f}")
print()

# The triplet loss over a batch: anchors, their positives, and their
# explicit negatives. For random vectors at tau = 1 every logit is
# about equally likely, so the loss sits near log(2N). A sharper
# temperature rescales the random cosine spread and pushes it higher.
gen = torch.Generator().manual_seed(0)
a = torch.randn(8, 16, generator=gen, dtype=torch.float64)
p = torch.randn(8, 16, generator=gen, dtype=torch.float64)
n = torch.randn(8, 16, generator=gen, dtype=torch.float64)
print(f"triplet loss, random batch of 8, tau 1.0 : "
      f"{triplet_loss(a, p, n, tau=1.0).item():.4f}")
print(f"log(2 * 8) reference                     : {np.log(16):.4f}")
print(f"triplet loss, random batch of 8, tau 0.05: "
      f"{triplet_loss(a, p, n, tau=0.05).item():.4f}")

# With the positive aligned to its anchor the loss collapses toward 0.
aligned = triplet_loss(a, a, n, tau=0.05)
print(f"triplet loss, positives = anchors        : {aligned.item():.4f}")

# The pair form drops the explicit negatives (in-batch only).
print(f"pair loss, random batch of 8, tau 0.05   : "
      f"{pair_loss(a, p, tau=0.05).item():.4f}")
print()

# Preset schedules name the stage arrangements: which corpus feeds each
# stage (by stage name), with which loss and temperature.
for name, factory in PRESET_SCHEDULES.items():
    schedule = factory()
    stages = ", ".join(f"{s.name}({s.loss.value}, tau={s.tau})"
                       for s in schedule.stages)
    print(f"{name:>13}: {stages}")
print()

# Running one stage directly: NLI triplets as (anchor, positive,
# negative) rows. Training happens in place; the loss falls across
# steps.
import io

rows = rows_from_nli(corpus.nli)
stage = StageConfig(name="nli", loss=LossKind.TRIPLET, tau=0.05,
                    batch_size=16, epochs=8, learning_rate=5e-4)
log = io.StringIO()
outcome = run_stage(backbone, rows, stage, seed=0, stage_index=0,
                    log_stream=log)
losses = [json.loads(line)["loss"] for line in log.getvalue().splitlines()]
print(f"stage ran {outcome.steps} steps over {stage.epochs} epochs "
      f"({outcome.dropped_rows} rows dropped from partial batches)")
print(f"first step loss: {losses[0]:.4f}")
print(f"last step loss : {losses[-1]:.4f}")
print()

# Before training every sentence embeds into a narrow cone (the 0.9975
# cosine above). One stage spreads the space: the premise now sits
# close to its entailment, away from its contradiction, and far from an
# unrelated premise.
t0 = corpus.nli[0]
vecs = embed_all([t0.premise, t0.entailment, t0.contradiction,
                  corpus.nli[7].premise], backbone)
print(f"cos(premise, entailment)   : {cosine(vecs[0], vecs[1]):.4f}")
print(f"cos(premise, contradiction): {cosine(vecs[0], vecs[2]):.4f}")
print(f"cos(premise, unrelated)    : {cosine(vecs[0], vecs[3]):.4f}")
