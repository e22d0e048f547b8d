"""Generate-discriminate-contrast pipeline for sentence embeddings.

The library turns a small labeled NLI corpus plus a large unlabeled
sentence stream into filtered synthetic training triplets, then trains a
prompt-based contrastive sentence embedding model on top of a small
trainable encoder-decoder backbone. An evaluation harness (Spearman on
STS-style data, average precision on duplicate ranking, alignment and
uniformity diagnostics) closes the loop.

Subpackages map onto the pipeline stages:

- :mod:`gencontrast.prompts` -- the four fixed prompt templates
- :mod:`gencontrast.backbone` -- seq2seq interface + tiny reference model
- :mod:`gencontrast.data` -- corpus ingestion and instance construction
- :mod:`gencontrast.gendisc` -- joint generator/discriminator training
- :mod:`gencontrast.synthesis` -- triplet synthesis and confidence filtering
- :mod:`gencontrast.embedding` -- prompted embedding extraction, cosine
- :mod:`gencontrast.contrastive` -- contrastive losses and stage schedules
- :mod:`gencontrast.evaluation` -- metrics and diagnostics
- :mod:`gencontrast.cli` -- end-to-end orchestration commands
"""

__version__ = "0.1.0"
