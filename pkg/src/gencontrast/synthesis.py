"""Unlabeled sentences -> filtered synthetic triplets.

For each anchor sentence the trained generator samples one entailment and
one contradiction hypothesis (nucleus sampling); the discriminator scores
both through the discrimination prompt; a triplet is kept only when both
confidences clear the threshold. With ``keep_positive_only`` set, anchors
whose entailment alone passes are salvaged as positive pairs for the
negative-free loss.

Per-anchor RNG seeds are derived by hashing (global seed, source id,
relation, sample index), so resharding the corpus cannot change outputs.

Output is JSON lines, written incrementally:

- triplets: ``{anchor, positive, negative, pos_confidence, neg_confidence}``
- pairs: ``{anchor, positive, pos_confidence}``
- stats sidecar: ``{read, generated, kept_triplets, kept_pairs, dropped}``

A ``<output>.partial`` marker exists while a run is in flight; it is
removed only on clean completion.
"""

from __future__ import annotations

import dataclasses
import enum
import hashlib
import json
import logging
from dataclasses import dataclass
from pathlib import Path

from .backbone import BackboneConfig, Seq2SeqBackbone
from .data import UnlabeledSentence
from .prompts import PromptKind, render

logger = logging.getLogger(__name__)


class Relation(enum.Enum):
    ENTAILMENT = "entailment"
    CONTRADICTION = "contradiction"


_GEN_PROMPT = {
    Relation.ENTAILMENT: PromptKind.ENTAILMENT_GEN,
    Relation.CONTRADICTION: PromptKind.CONTRADICTION_GEN,
}
_CONSISTENT_LABEL_INDEX = {Relation.ENTAILMENT: 0, Relation.CONTRADICTION: 1}


@dataclass(frozen=True)
class SynthCandidate:
    anchor: str
    hypothesis: str
    relation: Relation
    confidence: float | None = None
    degenerate: bool = False


@dataclass(frozen=True)
class SynthTriplet:
    anchor: str
    positive: str
    negative: str
    pos_confidence: float
    neg_confidence: float

    @property
    def positive_equals_anchor(self) -> bool:
        return self.positive == self.anchor


@dataclass(frozen=True)
class SynthPair:
    anchor: str
    positive: str
    pos_confidence: float


@dataclass(frozen=True)
class SynthesisConfig:
    nucleus_p: float = 0.9
    alpha: float = 0.9
    seed: int = 0
    keep_positive_only: bool = False
    samples_per_relation: int = 1
    max_decode_len: int = 64

    def __post_init__(self):
        if not (0.0 < self.nucleus_p <= 1.0):
            raise ValueError("nucleus_p must be in (0, 1]")
        if not (0.0 <= self.alpha <= 1.0):
            raise ValueError("alpha must be in [0, 1]")
        if self.samples_per_relation < 1:
            raise ValueError("samples_per_relation must be >= 1")


@dataclass
class SynthesisStats:
    read: int = 0
    generated: int = 0
    kept_triplets: int = 0
    kept_pairs: int = 0
    dropped: int = 0

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


def derive_seed(global_seed: int, source_id: str, relation: Relation,
                sample_index: int = 0) -> int:
    """Stable per-anchor decode seed; independent of sharding."""
    key = f"{global_seed}|{source_id}|{relation.value}|{sample_index}"
    return int.from_bytes(hashlib.sha256(key.encode()).digest()[:8], "little")


def _sample_candidate(anchor: UnlabeledSentence, relation: Relation,
                      backbone: Seq2SeqBackbone, config: SynthesisConfig,
                      sample_index: int = 0) -> SynthCandidate:
    prompt = render(_GEN_PROMPT[relation], [anchor.text]).text
    decode = backbone.sample(prompt, BackboneConfig(
        max_decode_len=config.max_decode_len,
        nucleus_p=config.nucleus_p,
        seed=derive_seed(config.seed, anchor.source_id, relation, sample_index),
    ))
    return SynthCandidate(
        anchor=anchor.text,
        hypothesis=decode.text,
        relation=relation,
        degenerate=not decode.text.strip(),
    )


def generate_candidates(anchor: UnlabeledSentence, backbone: Seq2SeqBackbone,
                        config: SynthesisConfig) -> tuple[SynthCandidate, SynthCandidate]:
    """One entailment and one contradiction hypothesis, confidences unset."""
    return (
        _sample_candidate(anchor, Relation.ENTAILMENT, backbone, config),
        _sample_candidate(anchor, Relation.CONTRADICTION, backbone, config),
    )


def score_candidate(candidate: SynthCandidate,
                    backbone: Seq2SeqBackbone) -> SynthCandidate:
    """Attach the discriminator's confidence in the relation-consistent label."""
    if candidate.degenerate:
        return dataclasses.replace(candidate, confidence=0.0)
    prompt = render(PromptKind.DISCRIMINATION,
                    [candidate.anchor, candidate.hypothesis]).text
    probs = backbone.label_probability(prompt, ["true", "false"])
    confidence = float(probs[_CONSISTENT_LABEL_INDEX[candidate.relation]])
    return dataclasses.replace(candidate, confidence=confidence)


def _passes(candidate: SynthCandidate, alpha: float) -> bool:
    return not candidate.degenerate and candidate.confidence is not None \
        and candidate.confidence >= alpha


def filter_pair(entail: SynthCandidate, contra: SynthCandidate,
                config: SynthesisConfig) -> SynthTriplet | SynthPair | None:
    """Both-pass rule: a triplet needs both confidences >= alpha.

    When only the entailment passes and ``keep_positive_only`` is set, a
    positive pair is emitted for the negative-free loss corpus instead.
    """
    if entail.relation is not Relation.ENTAILMENT or contra.relation is not Relation.CONTRADICTION:
        raise ValueError("filter_pair expects (entailment, contradiction) candidates")
    if entail.anchor != contra.anchor:
        raise ValueError("candidates come from different anchors")
    e_ok = _passes(entail, config.alpha)
    c_ok = _passes(contra, config.alpha)
    if e_ok and c_ok:
        triplet = SynthTriplet(entail.anchor, entail.hypothesis, contra.hypothesis,
                               entail.confidence, contra.confidence)
        if triplet.positive_equals_anchor:
            logger.warning("positive duplicates its anchor: %r", triplet.anchor)
        return triplet
    if e_ok and config.keep_positive_only:
        return SynthPair(entail.anchor, entail.hypothesis, entail.confidence)
    return None


def _best_candidate(anchor: UnlabeledSentence, relation: Relation,
                    backbone: Seq2SeqBackbone, config: SynthesisConfig) -> SynthCandidate:
    """Best-of-k by confidence; ties keep the earliest sample."""
    best = None
    for index in range(config.samples_per_relation):
        scored = score_candidate(
            _sample_candidate(anchor, relation, backbone, config, index), backbone
        )
        if best is None or scored.confidence > best.confidence:
            best = scored
    return best


def run(corpus: list[UnlabeledSentence], backbone: Seq2SeqBackbone,
        config: SynthesisConfig, triplets_path: str | Path,
        pairs_path: str | Path | None = None,
        stats_path: str | Path | None = None) -> SynthesisStats:
    """Synthesize and filter the whole corpus, writing outputs incrementally.

    Every anchor resolves to exactly one outcome, so
    ``read == kept_triplets + kept_pairs + dropped`` holds.
    """
    triplets_path = Path(triplets_path)
    marker = triplets_path.with_name(triplets_path.name + ".partial")
    marker.touch()
    stats = SynthesisStats()
    pairs_fh = None
    try:
        with open(triplets_path, "w", encoding="utf-8") as triplets_fh:
            if pairs_path is not None:
                pairs_fh = open(pairs_path, "w", encoding="utf-8")
            for anchor in corpus:
                stats.read += 1
                entail = _best_candidate(anchor, Relation.ENTAILMENT, backbone, config)
                contra = _best_candidate(anchor, Relation.CONTRADICTION, backbone, config)
                stats.generated += 2 * config.samples_per_relation
                outcome = filter_pair(entail, contra, config)
                if isinstance(outcome, SynthTriplet):
                    stats.kept_triplets += 1
                    triplets_fh.write(json.dumps({
                        "anchor": outcome.anchor,
                        "positive": outcome.positive,
                        "negative": outcome.negative,
                        "pos_confidence": outcome.pos_confidence,
                        "neg_confidence": outcome.neg_confidence,
                    }, sort_keys=True) + "\n")
                elif isinstance(outcome, SynthPair):
                    stats.kept_pairs += 1
                    if pairs_fh:
                        pairs_fh.write(json.dumps({
                            "anchor": outcome.anchor,
                            "positive": outcome.positive,
                            "pos_confidence": outcome.pos_confidence,
                        }, sort_keys=True) + "\n")
                else:
                    stats.dropped += 1
    finally:
        if pairs_fh:
            pairs_fh.close()
    if stats_path is not None:
        with open(stats_path, "w", encoding="utf-8") as fh:
            json.dump(stats.as_dict(), fh, sort_keys=True)
            fh.write("\n")
    marker.unlink()
    return stats


def load_triplets(path: str | Path) -> list[SynthTriplet]:
    """Read a synthesized triplet corpus back."""
    triplets = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            row = json.loads(line)
            triplets.append(SynthTriplet(
                row["anchor"], row["positive"], row["negative"],
                row["pos_confidence"], row["neg_confidence"],
            ))
    return triplets
