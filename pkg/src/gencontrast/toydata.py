"""Deterministic synthetic-grammar corpora for tests and demos.

Sentences follow one template, ``the <subject> <verb> the <adjective>
<object>`` (verbs stay uninflected so negation is a pure insertion). Two
transforms define the labels:

- entailment: drop the adjective ("the cat chase the ball")
- contradiction: insert "does not" before the verb

Both transforms are structural, so a sequence model trained on them can
apply them to frames it never saw. Subjects split into two halves: the
first half appears in the labeled corpus, the second only in unlabeled
and evaluation data. A model that learns from synthesized triplets over
the unlabeled half therefore has a measurable edge on the held-out
evaluation sets over a model tuned on the labeled half alone.
"""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from pathlib import Path

from .data import NliTriplet, QaPair
from .evaluation import RankingQuery, StsExample

SUBJECTS = ("cat", "dog", "bird", "horse", "robot", "wizard", "farmer", "pilot")
VERBS = ("chase", "see", "like", "find", "carry", "paint", "push", "hold")
ADJECTIVES = ("red", "big", "small", "old", "shiny", "quiet")
OBJECTS = ("ball", "box", "kite", "drum", "lamp", "flag", "rope", "bell")

N_LABELED_SUBJECTS = len(SUBJECTS) // 2


@dataclass(frozen=True)
class Frame:
    subject: str
    verb: str
    adjective: str
    object: str


def sentence(frame: Frame) -> str:
    return f"the {frame.subject} {frame.verb} the {frame.adjective} {frame.object}"


def entailed(frame: Frame) -> str:
    return f"the {frame.subject} {frame.verb} the {frame.object}"


def negated(frame: Frame) -> str:
    return (f"the {frame.subject} does not {frame.verb} "
            f"the {frame.adjective} {frame.object}")


def nli_triplet(frame: Frame) -> NliTriplet:
    return NliTriplet(sentence(frame), entailed(frame), negated(frame))


def _shifted(frame: Frame) -> Frame:
    """A frame sharing no content word with the input."""
    return Frame(
        SUBJECTS[(SUBJECTS.index(frame.subject) + 1) % len(SUBJECTS)],
        VERBS[(VERBS.index(frame.verb) + 1) % len(VERBS)],
        ADJECTIVES[(ADJECTIVES.index(frame.adjective) + 1) % len(ADJECTIVES)],
        OBJECTS[(OBJECTS.index(frame.object) + 1) % len(OBJECTS)],
    )


def _swap_adjective(frame: Frame) -> Frame:
    alt = ADJECTIVES[(ADJECTIVES.index(frame.adjective) + 1) % len(ADJECTIVES)]
    return Frame(frame.subject, frame.verb, alt, frame.object)


def _swap_object(frame: Frame) -> Frame:
    alt = OBJECTS[(OBJECTS.index(frame.object) + 1) % len(OBJECTS)]
    return Frame(frame.subject, frame.verb, frame.adjective, alt)


# Pair kinds for the graded similarity set, most to least similar. Negated
# pairs are oversampled: they share every content word with the anchor, so
# raw token overlap ranks them near the top while the gold score is near
# the bottom. That makes them the pairs that actually separate a model
# with learned semantics from one without.
_STS_BUILDERS = (
    (5.0, lambda f: sentence(f)),
    (4.0, lambda f: entailed(f)),
    (4.0, lambda f: entailed(f)),
    (3.0, lambda f: sentence(_swap_adjective(f))),
    (3.0, lambda f: sentence(_swap_adjective(f))),
    (2.0, lambda f: sentence(_swap_object(f))),
    (2.0, lambda f: sentence(_swap_object(f))),
    (1.0, lambda f: negated(f)),
    (1.0, lambda f: negated(f)),
    (1.0, lambda f: negated(f)),
    (1.0, lambda f: negated(f)),
    (0.0, lambda f: sentence(_shifted(f))),
)


def sts_example(frame: Frame, kind: int) -> StsExample:
    gold, build = _STS_BUILDERS[kind % len(_STS_BUILDERS)]
    return StsExample(sentence(frame), build(frame), gold)


def ranking_query(frame: Frame) -> RankingQuery:
    return RankingQuery(
        query=sentence(frame),
        candidates=[
            entailed(frame),
            sentence(_swap_adjective(frame)),
            sentence(_swap_object(frame)),
            negated(frame),
            sentence(_shifted(frame)),
        ],
        relevance=[1, 1, 0, 0, 0],
    )


def qa_pair(frame: Frame) -> QaPair:
    return QaPair(
        question=f"what does the {frame.subject} {frame.verb}",
        answer=f"the {frame.adjective} {frame.object}",
    )


@dataclass(frozen=True)
class ToyCorpus:
    nli: list[NliTriplet]
    nli_dev: list[NliTriplet]
    qa: list[QaPair]
    unlabeled: list[str]
    sts: list[StsExample]
    ranking: list[RankingQuery]


def build_toy_corpus(seed: int = 0, n_nli: int = 500, n_nli_dev: int = 40,
                     n_qa: int = 64, n_unlabeled: int = 1000,
                     n_sts: int = 100, n_ranking: int = 24,
                     heldout_subject_fraction: float = 0.15) -> ToyCorpus:
    """Sample disjoint frame sets for every split.

    Labeled splits (NLI train/dev, QA) draw mostly from the first-half
    subjects; unlabeled, similarity, and ranking splits draw only from
    the second half, so held-out content reaches training mainly through
    synthesis over the unlabeled pool. A small fraction of labeled frames
    does use second-half subjects: a decoder can only emit tokens it has
    produced during training, so every subject needs some presence in
    generation targets for the copy behavior to generalize.
    """
    labeled_pool = [Frame(*combo) for combo in itertools.product(
        SUBJECTS[:N_LABELED_SUBJECTS], VERBS, ADJECTIVES, OBJECTS)]
    heldout_pool = [Frame(*combo) for combo in itertools.product(
        SUBJECTS[N_LABELED_SUBJECTS:], VERBS, ADJECTIVES, OBJECTS)]
    n_labeled_splits = n_nli + n_nli_dev
    n_seed_frames = round(n_labeled_splits * heldout_subject_fraction)
    if n_labeled_splits - n_seed_frames + n_qa > len(labeled_pool):
        raise ValueError("labeled frame pool exhausted")
    if n_unlabeled + n_sts + n_ranking + n_seed_frames > len(heldout_pool):
        raise ValueError("held-out frame pool exhausted")
    rng = random.Random(seed)
    rng.shuffle(labeled_pool)
    rng.shuffle(heldout_pool)
    # Seed frames come off the far end of the held-out pool, away from the
    # evaluation draws.
    seed_frames = heldout_pool[len(heldout_pool) - n_seed_frames:]
    labeled_frames = labeled_pool[:n_labeled_splits - n_seed_frames] + seed_frames
    rng.shuffle(labeled_frames)
    nli_frames = labeled_frames[:n_nli]
    dev_frames = labeled_frames[n_nli:n_nli + n_nli_dev]
    qa_frames = labeled_pool[n_labeled_splits - n_seed_frames:
                             n_labeled_splits - n_seed_frames + n_qa]
    unlabeled_frames = heldout_pool[:n_unlabeled]
    sts_frames = heldout_pool[n_unlabeled:n_unlabeled + n_sts]
    rank_frames = heldout_pool[n_unlabeled + n_sts:n_unlabeled + n_sts + n_ranking]
    return ToyCorpus(
        nli=[nli_triplet(f) for f in nli_frames],
        nli_dev=[nli_triplet(f) for f in dev_frames],
        qa=[qa_pair(f) for f in qa_frames],
        unlabeled=[sentence(f) for f in unlabeled_frames],
        sts=[sts_example(f, i) for i, f in enumerate(sts_frames)],
        ranking=[ranking_query(f) for f in rank_frames],
    )


# ---------------------------------------------------------------------------
# File writers matching the loader formats
# ---------------------------------------------------------------------------


def write_nli_jsonl(triplets: list[NliTriplet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for t in triplets:
            fh.write(json.dumps({
                "premise": t.premise,
                "entailment": t.entailment,
                "contradiction": t.contradiction,
            }, sort_keys=True) + "\n")


def write_qa_jsonl(pairs: list[QaPair], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for p in pairs:
            fh.write(json.dumps({"answer": p.answer, "question": p.question},
                                sort_keys=True) + "\n")


def write_unlabeled_text(sentences: list[str], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for s in sentences:
            fh.write(s + "\n")


def write_sts_tsv(examples: list[StsExample], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(f"{ex.gold_score}\t{ex.sentence_a}\t{ex.sentence_b}\n")


def write_ranking_jsonl(queries: list[RankingQuery], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for q in queries:
            fh.write(json.dumps({
                "candidates": q.candidates,
                "query": q.query,
                "relevance": q.relevance,
            }, sort_keys=True) + "\n")


def write_corpus(corpus: ToyCorpus, directory: str | Path) -> dict[str, Path]:
    """Write every split under one directory; returns the path map."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = {
        "nli": directory / "nli.jsonl",
        "nli_dev": directory / "nli_dev.jsonl",
        "qa": directory / "qa.jsonl",
        "unlabeled": directory / "unlabeled.txt",
        "sts": directory / "sts.tsv",
        "ranking": directory / "ranking.jsonl",
    }
    write_nli_jsonl(corpus.nli, paths["nli"])
    write_nli_jsonl(corpus.nli_dev, paths["nli_dev"])
    write_qa_jsonl(corpus.qa, paths["qa"])
    write_unlabeled_text(corpus.unlabeled, paths["unlabeled"])
    write_sts_tsv(corpus.sts, paths["sts"])
    write_ranking_jsonl(corpus.ranking, paths["ranking"])
    return paths
