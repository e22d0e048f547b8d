"""Corpus ingestion: NLI triplets, unlabeled sentences, QA pairs.

File formats (all UTF-8):

- NLI: JSON lines ``{"premise": ..., "entailment": ..., "contradiction": ...}``
- unlabeled: plain text, one sentence per line
- QA: JSON lines ``{"question": ..., "answer": ...}``
- raw labeled pairs (for :func:`pairs_to_triplets`): JSON lines
  ``{"premise": ..., "hypothesis": ..., "label": ...}`` with label one of
  entailment / contradiction / neutral (neutral rows are ignored)

Malformed lines are counted and skipped; a file with more than 10%
malformed lines is rejected outright.
"""

from __future__ import annotations

import enum
import json
import logging
import random
import re
from dataclasses import dataclass
from pathlib import Path

from .prompts import PromptKind, render

logger = logging.getLogger(__name__)

MALFORMED_LINE_TOLERANCE = 0.10

_WS_RE = re.compile(r"\s+")


class CorpusFormatError(ValueError):
    """Unreadable corpus file or too many malformed lines."""


class TaskKind(enum.Enum):
    GENERATION = "generation"
    DISCRIMINATION = "discrimination"


@dataclass(frozen=True)
class NliTriplet:
    premise: str
    entailment: str
    contradiction: str


@dataclass(frozen=True)
class TrainingInstance:
    input_text: str
    target_text: str
    task: TaskKind


@dataclass(frozen=True)
class QaPair:
    question: str
    answer: str


@dataclass(frozen=True)
class UnlabeledSentence:
    text: str
    source_id: str


def normalize_for_matching(text: str) -> str:
    """Trim, collapse internal whitespace, casefold. Matching key only."""
    return _WS_RE.sub(" ", text.strip()).casefold()


def _clean(text: str) -> str:
    return _WS_RE.sub(" ", text.strip())


# ---------------------------------------------------------------------------
# Loaders
# ---------------------------------------------------------------------------


def _iter_jsonl(path: Path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            yield lineno, line


def _check_malformed(path: Path, kept: int, malformed: int) -> None:
    total = kept + malformed
    if malformed:
        logger.warning("%s: skipped %d malformed line(s)", path, malformed)
    if total and malformed / total > MALFORMED_LINE_TOLERANCE:
        raise CorpusFormatError(
            f"{path}: {malformed} of {total} lines malformed (>10%)"
        )


def load_nli(path: str | Path) -> list[NliTriplet]:
    """Load NLI triplets in file order, skipping malformed lines."""
    path = Path(path)
    triplets: list[NliTriplet] = []
    malformed = 0
    for lineno, line in _iter_jsonl(path):
        try:
            row = json.loads(line)
            triplet = NliTriplet(
                premise=str(row["premise"]),
                entailment=str(row["entailment"]),
                contradiction=str(row["contradiction"]),
            )
        except (json.JSONDecodeError, KeyError, TypeError):
            malformed += 1
            continue
        if not (triplet.premise.strip() and triplet.entailment.strip()
                and triplet.contradiction.strip()):
            malformed += 1
            continue
        if triplet.premise == triplet.entailment:
            logger.warning("%s:%d: premise equals entailment", path, lineno)
        triplets.append(triplet)
    _check_malformed(path, len(triplets), malformed)
    return triplets


def load_qa(path: str | Path) -> list[QaPair]:
    path = Path(path)
    pairs: list[QaPair] = []
    malformed = 0
    for _, line in _iter_jsonl(path):
        try:
            row = json.loads(line)
            pair = QaPair(question=str(row["question"]), answer=str(row["answer"]))
        except (json.JSONDecodeError, KeyError, TypeError):
            malformed += 1
            continue
        if not (pair.question.strip() and pair.answer.strip()):
            malformed += 1
            continue
        pairs.append(pair)
    _check_malformed(path, len(pairs), malformed)
    return pairs


def load_unlabeled(path: str | Path,
                   exclusion_set: set[str] | None = None) -> list[UnlabeledSentence]:
    """Load one sentence per line, dropping test-set leakage.

    Sentences are trimmed and internally whitespace-collapsed; casing is
    preserved. A sentence is dropped when its normalized (casefolded) form
    appears in the normalized exclusion set.
    """
    path = Path(path)
    excluded = {normalize_for_matching(s) for s in (exclusion_set or set())}
    sentences: list[UnlabeledSentence] = []
    blank = dropped = 0
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, start=1):
            text = _clean(line)
            if not text:
                blank += 1
                continue
            if normalize_for_matching(text) in excluded:
                dropped += 1
                continue
            sentences.append(UnlabeledSentence(text=text, source_id=f"{path.name}:{lineno}"))
    if blank or dropped:
        logger.info("%s: %d blank line(s), %d excluded sentence(s)", path, blank, dropped)
    return sentences


# ---------------------------------------------------------------------------
# Instance construction
# ---------------------------------------------------------------------------


def build_instances(triplet: NliTriplet) -> list[TrainingInstance]:
    """The four training instances of one NLI triplet: 2 generation, 2
    discrimination (entailment -> "true", contradiction -> "false")."""
    p, e, c = triplet.premise, triplet.entailment, triplet.contradiction
    return [
        TrainingInstance(render(PromptKind.ENTAILMENT_GEN, [p]).text, e, TaskKind.GENERATION),
        TrainingInstance(render(PromptKind.CONTRADICTION_GEN, [p]).text, c, TaskKind.GENERATION),
        TrainingInstance(render(PromptKind.DISCRIMINATION, [p, e]).text, "true", TaskKind.DISCRIMINATION),
        TrainingInstance(render(PromptKind.DISCRIMINATION, [p, c]).text, "false", TaskKind.DISCRIMINATION),
    ]


def mix_instances(instances: list[TrainingInstance], seed: int) -> list[TrainingInstance]:
    """Seeded uniform shuffle; the 2+2 construction keeps tasks mixed 1:1."""
    mixed = list(instances)
    random.Random(seed).shuffle(mixed)
    return mixed


def subsample(items: list, fraction: float, seed: int) -> list:
    """Select exactly floor(fraction * n) items uniformly, no replacement.

    Selections are nested across fractions for a fixed seed (the seeded
    permutation is shared, smaller fractions take prefixes of it), which
    keeps ablation curves comparable. Original order is preserved.
    """
    if not (0.0 < fraction <= 1.0):
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    # epsilon guards the floor against float error (0.3 * 10 -> 2.999...)
    k = int(fraction * len(items) + 1e-9)
    order = list(range(len(items)))
    random.Random(seed).shuffle(order)
    chosen = sorted(order[:k])
    return [items[i] for i in chosen]


# ---------------------------------------------------------------------------
# Raw pair grouping
# ---------------------------------------------------------------------------


def pairs_to_triplets(path: str | Path) -> list[NliTriplet]:
    """Group raw labeled pairs into triplets, one per usable premise.

    A premise is usable when it has at least one entailment and one
    contradiction hypothesis; the first of each (by file order) is kept.
    """
    path = Path(path)
    first_entail: dict[str, str] = {}
    first_contra: dict[str, str] = {}
    order: list[str] = []
    seen: set[str] = set()
    malformed = kept = 0
    for _, line in _iter_jsonl(path):
        try:
            row = json.loads(line)
            premise = str(row["premise"])
            hypothesis = str(row["hypothesis"])
            label = str(row["label"]).lower()
        except (json.JSONDecodeError, KeyError, TypeError):
            malformed += 1
            continue
        if not (premise.strip() and hypothesis.strip()):
            malformed += 1
            continue
        kept += 1
        if premise not in seen:
            seen.add(premise)
            order.append(premise)
        if label == "entailment":
            first_entail.setdefault(premise, hypothesis)
        elif label == "contradiction":
            first_contra.setdefault(premise, hypothesis)
        # neutral and other labels contribute nothing
    _check_malformed(path, kept, malformed)
    return [
        NliTriplet(p, first_entail[p], first_contra[p])
        for p in order
        if p in first_entail and p in first_contra
    ]
