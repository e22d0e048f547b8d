"""Contrastive fine-tuning of the sentence-embedding head.

Two losses over batches of prompted-sentence embeddings:

- triplet loss: in-batch softmax over cosine similarities where each
  anchor's denominator ranges over every positive and every annotated
  negative in the batch, temperature-scaled; the negative log of the
  diagonal term is averaged over the batch.
- pair loss: the same with no negatives (denominator over positives only).

A training schedule is an ordered list of stages, each naming a corpus,
a loss, a temperature, and a batch size. Preset schedules cover the
synthetic-then-labeled recipe, its domain-adaptation variant, and the
question-answer variants. Each stage re-shuffles its corpus per epoch
with a seeded RNG and drops a trailing partial batch, so runs with equal
inputs produce identical logs and parameters.
"""

from __future__ import annotations

import enum
import json
import logging
import random
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Sequence

import torch

from .backbone import Seq2SeqBackbone
from .data import NliTriplet, QaPair
from .embedding import prompted
from .synthesis import SynthPair, SynthTriplet

logger = logging.getLogger(__name__)


class ContrastiveError(ValueError):
    """A schedule or corpus wiring problem."""


class LossKind(enum.Enum):
    TRIPLET = "triplet"
    PAIR = "pair"


# ---------------------------------------------------------------------------
# Losses
# ---------------------------------------------------------------------------


def _cosine_matrix(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    a = torch.nn.functional.normalize(a, dim=1)
    b = torch.nn.functional.normalize(b, dim=1)
    return a @ b.T


def triplet_loss(anchors: torch.Tensor, positives: torch.Tensor,
                 negatives: torch.Tensor, tau: float) -> torch.Tensor:
    """Mean over anchors of -log softmax of the matched-positive term.

    The softmax for anchor i runs over 2N logits: cos(h_i, h+_j)/tau and
    cos(h_i, h-_j)/tau for every j in the batch.
    """
    if not (anchors.shape == positives.shape == negatives.shape):
        raise ContrastiveError("anchor/positive/negative shapes differ")
    if tau <= 0:
        raise ContrastiveError("temperature must be positive")
    sim_pos = _cosine_matrix(anchors, positives) / tau
    sim_neg = _cosine_matrix(anchors, negatives) / tau
    logits = torch.cat([sim_pos, sim_neg], dim=1)
    return (torch.logsumexp(logits, dim=1) - sim_pos.diagonal()).mean()


def pair_loss(anchors: torch.Tensor, positives: torch.Tensor,
              tau: float) -> torch.Tensor:
    """Triplet loss with the negative block absent."""
    if anchors.shape != positives.shape:
        raise ContrastiveError("anchor/positive shapes differ")
    if tau <= 0:
        raise ContrastiveError("temperature must be positive")
    sim_pos = _cosine_matrix(anchors, positives) / tau
    return (torch.logsumexp(sim_pos, dim=1) - sim_pos.diagonal()).mean()


def literal_ratio(anchors: torch.Tensor, positives: torch.Tensor,
                  negatives: torch.Tensor, tau: float) -> torch.Tensor:
    """Diagnostic: the raw softmax ratio averaged without the log.

    Not a usable training objective (it rewards a *small* matched term);
    exposed for side-by-side comparison against the standard form.
    """
    sim_pos = _cosine_matrix(anchors, positives) / tau
    sim_neg = _cosine_matrix(anchors, negatives) / tau
    logits = torch.cat([sim_pos, sim_neg], dim=1)
    return torch.exp(sim_pos.diagonal() - torch.logsumexp(logits, dim=1)).mean()


# ---------------------------------------------------------------------------
# Schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StageConfig:
    name: str
    loss: LossKind
    tau: float
    batch_size: int
    epochs: int = 1
    learning_rate: float = 5e-5

    def __post_init__(self):
        if self.tau <= 0:
            raise ContrastiveError("temperature must be positive")
        if self.batch_size < 2:
            raise ContrastiveError("in-batch contrast needs batch_size >= 2")
        if self.epochs < 1 or self.learning_rate <= 0:
            raise ContrastiveError("epochs and learning_rate must be positive")


@dataclass(frozen=True)
class TrainingSchedule:
    name: str
    stages: tuple[StageConfig, ...]

    def __post_init__(self):
        if not self.stages:
            raise ContrastiveError("a schedule needs at least one stage")


def universal_schedule(batch_size_synth: int = 1024, batch_size_nli: int = 512,
                       epochs_synth: int = 1, epochs_nli: int = 3,
                       learning_rate: float = 5e-5) -> TrainingSchedule:
    """Synthetic triplets first, labeled triplets second."""
    return TrainingSchedule("universal", (
        StageConfig("synthetic", LossKind.TRIPLET, 0.05, batch_size_synth,
                    epochs_synth, learning_rate),
        StageConfig("nli", LossKind.TRIPLET, 0.05, batch_size_nli,
                    epochs_nli, learning_rate),
    ))


def domain_adapt_schedule(batch_size_synth: int = 1024, batch_size_nli: int = 512,
                          epochs_synth: int = 1, epochs_nli: int = 3,
                          learning_rate: float = 5e-5) -> TrainingSchedule:
    """Universal recipe with an extra in-domain synthetic stage."""
    return TrainingSchedule("domain-adapt", (
        StageConfig("synthetic", LossKind.TRIPLET, 0.05, batch_size_synth,
                    epochs_synth, learning_rate),
        StageConfig("in_domain", LossKind.TRIPLET, 0.05, batch_size_synth,
                    epochs_synth, learning_rate),
        StageConfig("nli", LossKind.TRIPLET, 0.05, batch_size_nli,
                    epochs_nli, learning_rate),
    ))


def qa_only_schedule(batch_size_qa: int = 512, batch_size_nli: int = 512,
                     epochs_qa: int = 1, epochs_nli: int = 3,
                     learning_rate: float = 5e-5) -> TrainingSchedule:
    """Question-answer pairs (pair loss, sharper temperature), then labeled triplets."""
    return TrainingSchedule("qa-only", (
        StageConfig("qa", LossKind.PAIR, 0.01, batch_size_qa,
                    epochs_qa, learning_rate),
        StageConfig("nli", LossKind.TRIPLET, 0.05, batch_size_nli,
                    epochs_nli, learning_rate),
    ))


def qa_plus_schedule(batch_size_synth: int = 1024, batch_size_qa: int = 512,
                     batch_size_nli: int = 512, epochs_synth: int = 1,
                     epochs_qa: int = 1, epochs_nli: int = 3,
                     learning_rate: float = 5e-5) -> TrainingSchedule:
    """Synthetic triplets, then question-answer pairs, then labeled triplets."""
    return TrainingSchedule("qa-plus", (
        StageConfig("synthetic", LossKind.TRIPLET, 0.05, batch_size_synth,
                    epochs_synth, learning_rate),
        StageConfig("qa", LossKind.PAIR, 0.01, batch_size_qa,
                    epochs_qa, learning_rate),
        StageConfig("nli", LossKind.TRIPLET, 0.05, batch_size_nli,
                    epochs_nli, learning_rate),
    ))


def nli_only_schedule(batch_size_nli: int = 512, epochs_nli: int = 3,
                      learning_rate: float = 5e-5) -> TrainingSchedule:
    """Labeled triplets alone; the baseline the synthetic stage is measured against."""
    return TrainingSchedule("nli-only", (
        StageConfig("nli", LossKind.TRIPLET, 0.05, batch_size_nli,
                    epochs_nli, learning_rate),
    ))


PRESET_SCHEDULES = {
    "universal": universal_schedule,
    "domain-adapt": domain_adapt_schedule,
    "qa-only": qa_only_schedule,
    "qa-plus": qa_plus_schedule,
    "nli-only": nli_only_schedule,
}


# ---------------------------------------------------------------------------
# Corpus adapters
# ---------------------------------------------------------------------------


def rows_from_nli(triplets: Sequence[NliTriplet]) -> list[tuple[str, str, str]]:
    return [(t.premise, t.entailment, t.contradiction) for t in triplets]


def rows_from_synthetic(triplets: Sequence[SynthTriplet]) -> list[tuple[str, str, str]]:
    return [(t.anchor, t.positive, t.negative) for t in triplets]


def rows_from_qa(pairs: Sequence[QaPair]) -> list[tuple[str, str]]:
    return [(p.question, p.answer) for p in pairs]


def rows_from_pairs(pairs: Sequence[SynthPair]) -> list[tuple[str, str]]:
    return [(p.anchor, p.positive) for p in pairs]


_ROW_WIDTH = {LossKind.TRIPLET: 3, LossKind.PAIR: 2}


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------


@dataclass
class StageOutcome:
    name: str
    steps: int = 0
    final_loss: float | None = None
    dropped_rows: int = 0


@dataclass
class ScheduleOutcome:
    schedule: str
    stages: list[StageOutcome] = field(default_factory=list)
    resumed_stages: int = 0


def _stage_rng(seed: int, stage_index: int, epoch: int) -> random.Random:
    return random.Random((seed + 7919 * stage_index) * 100003 + epoch)


def _embed(backbone: Seq2SeqBackbone, sentences: list[str]) -> torch.Tensor:
    return backbone.embed_batch([prompted(s) for s in sentences])


def run_stage(backbone: Seq2SeqBackbone, rows: Sequence[tuple],
              stage: StageConfig, seed: int = 0, stage_index: int = 0,
              log_stream: IO[str] | None = None) -> StageOutcome:
    """Train one stage in place and return its step/loss summary."""
    width = _ROW_WIDTH[stage.loss]
    for row in rows:
        if len(row) != width:
            raise ContrastiveError(
                f"stage {stage.name!r} uses {stage.loss.value} loss and needs "
                f"{width}-column rows, got {len(row)}")
    if len(rows) < stage.batch_size:
        raise ContrastiveError(
            f"stage {stage.name!r} has {len(rows)} rows, fewer than one "
            f"batch of {stage.batch_size}")
    optimizer = torch.optim.AdamW(backbone.trainable_parameters(),
                                  lr=stage.learning_rate)
    outcome = StageOutcome(stage.name)
    for epoch in range(stage.epochs):
        order = list(rows)
        _stage_rng(seed, stage_index, epoch).shuffle(order)
        n_batches = len(order) // stage.batch_size
        leftover = len(order) - n_batches * stage.batch_size
        if leftover:
            outcome.dropped_rows += leftover
            logger.info("stage %s epoch %d: dropping %d-row partial batch",
                        stage.name, epoch, leftover)
        for b in range(n_batches):
            batch = order[b * stage.batch_size:(b + 1) * stage.batch_size]
            anchors = _embed(backbone, [r[0] for r in batch])
            positives = _embed(backbone, [r[1] for r in batch])
            if stage.loss is LossKind.TRIPLET:
                negatives = _embed(backbone, [r[2] for r in batch])
                loss = triplet_loss(anchors, positives, negatives, stage.tau)
            else:
                loss = pair_loss(anchors, positives, stage.tau)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
            outcome.steps += 1
            outcome.final_loss = float(loss.detach())
            if log_stream is not None:
                log_stream.write(json.dumps(
                    {"loss": outcome.final_loss, "stage": stage.name,
                     "step": outcome.steps}, sort_keys=True) + "\n")
    return outcome


def _stage_dir(out_root: Path, index: int, stage: StageConfig) -> Path:
    return out_root / f"stage{index:02d}-{stage.name}"


def _stage_done(directory: Path) -> bool:
    return (directory / "stage.json").exists()


def run_schedule(backbone: Seq2SeqBackbone, schedule: TrainingSchedule,
                 corpora: dict[str, Sequence[tuple]], seed: int = 0,
                 out_root: str | Path | None = None, resume: bool = False,
                 log_stream: IO[str] | None = None) -> tuple[Seq2SeqBackbone, ScheduleOutcome]:
    """Run each stage in order, threading the model through.

    With ``out_root`` set, every finished stage writes a checkpoint plus a
    ``stage.json`` summary; ``resume=True`` reloads the longest completed
    prefix of stages instead of retraining it. Returns the trained model
    (a reloaded instance when resuming skipped stages) and the summary.
    """
    missing = [s.name for s in schedule.stages if s.name not in corpora]
    if missing:
        raise ContrastiveError(
            f"schedule {schedule.name!r} needs corpora {missing} "
            f"but got {sorted(corpora)}")
    out_root = Path(out_root) if out_root is not None else None
    outcome = ScheduleOutcome(schedule.name)
    start = 0
    if resume:
        if out_root is None:
            raise ContrastiveError("resume requires a checkpoint directory")
        while start < len(schedule.stages) and _stage_done(
                _stage_dir(out_root, start, schedule.stages[start])):
            start += 1
        if start:
            last = _stage_dir(out_root, start - 1, schedule.stages[start - 1])
            backbone = type(backbone).load(last)
            outcome.resumed_stages = start
            logger.info("resuming after completed stage %s", last.name)
            for stage in schedule.stages[:start]:
                outcome.stages.append(StageOutcome(stage.name))
    for index in range(start, len(schedule.stages)):
        stage = schedule.stages[index]
        stage_outcome = run_stage(backbone, corpora[stage.name], stage,
                                  seed=seed, stage_index=index,
                                  log_stream=log_stream)
        outcome.stages.append(stage_outcome)
        if out_root is not None:
            directory = _stage_dir(out_root, index, stage)
            directory.mkdir(parents=True, exist_ok=True)
            backbone.save(directory)
            summary = {"final_loss": stage_outcome.final_loss,
                       "name": stage.name, "steps": stage_outcome.steps}
            with open(directory / "stage.json", "w", encoding="utf-8") as fh:
                json.dump(summary, fh, sort_keys=True)
                fh.write("\n")
    return backbone, outcome
