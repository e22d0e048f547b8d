"""Joint training of the unified generator/discriminator model.

Both tasks are conditional generation; one AdamW loop (constant learning
rate, no warmup) optimizes the mean conditional NLL over mixed batches.
Checkpoints are selected by the combined dev metric

    selection_score = disc_accuracy - 10 * gen_ppl

where gen_ppl is token-weighted perplexity over the generation dev
instances and disc_accuracy is label-argmax accuracy over the
discrimination dev instances. The training log is JSON lines
``{step, train_loss, gen_ppl, disc_accuracy, selection_score}``.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass

import numpy as np
import torch

from .backbone import Seq2SeqBackbone
from .data import TaskKind, TrainingInstance

logger = logging.getLogger(__name__)

PPL_WEIGHT = 10.0
DISC_LABELS = ["true", "false"]


@dataclass(frozen=True)
class GenDiscConfig:
    learning_rate: float = 5e-5
    batch_size: int = 256
    epochs: int = 10
    eval_every_steps: int = 500
    seed: int = 0

    def __post_init__(self):
        for name in ("learning_rate", "batch_size", "epochs", "eval_every_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass(frozen=True)
class ValidationReport:
    gen_ppl: float
    disc_accuracy: float
    selection_score: float

    @classmethod
    def from_metrics(cls, gen_ppl: float, disc_accuracy: float) -> "ValidationReport":
        return cls(gen_ppl, disc_accuracy, disc_accuracy - PPL_WEIGHT * gen_ppl)


@dataclass
class TrainOutcome:
    best_step: int
    history: list[tuple[int, ValidationReport]]


def _split_tasks(instances: list[TrainingInstance]):
    gen = [i for i in instances if i.task is TaskKind.GENERATION]
    disc = [i for i in instances if i.task is TaskKind.DISCRIMINATION]
    return gen, disc


def evaluate_dev(dev_instances: list[TrainingInstance],
                 backbone: Seq2SeqBackbone) -> ValidationReport:
    """Token-weighted generation perplexity plus discrimination accuracy."""
    gen, disc = _split_tasks(dev_instances)
    if not gen or not disc:
        raise ValueError("dev set must contain both generation and discrimination instances")
    total_nll = 0.0
    total_tokens = 0
    for inst in gen:
        tokens = backbone.count_target_tokens(inst.target_text)
        total_nll += backbone.conditional_nll(inst.input_text, inst.target_text) * tokens
        total_tokens += tokens
    gen_ppl = float(np.exp(total_nll / total_tokens))
    correct = 0
    for inst in disc:
        probs = backbone.label_probability(inst.input_text, DISC_LABELS)
        if DISC_LABELS[int(np.argmax(probs))] == inst.target_text:
            correct += 1
    return ValidationReport.from_metrics(gen_ppl, correct / len(disc))


def train(instances: list[TrainingInstance], dev_instances: list[TrainingInstance],
          config: GenDiscConfig, backbone: Seq2SeqBackbone,
          log_path=None) -> TrainOutcome:
    """Optimize the backbone on mixed instances; leave it at the best state.

    The backbone ends up restored to the checkpoint with the highest
    selection score. When ``log_path`` is given, one JSON line is appended
    per evaluation.
    """
    if not instances:
        raise ValueError("empty training set")
    gen_dev, disc_dev = _split_tasks(dev_instances)
    if not gen_dev or not disc_dev:
        raise ValueError("dev set must contain both generation and discrimination instances")

    optimizer = torch.optim.AdamW(backbone.trainable_parameters(), lr=config.learning_rate)
    steps_per_epoch = len(instances) // config.batch_size
    if steps_per_epoch == 0:
        logger.warning("batch_size %d exceeds dataset size %d; no optimizer steps",
                       config.batch_size, len(instances))
    dropped = len(instances) - steps_per_epoch * config.batch_size
    if dropped:
        logger.info("dropping last partial batch of %d instance(s) per epoch", dropped)

    log_fh = open(log_path, "w", encoding="utf-8") if log_path else None
    history: list[tuple[int, ValidationReport]] = []
    best_score = -np.inf
    best_step = 0
    best_state = backbone.snapshot()
    step = 0
    loss_since_eval: list[float] = []

    def run_eval():
        nonlocal best_score, best_step, best_state
        report = evaluate_dev(dev_instances, backbone)
        history.append((step, report))
        train_loss = float(np.mean(loss_since_eval)) if loss_since_eval else None
        loss_since_eval.clear()
        if log_fh:
            log_fh.write(json.dumps({
                "step": step, "train_loss": train_loss,
                "gen_ppl": report.gen_ppl, "disc_accuracy": report.disc_accuracy,
                "selection_score": report.selection_score,
            }, sort_keys=True) + "\n")
        if report.selection_score > best_score:
            best_score = report.selection_score
            best_step = step
            best_state = backbone.snapshot()

    try:
        for epoch in range(config.epochs):
            order = list(range(len(instances)))
            random.Random(config.seed * 100003 + epoch).shuffle(order)
            for b in range(steps_per_epoch):
                batch = [instances[i] for i in
                         order[b * config.batch_size: (b + 1) * config.batch_size]]
                loss = backbone.loss_batch([(i.input_text, i.target_text) for i in batch])
                optimizer.zero_grad()
                loss.backward()
                optimizer.step()
                step += 1
                loss_since_eval.append(float(loss.detach()))
                if step % config.eval_every_steps == 0:
                    run_eval()
        if step % config.eval_every_steps != 0 or step == 0:
            run_eval()
    finally:
        if log_fh:
            log_fh.close()

    backbone.restore(best_state)
    logger.info("best checkpoint at step %d (score %.6f)", best_step, best_score)
    return TrainOutcome(best_step=best_step, history=history)
