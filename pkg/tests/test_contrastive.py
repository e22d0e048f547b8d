"""Contrastive losses, training schedules, and the stage runner."""

import io
import json
import math

import numpy as np
import pytest
import torch

from gencontrast.backbone import TinyBackbone
from gencontrast.contrastive import (ContrastiveError, LossKind,
                                     PRESET_SCHEDULES, StageConfig,
                                     TrainingSchedule, domain_adapt_schedule,
                                     literal_ratio, nli_only_schedule,
                                     pair_loss, qa_only_schedule,
                                     qa_plus_schedule, rows_from_nli,
                                     rows_from_qa, rows_from_synthetic,
                                     run_schedule, run_stage, triplet_loss,
                                     universal_schedule)
from gencontrast.data import NliTriplet, QaPair
from gencontrast.embedding import embed_all
from gencontrast.synthesis import SynthTriplet


def cos(u, v):
    return float(np.dot(u, v) / (np.linalg.norm(u) * np.linalg.norm(v)))


def brute_force_triplet(anchors, positives, negatives, tau):
    """Independent double-loop reference in plain numpy."""
    a, p, n = (t.detach().numpy() for t in (anchors, positives, negatives))
    total = 0.0
    for i in range(len(a)):
        logits = [cos(a[i], p[j]) / tau for j in range(len(a))]
        logits += [cos(a[i], n[j]) / tau for j in range(len(a))]
        m = max(logits)
        lse = m + math.log(sum(math.exp(x - m) for x in logits))
        total += lse - cos(a[i], p[i]) / tau
    return total / len(a)


def brute_force_pair(anchors, positives, tau):
    a, p = (t.detach().numpy() for t in (anchors, positives))
    total = 0.0
    for i in range(len(a)):
        logits = [cos(a[i], p[j]) / tau for j in range(len(a))]
        m = max(logits)
        lse = m + math.log(sum(math.exp(x - m) for x in logits))
        total += lse - cos(a[i], p[i]) / tau
    return total / len(a)


def random_batch(n, d=6, seed=0):
    gen = torch.Generator().manual_seed(seed)
    make = lambda: torch.randn(n, d, dtype=torch.float64, generator=gen)
    return make(), make(), make()


class TestTripletLoss:
    @pytest.mark.parametrize("n", [2, 3, 8])
    def test_matches_brute_force(self, n):
        anchors, positives, negatives = random_batch(n, seed=n)
        for tau in (0.05, 0.5, 1.0):
            value = float(triplet_loss(anchors, positives, negatives, tau))
            assert value == pytest.approx(
                brute_force_triplet(anchors, positives, negatives, tau),
                abs=1e-6)

    def test_single_example_analytic_value(self):
        v = torch.tensor([[1.0, 2.0, -0.5]], dtype=torch.float64)
        value = float(triplet_loss(v, 3.0 * v, -2.0 * v, tau=0.1))
        assert value == pytest.approx(math.log(1.0 + math.exp(-20.0)),
                                      abs=1e-12)

    def test_batch_permutation_invariant(self):
        anchors, positives, negatives = random_batch(5, seed=1)
        perm = torch.tensor([3, 0, 4, 1, 2])
        direct = float(triplet_loss(anchors, positives, negatives, 0.05))
        shuffled = float(triplet_loss(anchors[perm], positives[perm],
                                      negatives[perm], 0.05))
        assert shuffled == pytest.approx(direct, abs=1e-10)

    def test_embedding_scale_invariant(self):
        anchors, positives, negatives = random_batch(4, seed=2)
        direct = float(triplet_loss(anchors, positives, negatives, 0.05))
        scaled = float(triplet_loss(7.0 * anchors, 0.2 * positives,
                                    3.0 * negatives, 0.05))
        assert scaled == pytest.approx(direct, abs=1e-10)

    def test_gradient_matches_autograd_check(self):
        anchors, positives, negatives = (t.requires_grad_(True)
                                         for t in random_batch(3, d=4, seed=4))
        assert torch.autograd.gradcheck(
            lambda a, p, n: triplet_loss(a, p, n, 0.2),
            (anchors, positives, negatives), eps=1e-6, atol=1e-6)

    def test_errors(self):
        anchors, positives, negatives = random_batch(3)
        with pytest.raises(ContrastiveError):
            triplet_loss(anchors, positives[:2], negatives, 0.05)
        with pytest.raises(ContrastiveError):
            triplet_loss(anchors, positives, negatives, 0.0)


class TestPairLoss:
    @pytest.mark.parametrize("n", [2, 3, 8])
    def test_matches_brute_force(self, n):
        anchors, positives, _ = random_batch(n, seed=10 + n)
        for tau in (0.01, 0.05, 1.0):
            value = float(pair_loss(anchors, positives, tau))
            assert value == pytest.approx(
                brute_force_pair(anchors, positives, tau), abs=1e-6)

    def test_single_pair_is_zero(self):
        # One positive, no negatives: the softmax is trivially 1.
        v = torch.tensor([[0.3, -1.0]], dtype=torch.float64)
        assert float(pair_loss(v, 2.0 * v, 0.05)) == pytest.approx(0.0,
                                                                   abs=1e-12)

    def test_errors(self):
        anchors, positives, _ = random_batch(3)
        with pytest.raises(ContrastiveError):
            pair_loss(anchors, positives[:2], 0.05)
        with pytest.raises(ContrastiveError):
            pair_loss(anchors, positives, -1.0)


class TestLiteralRatio:
    def test_bounded_and_opposes_the_log_form(self):
        anchors, positives, negatives = random_batch(4, seed=3)
        ratio = float(literal_ratio(anchors, positives, negatives, 0.1))
        assert 0.0 < ratio < 1.0

    def test_single_example_equals_exp_of_negated_loss(self):
        anchors, positives, negatives = random_batch(1, seed=5)
        loss = float(triplet_loss(anchors, positives, negatives, 0.1))
        ratio = float(literal_ratio(anchors, positives, negatives, 0.1))
        assert ratio == pytest.approx(math.exp(-loss), abs=1e-12)


class TestSchedules:
    def test_universal_shape(self):
        schedule = universal_schedule()
        assert schedule.name == "universal"
        assert [s.name for s in schedule.stages] == ["synthetic", "nli"]
        assert all(s.loss is LossKind.TRIPLET for s in schedule.stages)
        assert all(s.tau == 0.05 for s in schedule.stages)
        assert [s.batch_size for s in schedule.stages] == [1024, 512]
        assert [s.epochs for s in schedule.stages] == [1, 3]

    def test_domain_adapt_inserts_in_domain_stage(self):
        names = [s.name for s in domain_adapt_schedule().stages]
        assert names == ["synthetic", "in_domain", "nli"]

    def test_qa_only_uses_pair_loss_and_sharp_temperature(self):
        schedule = qa_only_schedule()
        assert [s.name for s in schedule.stages] == ["qa", "nli"]
        qa = schedule.stages[0]
        assert qa.loss is LossKind.PAIR
        assert qa.tau == 0.01

    def test_qa_plus_orders_synthetic_before_qa(self):
        names = [s.name for s in qa_plus_schedule().stages]
        assert names == ["synthetic", "qa", "nli"]

    def test_nli_only_is_single_stage(self):
        schedule = nli_only_schedule()
        assert [s.name for s in schedule.stages] == ["nli"]

    def test_preset_registry(self):
        assert set(PRESET_SCHEDULES) == {"universal", "domain-adapt",
                                         "qa-only", "qa-plus", "nli-only"}
        for name, builder in PRESET_SCHEDULES.items():
            assert builder().name == name

    def test_stage_validation(self):
        with pytest.raises(ContrastiveError):
            StageConfig("x", LossKind.TRIPLET, tau=0.0, batch_size=4)
        with pytest.raises(ContrastiveError):
            StageConfig("x", LossKind.TRIPLET, tau=0.05, batch_size=1)
        with pytest.raises(ContrastiveError):
            StageConfig("x", LossKind.TRIPLET, tau=0.05, batch_size=4,
                        epochs=0)
        with pytest.raises(ContrastiveError):
            TrainingSchedule("empty", ())


class TestRowAdapters:
    def test_nli_and_synthetic_rows(self):
        nli = rows_from_nli([NliTriplet("p", "e", "c")])
        assert nli == [("p", "e", "c")]
        synth = rows_from_synthetic([SynthTriplet("a", "pos", "neg", 0.9, 0.9)])
        assert synth == [("a", "pos", "neg")]

    def test_qa_rows(self):
        assert rows_from_qa([QaPair("q?", "ans")]) == [("q?", "ans")]


TRIPLET_ROWS = [
    ("the cat chase the ball", "the cat chase the red ball",
     "the cat does not chase the ball"),
    ("the dog see the kite", "the dog see the blue kite",
     "the dog does not see the kite"),
    ("the boy find the cup", "the boy find the small cup",
     "the boy does not find the cup"),
    ("the girl hold the book", "the girl hold the old book",
     "the girl does not hold the book"),
    ("the pilot carry the box", "the pilot carry the big box",
     "the pilot does not carry the box"),
    ("the farmer paint the door", "the farmer paint the green door",
     "the farmer does not paint the door"),
]


class TestRunStage:
    def stage(self, **kwargs):
        defaults = dict(name="synthetic", loss=LossKind.TRIPLET, tau=0.05,
                        batch_size=6, epochs=4, learning_rate=1e-3)
        defaults.update(kwargs)
        return StageConfig(**defaults)

    def test_loss_decreases_on_a_fixed_batch(self, fresh_backbone):
        stream = io.StringIO()
        outcome = run_stage(fresh_backbone, TRIPLET_ROWS, self.stage(),
                            log_stream=stream)
        losses = [json.loads(line)["loss"]
                  for line in stream.getvalue().splitlines()]
        assert outcome.steps == 4
        assert losses[-1] < losses[0]
        assert outcome.final_loss == losses[-1]

    def test_log_rows_have_sorted_keys(self, fresh_backbone):
        stream = io.StringIO()
        run_stage(fresh_backbone, TRIPLET_ROWS, self.stage(epochs=1),
                  log_stream=stream)
        line = stream.getvalue().splitlines()[0]
        assert list(json.loads(line)) == ["loss", "stage", "step"]
        assert json.loads(line)["stage"] == "synthetic"

    def test_partial_batch_dropped(self, fresh_backbone):
        outcome = run_stage(fresh_backbone, TRIPLET_ROWS[:5],
                            self.stage(batch_size=2, epochs=2))
        assert outcome.steps == 4
        assert outcome.dropped_rows == 2

    def test_row_width_enforced(self, fresh_backbone):
        pairs = [row[:2] for row in TRIPLET_ROWS]
        with pytest.raises(ContrastiveError):
            run_stage(fresh_backbone, pairs, self.stage())
        with pytest.raises(ContrastiveError):
            run_stage(fresh_backbone, TRIPLET_ROWS,
                      self.stage(name="qa", loss=LossKind.PAIR))

    def test_fewer_rows_than_a_batch_rejected(self, fresh_backbone):
        with pytest.raises(ContrastiveError):
            run_stage(fresh_backbone, TRIPLET_ROWS[:3], self.stage())

    def test_identical_runs_produce_identical_logs(self, toy_tokenizer):
        logs = []
        for _ in range(2):
            backbone = TinyBackbone.fresh(toy_tokenizer, hidden_size=32,
                                          num_layers=2, num_heads=2,
                                          ffn_size=64, max_len=96, seed=3)
            stream = io.StringIO()
            run_stage(backbone, TRIPLET_ROWS,
                      self.stage(batch_size=3, epochs=2), seed=11,
                      log_stream=stream)
            logs.append(stream.getvalue())
        assert logs[0] == logs[1]

    def test_pair_stage_trains(self, fresh_backbone):
        pairs = [row[:2] for row in TRIPLET_ROWS]
        outcome = run_stage(fresh_backbone, pairs,
                            self.stage(name="qa", loss=LossKind.PAIR,
                                       tau=0.01, epochs=2))
        assert outcome.steps == 2
        assert outcome.final_loss is not None


class TestRunSchedule:
    def schedule(self):
        return TrainingSchedule("universal", (
            StageConfig("synthetic", LossKind.TRIPLET, 0.05, batch_size=3,
                        epochs=1, learning_rate=1e-3),
            StageConfig("nli", LossKind.TRIPLET, 0.05, batch_size=3,
                        epochs=2, learning_rate=1e-3),
        ))

    def corpora(self):
        return {"synthetic": TRIPLET_ROWS[:3], "nli": TRIPLET_ROWS[3:]}

    def fresh(self, toy_tokenizer):
        return TinyBackbone.fresh(toy_tokenizer, hidden_size=32, num_layers=2,
                                  num_heads=2, ffn_size=64, max_len=96, seed=3)

    def test_missing_corpus_named_in_error(self, fresh_backbone):
        with pytest.raises(ContrastiveError, match="nli"):
            run_schedule(fresh_backbone, self.schedule(),
                         {"synthetic": TRIPLET_ROWS})

    def test_stage_artifacts_written(self, fresh_backbone, tmp_path):
        _, outcome = run_schedule(fresh_backbone, self.schedule(),
                                  self.corpora(), out_root=tmp_path)
        assert [s.name for s in outcome.stages] == ["synthetic", "nli"]
        for index, name in enumerate(["synthetic", "nli"]):
            directory = tmp_path / f"stage{index:02d}-{name}"
            summary = json.loads((directory / "stage.json").read_text())
            assert summary["name"] == name
            assert summary["steps"] >= 1
            assert (directory / "checkpoint.json").exists()

    def test_resume_skips_completed_stages(self, toy_tokenizer, tmp_path):
        probe = [row[0] for row in TRIPLET_ROWS]
        model, _ = run_schedule(self.fresh(toy_tokenizer), self.schedule(),
                                self.corpora(), seed=4, out_root=tmp_path)
        reference = embed_all(probe, model)

        resumed, outcome = run_schedule(self.fresh(toy_tokenizer),
                                        self.schedule(), self.corpora(),
                                        seed=4, out_root=tmp_path, resume=True)
        assert outcome.resumed_stages == 2
        assert all(s.steps == 0 for s in outcome.stages)
        np.testing.assert_array_equal(embed_all(probe, resumed), reference)

    def test_partial_resume_matches_uninterrupted_run(self, toy_tokenizer,
                                                      tmp_path):
        import shutil
        probe = [row[0] for row in TRIPLET_ROWS]
        full_dir = tmp_path / "full"
        model, _ = run_schedule(self.fresh(toy_tokenizer), self.schedule(),
                                self.corpora(), seed=4, out_root=full_dir)
        reference = embed_all(probe, model)

        partial_dir = tmp_path / "partial"
        shutil.copytree(full_dir, partial_dir)
        shutil.rmtree(partial_dir / "stage01-nli")
        resumed, outcome = run_schedule(self.fresh(toy_tokenizer),
                                        self.schedule(), self.corpora(),
                                        seed=4, out_root=partial_dir,
                                        resume=True)
        assert outcome.resumed_stages == 1
        assert outcome.stages[1].steps > 0
        np.testing.assert_array_equal(embed_all(probe, resumed), reference)

    def test_resume_without_directory_rejected(self, fresh_backbone):
        with pytest.raises(ContrastiveError):
            run_schedule(fresh_backbone, self.schedule(), self.corpora(),
                         resume=True)
