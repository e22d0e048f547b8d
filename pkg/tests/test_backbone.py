"""Tiny seq2seq backbone: scoring, sampling, embedding, checkpointing.

The heavier oracles here re-implement each contract from outside the
model: conditional NLL is replayed token by token through
``next_token_probs``, sampling is replayed with an identical RNG and the
standalone nucleus filter, and label probabilities are rebuilt from raw
step distributions.
"""

import json
import math
from fractions import Fraction

import numpy as np
import pytest
import torch

from gencontrast.backbone import (EOS_ID, PAD_ID, UNK_ID, BackboneConfig,
                                  BackboneError, DecodeResult, TinyBackbone,
                                  WordTokenizer, nucleus_filter)


class TestWordTokenizer:
    def test_words_and_punctuation_split(self):
        assert WordTokenizer.tokenize('He said "hi", ok?') == \
            ["He", "said", '"', "hi", '"', ",", "ok", "?"]

    def test_build_orders_by_frequency_then_alphabet(self):
        tok = WordTokenizer.build(["b b b a a c", "a"])
        assert tok.vocab[3:] == ["a", "b", "c"]

    def test_max_size_caps_vocabulary(self):
        tok = WordTokenizer.build(["a b c d e f"], max_size=5)
        assert len(tok) == 5

    def test_unknown_token_maps_to_unk(self):
        tok = WordTokenizer.build(["a b"])
        assert tok.encode("zzz") == [UNK_ID]

    def test_encode_decode_roundtrip(self):
        tok = WordTokenizer.build(["the cat sat"])
        ids = tok.encode("the cat sat", add_eos=True)
        assert ids[-1] == EOS_ID
        assert tok.decode(ids) == "the cat sat"

    def test_vocab_must_start_with_specials(self):
        with pytest.raises(ValueError):
            WordTokenizer(["a", "b", "c"])


class TestNucleusFilter:
    def test_golden_case(self):
        out = nucleus_filter(np.array([0.5, 0.3, 0.15, 0.05]), 0.9)
        want = [float(Fraction(50, 95)), float(Fraction(30, 95)),
                float(Fraction(15, 95)), 0.0]
        assert np.allclose(out, want, atol=1e-12)

    def test_ties_keep_lowest_index(self):
        out = nucleus_filter(np.array([0.25, 0.25, 0.25, 0.25]), 0.5)
        assert np.allclose(out, [0.5, 0.5, 0.0, 0.0], atol=1e-12)

    def test_p_one_keeps_everything(self):
        probs = np.array([0.4, 0.3, 0.2, 0.1])
        assert np.allclose(nucleus_filter(probs, 1.0), probs, atol=1e-12)

    def test_tiny_p_keeps_single_best(self):
        out = nucleus_filter(np.array([0.2, 0.5, 0.3]), 1e-9)
        assert np.allclose(out, [0.0, 1.0, 0.0], atol=1e-12)

    def test_invalid_p_rejected(self):
        for p in (0.0, -0.1, 1.5):
            with pytest.raises(ValueError):
                nucleus_filter(np.array([1.0]), p)

    def test_validity_and_monotonicity_random(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            probs = rng.dirichlet(np.full(rng.integers(2, 30), 0.7))
            sizes = []
            for p in (0.1, 0.3, 0.6, 0.9, 1.0):
                out = nucleus_filter(probs, p)
                assert math.isclose(out.sum(), 1.0, abs_tol=1e-9)
                support = np.nonzero(out)[0]
                sizes.append(len(support))
                # support is exactly the top-k of the sorted order
                order = np.argsort(-probs, kind="stable")
                assert set(support) == set(order[: len(support)])
            assert sizes == sorted(sizes)


class TestScoringOracles:
    def test_conditional_nll_matches_stepwise_replay(self, fresh_backbone):
        src = "the cat chase the red ball"
        tgt = "the cat chase the ball"
        ids = fresh_backbone.tokenizer.encode(tgt, add_eos=True)
        total = 0.0
        for step, token in enumerate(ids):
            probs = fresh_backbone.next_token_probs(src, ids[:step])
            total += -math.log(probs[token])
        want = total / len(ids)
        got = fresh_backbone.conditional_nll(src, tgt)
        assert math.isclose(got, want, rel_tol=1e-9)

    def test_loss_batch_matches_mean_of_singletons(self, fresh_backbone):
        pairs = [("the cat chase the ball", "the cat"),
                 ("the dog see the kite", "the dog see the red kite"),
                 ("a", "the quiet bell")]
        batched = float(fresh_backbone.loss_batch(pairs).detach())
        singles = [fresh_backbone.conditional_nll(s, t) for s, t in pairs]
        # padding in the batch must not leak into per-pair means
        assert math.isclose(batched, float(np.mean(singles)), rel_tol=1e-9)

    def test_empty_target_rejected(self, fresh_backbone):
        with pytest.raises(BackboneError):
            fresh_backbone.conditional_nll("the cat", "")

    def test_label_probability_matches_manual_softmax(self, fresh_backbone):
        src = 'if "the cat chase the ball", does this mean that "the cat"? true or false'
        labels = ["true", "false"]
        scores = []
        for label in labels:
            ids = fresh_backbone.tokenizer.encode(label)  # no EOS by contract
            total = 0.0
            for step, token in enumerate(ids):
                probs = fresh_backbone.next_token_probs(src, ids[:step])
                total += math.log(probs[token])
            scores.append(total)
        want = np.exp(scores) / np.exp(scores).sum()
        got = fresh_backbone.label_probability(src, labels)
        assert math.isclose(got.sum(), 1.0, abs_tol=1e-12)
        assert np.allclose(got, want, atol=1e-9)

    def test_label_probability_rejects_duplicates(self, fresh_backbone):
        with pytest.raises(BackboneError):
            fresh_backbone.label_probability("x", ["true", "true"])

    def test_count_target_tokens_includes_eos(self, fresh_backbone):
        n_words = len(fresh_backbone.tokenizer.encode("the red ball"))
        assert fresh_backbone.count_target_tokens("the red ball") == n_words + 1


class TestSampling:
    def test_same_seed_reproduces(self, fresh_backbone):
        config = BackboneConfig(seed=5)
        a = fresh_backbone.sample("the cat chase the ball", config)
        b = fresh_backbone.sample("the cat chase the ball", config)
        assert a == b

    def test_matches_external_replay(self, fresh_backbone):
        config = BackboneConfig(max_decode_len=16, nucleus_p=0.9, seed=9)
        src = "the dog find the old drum"
        got = fresh_backbone.sample(src, config)
        rng = np.random.default_rng(config.seed)
        generated = []
        truncated = True
        for _ in range(config.max_decode_len):
            probs = fresh_backbone.next_token_probs(src, generated)
            filtered = nucleus_filter(probs, config.nucleus_p)
            token = int(rng.choice(len(filtered), p=filtered))
            if token == EOS_ID:
                truncated = False
                break
            generated.append(token)
        want = DecodeResult(fresh_backbone.tokenizer.decode(generated),
                            truncated=truncated)
        assert got == want

    def test_truncation_flag(self, fresh_backbone):
        result = fresh_backbone.sample("the cat", BackboneConfig(max_decode_len=1,
                                                                 seed=2))
        # one step cannot reach EOS and produce text; either the single token
        # was EOS (empty, not truncated) or the cap was hit
        if result.text:
            assert result.truncated


class TestEmbedding:
    def test_embed_batch_matches_single(self, fresh_backbone):
        texts = ["the cat chase the ball", "the dog see the kite"]
        batch = fresh_backbone.embed_batch(texts).detach().numpy()
        for row, text in zip(batch, texts):
            single = fresh_backbone.encode_embed(text)
            assert np.allclose(row, single, atol=1e-12)

    def test_embedding_dimension_is_hidden_size(self, fresh_backbone):
        vec = fresh_backbone.encode_embed("the cat")
        assert vec.shape == (fresh_backbone.hidden_size,)

    def test_different_sentences_differ(self, fresh_backbone):
        a = fresh_backbone.encode_embed("the cat chase the ball")
        b = fresh_backbone.encode_embed("the dog paint the flag")
        assert not np.allclose(a, b)

    def test_gradients_flow_through_embed_batch(self, fresh_backbone):
        out = fresh_backbone.embed_batch(["the cat"]).sum()
        out.backward()
        grads = [p.grad for p in fresh_backbone.trainable_parameters()
                 if p.grad is not None]
        assert grads and any(float(g.abs().sum()) > 0 for g in grads)
        for p in fresh_backbone.trainable_parameters():
            p.grad = None


class TestCheckpointing:
    def test_roundtrip_preserves_scores(self, fresh_backbone, tmp_path):
        fresh_backbone.save(tmp_path)
        loaded = TinyBackbone.load(tmp_path)
        src, tgt = "the cat chase the ball", "the cat"
        assert math.isclose(loaded.conditional_nll(src, tgt),
                            fresh_backbone.conditional_nll(src, tgt),
                            rel_tol=1e-12)

    def test_save_is_byte_stable(self, fresh_backbone, tmp_path):
        a_dir, b_dir = tmp_path / "a", tmp_path / "b"
        a_dir.mkdir(), b_dir.mkdir()
        fresh_backbone.save(a_dir)
        fresh_backbone.save(b_dir)
        assert (a_dir / "params.bin").read_bytes() == (b_dir / "params.bin").read_bytes()
        assert (a_dir / "checkpoint.json").read_bytes() == \
            (b_dir / "checkpoint.json").read_bytes()

    def test_load_rejects_foreign_format(self, fresh_backbone, tmp_path):
        fresh_backbone.save(tmp_path)
        meta = json.loads((tmp_path / "checkpoint.json").read_text())
        meta["format"] = "something-else"
        (tmp_path / "checkpoint.json").write_text(json.dumps(meta))
        with pytest.raises(ValueError):
            TinyBackbone.load(tmp_path)

    def test_snapshot_restore(self, fresh_backbone):
        src, tgt = "the cat chase the ball", "the cat"
        before = fresh_backbone.conditional_nll(src, tgt)
        state = fresh_backbone.snapshot()
        with torch.no_grad():
            for p in fresh_backbone.trainable_parameters():
                p.add_(0.05)
        assert fresh_backbone.conditional_nll(src, tgt) != before
        fresh_backbone.restore(state)
        assert fresh_backbone.conditional_nll(src, tgt) == before


class TestConfigValidation:
    def test_bad_decode_settings_rejected(self):
        with pytest.raises(ValueError):
            BackboneConfig(max_decode_len=0)
        with pytest.raises(ValueError):
            BackboneConfig(nucleus_p=0.0)
        with pytest.raises(ValueError):
            BackboneConfig(nucleus_p=1.2)
