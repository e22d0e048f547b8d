"""Backbone-agnostic seq2seq interface plus a tiny trainable reference model.

The pipeline only talks to :class:`Seq2SeqBackbone`: conditional
likelihoods, nucleus-sampled decoding, label scoring, and first-decoder-
output embedding extraction. :class:`TinyBackbone` implements it with a
small encoder-decoder transformer (2 layers, hidden size <= 64, word-level
vocabulary <= 1k) that is cheap enough to overfit toy corpora in tests yet
carries a real gradient path. Production models can attach through the same
interface via an adapter.

Everything runs in float64 on CPU so that runs are bit-reproducible and
finite-difference gradient checks are meaningful.
"""

from __future__ import annotations

import abc
import json
import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from torch import nn

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = "gencontrast-tiny-seq2seq"
CHECKPOINT_VERSION = 1

PAD_TOKEN = "<pad>"
EOS_TOKEN = "</s>"
UNK_TOKEN = "<unk>"
PAD_ID = 0
EOS_ID = 1
UNK_ID = 2

_TOKEN_RE = re.compile(r"\w+|[^\w\s]")


class BackboneError(ValueError):
    """Raised on empty tokenizations and other contract violations."""


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------


class WordTokenizer:
    """Word-level tokenizer: words and single punctuation marks as tokens.

    Vocabulary order is deterministic: specials first, then corpus tokens by
    descending frequency, ties broken alphabetically.
    """

    def __init__(self, vocab: list[str]):
        if vocab[:3] != [PAD_TOKEN, EOS_TOKEN, UNK_TOKEN]:
            raise ValueError("vocab must start with the three special tokens")
        self.vocab = list(vocab)
        self._ids = {tok: i for i, tok in enumerate(self.vocab)}

    def __len__(self) -> int:
        return len(self.vocab)

    @staticmethod
    def tokenize(text: str) -> list[str]:
        return _TOKEN_RE.findall(text)

    @classmethod
    def build(cls, texts: list[str], max_size: int = 1000) -> "WordTokenizer":
        counts: dict[str, int] = {}
        for text in texts:
            for tok in cls.tokenize(text):
                counts[tok] = counts.get(tok, 0) + 1
        ordered = sorted(counts, key=lambda t: (-counts[t], t))
        keep = ordered[: max_size - 3]
        return cls([PAD_TOKEN, EOS_TOKEN, UNK_TOKEN] + keep)

    def encode(self, text: str, add_eos: bool = False) -> list[int]:
        ids = [self._ids.get(tok, UNK_ID) for tok in self.tokenize(text)]
        if add_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids: list[int]) -> str:
        words = [self.vocab[i] for i in ids if i not in (PAD_ID, EOS_ID)]
        return " ".join(words)


# ---------------------------------------------------------------------------
# Nucleus (top-p) filtering
# ---------------------------------------------------------------------------


def nucleus_filter(probs: np.ndarray, p: float) -> np.ndarray:
    """Keep the smallest descending-probability prefix reaching mass >= p.

    Ties in probability are broken by ascending token index. The kept mass
    is renormalized; everything else is zeroed.
    """
    if not (0.0 < p <= 1.0):
        raise ValueError(f"nucleus p must be in (0, 1], got {p}")
    probs = np.asarray(probs, dtype=np.float64)
    order = np.argsort(-probs, kind="stable")
    cum = np.cumsum(probs[order])
    k = int(np.searchsorted(cum, p, side="left")) + 1
    k = min(k, len(probs))
    out = np.zeros_like(probs)
    kept = order[:k]
    out[kept] = probs[kept]
    return out / out.sum()


@dataclass(frozen=True)
class BackboneConfig:
    """Decode-time settings for :meth:`Seq2SeqBackbone.sample`."""

    max_decode_len: int = 64
    nucleus_p: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if self.max_decode_len <= 0:
            raise ValueError("max_decode_len must be positive")
        if not (0.0 < self.nucleus_p <= 1.0):
            raise ValueError("nucleus_p must be in (0, 1]")


@dataclass(frozen=True)
class DecodeResult:
    """A decoded string plus whether max length cut it off before EOS."""

    text: str
    truncated: bool = False


# ---------------------------------------------------------------------------
# Abstract interface
# ---------------------------------------------------------------------------


class Seq2SeqBackbone(abc.ABC):
    """Contract between the pipeline and any encoder-decoder text model.

    Inference methods are read-only and safe to call concurrently on an
    immutable checkpoint; the differentiable batch methods are used by the
    trainers, which require exclusive access while optimizing.
    """

    @property
    @abc.abstractmethod
    def hidden_size(self) -> int: ...

    @abc.abstractmethod
    def conditional_nll(self, input_text: str, target_text: str) -> float:
        """Mean per-token negative log-likelihood (nats), teacher forced."""

    @abc.abstractmethod
    def sample(self, input_text: str, config: BackboneConfig) -> DecodeResult:
        """Nucleus-sampled autoregressive decode, deterministic given seed."""

    @abc.abstractmethod
    def label_probability(self, input_text: str, labels: list[str]) -> np.ndarray:
        """Sequence probabilities of the labels, renormalized to sum to 1."""

    @abc.abstractmethod
    def encode_embed(self, prompted_text: str) -> np.ndarray:
        """First decoder position's final hidden state, pad token as input."""

    @abc.abstractmethod
    def count_target_tokens(self, target_text: str) -> int:
        """Number of scored tokens for a target, for token-weighted metrics."""

    @abc.abstractmethod
    def loss_batch(self, pairs: list[tuple[str, str]]) -> torch.Tensor:
        """Differentiable mean of per-pair conditional NLLs over a batch."""

    @abc.abstractmethod
    def embed_batch(self, prompted_texts: list[str]) -> torch.Tensor:
        """Differentiable (B, d) batch of first-decoder-output embeddings."""

    @abc.abstractmethod
    def trainable_parameters(self) -> list[torch.nn.Parameter]: ...

    @abc.abstractmethod
    def snapshot(self) -> dict:
        """Deep copy of the parameter state, for checkpoint selection."""

    @abc.abstractmethod
    def restore(self, state: dict) -> None: ...

    @abc.abstractmethod
    def save(self, directory: str | Path) -> None: ...


# ---------------------------------------------------------------------------
# Tiny reference model
# ---------------------------------------------------------------------------


class TinySeq2Seq(nn.Module):
    """Pre-LN transformer encoder-decoder with learned positions."""

    def __init__(self, vocab_size: int, hidden_size: int, num_layers: int,
                 num_heads: int, ffn_size: int, max_len: int):
        super().__init__()
        self.tok_emb = nn.Embedding(vocab_size, hidden_size)
        self.pos_emb = nn.Embedding(max_len, hidden_size)
        enc_layer = nn.TransformerEncoderLayer(
            hidden_size, num_heads, ffn_size, dropout=0.0,
            activation="gelu", batch_first=True, norm_first=True,
        )
        dec_layer = nn.TransformerDecoderLayer(
            hidden_size, num_heads, ffn_size, dropout=0.0,
            activation="gelu", batch_first=True, norm_first=True,
        )
        self.encoder = nn.TransformerEncoder(
            enc_layer, num_layers, norm=nn.LayerNorm(hidden_size),
            enable_nested_tensor=False,
        )
        self.decoder = nn.TransformerDecoder(
            dec_layer, num_layers, norm=nn.LayerNorm(hidden_size),
        )
        self.lm_head = nn.Linear(hidden_size, vocab_size, bias=False)
        self.max_len = max_len

    def _embed(self, ids: torch.Tensor) -> torch.Tensor:
        positions = torch.arange(ids.shape[1], device=ids.device)
        return self.tok_emb(ids) + self.pos_emb(positions)[None, :, :]

    def encode(self, src_ids: torch.Tensor, src_pad_mask: torch.Tensor) -> torch.Tensor:
        return self.encoder(self._embed(src_ids), src_key_padding_mask=src_pad_mask)

    def decode(self, tgt_ids: torch.Tensor, memory: torch.Tensor,
               src_pad_mask: torch.Tensor,
               tgt_pad_mask: torch.Tensor | None = None) -> torch.Tensor:
        t = tgt_ids.shape[1]
        causal = torch.triu(torch.ones(t, t, dtype=torch.bool, device=tgt_ids.device), 1)
        return self.decoder(
            self._embed(tgt_ids), memory,
            tgt_mask=causal,
            tgt_key_padding_mask=tgt_pad_mask,
            memory_key_padding_mask=src_pad_mask,
        )


class TinyBackbone(Seq2SeqBackbone):
    """The trainable reference implementation used throughout the tests."""

    def __init__(self, tokenizer: WordTokenizer, model: TinySeq2Seq,
                 hyperparams: dict):
        self.tokenizer = tokenizer
        self.model = model.double()
        self.hyperparams = dict(hyperparams)

    @classmethod
    def fresh(cls, tokenizer: WordTokenizer, hidden_size: int = 32,
              num_layers: int = 2, num_heads: int = 2, ffn_size: int = 64,
              max_len: int = 128, seed: int = 0) -> "TinyBackbone":
        torch.manual_seed(seed)
        hp = {
            "hidden_size": hidden_size, "num_layers": num_layers,
            "num_heads": num_heads, "ffn_size": ffn_size, "max_len": max_len,
        }
        model = TinySeq2Seq(vocab_size=len(tokenizer), **hp)
        return cls(tokenizer, model, hp)

    @property
    def hidden_size(self) -> int:
        return self.hyperparams["hidden_size"]

    # -- shared forward helpers --------------------------------------------

    def _encode_ids(self, text: str) -> list[int]:
        ids = self.tokenizer.encode(text, add_eos=True)
        if len(ids) <= 1:
            raise BackboneError(f"text tokenizes to no tokens: {text!r}")
        if len(ids) > self.model.max_len:
            logger.warning("input truncated to %d tokens", self.model.max_len)
            ids = ids[: self.model.max_len - 1] + [EOS_ID]
        return ids

    def _pad_batch(self, id_lists: list[list[int]]) -> tuple[torch.Tensor, torch.Tensor]:
        width = max(len(ids) for ids in id_lists)
        batch = torch.full((len(id_lists), width), PAD_ID, dtype=torch.long)
        for i, ids in enumerate(id_lists):
            batch[i, : len(ids)] = torch.tensor(ids, dtype=torch.long)
        return batch, batch.eq(PAD_ID)

    def next_token_probs(self, input_text: str, prefix_ids: list[int]) -> np.ndarray:
        """Distribution over the next token after a pad-started prefix."""
        src_ids = self._encode_ids(input_text)
        with torch.no_grad():
            src = torch.tensor([src_ids], dtype=torch.long)
            src_pad = src.eq(PAD_ID)
            memory = self.model.encode(src, src_pad)
            return self._step_probs(memory, src_pad, prefix_ids)

    def _step_probs(self, memory: torch.Tensor, src_pad: torch.Tensor,
                    prefix: list[int]) -> np.ndarray:
        dec_in = torch.tensor([[PAD_ID] + prefix], dtype=torch.long)
        hidden = self.model.decode(dec_in, memory, src_pad)
        return torch.softmax(self.model.lm_head(hidden[0, -1]), dim=-1).numpy()

    def _target_nll(self, pairs: list[tuple[str, str]],
                    include_eos: bool = True) -> torch.Tensor:
        """Per-pair mean per-token NLL, shape (B,). Differentiable."""
        src_lists = [self._encode_ids(src) for src, _ in pairs]
        for _, tgt in pairs:
            if not self.tokenizer.encode(tgt):
                raise BackboneError(f"target tokenizes to no tokens: {tgt!r}")
        tgt_lists = [self.tokenizer.encode(tgt, add_eos=include_eos) for _, tgt in pairs]
        src, src_pad = self._pad_batch(src_lists)
        tgt, _ = self._pad_batch(tgt_lists)
        dec_in = torch.cat(
            [torch.full((tgt.shape[0], 1), PAD_ID, dtype=torch.long), tgt[:, :-1]],
            dim=1,
        )
        # positional padding mask: the pad *start* token is a real input, so
        # masking by token id would starve position 0 of attention keys
        mask = torch.tensor(
            [[j < len(ids) for j in range(tgt.shape[1])] for ids in tgt_lists]
        )
        memory = self.model.encode(src, src_pad)
        hidden = self.model.decode(dec_in, memory, src_pad, ~mask)
        log_probs = torch.log_softmax(self.model.lm_head(hidden), dim=-1)
        token_nll = -log_probs.gather(2, tgt.unsqueeze(2)).squeeze(2)
        lengths = mask.sum(dim=1)
        return (token_nll * mask).sum(dim=1) / lengths

    # -- interface ---------------------------------------------------------

    def conditional_nll(self, input_text: str, target_text: str) -> float:
        with torch.no_grad():
            return float(self._target_nll([(input_text, target_text)])[0])

    def loss_batch(self, pairs: list[tuple[str, str]]) -> torch.Tensor:
        return self._target_nll(pairs).mean()

    def sample(self, input_text: str, config: BackboneConfig) -> DecodeResult:
        rng = np.random.default_rng(config.seed)
        src_ids = self._encode_ids(input_text)
        generated: list[int] = []
        with torch.no_grad():
            src = torch.tensor([src_ids], dtype=torch.long)
            src_pad = src.eq(PAD_ID)
            memory = self.model.encode(src, src_pad)
            for _ in range(min(config.max_decode_len, self.model.max_len - 1)):
                probs = self._step_probs(memory, src_pad, generated)
                filtered = nucleus_filter(probs, config.nucleus_p)
                token = int(rng.choice(len(filtered), p=filtered))
                if token == EOS_ID:
                    return DecodeResult(self.tokenizer.decode(generated))
                generated.append(token)
        return DecodeResult(self.tokenizer.decode(generated), truncated=True)

    def label_probability(self, input_text: str, labels: list[str]) -> np.ndarray:
        if not labels or len(set(labels)) != len(labels):
            raise BackboneError("labels must be non-empty and distinct")
        src_ids = self._encode_ids(input_text)
        log_scores = []
        with torch.no_grad():
            src = torch.tensor([src_ids], dtype=torch.long)
            src_pad = src.eq(PAD_ID)
            memory = self.model.encode(src, src_pad)
            for label in labels:
                # a label is scored on its own tokens only, no EOS appended
                ids = self.tokenizer.encode(label)
                if not ids:
                    raise BackboneError(f"label tokenizes to no tokens: {label!r}")
                dec_in = torch.tensor([[PAD_ID] + ids[:-1]], dtype=torch.long)
                hidden = self.model.decode(dec_in, memory, src_pad)
                log_probs = torch.log_softmax(self.model.lm_head(hidden[0]), dim=-1)
                steps = torch.arange(len(ids))
                log_scores.append(float(log_probs[steps, torch.tensor(ids)].sum()))
        return torch.softmax(torch.tensor(log_scores, dtype=torch.float64), dim=0).numpy()

    def encode_embed(self, prompted_text: str) -> np.ndarray:
        with torch.no_grad():
            return self.embed_batch([prompted_text])[0].numpy()

    def count_target_tokens(self, target_text: str) -> int:
        return len(self.tokenizer.encode(target_text, add_eos=True))

    def embed_batch(self, prompted_texts: list[str]) -> torch.Tensor:
        src_lists = [self._encode_ids(t) for t in prompted_texts]
        src, src_pad = self._pad_batch(src_lists)
        memory = self.model.encode(src, src_pad)
        dec_in = torch.full((len(prompted_texts), 1), PAD_ID, dtype=torch.long)
        hidden = self.model.decode(dec_in, memory, src_pad)
        return hidden[:, 0, :]

    def trainable_parameters(self) -> list[torch.nn.Parameter]:
        return list(self.model.parameters())

    def snapshot(self) -> dict:
        return {k: v.detach().clone() for k, v in self.model.state_dict().items()}

    def restore(self, state: dict) -> None:
        self.model.load_state_dict(state)

    # -- checkpointing -----------------------------------------------------

    def save(self, directory: str | Path) -> None:
        """Write a self-describing, versioned checkpoint directory.

        Layout: ``checkpoint.json`` (format tag + hyperparams + vocab +
        ordered parameter index) and ``params.bin`` (concatenated raw
        little-endian float64 bytes). Byte-stable across identical runs.
        """
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        state = self.model.state_dict()
        index = []
        with open(directory / "params.bin", "wb") as fh:
            for name in sorted(state):
                arr = state[name].detach().numpy().astype("<f8")
                index.append({"name": name, "shape": list(arr.shape)})
                fh.write(arr.tobytes())
        meta = {
            "format": CHECKPOINT_FORMAT,
            "format_version": CHECKPOINT_VERSION,
            "hyperparams": self.hyperparams,
            "vocab": self.tokenizer.vocab,
            "params": index,
        }
        with open(directory / "checkpoint.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, sort_keys=True)

    @classmethod
    def load(cls, directory: str | Path) -> "TinyBackbone":
        directory = Path(directory)
        with open(directory / "checkpoint.json", encoding="utf-8") as fh:
            meta = json.load(fh)
        if meta.get("format") != CHECKPOINT_FORMAT:
            raise ValueError(f"not a {CHECKPOINT_FORMAT} checkpoint: {directory}")
        if meta.get("format_version") != CHECKPOINT_VERSION:
            raise ValueError(
                f"unsupported checkpoint version {meta.get('format_version')}"
            )
        tokenizer = WordTokenizer(meta["vocab"])
        with torch.random.fork_rng():
            torch.manual_seed(0)
            model = TinySeq2Seq(vocab_size=len(tokenizer), **meta["hyperparams"])
        raw = np.fromfile(directory / "params.bin", dtype="<f8")
        state, offset = {}, 0
        for entry in meta["params"]:
            size = int(np.prod(entry["shape"])) if entry["shape"] else 1
            chunk = raw[offset: offset + size].reshape(entry["shape"])
            state[entry["name"]] = torch.from_numpy(chunk.copy())
            offset += size
        backbone = cls(tokenizer, model, meta["hyperparams"])
        backbone.model.load_state_dict(state)
        return backbone
