"""Prompted sentence embeddings and cosine similarity.

A sentence is wrapped in the embedding template before the backbone's
first-decoder-output extraction runs. Vectors are stored raw; unit
normalization happens inside :func:`cosine` and inside the diagnostics
that require it.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backbone import Seq2SeqBackbone
from .prompts import PromptKind, render

EXPORT_MAGIC = b"GCEM"
EXPORT_VERSION = 1


@dataclass(frozen=True)
class SentenceEmbedding:
    sentence: str
    vector: np.ndarray


def prompted(sentence: str) -> str:
    """The sentence wrapped in the embedding template."""
    return render(PromptKind.EMBEDDING, [sentence]).text


def embed(sentence: str, backbone: Seq2SeqBackbone) -> SentenceEmbedding:
    """Embed one sentence through the prompted extraction path."""
    return SentenceEmbedding(sentence, backbone.encode_embed(prompted(sentence)))


def embed_all(sentences: list[str], backbone: Seq2SeqBackbone) -> np.ndarray:
    """Embed many sentences; rows follow input order, shape (n, d)."""
    import torch

    with torch.no_grad():
        return backbone.embed_batch([prompted(s) for s in sentences]).numpy()


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine similarity is undefined for a zero vector")
    return float(np.dot(a, b) / (na * nb))


# ---------------------------------------------------------------------------
# Bulk export
# ---------------------------------------------------------------------------


def export_embeddings(sentences: list[str], backbone: Seq2SeqBackbone,
                      matrix_path: str | Path, index_path: str | Path) -> None:
    """Write a row-major float64 matrix file plus a sentence index file.

    Matrix header: magic ``GCEM``, u32 version, u64 count, u64 dimension,
    little-endian throughout; data follows as count*dim float64 values.
    """
    vectors = embed_all(sentences, backbone)
    with open(matrix_path, "wb") as fh:
        fh.write(struct.pack("<4sIQQ", EXPORT_MAGIC, EXPORT_VERSION,
                             vectors.shape[0], vectors.shape[1]))
        fh.write(np.ascontiguousarray(vectors, dtype="<f8").tobytes())
    with open(index_path, "w", encoding="utf-8") as fh:
        for sentence in sentences:
            fh.write(sentence.replace("\n", " ") + "\n")


def read_embeddings(matrix_path: str | Path) -> np.ndarray:
    with open(matrix_path, "rb") as fh:
        magic, version, count, dim = struct.unpack("<4sIQQ", fh.read(24))
        if magic != EXPORT_MAGIC:
            raise ValueError(f"not an embedding matrix file: {matrix_path}")
        if version != EXPORT_VERSION:
            raise ValueError(f"unsupported embedding matrix version {version}")
        data = np.frombuffer(fh.read(count * dim * 8), dtype="<f8")
    return data.reshape(count, dim).copy()
