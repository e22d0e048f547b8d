"""Evaluation harness: STS Spearman, ranking AP, alignment/uniformity.

STS files are tab-separated ``score<TAB>sentence_a<TAB>sentence_b``; scale
bounds come from an optional JSON manifest next to the file (default 0-5).
Ranking tasks are JSON lines ``{"query", "candidates", "relevance"}``.

Diagnostics run in one of two formula modes. Standard mode (the default)
uses squared distances between unit-normalized embeddings, matching the
convention the reference measurement setting follows, so numbers are
comparable across models. Literal mode preserves an alternative printed
form (unsquared norms, leading minus on alignment) for audit only.
"""

from __future__ import annotations

import enum
import json
import logging
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .backbone import Seq2SeqBackbone
from .data import CorpusFormatError, _check_malformed, _iter_jsonl
from .embedding import cosine, embed_all

logger = logging.getLogger(__name__)


class EvaluationError(ValueError):
    """Undefined metric (constant input, no relevant items, ...)."""


class FormulaMode(enum.Enum):
    STANDARD = "standard"
    LITERAL = "literal"


@dataclass(frozen=True)
class StsExample:
    sentence_a: str
    sentence_b: str
    gold_score: float


@dataclass(frozen=True)
class RankingQuery:
    query: str
    candidates: list[str]
    relevance: list[int]


@dataclass(frozen=True)
class DiagnosticsConfig:
    align_threshold: float = 4.0
    formula_mode: FormulaMode = FormulaMode.STANDARD


# ---------------------------------------------------------------------------
# Rank correlation
# ---------------------------------------------------------------------------


def _average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks; tied values receive the mean of their rank range."""
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and values[order[j + 1]] == values[order[i]]:
            j += 1
        ranks[order[i: j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x: list[float], y: list[float]) -> float:
    """Pearson correlation of average-ranked data."""
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 2:
        raise EvaluationError("spearman needs two equal-length lists of >= 2 values")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise EvaluationError("spearman is undefined for a constant list")
    rx, ry = _average_ranks(x), _average_ranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    return float((rx * ry).sum() / np.sqrt((rx * rx).sum() * (ry * ry).sum()))


def evaluate_sts(backbone: Seq2SeqBackbone, dataset: list[StsExample]) -> dict:
    """Spearman between predicted cosine similarities and gold scores."""
    if not dataset:
        raise EvaluationError("empty STS dataset")
    vec_a = embed_all([ex.sentence_a for ex in dataset], backbone)
    vec_b = embed_all([ex.sentence_b for ex in dataset], backbone)
    predictions = [cosine(a, b) for a, b in zip(vec_a, vec_b)]
    gold = [ex.gold_score for ex in dataset]
    return {"spearman": spearman(predictions, gold), "n": len(dataset)}


# ---------------------------------------------------------------------------
# Ranking
# ---------------------------------------------------------------------------


def average_precision(scores: list[float], relevance: list[int]) -> float:
    """Mean of precision-at-rank over the relevant items.

    Items are ranked by descending score; ties break by ascending original
    index.
    """
    if len(scores) != len(relevance):
        raise EvaluationError("scores and relevance must have equal lengths")
    if not any(relevance):
        raise EvaluationError("no relevant item; skip this query")
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    hits = 0
    precisions = []
    for rank, idx in enumerate(order, start=1):
        if relevance[idx]:
            hits += 1
            precisions.append(hits / rank)
    return float(np.mean(precisions))


def evaluate_ranking(backbone: Seq2SeqBackbone, queries: list[RankingQuery]) -> dict:
    """Mean AP over queries, cosine of prompted embeddings as the score.

    Queries without a relevant candidate are skipped and counted.
    """
    aps = []
    skipped = 0
    for query in queries:
        if not any(query.relevance):
            skipped += 1
            continue
        vectors = embed_all([query.query] + query.candidates, backbone)
        scores = [cosine(vectors[0], v) for v in vectors[1:]]
        aps.append(average_precision(scores, query.relevance))
    if not aps:
        raise EvaluationError("no ranking query had a relevant candidate")
    if skipped:
        logger.info("ranking: skipped %d query(ies) without relevant items", skipped)
    return {"map": float(np.mean(aps)), "n_queries": len(aps), "n_skipped": skipped}


# ---------------------------------------------------------------------------
# Alignment and uniformity
# ---------------------------------------------------------------------------


def _unit_rows(vectors: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    if np.any(norms == 0.0):
        raise EvaluationError("zero embedding vector; diagnostics undefined")
    return vectors / norms


def alignment_loss(pairs: list[tuple[str, str]], backbone: Seq2SeqBackbone,
                   config: DiagnosticsConfig = DiagnosticsConfig()) -> float:
    """Mean positive-pair distance between unit-normalized embeddings.

    Standard mode: mean squared Euclidean distance (>= 0, lower is better).
    Literal mode: negative mean unsquared distance.
    """
    if not pairs:
        raise EvaluationError("alignment needs at least one pair")
    left = _unit_rows(embed_all([a for a, _ in pairs], backbone))
    right = _unit_rows(embed_all([b for _, b in pairs], backbone))
    dists = np.linalg.norm(left - right, axis=1)
    if config.formula_mode is FormulaMode.LITERAL:
        return float(-np.mean(dists))
    return float(np.mean(dists ** 2))


def uniformity_loss(sentences: list[str], backbone: Seq2SeqBackbone,
                    config: DiagnosticsConfig = DiagnosticsConfig()) -> float:
    """log mean over unordered distinct pairs of exp(-2 * distance term).

    Standard mode squares the pair distance; literal mode does not.
    Always <= 0; more negative means a more uniform embedding space.
    """
    if len(sentences) < 2:
        raise EvaluationError("uniformity needs at least two sentences")
    vectors = _unit_rows(embed_all(sentences, backbone))
    sq = np.sum((vectors[:, None, :] - vectors[None, :, :]) ** 2, axis=2)
    iu = np.triu_indices(len(sentences), k=1)
    pair_sq = sq[iu]
    if config.formula_mode is FormulaMode.LITERAL:
        terms = np.exp(-2.0 * np.sqrt(pair_sq))
    else:
        terms = np.exp(-2.0 * pair_sq)
    return float(np.log(np.mean(terms)))


def select_alignment_pairs(dataset: list[StsExample],
                           threshold: float = 4.0) -> tuple[list[tuple[str, str]], int]:
    """STS pairs with gold strictly above the threshold, plus the count of
    exactly-at-threshold pairs that were excluded."""
    selected = [(ex.sentence_a, ex.sentence_b) for ex in dataset
                if ex.gold_score > threshold]
    at_threshold = sum(1 for ex in dataset if ex.gold_score == threshold)
    return selected, at_threshold


# ---------------------------------------------------------------------------
# Dataset files and reports
# ---------------------------------------------------------------------------


def load_sts(path: str | Path) -> tuple[list[StsExample], tuple[float, float]]:
    """Load a tab-separated STS file; scale bounds from ``<path>.manifest.json``
    when present (keys scale_min / scale_max), else 0-5."""
    path = Path(path)
    scale = (0.0, 5.0)
    manifest = path.with_name(path.name + ".manifest.json")
    if manifest.exists():
        with open(manifest, encoding="utf-8") as fh:
            meta = json.load(fh)
        scale = (float(meta["scale_min"]), float(meta["scale_max"]))
    examples: list[StsExample] = []
    malformed = 0
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {path}: {exc}") from exc
    with fh:
        for line in fh:
            line = line.rstrip("\n").rstrip("\r")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                malformed += 1
                continue
            try:
                gold = float(parts[0])
            except ValueError:
                malformed += 1
                continue
            if not (scale[0] <= gold <= scale[1]) or not parts[1].strip() or not parts[2].strip():
                malformed += 1
                continue
            examples.append(StsExample(parts[1], parts[2], gold))
    _check_malformed(path, len(examples), malformed)
    return examples, scale


def load_ranking(path: str | Path) -> list[RankingQuery]:
    path = Path(path)
    queries: list[RankingQuery] = []
    malformed = 0
    for _, line in _iter_jsonl(path):
        try:
            row = json.loads(line)
            query = RankingQuery(
                query=str(row["query"]),
                candidates=[str(c) for c in row["candidates"]],
                relevance=[int(r) for r in row["relevance"]],
            )
        except (json.JSONDecodeError, KeyError, TypeError, ValueError):
            malformed += 1
            continue
        if len(query.candidates) != len(query.relevance) or not query.candidates \
                or any(r not in (0, 1) for r in query.relevance):
            malformed += 1
            continue
        queries.append(query)
    _check_malformed(path, len(queries), malformed)
    return queries


def build_report(checkpoint_id: str, sts_results: dict[str, dict],
                 ranking_results: dict[str, dict] | None = None,
                 diagnostics: dict | None = None,
                 config: DiagnosticsConfig = DiagnosticsConfig()) -> dict:
    """Assemble the evaluation report structure written by the CLI."""
    report: dict = {
        "checkpoint": checkpoint_id,
        "formula_mode": config.formula_mode.value,
        "sts": sts_results,
    }
    if sts_results:
        report["sts_average"] = float(
            np.mean([r["spearman"] for r in sts_results.values()])
        )
    if ranking_results:
        report["ranking"] = ranking_results
    if diagnostics:
        report["diagnostics"] = diagnostics
    return report
