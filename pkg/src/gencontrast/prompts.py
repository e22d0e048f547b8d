"""The four fixed prompt templates driving every pipeline stage.

Each template is an immutable string with ``{0}``/``{1}`` slots. Sentences
are inserted verbatim: no escaping is applied even when a sentence itself
contains a double quote, so rendered prompts are bit-exact and reversible.
A sentence with an embedded ``"`` triggers a warning log, nothing more.

No trailing space is emitted after the generation templates' final
``Sentence 2:`` marker.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

logger = logging.getLogger(__name__)


class PromptKind(enum.Enum):
    """One value per template; the enum value doubles as a short tag."""

    ENTAILMENT_GEN = "entailment-gen"
    CONTRADICTION_GEN = "contradiction-gen"
    DISCRIMINATION = "discrimination"
    EMBEDDING = "embedding"


_TEMPLATES: dict[PromptKind, str] = {
    PromptKind.ENTAILMENT_GEN: 'Write two sentences that are entailment. Sentence 1: "{0}" Sentence 2:',
    PromptKind.CONTRADICTION_GEN: 'Write two sentences that are contradictory. Sentence 1: "{0}" Sentence 2:',
    PromptKind.DISCRIMINATION: 'if "{0}", does this mean that "{1}"? true or false',
    PromptKind.EMBEDDING: "{0} Question: what can we draw from the above sentence?",
}

_ARITY: dict[PromptKind, int] = {
    PromptKind.ENTAILMENT_GEN: 1,
    PromptKind.CONTRADICTION_GEN: 1,
    PromptKind.DISCRIMINATION: 2,
    PromptKind.EMBEDDING: 1,
}


class PromptError(ValueError):
    """Raised on arity mismatch or empty source sentences."""


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    kind: PromptKind
    source_sentences: tuple[str, ...]


def arity(kind: PromptKind) -> int:
    """Number of sentences the template consumes (2 for discrimination)."""
    return _ARITY[kind]


def template_skeleton(kind: PromptKind) -> str:
    """The raw template with the placeholder slots left in place."""
    return _TEMPLATES[kind]


def render(kind: PromptKind, sentences: list[str]) -> RenderedPrompt:
    """Instantiate a template with the given sentences, verbatim.

    Raises :class:`PromptError` when the sentence count does not match the
    template arity or any sentence is empty after whitespace trimming.
    """
    expected = _ARITY[kind]
    if len(sentences) != expected:
        raise PromptError(
            f"{kind.value} prompt takes {expected} sentence(s), got {len(sentences)}"
        )
    for s in sentences:
        if not s.strip():
            raise PromptError(f"{kind.value} prompt given an empty sentence")
        if '"' in s:
            logger.warning(
                "sentence contains a double quote; inserted verbatim: %r", s
            )
    text = _TEMPLATES[kind].format(*sentences)
    return RenderedPrompt(text=text, kind=kind, source_sentences=tuple(sentences))
