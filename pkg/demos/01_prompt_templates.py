"""
The four fixed prompt templates
===============================

Every stage of the pipeline talks to the backbone through one of four
prompts: two generation prompts (entailment and contradiction), one
discrimination prompt, and one embedding prompt. Sentences go into the
slots verbatim, so the rendered text is reproducible byte for byte.
"""

from gencontrast.prompts import PromptKind, arity, render, template_skeleton

# The raw templates, with their placeholder slots still visible.
for kind in PromptKind:
    print(f"{kind.value} (arity {arity(kind)}):")
    print(f"  {template_skeleton(kind)}")
print()

# Rendering fills the slots in order. A generation prompt takes one
# sentence and asks the model to continue after "Sentence 2:".
source = "the cat chase the red ball"
entail = render(PromptKind.ENTAILMENT_GEN, [source])
print("entailment generation prompt:")
print(f"  {entail.text}")

contra = render(PromptKind.CONTRADICTION_GEN, [source])
print("contradiction generation prompt:")
print(f"  {contra.text}")
print()

# The discrimination prompt takes two sentences and frames a true/false
# question about the pair.
disc = render(PromptKind.DISCRIMINATION, [source, "the cat chase the ball"])
print("discrimination prompt:")
print(f"  {disc.text}")
print()

# The embedding prompt wraps a single sentence; the encoder state after
# reading it becomes the sentence vector.
emb = render(PromptKind.EMBEDDING, [source])
print("embedding prompt:")
print(f"  {emb.text}")
print()

# Rendered prompts remember where they came from.
print(f"kind: {emb.kind.value}")
print(f"source sentences: {emb.source_sentences}")

# Slot counts are checked: a discrimination prompt needs exactly two
# sentences, and empty sentences are rejected.
from gencontrast.prompts import PromptError

try:
    render(PromptKind.DISCRIMINATION, [source])
except PromptError as exc:
    print(f"arity check: {exc}")
try:
    render(PromptKind.EMBEDDING, ["   "])
except PromptError as exc:
    print(f"empty check: {exc}")
