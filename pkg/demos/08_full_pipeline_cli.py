"""
The full pipeline through the command line
==========================================

Four subcommands chain into the complete loop: train-gendisc fits the
generator/discriminator, synthesize writes the filtered triplet corpus,
train-embed runs the contrastive schedule on top, and evaluate scores
the result. Everything is driven by one JSON config plus a workspace
directory. This script shells through the in-process entry point, which
is exactly what the installed console script wraps. About ten seconds
of CPU time at this scale.
"""

import json
import tempfile
from pathlib import Path

from gencontrast import toydata
from gencontrast.cli import run

scratch = tempfile.TemporaryDirectory()
root = Path(scratch.name)
workspace = root / "workspace"

# Write the toy corpus in the on-disk formats the loaders read.
corpus = toydata.build_toy_corpus(seed=0, n_nli=200, n_nli_dev=24, n_qa=12,
                                  n_unlabeled=60, n_sts=24, n_ranking=4)
paths = toydata.write_corpus(corpus, root / "corpus")

# One config describes the whole run: corpus locations, model size, and
# per-stage settings. Unknown keys are rejected, so typos fail fast.
config = {
    "workspace": str(workspace),
    "seed": 1,
    "corpora": {
        "nli": str(paths["nli"]),
        "nli_dev": str(paths["nli_dev"]),
        "unlabeled": str(paths["unlabeled"]),
        "sts": str(paths["sts"]),
        "ranking": str(paths["ranking"]),
    },
    "backbone": {"hidden_size": 48, "num_layers": 2, "num_heads": 4,
                 "ffn_size": 96, "max_len": 96, "vocab_size": 500},
    "gendisc": {"learning_rate": 5e-4, "batch_size": 16, "epochs": 10,
                "eval_every_steps": 500, "seed": 0},
    "synthesis": {"nucleus_p": 0.9, "alpha": 0.9, "seed": 0,
                  "max_decode_len": 16},
    "schedule": {"preset": "universal", "batch_size_synth": 16,
                 "batch_size_nli": 32, "epochs_synth": 4, "epochs_nli": 2,
                 "learning_rate": 5e-4},
}
config_path = root / "pipeline.json"
config_path.write_text(json.dumps(config, indent=2))
print(f"config: {config_path}")
print()

# Stage 1: fit the generator/discriminator on the labeled NLI data.
print("$ gencontrast train-gendisc --config pipeline.json")
code = run(["train-gendisc", "--config", str(config_path)])
print(f"(exit {code})")
print()

# Stage 2: synthesize triplets from the unlabeled pool. Both sides of
# a candidate pair must clear the 0.9 confidence threshold to survive.
print("$ gencontrast synthesize --config pipeline.json")
code = run(["synthesize", "--config", str(config_path)])
print(f"(exit {code})")
print()

# Stage 3: the contrastive schedule, synthetic stage then NLI stage.
print("$ gencontrast train-embed --config pipeline.json")
code = run(["train-embed", "--config", str(config_path)])
print(f"(exit {code})")
print()

# Stage 4: score the final checkpoint, with geometry diagnostics.
print("$ gencontrast evaluate --config pipeline.json --diagnostics")
code = run(["evaluate", "--config", str(config_path), "--diagnostics"])
print(f"(exit {code})")
print()

# A quick look at a few synthesized rows.
triplets = workspace / "synth" / "triplets.jsonl"
print(f"$ gencontrast inspect {triplets.name} --limit 3")
code = run(["inspect", str(triplets), "--limit", "3"])
print(f"(exit {code})")
print()

# The workspace now holds every artifact, and the manifest records
# which command wrote what under which config hash.
print("workspace contents:")
for path in sorted(workspace.rglob("*")):
    if path.is_file():
        print(f"  {path.relative_to(workspace)}")
print()

manifest = json.loads((workspace / "manifest.json").read_text())
for artifact, entry in sorted(manifest.items()):
    print(f"manifest: {artifact} <- {entry['command']} "
          f"(config {entry['config_sha256'][:12]})")

report = json.loads((workspace / "reports" / "report.json").read_text())
print(f"evaluated checkpoint: {report['checkpoint']}")
print(f"sts spearman: {report['sts']['sts']['spearman']:.4f}")
print(f"ranking map : {report['ranking']['ranking']['map']:.4f}")
print(f"alignment   : {report['diagnostics']['alignment']:.4f}")
print(f"uniformity  : {report['diagnostics']['uniformity']:.4f}")

scratch.cleanup()
