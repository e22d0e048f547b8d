"""Pipeline driver: one JSON config file, five subcommands.

Subcommands::

    train-gendisc   fit the shared generator/discriminator model
    synthesize      sample and filter triplets from unlabeled text
    train-embed     run a contrastive training schedule
    evaluate        score a checkpoint on similarity/ranking sets
    inspect         pretty-print a synthesized corpus with confidences

Artifacts land in a workspace directory::

    workspace/
      gendisc/                  checkpoint + train_log.jsonl
      synth/                    triplets.jsonl, pairs.jsonl, stats.json
      embed/<schedule>/         per-stage checkpoints + final/
      reports/                  report.json
      manifest.json             artifact -> config hash map
      .lock                     held while a command runs

The workspace comes from ``--workspace``, else the ``GENCONTRAST_WORKSPACE``
environment variable, else the config file. One command per workspace at
a time (lock file). Exit codes: 0 success, 1 usage or config error, 2
runtime failure. Primary outputs carry no timestamps, so reruns with
identical inputs and seeds are byte-identical.

The word-level tokenizer vocabulary is collected from every corpus named
in the config plus the prompt wording, so later stages never meet an
unrepresentable token.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from .backbone import BackboneError, TinyBackbone, WordTokenizer
from .contrastive import (PRESET_SCHEDULES, ContrastiveError, LossKind,
                          StageConfig, TrainingSchedule, rows_from_nli,
                          rows_from_qa, rows_from_synthetic, run_schedule)
from .data import (CorpusFormatError, build_instances, load_nli, load_qa,
                   load_unlabeled, mix_instances)
from .evaluation import (DiagnosticsConfig, EvaluationError, FormulaMode,
                         alignment_loss, build_report, evaluate_ranking,
                         evaluate_sts, load_ranking, load_sts,
                         select_alignment_pairs, uniformity_loss)
from .gendisc import GenDiscConfig
from .gendisc import train as gendisc_train
from .prompts import PromptError, PromptKind, arity, render
from .synthesis import SynthesisConfig, load_triplets
from .synthesis import run as synthesis_run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
WORKSPACE_ENV = "GENCONTRAST_WORKSPACE"

_CONFIG_KEYS = {"workspace", "seed", "corpora", "backbone", "gendisc",
                "synthesis", "schedule", "diagnostics"}
_CORPUS_KEYS = {"nli", "nli_dev", "unlabeled", "qa", "sts", "ranking",
                "synthetic", "in_domain"}
_BACKBONE_KEYS = {"hidden_size", "num_layers", "num_heads", "ffn_size",
                  "max_len", "vocab_size"}


class ConfigError(Exception):
    """Bad flags, config contents, or missing inputs (exit code 1)."""


class PipelineFailure(Exception):
    """The command started but could not finish (exit code 2)."""


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------


@dataclass
class PipelineConfig:
    workspace: Path
    seed: int
    corpora: dict
    backbone: dict
    gendisc: GenDiscConfig
    synthesis: SynthesisConfig
    schedule_spec: dict
    diagnostics: DiagnosticsConfig
    config_hash: str

    def corpus_path(self, key: str) -> Path | None:
        value = self.corpora.get(key)
        if value is None:
            return None
        path = Path(value)
        if not path.exists():
            raise ConfigError(f"corpora.{key} does not exist: {path}")
        return path

    def require_corpus(self, key: str) -> Path:
        path = self.corpus_path(key)
        if path is None:
            raise ConfigError(f"config is missing corpora.{key}")
        return path


def _build_section(raw: dict, key: str, factory, known_fields: set[str]):
    section = raw.get(key, {})
    if not isinstance(section, dict):
        raise ConfigError(f"config section {key!r} must be an object")
    unknown = set(section) - known_fields
    if unknown:
        raise ConfigError(f"unknown {key} option(s): {sorted(unknown)}")
    try:
        return factory(**section)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad {key} section: {exc}") from exc


def load_config(path: str | Path, workspace_override: str | None = None) -> PipelineConfig:
    path = Path(path)
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a JSON object")
    unknown = set(raw) - _CONFIG_KEYS
    if unknown:
        raise ConfigError(f"unknown config key(s): {sorted(unknown)}")

    workspace = workspace_override or os.environ.get(WORKSPACE_ENV) \
        or raw.get("workspace")
    if not workspace:
        raise ConfigError(
            "no workspace: set --workspace, the environment override, "
            "or a 'workspace' config key")

    corpora = raw.get("corpora", {})
    if not isinstance(corpora, dict):
        raise ConfigError("config section 'corpora' must be an object")
    unknown = set(corpora) - _CORPUS_KEYS
    if unknown:
        raise ConfigError(f"unknown corpora key(s): {sorted(unknown)}")

    backbone = raw.get("backbone", {})
    if not isinstance(backbone, dict):
        raise ConfigError("config section 'backbone' must be an object")
    unknown = set(backbone) - _BACKBONE_KEYS
    if unknown:
        raise ConfigError(f"unknown backbone option(s): {sorted(unknown)}")

    diag_raw = dict(raw.get("diagnostics", {}))
    if "formula_mode" in diag_raw:
        try:
            diag_raw["formula_mode"] = FormulaMode(diag_raw["formula_mode"])
        except ValueError as exc:
            raise ConfigError(f"bad diagnostics.formula_mode: {exc}") from exc

    # The hash identifies config *content*; where artifacts land is not
    # part of it, so moving a workspace does not change provenance.
    hashed = {k: v for k, v in raw.items() if k != "workspace"}
    config_hash = hashlib.sha256(
        json.dumps(hashed, sort_keys=True).encode()).hexdigest()

    return PipelineConfig(
        workspace=Path(workspace),
        seed=int(raw.get("seed", 0)),
        corpora=corpora,
        backbone=backbone,
        gendisc=_build_section(raw, "gendisc", GenDiscConfig,
                               {"learning_rate", "batch_size", "epochs",
                                "eval_every_steps", "seed"}),
        synthesis=_build_section(raw, "synthesis", SynthesisConfig,
                                 {"nucleus_p", "alpha", "seed",
                                  "keep_positive_only", "samples_per_relation",
                                  "max_decode_len"}),
        schedule_spec=raw.get("schedule", {"preset": "universal"}),
        diagnostics=_build_section({"diagnostics": diag_raw}, "diagnostics",
                                   DiagnosticsConfig,
                                   {"align_threshold", "formula_mode"}),
        config_hash=config_hash,
    )


def build_schedule(spec: dict) -> TrainingSchedule:
    """A preset name with overrides, or an explicit stage list."""
    if not isinstance(spec, dict):
        raise ConfigError("config section 'schedule' must be an object")
    if "stages" in spec:
        try:
            stages = tuple(StageConfig(
                name=s["name"], loss=LossKind(s["loss"]), tau=s["tau"],
                batch_size=s["batch_size"], epochs=s.get("epochs", 1),
                learning_rate=s.get("learning_rate", 5e-5),
            ) for s in spec["stages"])
            return TrainingSchedule(spec.get("name", "custom"), stages)
        except (KeyError, TypeError, ValueError, ContrastiveError) as exc:
            raise ConfigError(f"bad schedule stages: {exc}") from exc
    preset = spec.get("preset", "universal")
    builder = PRESET_SCHEDULES.get(preset)
    if builder is None:
        raise ConfigError(
            f"unknown schedule preset {preset!r}; "
            f"choose from {sorted(PRESET_SCHEDULES)}")
    kwargs = {k: v for k, v in spec.items() if k != "preset"}
    try:
        return builder(**kwargs)
    except (TypeError, ContrastiveError) as exc:
        raise ConfigError(f"bad schedule override(s): {exc}") from exc


# ---------------------------------------------------------------------------
# Workspace bookkeeping
# ---------------------------------------------------------------------------


class WorkspaceLock:
    """One command per workspace; the lock file holds the owner's pid."""

    def __init__(self, workspace: Path):
        self.path = workspace / ".lock"

    def __enter__(self):
        try:
            fd = os.open(self.path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            owner = self.path.read_text(encoding="utf-8").strip() or "unknown"
            raise PipelineFailure(
                f"workspace is locked by pid {owner} ({self.path}); "
                "remove the lock file if that process is gone") from None
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(str(os.getpid()))
        return self

    def __exit__(self, *exc_info):
        self.path.unlink(missing_ok=True)
        return False


def record_artifact(workspace: Path, artifact: Path, command: str,
                    config_hash: str) -> None:
    """Append provenance for an artifact to the workspace manifest."""
    manifest = workspace / "manifest.json"
    entries = {}
    if manifest.exists():
        with open(manifest, encoding="utf-8") as fh:
            entries = json.load(fh)
    rel = artifact.relative_to(workspace) if artifact.is_relative_to(workspace) \
        else artifact
    entries[str(rel)] = {"command": command, "config_sha256": config_hash}
    with open(manifest, "w", encoding="utf-8") as fh:
        json.dump(entries, fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Shared helpers
# ---------------------------------------------------------------------------


def _vocabulary_texts(cfg: PipelineConfig) -> list[str]:
    texts = [render(kind, ["x"] * arity(kind)).text for kind in PromptKind]
    texts.append("true false")
    for key in ("nli", "nli_dev"):
        path = cfg.corpus_path(key)
        if path:
            for t in load_nli(path):
                texts += [t.premise, t.entailment, t.contradiction]
    path = cfg.corpus_path("unlabeled")
    if path:
        texts += [u.text for u in load_unlabeled(path)]
    path = cfg.corpus_path("qa")
    if path:
        for p in load_qa(path):
            texts += [p.question, p.answer]
    for path in _sts_paths(cfg).values():
        examples, _ = load_sts(path)
        texts += [e.sentence_a for e in examples] + [e.sentence_b for e in examples]
    path = cfg.corpus_path("ranking")
    if path:
        for q in load_ranking(path):
            texts += [q.query] + list(q.candidates)
    return texts


def _sts_paths(cfg: PipelineConfig) -> dict[str, Path]:
    value = cfg.corpora.get("sts")
    if value is None:
        return {}
    if isinstance(value, str):
        value = {"sts": value}
    if not isinstance(value, dict):
        raise ConfigError("corpora.sts must be a path or a name->path object")
    paths = {}
    for name, p in value.items():
        path = Path(p)
        if not path.exists():
            raise ConfigError(f"corpora.sts[{name!r}] does not exist: {path}")
        paths[name] = path
    return paths


def _fresh_backbone(cfg: PipelineConfig) -> TinyBackbone:
    options = dict(cfg.backbone)
    vocab_size = options.pop("vocab_size", 1000)
    tokenizer = WordTokenizer.build(_vocabulary_texts(cfg), max_size=vocab_size)
    return TinyBackbone.fresh(tokenizer, seed=cfg.seed, **options)


def _load_checkpoint(directory: Path, what: str) -> TinyBackbone:
    if not (directory / "checkpoint.json").exists():
        raise ConfigError(f"no {what} checkpoint at {directory}")
    try:
        return TinyBackbone.load(directory)
    except (OSError, ValueError, KeyError) as exc:
        raise PipelineFailure(f"cannot load checkpoint {directory}: {exc}") from exc


def _evaluation_exclusions(cfg: PipelineConfig) -> set[str]:
    """Evaluation-set sentences that must not enter synthesis."""
    excluded: set[str] = set()
    for path in _sts_paths(cfg).values():
        examples, _ = load_sts(path)
        excluded.update(e.sentence_a for e in examples)
        excluded.update(e.sentence_b for e in examples)
    path = cfg.corpus_path("ranking")
    if path:
        for q in load_ranking(path):
            excluded.add(q.query)
            excluded.update(q.candidates)
    return excluded


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_train_gendisc(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    nli_path = cfg.require_corpus("nli")
    dev_path = cfg.require_corpus("nli_dev")
    train_triplets = load_nli(nli_path)
    dev_triplets = load_nli(dev_path)
    if not train_triplets or not dev_triplets:
        raise ConfigError("empty labeled corpus")
    instances = mix_instances(
        [inst for t in train_triplets for inst in build_instances(t)],
        seed=cfg.gendisc.seed)
    dev_instances = [inst for t in dev_triplets for inst in build_instances(t)]

    backbone = _fresh_backbone(cfg)
    out_dir = cfg.workspace / "gendisc"
    out_dir.mkdir(parents=True, exist_ok=True)
    outcome = gendisc_train(instances, dev_instances, cfg.gendisc, backbone,
                            log_path=out_dir / "train_log.jsonl")
    backbone.save(out_dir)
    record_artifact(cfg.workspace, out_dir, "train-gendisc", cfg.config_hash)
    final = outcome.history[-1][1]
    print(f"checkpoint: {out_dir}")
    print(f"best_step: {outcome.best_step}")
    print(f"final selection_score: {final.selection_score:.6f}")
    return EXIT_OK


def cmd_synthesize(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    checkpoint = Path(args.checkpoint) if args.checkpoint else cfg.workspace / "gendisc"
    backbone = _load_checkpoint(checkpoint, "generator/discriminator")
    unlabeled = load_unlabeled(cfg.require_corpus("unlabeled"),
                               _evaluation_exclusions(cfg))
    alphas = [cfg.synthesis.alpha]
    if args.alpha_sweep:
        try:
            alphas = [float(a) for a in args.alpha_sweep.split(",") if a.strip()]
        except ValueError as exc:
            raise ConfigError(f"bad --alpha-sweep value: {exc}") from exc
        if not alphas:
            raise ConfigError("--alpha-sweep needs at least one threshold")

    base = cfg.workspace / "synth"
    for alpha in alphas:
        out_dir = base if len(alphas) == 1 else base / f"alpha-{alpha:g}"
        out_dir.mkdir(parents=True, exist_ok=True)
        config = SynthesisConfig(
            nucleus_p=cfg.synthesis.nucleus_p, alpha=alpha,
            seed=cfg.synthesis.seed,
            keep_positive_only=cfg.synthesis.keep_positive_only,
            samples_per_relation=cfg.synthesis.samples_per_relation,
            max_decode_len=cfg.synthesis.max_decode_len)
        try:
            stats = synthesis_run(
                unlabeled, backbone, config,
                triplets_path=out_dir / "triplets.jsonl",
                pairs_path=out_dir / "pairs.jsonl",
                stats_path=out_dir / "stats.json")
        except OSError as exc:
            raise PipelineFailure(f"synthesis failed: {exc}") from exc
        record_artifact(cfg.workspace, out_dir / "triplets.jsonl",
                        "synthesize", cfg.config_hash)
        print(json.dumps({"alpha": alpha, "output": str(out_dir),
                          **stats.as_dict()}, sort_keys=True))
    return EXIT_OK


def _stage_rows(cfg: PipelineConfig, stage: StageConfig) -> list[tuple]:
    if stage.name in ("synthetic", "in_domain"):
        path = cfg.corpus_path(stage.name)
        if path is None and stage.name == "synthetic":
            path = cfg.workspace / "synth" / "triplets.jsonl"
            if not path.exists():
                raise ConfigError(
                    f"no synthesized corpus at {path}; run synthesize first "
                    "or set corpora.synthetic")
        if path is None:
            raise ConfigError(f"config is missing corpora.{stage.name}")
        return rows_from_synthetic(load_triplets(path))
    if stage.name == "nli":
        return rows_from_nli(load_nli(cfg.require_corpus("nli")))
    if stage.name == "qa":
        return rows_from_qa(load_qa(cfg.require_corpus("qa")))
    raise ConfigError(
        f"stage {stage.name!r} has no corpus mapping; stages must be named "
        "synthetic, in_domain, nli, or qa")


def cmd_train_embed(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    spec = dict(cfg.schedule_spec)
    if args.schedule:
        spec = {"preset": args.schedule}
    schedule = build_schedule(spec)
    corpora = {stage.name: _stage_rows(cfg, stage) for stage in schedule.stages}

    checkpoint = Path(args.checkpoint) if args.checkpoint else cfg.workspace / "gendisc"
    backbone = _load_checkpoint(checkpoint, "generator/discriminator")

    out_root = cfg.workspace / "embed" / schedule.name
    out_root.mkdir(parents=True, exist_ok=True)
    log_path = out_root / "train_log.jsonl"
    mode = "a" if args.resume and log_path.exists() else "w"
    try:
        with open(log_path, mode, encoding="utf-8") as log_fh:
            backbone, outcome = run_schedule(
                backbone, schedule, corpora, seed=cfg.seed,
                out_root=out_root, resume=args.resume, log_stream=log_fh)
    except ContrastiveError as exc:
        raise ConfigError(str(exc)) from exc
    final_dir = out_root / "final"
    final_dir.mkdir(parents=True, exist_ok=True)
    backbone.save(final_dir)
    record_artifact(cfg.workspace, final_dir, "train-embed", cfg.config_hash)
    if outcome.resumed_stages:
        print(f"resumed past {outcome.resumed_stages} completed stage(s)")
    for stage in outcome.stages:
        print(f"stage {stage.name}: {stage.steps} step(s)")
    print(f"checkpoint: {final_dir}")
    return EXIT_OK


def cmd_evaluate(cfg: PipelineConfig, args: argparse.Namespace) -> int:
    if args.checkpoint:
        checkpoint = Path(args.checkpoint)
    else:
        schedule = build_schedule(dict(cfg.schedule_spec))
        checkpoint = cfg.workspace / "embed" / schedule.name / "final"
    backbone = _load_checkpoint(checkpoint, "embedding")
    checkpoint_id = str(checkpoint.relative_to(cfg.workspace)
                        if checkpoint.is_relative_to(cfg.workspace) else checkpoint)

    sts_paths = _sts_paths(cfg)
    if not sts_paths and cfg.corpus_path("ranking") is None:
        raise ConfigError("nothing to evaluate: configure corpora.sts "
                          "or corpora.ranking")
    sts_results = {}
    all_examples = []
    for name, path in sorted(sts_paths.items()):
        examples, _ = load_sts(path)
        sts_results[name] = evaluate_sts(backbone, examples)
        all_examples += examples

    ranking_results = None
    ranking_path = cfg.corpus_path("ranking")
    if ranking_path:
        ranking_results = {"ranking": evaluate_ranking(
            backbone, load_ranking(ranking_path))}

    diagnostics = None
    if args.diagnostics:
        if not all_examples:
            raise ConfigError("--diagnostics needs an sts corpus")
        pairs, at_threshold = select_alignment_pairs(
            all_examples, cfg.diagnostics.align_threshold)
        if not pairs:
            raise ConfigError(
                f"no pairs above alignment threshold "
                f"{cfg.diagnostics.align_threshold}")
        sentences = sorted({e.sentence_a for e in all_examples}
                           | {e.sentence_b for e in all_examples})
        diagnostics = {
            "alignment": alignment_loss(pairs, backbone, cfg.diagnostics),
            "alignment_pairs": len(pairs),
            "alignment_pairs_at_threshold": at_threshold,
            "uniformity": uniformity_loss(sentences, backbone, cfg.diagnostics),
        }

    report = build_report(checkpoint_id, sts_results, ranking_results,
                          diagnostics, cfg.diagnostics)
    reports_dir = cfg.workspace / "reports"
    reports_dir.mkdir(parents=True, exist_ok=True)
    report_path = reports_dir / "report.json"
    with open(report_path, "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    record_artifact(cfg.workspace, report_path, "evaluate", cfg.config_hash)
    print(f"report: {report_path}")
    if "sts_average" in report:
        print(f"sts_average: {report['sts_average']:.6f}")
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    path = Path(args.corpus)
    if not path.exists():
        raise ConfigError(f"no such corpus: {path}")
    shown = 0
    total = 0
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            try:
                row = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path} is not JSON lines: {exc}") from exc
            total += 1
            if shown >= args.limit:
                continue
            shown += 1
            print(f"[{total}] anchor:   {row.get('anchor', '?')}")
            print(f"    positive: {row.get('positive', '?')} "
                  f"(confidence {row.get('pos_confidence', float('nan')):.4f})")
            if "negative" in row:
                print(f"    negative: {row.get('negative', '?')} "
                      f"(confidence {row.get('neg_confidence', float('nan')):.4f})")
    print(f"{total} row(s) in {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; this tool reserves 2
    # for runtime failures, so remap.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    """Usage error carrying the parser message."""


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gencontrast",
                     description="semi-supervised sentence-embedding pipeline")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="JSON pipeline config")
        p.add_argument("--workspace", help="override the workspace directory")

    p = sub.add_parser("train-gendisc",
                       help="fit the generator/discriminator model")
    add_common(p)

    p = sub.add_parser("synthesize", help="generate and filter triplets")
    add_common(p)
    p.add_argument("--checkpoint", help="generator checkpoint directory "
                                        "(default: workspace/gendisc)")
    p.add_argument("--alpha-sweep",
                   help="comma-separated thresholds; one output per value")

    p = sub.add_parser("train-embed", help="run a contrastive schedule")
    add_common(p)
    p.add_argument("--checkpoint", help="starting checkpoint directory "
                                        "(default: workspace/gendisc)")
    p.add_argument("--schedule", choices=sorted(PRESET_SCHEDULES),
                   help="preset overriding the config schedule")
    p.add_argument("--resume", action="store_true",
                   help="skip stages that already completed")

    p = sub.add_parser("evaluate", help="score a checkpoint")
    add_common(p)
    p.add_argument("--checkpoint", help="embedding checkpoint directory "
                                        "(default: workspace/embed/<schedule>/final)")
    p.add_argument("--diagnostics", action="store_true",
                   help="add alignment/uniformity fields to the report")

    p = sub.add_parser("inspect", help="pretty-print a synthesized corpus")
    p.add_argument("corpus", help="triplets or pairs JSON-lines file")
    p.add_argument("--limit", type=int, default=10,
                   help="rows to print (default 10)")
    return parser


_COMMANDS = {
    "train-gendisc": cmd_train_gendisc,
    "synthesize": cmd_synthesize,
    "train-embed": cmd_train_embed,
    "evaluate": cmd_evaluate,
}


def run(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SystemExit as exc:  # --help and friends
        return EXIT_OK if not exc.code else EXIT_CONFIG

    try:
        if args.command == "inspect":
            return cmd_inspect(args)
        cfg = load_config(args.config, args.workspace)
        cfg.workspace.mkdir(parents=True, exist_ok=True)
        with WorkspaceLock(cfg.workspace):
            return _COMMANDS[args.command](cfg, args)
    except (ConfigError, CorpusFormatError, PromptError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (PipelineFailure, BackboneError, ContrastiveError,
            EvaluationError) as exc:
        print(f"failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        print("interrupted", file=sys.stderr)
        return EXIT_RUNTIME


def main() -> None:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
