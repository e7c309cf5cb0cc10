"""The ``uast`` command line.

Subcommands cover the whole pipeline: parse (S-expression ASTs), featurize
(binary feature files), stats (path-length distribution), train, eval,
predict, sweep (hyperparameter series), and datagen (the bundled benchmark
generator).  Exit codes: 0 success, 1 usage, 2 data problem, 3 runtime
problem.

Settings resolve in three layers: a named profile supplies defaults, a JSON
config file overrides the profile, and explicit flags override both.  The
resolved run configuration is embedded in every checkpoint, history file,
and report for provenance.  The UASTKIT_TABLE environment variable points
at an alternative unification table; --table wins over it.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .ast_frontend import (
    SEXPR_EXTENSION,
    UnificationTable,
    language_for_extension,
    load_ast_sexpr,
    load_default_table,
    load_unification_table,
    normalize_language,
    parse_source,
    registered_languages,
    render_sexpr,
    unify_ast,
)
from .datagen import generate_corpus
from .errors import (
    ConfigError,
    DataError,
    EmptySplit,
    UastError,
    UsageError,
    VocabularyMismatch,
)
from .featurizer import FeaturizedSet, SampleRecord, path_length_stats, write_featurized
from .model import ModelConfig
from .train_eval import (
    corpus_labels,
    corpus_languages,
    evaluate_samples,
    featurize_with_vocab,
    ingest_corpus,
    load_checkpoint,
    predict_one,
    split_dataset,
    build_features,
    train,
)

TABLE_ENV = "UASTKIT_TABLE"

PROFILES: dict[str, dict] = {
    # batch-64 Adam profiles mirroring the published setup; they differ in
    # sequence length, which tracks each dataset's path-length distribution
    "leetcode": dict(L=200, N=400, d=200, heads=4, attn_dropout=0.2, h=64,
                     lstm_layers=2, lstm_dropout=0.5, gcn_layers=2,
                     gcn_hidden=200, d_out=64, gcn_activation="relu",
                     pooling="mean", learned_projections=False,
                     epochs=5, batch_size=64, lr=0.001),
    "jc": dict(L=700, N=400, d=200, heads=4, attn_dropout=0.2, h=64,
               lstm_layers=2, lstm_dropout=0.5, gcn_layers=2,
               gcn_hidden=200, d_out=64, gcn_activation="relu",
               pooling="mean", learned_projections=False,
               epochs=5, batch_size=64, lr=0.001),
    # small and regularization-free: sized to memorize the bundled corpora
    # quickly on one core
    "toy": dict(L=96, N=96, d=32, heads=4, attn_dropout=0.0, h=16,
                lstm_layers=2, lstm_dropout=0.0, gcn_layers=2,
                gcn_hidden=32, d_out=16, gcn_activation="relu",
                pooling="mean", learned_projections=False,
                epochs=50, batch_size=8, lr=0.01),
}
DEFAULT_PROFILE = "leetcode"


@dataclass
class RunConfig:
    """Everything that determines a run, minus the corpus contents."""
    profile: str = DEFAULT_PROFILE
    corpus: str | None = None
    manifest: str | None = None
    table: str | None = None
    out_dir: str | None = None
    mode: str = "uast"
    unified: bool = True
    seed: int = 0
    mask_names: tuple[str, ...] = ()
    ratios: tuple[int, int, int] = (3, 1, 1)
    epochs: int = 5
    batch_size: int = 64
    lr: float = 0.001
    max_steps: int | None = None
    L: int = 200
    N: int = 400
    d: int = 200
    heads: int = 4
    attn_dropout: float = 0.2
    h: int = 64
    lstm_layers: int = 2
    lstm_dropout: float = 0.5
    gcn_layers: int = 2
    gcn_hidden: int = 200
    d_out: int = 64
    gcn_activation: str = "relu"
    pooling: str = "mean"
    learned_projections: bool = False

    def to_dict(self) -> dict:
        out = asdict(self)
        out["mask_names"] = list(self.mask_names)
        out["ratios"] = list(self.ratios)
        return out

    def model_config(self, vocab_size: int, k: int) -> ModelConfig:
        return ModelConfig(
            vocab_size=vocab_size, k=k, mode=self.mode, L=self.L, d=self.d,
            heads=self.heads, attn_dropout=self.attn_dropout, h=self.h,
            lstm_layers=self.lstm_layers, lstm_dropout=self.lstm_dropout,
            N=self.N, gcn_layers=self.gcn_layers, gcn_hidden=self.gcn_hidden,
            d_out=self.d_out, gcn_activation=self.gcn_activation,
            pooling=self.pooling,
            learned_projections=self.learned_projections).validate()


_RUN_FIELD_NAMES = {f.name for f in fields(RunConfig)}


def _parse_ratios(text: str) -> tuple[int, int, int]:
    try:
        parts = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"bad --ratios {text!r}; expected like 3,1,1")
    if len(parts) != 3 or any(p < 0 for p in parts) or sum(parts) <= 0:
        raise UsageError(f"bad --ratios {text!r}; expected three counts")
    return parts


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Layer profile defaults, then config-file values, then explicit flags."""
    profile = getattr(args, "profile", None) or DEFAULT_PROFILE
    if profile not in PROFILES:
        raise UsageError(f"unknown profile {profile!r}; "
                         f"choose from {sorted(PROFILES)}")
    merged: dict = dict(PROFILES[profile])
    merged["profile"] = profile
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise DataError(f"cannot read config {config_path}: {exc}") from exc
        except ValueError as exc:
            raise DataError(f"bad JSON in {config_path}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise DataError(f"{config_path}: config must be a JSON object")
        unknown = set(loaded) - _RUN_FIELD_NAMES
        if unknown:
            raise UsageError(f"{config_path}: unknown keys {sorted(unknown)}")
        merged.update(loaded)
    for name in _RUN_FIELD_NAMES:
        value = getattr(args, name, None)
        if value is not None and name not in ("profile",):
            merged[name] = value
    if isinstance(merged.get("ratios"), str):
        merged["ratios"] = _parse_ratios(merged["ratios"])
    if isinstance(merged.get("ratios"), list):
        merged["ratios"] = tuple(merged["ratios"])
    if isinstance(merged.get("mask_names"), str):
        merged["mask_names"] = tuple(
            n.strip() for n in merged["mask_names"].split(",") if n.strip())
    if isinstance(merged.get("mask_names"), list):
        merged["mask_names"] = tuple(merged["mask_names"])
    known = {k: v for k, v in merged.items() if k in _RUN_FIELD_NAMES}
    return RunConfig(**known)


def _load_table(path: str | None) -> UnificationTable:
    if path:
        return load_unification_table(path)
    env = os.environ.get(TABLE_ENV)
    if env:
        return load_unification_table(env)
    return load_default_table()


def _require_corpus(rc: RunConfig) -> None:
    if not rc.corpus and not rc.manifest:
        raise UsageError("a corpus is required: pass --corpus or --manifest")


def _ingest(rc: RunConfig):
    _require_corpus(rc)
    return ingest_corpus(rc.corpus or ".", rc.manifest,
                         set(rc.mask_names) or None)


# --- subcommand bodies --------------------------------------------------------

def cmd_parse(args: argparse.Namespace) -> int:
    table = _load_table(args.table)
    for name in args.files:
        path = Path(name)
        text = path.read_text(encoding="utf-8", errors="replace")
        if path.suffix.lower() == SEXPR_EXTENSION:
            tree = load_ast_sexpr(text)
            language = args.lang and normalize_language(args.lang)
        else:
            language = normalize_language(args.lang) if args.lang else \
                language_for_extension(path.suffix)
            tree = parse_source(text, language)
        if not args.raw and language:
            tree = unify_ast(tree, language, table)
        print(render_sexpr(tree, pretty=args.pretty))
    return 0


def cmd_stats(args: argparse.Namespace) -> int:
    rc = resolve_run_config(args)
    samples = _ingest(rc)
    report = path_length_stats(s.tree for s in samples)
    if args.json:
        print(json.dumps(asdict(report), sort_keys=True))
    else:
        print(f"files   {report.count}")
        print(f"mean    {report.mean:.1f}")
        print(f"median  {report.median}")
        print(f"p70     {report.p70}")
        print(f"p80     {report.p80}")
        print(f"p90     {report.p90}")
        print(f"min     {report.min}")
        print(f"max     {report.max}")
    return 0


_SPLIT_TAG = {"train": "train", "validation": "val", "test": "test"}


def cmd_featurize(args: argparse.Namespace) -> int:
    rc = resolve_run_config(args)
    table = _load_table(rc.table)
    samples = _ingest(rc)
    splits = split_dataset(samples, rc.seed, rc.ratios)
    vocab = build_features(splits, table, rc.unified, rc.L, rc.N)
    labels = corpus_labels(samples)
    languages = corpus_languages(samples)
    lang_index = {name: i for i, name in enumerate(languages)}
    records = []
    for split_name, tag in _SPLIT_TAG.items():
        for s in splits[split_name]:
            records.append(SampleRecord(
                label=s.label_index, language=lang_index[s.language],
                split=tag, path=s.path_seq, graph=s.graph))
    fset = FeaturizedSet(L=rc.L, N=rc.N, vocab=vocab, labels=tuple(labels),
                         languages=tuple(languages), unified=rc.unified,
                         table_hash=table.table_hash, records=tuple(records))
    write_featurized(args.out, fset)
    print(f"wrote {len(records)} records ({len(labels)} classes, "
          f"{len(languages)} languages, vocab {vocab.size}) to {args.out}")
    return 0


def _train_once(rc: RunConfig, table, splits, vocab, labels, languages,
                out_dir, quiet: bool):
    cfg = rc.model_config(vocab.size, len(labels))
    log_fn = None if quiet else \
        (lambda msg: print(msg, file=sys.stderr))
    return train(splits, cfg, vocab, labels, languages, table.table_hash,
                 rc.unified, rc.seed, epochs=rc.epochs,
                 batch_size=rc.batch_size, lr=rc.lr, max_steps=rc.max_steps,
                 out_dir=out_dir, run_config=rc.to_dict(), log_fn=log_fn), cfg


def cmd_train(args: argparse.Namespace) -> int:
    rc = resolve_run_config(args)
    table = _load_table(rc.table)
    samples = _ingest(rc)
    splits = split_dataset(samples, rc.seed, rc.ratios)
    vocab = build_features(splits, table, rc.unified, rc.L, rc.N)
    labels, languages = corpus_labels(samples), corpus_languages(samples)
    result, cfg = _train_once(rc, table, splits, vocab, labels, languages,
                              rc.out_dir, args.quiet)
    last = result.history[-1]
    print(f"trained mode={cfg.mode} unified={rc.unified} "
          f"epochs={last['epoch']} steps={last['step']} "
          f"train_loss={last['train_loss']:.4f}")
    if last["val_accuracy"] is not None:
        print(f"validation accuracy {last['val_accuracy']:.4f} "
              f"(best {result.best_val_accuracy:.4f} "
              f"at epoch {result.best_epoch})")
    if splits["test"]:
        report = evaluate_samples(splits["test"], result.checkpoint.params,
                                  cfg, rc.batch_size)
        print(f"test: precision {report.precision:.4f} recall "
              f"{report.recall:.4f} f1 {report.f1:.4f} accuracy "
              f"{report.accuracy:.4f}")
    if result.final_path is not None:
        print(f"checkpoints: {result.final_path} (final), "
              f"{result.best_path} (best); history: {result.history_path}")
    return 0


def _eval_corpus_with_checkpoint(ckpt, rc: RunConfig, table, split_name: str):
    if table.table_hash != ckpt.table_hash:
        raise VocabularyMismatch(
            "the active unification table does not match the checkpoint "
            f"(table {table.table_hash[:12]}… vs checkpoint "
            f"{ckpt.table_hash[:12]}…)")
    samples = _ingest(rc)
    labels = corpus_labels(samples)
    if labels != list(ckpt.labels):
        raise DataError(
            f"corpus labels {labels} do not match checkpoint labels "
            f"{list(ckpt.labels)}")
    run = ckpt.run_config or {}
    seed = ckpt.seed
    ratios = tuple(run.get("ratios", (3, 1, 1)))
    splits = split_dataset(samples, seed, ratios)
    if split_name == "all":
        chosen = [s for name in ("train", "validation", "test")
                  for s in splits[name]]
    else:
        chosen = splits[split_name]
    if not chosen:
        raise EmptySplit(f"split {split_name!r} is empty")
    featurize_with_vocab(chosen, table, ckpt.unified, ckpt.vocab,
                         ckpt.config.L, ckpt.config.N)
    return evaluate_samples(chosen, ckpt.params, ckpt.config)


def cmd_eval(args: argparse.Namespace) -> int:
    rc = resolve_run_config(args)
    ckpt = load_checkpoint(args.checkpoint)
    table = _load_table(rc.table)
    report = _eval_corpus_with_checkpoint(ckpt, rc, table, args.split)
    header = {"mode": ckpt.config.mode, "unified": ckpt.unified,
              "seed": ckpt.seed, "split": args.split,
              "checkpoint_epoch": ckpt.epoch, "run_config": ckpt.run_config}
    if args.json:
        print(json.dumps({"header": header, "metrics": report.to_dict()},
                         sort_keys=True))
    else:
        print(f"mode {ckpt.config.mode}  unified {ckpt.unified}  "
              f"split {args.split}  seed {ckpt.seed}")
        print(report.format_table(list(ckpt.labels)))
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    rc = resolve_run_config(args)
    ckpt = load_checkpoint(args.checkpoint)
    table = _load_table(rc.table)
    if table.table_hash != ckpt.table_hash:
        raise VocabularyMismatch(
            "the active unification table does not match the checkpoint")
    path = Path(args.file)
    text = path.read_text(encoding="utf-8", errors="replace")
    is_sexpr = path.suffix.lower() == SEXPR_EXTENSION
    if is_sexpr:
        language = normalize_language(args.lang) if args.lang else "sexpr"
    else:
        language = normalize_language(args.lang) if args.lang else \
            language_for_extension(path.suffix)
    label, probs = predict_one(ckpt, text, language, table, is_sexpr)
    if args.json:
        print(json.dumps({"label": label,
                          "probabilities": dict(zip(ckpt.labels,
                                                    probs.tolist()))},
                         sort_keys=True))
    else:
        print(label)
        for name, p in zip(ckpt.labels, probs):
            print(f"  {name}  {p:.4f}")
    return 0


SWEEP_PARAMS = ("path-length", "gcn-layers")


def cmd_sweep(args: argparse.Namespace) -> int:
    rc = resolve_run_config(args)
    if args.param not in SWEEP_PARAMS:
        raise UsageError(f"--param must be one of {SWEEP_PARAMS}")
    try:
        values = [int(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"bad --values {args.values!r}; expected integers")
    if not values:
        raise UsageError("--values must name at least one setting")
    table = _load_table(rc.table)
    samples = _ingest(rc)
    splits = split_dataset(samples, rc.seed, rc.ratios)
    labels, languages = corpus_labels(samples), corpus_languages(samples)
    # one parse and one vocabulary serve every setting; only featurization
    # (for path-length) and training repeat
    vocab = build_features(splits, table, rc.unified, rc.L, rc.N,
                           keep_trees=True)
    rows = []
    for value in values:
        if args.param == "path-length":
            run = RunConfig(**{**rc.to_dict(), "L": value,
                               "ratios": rc.ratios,
                               "mask_names": rc.mask_names})
            for name in ("train", "validation", "test"):
                featurize_with_vocab(splits[name], table, rc.unified, vocab,
                                     run.L, run.N, keep_trees=True)
        else:
            run = RunConfig(**{**rc.to_dict(), "gcn_layers": value,
                               "ratios": rc.ratios,
                               "mask_names": rc.mask_names})
        out_dir = Path(rc.out_dir) / f"{args.param}-{value}" \
            if rc.out_dir else None
        result, cfg = _train_once(run, table, splits, vocab, labels,
                                  languages, out_dir, quiet=True)
        source = splits["test"] or splits["validation"] or splits["train"]
        report = evaluate_samples(source, result.checkpoint.params, cfg,
                                  run.batch_size)
        rows.append({"value": value, "precision": report.precision,
                     "recall": report.recall, "f1": report.f1,
                     "accuracy": report.accuracy})
    if args.json:
        print(json.dumps({"param": args.param, "rows": rows},
                         sort_keys=True))
    else:
        print(f"{args.param:>12} {'precision':>10} {'recall':>10} "
              f"{'f1':>10} {'accuracy':>10}")
        for row in rows:
            print(f"{row['value']:>12} {row['precision']:>10.4f} "
                  f"{row['recall']:>10.4f} {row['f1']:>10.4f} "
                  f"{row['accuracy']:>10.4f}")
    return 0


def cmd_datagen(args: argparse.Namespace) -> int:
    count = generate_corpus(args.out, seed=args.seed, per_pair=args.count)
    print(f"wrote {count} files under {args.out}")
    return 0


# --- parser -------------------------------------------------------------------

def _add_corpus_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--corpus", help="corpus root: <label>/<language>/<file>")
    sub.add_argument("--manifest",
                     help="CSV manifest of path,label[,language] rows")
    sub.add_argument("--mask-names", dest="mask_names",
                     help="comma-separated function names to mask before "
                          "parsing")


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--profile", choices=sorted(PROFILES),
                     help=f"preset defaults (default {DEFAULT_PROFILE})")
    sub.add_argument("--config", help="JSON file of run settings")
    sub.add_argument("--table", help="unification table file "
                                     f"(or ${TABLE_ENV})")
    sub.add_argument("--seed", type=int)
    sub.add_argument("--ratios", help="split ratios, e.g. 3,1,1")
    sub.add_argument("--mode", choices=("uast", "sast", "gast"))
    sub.add_argument("--no-unified-vocab", dest="unified",
                     action="store_const", const=False,
                     help="skip kind unification; use raw per-language kinds")
    sub.add_argument("--epochs", type=int)
    sub.add_argument("--batch-size", dest="batch_size", type=int)
    sub.add_argument("--lr", type=float)
    sub.add_argument("--max-steps", dest="max_steps", type=int)
    for name in ("L", "N", "d", "heads", "h", "lstm-layers", "gcn-layers",
                 "gcn-hidden", "d-out"):
        sub.add_argument(f"--{name}", dest=name.replace("-", "_"), type=int)
    sub.add_argument("--attn-dropout", dest="attn_dropout", type=float)
    sub.add_argument("--lstm-dropout", dest="lstm_dropout", type=float)
    sub.add_argument("--gcn-activation", dest="gcn_activation",
                     choices=("relu", "sigmoid", "tanh"))
    sub.add_argument("--pooling", choices=("mean", "sum"))
    sub.add_argument("--learned-projections", dest="learned_projections",
                     action="store_const", const=True,
                     help="learn attention input projections instead of "
                          "sharing the raw embedding")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uast",
        description="Cross-language program classification over unified "
                    "syntax trees")
    commands = parser.add_subparsers(dest="command", metavar="command")

    p = commands.add_parser("parse", help="print S-expression ASTs")
    p.add_argument("files", nargs="+")
    p.add_argument("--lang", help=f"language ({', '.join(registered_languages())})")
    p.add_argument("--raw", action="store_true",
                   help="skip kind unification")
    p.add_argument("--pretty", action="store_true", help="indent output")
    p.add_argument("--table")
    p.set_defaults(func=cmd_parse)

    p = commands.add_parser("stats", help="path-length distribution")
    _add_corpus_flags(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_stats)

    p = commands.add_parser("featurize",
                            help="write a binary feature file")
    _add_corpus_flags(p)
    _add_run_flags(p)
    p.add_argument("--out", required=True, help="output feature file")
    p.set_defaults(func=cmd_featurize)

    p = commands.add_parser("train", help="fit a model")
    _add_corpus_flags(p)
    _add_run_flags(p)
    p.add_argument("--out-dir", dest="out_dir",
                   help="directory for checkpoints and history")
    p.add_argument("--quiet", action="store_true",
                   help="suppress per-batch loss lines")
    p.set_defaults(func=cmd_train)

    p = commands.add_parser("eval", help="score a split with a checkpoint")
    _add_corpus_flags(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--split", default="test",
                   choices=("train", "validation", "test", "all"))
    p.add_argument("--table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval)

    p = commands.add_parser("predict", help="classify one file")
    p.add_argument("file")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--lang")
    p.add_argument("--table")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_predict)

    p = commands.add_parser("sweep",
                            help="train a series over one hyperparameter")
    _add_corpus_flags(p)
    _add_run_flags(p)
    p.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    p.add_argument("--values", required=True,
                   help="comma-separated integer settings")
    p.add_argument("--out-dir", dest="out_dir")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = commands.add_parser("datagen",
                            help="generate the bundled benchmark corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=int, default=60,
                   help="files per class and language")
    p.set_defaults(func=cmd_datagen)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return 1
    try:
        return args.func(args) or 0
    except UastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    raise SystemExit(main())
