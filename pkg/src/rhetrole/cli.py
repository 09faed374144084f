"""Command-line surface: ingest / stats / train / evaluate / predict /
reproduce-run.

Exit codes are a stable contract: 0 success, 1 runtime error, 2 bad input
or configuration. Every command is deterministic given its arguments and
the config seed.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import PRESETS, RunConfig, config_to_json, load_config_file, resolve_config
from .corpus import (
    LABELS,
    Corpus,
    SplitSpec,
    class_distribution,
    length_percentile,
    load_corpus,
    save_corpus,
    split,
)
from .embedding import (
    HashedBowProvider,
    TokenizerConfig,
    embed_batch,
    load_precomputed,
    tokenize,
)
from .errors import ConfigError, DimensionMismatchError, InputError, RhetroleError
from .imbalance import oversample, undersample, uniform_weights, weights_for_scheme
from .linear_model import (
    EpochStats,
    TrainConfig,
    load_checkpoint,
    save_checkpoint,
    softmax,
    train,
)
from .metrics import evaluate_predictions, report_to_json

_WEIGHT_FLAG_TO_SCHEME = {
    "inverse": "inverse_frequency",
    "direct": "direct_frequency",
    "uniform": "uniform",
}
_BALANCE_FLAG_TO_METHOD = {
    "weighting": "loss_weighting",
    "under": "undersample",
    "over": "oversample",
    "none": "none",
}
_UNBOUNDED_LEN = 2**31 - 1


def cmd_ingest(args) -> int:
    corpus = load_corpus(args.corpus)
    if not corpus.sentences:
        raise InputError(f"corpus {args.corpus} contains no sentences")
    if args.out:
        save_corpus(corpus, args.out)
    print(f"{len(corpus.documents)} documents, {len(corpus.sentences)} sentences")
    return 0


def cmd_stats(args) -> int:
    corpus = load_corpus(args.corpus)
    if not corpus.sentences:
        raise InputError(f"corpus {args.corpus} contains no sentences")
    counts = class_distribution(corpus)
    total = len(corpus.sentences)

    # Weight columns are computed over the labels actually present, so the
    # table stays meaningful on partial fixtures; absent labels show "-".
    present = [label for label in LABELS if counts[label] > 0]
    present_counts = [counts[label] for label in present]
    inverse = dict(zip(present, weights_for_scheme("inverse_frequency", present_counts)))
    direct = dict(zip(present, weights_for_scheme("direct_frequency", present_counts)))

    print("label\tcount\tpercent\tinverse_weight\tdirect_weight")
    for label in LABELS:
        c = counts[label]
        pct = 100.0 * c / total
        inv = f"{inverse[label]:.5f}" if label in inverse else "-"
        dw = f"{direct[label]:.5f}" if label in direct else "-"
        print(f"{label}\t{c}\t{pct:.2f}%\t{inv}\t{dw}")
    print(f"total\t{total}")
    return 0


def _build_hashed_provider(dim: int, casing: str, max_len: int) -> HashedBowProvider:
    return HashedBowProvider(dim, TokenizerConfig(casing=casing, max_len=max_len))


def _provider_for_training(cfg: RunConfig, corpus: Corpus) -> tuple[object, int | None]:
    """Provider per config; returns (provider, resolved max_len or None)."""
    if cfg.provider_kind == "precomputed":
        return load_precomputed(cfg.provider_arg), None
    dim = cfg.provider_arg
    max_len = cfg.max_len
    if max_len is None:
        probe = TokenizerConfig(casing=cfg.casing, max_len=_UNBOUNDED_LEN)
        max_len = length_percentile(
            corpus, lambda text: tokenize(text, probe), cfg.length_percentile_q
        )
    return _build_hashed_provider(dim, cfg.casing, max_len), max_len


def _provider_from_spec(spec: str, casing: str | None = None, max_len: int | None = None):
    """Build a provider from 'hashed:<dim>', a full hashed provider id, or
    'precomputed:<path>'. Explicit casing/max_len arguments win over values
    embedded in the id."""
    parts = spec.split(":")
    if parts[0] == "hashed":
        try:
            if len(parts) == 2:
                dim, id_casing, id_len = int(parts[1]), "cased", _UNBOUNDED_LEN
            elif len(parts) == 4:
                dim, id_casing, id_len = int(parts[1]), parts[2], int(parts[3])
            else:
                raise ValueError(spec)
        except ValueError:
            raise ConfigError(f"bad hashed provider spec {spec!r}") from None
        return _build_hashed_provider(dim, casing or id_casing, max_len or id_len)
    if parts[0] == "precomputed" and len(parts) > 1:
        return load_precomputed(spec.split(":", 1)[1])
    raise ConfigError(
        f"provider must be 'hashed:<dim>' or 'precomputed:<path>', got {spec!r}"
    )


def _provider_for_inference(args, ckpt):
    spec = args.provider or ckpt.provider_id
    # The checkpoint id embeds the training-time casing and truncation
    # bound; flags override them only when given explicitly.
    provider = _provider_from_spec(
        spec, getattr(args, "casing", None), getattr(args, "max_len", None)
    )
    if provider.dimension != ckpt.dim:
        raise DimensionMismatchError(
            f"provider dimension {provider.dimension} does not match "
            f"checkpoint dimension {ckpt.dim}"
        )
    return provider


def _resolve_from_args(args, preset: str | None = None) -> RunConfig:
    file_cfg = load_config_file(args.config) if getattr(args, "config", None) else None
    overrides = {
        "corpus": getattr(args, "corpus", None),
        "casing": getattr(args, "casing", None),
        "weight_scheme": _WEIGHT_FLAG_TO_SCHEME.get(getattr(args, "weights", None)),
        "balance": _BALANCE_FLAG_TO_METHOD.get(getattr(args, "balance", None)),
        "provider": getattr(args, "provider", None),
        "seed": getattr(args, "seed", None),
        "epochs": getattr(args, "epochs", None),
        "batch_size": getattr(args, "batch_size", None),
        "learning_rate": getattr(args, "lr", None),
        "weight_decay": getattr(args, "weight_decay", None),
        "train_fraction": getattr(args, "train_fraction", None),
        "split_mode": getattr(args, "split_mode", None),
        "selection_metric": getattr(args, "selection_metric", None),
        "max_len": getattr(args, "max_len", None),
    }
    return resolve_config(preset=preset or getattr(args, "preset", None),
                          file_config=file_cfg, overrides=overrides)


def _run_training(cfg: RunConfig, out_dir: Path):
    """Shared train pipeline. Writes checkpoint.txt, config.json and
    train_log.tsv into out_dir; returns what evaluate-on-validation needs."""
    if not cfg.corpus:
        raise ConfigError("no corpus given (flag --corpus or config field 'corpus')")
    corpus = load_corpus(cfg.corpus)
    if len(corpus.sentences) < 2:
        raise InputError(f"corpus {cfg.corpus} is too small to train on")
    provider, resolved_max_len = _provider_for_training(cfg, corpus)

    train_set, val_set = split(
        corpus, SplitSpec(train_fraction=cfg.train_fraction, seed=cfg.seed, mode=cfg.split_mode)
    )
    if not train_set or not val_set:
        raise InputError("split produced an empty train or validation set")

    if cfg.balance == "loss_weighting":
        counts = class_distribution(train_set)
        weights = weights_for_scheme(cfg.weight_scheme, [counts[label] for label in LABELS])
        if cfg.weight_overrides:
            for label, value in cfg.weight_overrides.items():
                weights[LABELS.index(label)] = value
    else:
        if cfg.balance == "undersample":
            train_set = undersample(train_set, cfg.seed)
        elif cfg.balance == "oversample":
            train_set = oversample(train_set, cfg.seed)
        weights = uniform_weights(len(LABELS))

    train_cfg = TrainConfig(
        batch_size=cfg.batch_size,
        epochs=cfg.epochs,
        learning_rate=cfg.learning_rate,
        weight_decay=cfg.weight_decay,
        beta1=cfg.beta1,
        beta2=cfg.beta2,
        epsilon=cfg.epsilon,
        seed=cfg.seed,
        selection_metric=cfg.selection_metric,
    )
    log_lines: list[str] = []

    def log_epoch(stats: EpochStats) -> None:
        line = f"{stats.epoch}\t{stats.train_loss:.6f}\t{stats.val_score:.6f}"
        log_lines.append(line)
        print(line)

    ckpt = train(train_set, val_set, provider, weights, train_cfg, labels=LABELS,
                 on_epoch=log_epoch)

    out_dir.mkdir(parents=True, exist_ok=True)
    save_checkpoint(ckpt, out_dir / "checkpoint.txt")
    resolved_weights = {label: float(w) for label, w in zip(LABELS, weights)}
    (out_dir / "config.json").write_text(
        config_to_json(
            cfg,
            resolved_weights=resolved_weights,
            resolved_max_len=resolved_max_len,
            resolved_provider_id=ckpt.provider_id,
        ),
        encoding="utf-8",
    )
    (out_dir / "train_log.tsv").write_text("".join(l + "\n" for l in log_lines), encoding="utf-8")
    print(f"checkpoint written to {out_dir / 'checkpoint.txt'} "
          f"(best {cfg.selection_metric} {ckpt.selection_score:.6f})")
    return ckpt, val_set, provider


def cmd_train(args) -> int:
    cfg = _resolve_from_args(args)
    _run_training(cfg, Path(args.out))
    return 0


def _evaluate_sentences(ckpt, provider, sentences):
    label_to_idx = {name: i for i, name in enumerate(ckpt.labels)}
    for s in sentences:
        if s.label not in label_to_idx:
            raise InputError(f"label {s.label!r} not in checkpoint label set")
    gold = [label_to_idx[s.label] for s in sentences]
    X = embed_batch(sentences, provider)
    preds = np.argmax(X @ ckpt.params.W.T + ckpt.params.b, axis=1).tolist()
    return evaluate_predictions(gold, preds, len(ckpt.labels))


def cmd_evaluate(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    provider = _provider_for_inference(args, ckpt)
    corpus = load_corpus(args.corpus)
    if not corpus.sentences:
        raise InputError(f"corpus {args.corpus} contains no sentences")
    cm, report = _evaluate_sentences(ckpt, provider, corpus.sentences)
    doc = report_to_json(report, cm, ckpt.labels)
    if args.out:
        Path(args.out).write_text(doc, encoding="utf-8")
        print(f"metrics written to {args.out}")
    else:
        print(doc, end="")
    return 0


def cmd_predict(args) -> int:
    ckpt = load_checkpoint(args.checkpoint)
    provider = _provider_for_inference(args, ckpt)
    text = Path(args.sentences).read_bytes().decode("utf-8")
    lines = [line.rstrip("\r") for line in text.split("\n") if line.strip()]
    out_lines = []
    for sentence in lines:
        z = ckpt.params.W @ provider.lookup(sentence) + ckpt.params.b
        idx = int(np.argmax(z))
        prob = float(softmax(z)[idx])
        out_lines.append(f"{sentence}\t{ckpt.labels[idx]}\t{prob:.6f}")
    output = "".join(l + "\n" for l in out_lines)
    if args.out:
        Path(args.out).write_text(output, encoding="utf-8")
        print(f"{len(out_lines)} predictions written to {args.out}")
    else:
        print(output, end="")
    return 0


def cmd_reproduce_run(args) -> int:
    run_key = args.run if args.run.startswith("run") else f"run{args.run}"
    if run_key not in PRESETS:
        raise ConfigError(f"unknown run id {args.run!r}; expected 1, 2 or 3")
    cfg = _resolve_from_args(args, preset=run_key)
    out_dir = Path(args.out) if args.out else Path(f"{run_key}_out")
    ckpt, val_set, provider = _run_training(cfg, out_dir)

    cm, report = _evaluate_sentences(ckpt, provider, val_set)
    (out_dir / "metrics.json").write_text(report_to_json(report, cm, ckpt.labels),
                                          encoding="utf-8")
    print("resolved config:")
    print((out_dir / "config.json").read_text(encoding="utf-8"), end="")
    print("scores on the local validation split (the original hidden test set "
          "is not distributable):")
    print(f"macro_precision\t{report.macro_precision:.6f}")
    print(f"macro_recall\t{report.macro_recall:.6f}")
    print(f"macro_f1\t{report.macro_f1:.6f}")
    return 0


def _add_common_flags(p: argparse.ArgumentParser, *, training: bool) -> None:
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default 42)")
    p.add_argument("--provider", default=None,
                   help="embedding provider: hashed:<dim> or precomputed:<path>")
    p.add_argument("--casing", choices=["cased", "uncased"], default=None)
    p.add_argument("--max-len", dest="max_len", type=int, default=None,
                   help="token truncation bound (default: 0.98 length percentile)")
    if training:
        p.add_argument("--config", default=None, help="run-config JSON file")
        p.add_argument("--weights", choices=sorted(_WEIGHT_FLAG_TO_SCHEME), default=None,
                       help="class-weight scheme for the loss")
        p.add_argument("--balance", choices=sorted(_BALANCE_FLAG_TO_METHOD), default=None,
                       help="imbalance strategy")
        p.add_argument("--epochs", type=int, default=None)
        p.add_argument("--batch-size", dest="batch_size", type=int, default=None)
        p.add_argument("--lr", type=float, default=None, help="learning rate")
        p.add_argument("--weight-decay", dest="weight_decay", type=float, default=None)
        p.add_argument("--train-fraction", dest="train_fraction", type=float, default=None)
        p.add_argument("--split-mode", dest="split_mode",
                       choices=["sentence_shuffled", "document_level"], default=None)
        p.add_argument("--selection-metric", dest="selection_metric",
                       choices=["macro_f1", "val_loss"], default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rhetrole",
        description="Rhetorical-role sentence classification for legal judgments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="validate a corpus TSV and print counts")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default=None, help="write the normalized corpus here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="label distribution and weight-scheme table")
    p.add_argument("--corpus", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("train", help="train a classifier head")
    p.add_argument("--corpus", default=None)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--preset", choices=sorted(PRESETS), default=None)
    _add_common_flags(p, training=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="score a checkpoint against a labeled corpus")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default=None, help="metrics JSON path (default: stdout)")
    _add_common_flags(p, training=False)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("predict", help="label raw sentences (one per line)")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--sentences", required=True, help="plain-text file, one sentence per line")
    p.add_argument("--out", default=None, help="TSV output path (default: stdout)")
    _add_common_flags(p, training=False)
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("reproduce-run", help="run one of the three preset configurations")
    p.add_argument("run", help="run id: 1, 2 or 3")
    p.add_argument("--corpus", required=True)
    p.add_argument("--out", default=None, help="output directory (default: run<k>_out)")
    _add_common_flags(p, training=True)
    p.set_defaults(func=cmd_reproduce_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RhetroleError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
