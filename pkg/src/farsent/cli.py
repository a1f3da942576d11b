"""farsent command line: preprocess, featurize, train, predict, evaluate,
ablate, estimate-probs and embed-demo.

Exit status is 0 on success, 1 on a usage error and 2 on a data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .classify import TRAINERS, ModelFormatError, load_model, save_model, split_train_test
from .embed import FeedForwardConfig, analogy, embed_review, load_vectors, project_2d, train_ffn, \
    write_projection_csv
from .evaluation import CorpusError, LabeledReview, ablate, ablation_table, load_corpus, majority_accuracy, \
    parse_corpus, score, write_ablation_csv
from .features import FEATURE_NAMES, estimate_probability_table, read_feature_csv, write_feature_csv
from .lexicon import LexiconError, PolarityLabel
from .pipeline import CLASSIFIERS, ConfigError, FeatureSet, RunConfig, build, default_config, featurize
from .preprocess import Level

log = logging.getLogger("farsent")


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: {message}")


def _stdout_or(path: Optional[str]):
    return open(path, "w", encoding="utf-8", newline="") if path else sys.stdout


# --- shared options ----------------------------------------------------------

def _resource_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("resources")
    g.add_argument("--config", help="key = value config file (default from $FARSENT_CONFIG)")
    g.add_argument("--lex-triple", help="lexicon TSV with pos/obj/neg scores")
    g.add_argument("--lex-scalar", help="lexicon TSV with scores in [-1, 1]")
    g.add_argument("--lex-label", help="lexicon TSV with neg/obj/pos labels")
    g.add_argument("--shifters", help="negator and intensifier list")
    g.add_argument("--keywords", help="domain keyword list")
    g.add_argument("--stopwords", help="stopword list")
    g.add_argument("--abbreviations", help="abbreviation list")
    g.add_argument("--emoticons", help="emoticon list")
    g.add_argument("--prob-table", help="P(i) table TSV")
    g.add_argument("--level", choices=["sentence", "document", "sent", "doc"],
                   help="feature level (default: each record's own level)")
    g.add_argument("--seed", type=int, help="seed for every random choice (default 0)")
    g.add_argument("--literal-reducer", action="store_true", default=None,
                   help="reducers subtract from negative scalar scores instead of clipping at zero")
    g.add_argument("--elongation-window", choices=["preceding", "following"],
                   help="word doubled by an elongated intensifier")


def _run_config(args) -> RunConfig:
    try:
        base = default_config(getattr(args, "config", None))
        cfg = base.override(**{k: getattr(args, k, None) for k in (
            "lex_triple", "lex_scalar", "lex_label", "shifters", "keywords", "stopwords", "abbreviations",
            "emoticons", "prob_table", "embeddings", "seed", "level", "classifier", "literal_stacking",
            "literal_reducer", "elongation_window", "at_least", "scalar_ffn_head")})
        cfg.check_paths()
    except (ConfigError, OSError) as exc:
        raise DataError(str(exc)) from None
    return cfg


def _corpus(path: str) -> list[LabeledReview]:
    return load_corpus(path)


def _features(args, cfg: RunConfig) -> FeatureSet:
    if getattr(args, "features", None):
        ids, labels, rows = read_feature_csv(args.features)
        y = np.array([PolarityLabel.parse(lab).index for lab in labels], dtype=np.int64)
        lv = cfg.level or "document"
        return FeatureSet(ids, y, [lv] * len(ids), np.array(rows, dtype=np.float64).reshape(len(ids), -1))
    if not getattr(args, "corpus", None):
        raise UsageError("one of --corpus or --features is required")
    return featurize(_corpus(args.corpus), build(cfg), cfg.level)


def _embedded(corpus: Sequence[LabeledReview], cfg: RunConfig) -> FeatureSet:
    if not cfg.embeddings:
        raise UsageError("the ffn classifier needs --embeddings")
    table = load_vectors(cfg.embeddings)
    res = build(cfg)
    rows = sorted(corpus, key=lambda r: r.id)
    X = np.array([embed_review(res.preprocessor.document(r.text, r.id, r.level).words, table) for r in rows])
    return FeatureSet([r.id for r in rows], np.array([r.label.index for r in rows], dtype=np.int64),
                      [r.level.value for r in rows], X.reshape(len(rows), table.dim))


# --- subcommands --------------------------------------------------------------

def cmd_preprocess(args) -> None:
    cfg = _run_config(args)
    res = build(cfg)
    if args.corpus:
        items = [(r.id, r.text, r.level) for r in _corpus(args.corpus)]
    else:
        text = Path(args.input).read_text(encoding="utf-8") if args.input else sys.stdin.read()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        width = len(str(len(lines)))
        items = [(str(i + 1).zfill(width), ln, cfg.level or "document") for i, ln in enumerate(lines)]
    out = _stdout_or(args.out)
    try:
        for rid, text, level in sorted(items, key=lambda t: t[0]):
            doc = res.preprocessor.document(text, rid, level)
            out.write(json.dumps(doc.to_dict(), ensure_ascii=False, sort_keys=True) + "\n")
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_featurize(args) -> None:
    cfg = _run_config(args)
    fs = featurize(_corpus(args.corpus), build(cfg), cfg.level)
    rows = [(i, PolarityLabel.from_index(int(y)).value, x) for i, y, x in zip(fs.ids, fs.labels, fs.X)]
    if args.out:
        write_feature_csv(args.out, rows)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["id", "label", *FEATURE_NAMES])
        for rid, lab, vals in rows:
            w.writerow([rid, lab, *(repr(float(v)) for v in vals)])


def cmd_train(args) -> None:
    cfg = _run_config(args)
    if cfg.classifier == "ffn":
        if not args.corpus:
            raise UsageError("the ffn classifier trains from --corpus")
        fs = _embedded(_corpus(args.corpus), cfg)
        kind = "embedding"
    else:
        fs = _features(args, cfg)
        kind = "lexical"
    if args.all_data:
        train = np.arange(len(fs.ids))
    else:
        train, _ = split_train_test(fs.labels, args.train_fraction, cfg.seed)
    X, y = fs.X[train], fs.labels[train]
    if cfg.classifier == "ffn":
        ff = FeedForwardConfig.compatibility(seed=cfg.seed) if cfg.scalar_ffn_head else FeedForwardConfig(seed=cfg.seed)
        model = train_ffn(X, y, ff)
    else:
        model = TRAINERS[cfg.classifier](X, y, cfg.train_config(train_fraction=args.train_fraction))
    meta = {
        "classifier": cfg.classifier,
        "features": kind,
        "seed": cfg.seed,
        "level": cfg.level,
        "literal_reducer": cfg.literal_reducer,
        "literal_stacking": cfg.literal_stacking,
        "elongation_window": cfg.elongation_window,
        "train_ids": sorted(fs.ids[i] for i in train),
        "version": __version__,
    }
    save_model(model, args.model_out, meta)
    print(f"trained {cfg.classifier} on {len(train)} items (seed {cfg.seed}) -> {args.model_out}")


def _model_inputs(model_meta: dict, corpus: Sequence[LabeledReview], cfg: RunConfig) -> FeatureSet:
    if model_meta.get("features") == "embedding":
        return _embedded(corpus, cfg)
    return featurize(corpus, build(cfg), cfg.level)


def _load(path):
    try:
        return load_model(path)
    except (OSError, KeyError) as exc:
        raise DataError(f"{path}: cannot load model ({exc})") from None


def _inherit(cfg: RunConfig, meta: dict, args) -> RunConfig:
    """Feature options recorded at training time unless overridden by flags."""
    kw = {}
    if getattr(args, "level", None) is None and meta.get("level"):
        kw["level"] = meta["level"]
    if getattr(args, "literal_reducer", None) is None and meta.get("literal_reducer"):
        kw["literal_reducer"] = True
    if getattr(args, "elongation_window", None) is None and meta.get("elongation_window"):
        kw["elongation_window"] = meta["elongation_window"]
    return cfg.override(**kw)


def cmd_predict(args) -> None:
    model, meta = _load(args.model)
    cfg = _inherit(_run_config(args), meta, args)
    if args.corpus:
        corpus = _corpus(args.corpus)
    else:
        text = Path(args.input).read_text(encoding="utf-8") if args.input else sys.stdin.read()
        lines = [ln for ln in text.splitlines() if ln.strip()]
        width = len(str(len(lines)))
        recs = [json.dumps({"id": str(i + 1).zfill(width), "text": ln, "label": "obj",
                            "level": cfg.level or "document"}, ensure_ascii=False) for i, ln in enumerate(lines)]
        corpus = parse_corpus(recs)
    fs = _model_inputs(meta, corpus, cfg)
    P = model.predict_proba(fs.X)
    out = _stdout_or(args.out)
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["id", "label", "p_neg", "p_obj", "p_pos"])
        for rid, p in zip(fs.ids, P):
            w.writerow([rid, PolarityLabel.from_index(int(np.argmax(p))).value, *(repr(float(v)) for v in p)])
    finally:
        if out is not sys.stdout:
            out.close()


def cmd_evaluate(args) -> None:
    model, meta = _load(args.model)
    cfg = _inherit(_run_config(args), meta, args)
    corpus = _corpus(args.corpus)
    seen = set(meta.get("train_ids", [])) if not args.include_train else set()
    held = [r for r in corpus if r.id not in seen]
    if not held:
        raise DataError("no held-out items: every corpus id was used for training")
    fs = _model_inputs(meta, held, cfg)
    cm, rep = score(model.predict(fs.X), fs.labels)
    print(f"model {meta.get('classifier', model.kind)}  seed {meta.get('seed')}  items {cm.total}")
    print(rep.table())
    if args.report_csv:
        Path(args.report_csv).write_text(rep.csv(), encoding="utf-8")
    if args.figures:
        from .plots import confusion_heatmap
        confusion_heatmap(cm, Path(args.figures) / "confusion.png", title="held-out")


def cmd_ablate(args) -> None:
    cfg = _run_config(args)
    fs = featurize(_corpus(args.corpus), build(cfg), cfg.level)
    tc = cfg.train_config()
    rows = []
    for lv in (Level.DOCUMENT, Level.SENTENCE):
        part = fs.level(lv)
        if not part.ids:
            continue
        rows.extend(ablate(part.X, part.labels, lv, cfg=tc, drop=args.drop_columns))
        print(f"# {lv.value}: majority baseline {100 * majority_accuracy(part.labels, tc):.2f}")
    print(f"# seed {cfg.seed}")
    print(ablation_table(rows))
    if args.out:
        write_ablation_csv(args.out, rows)
    if args.figures:
        from .plots import ablation_bars
        ablation_bars(rows, Path(args.figures) / "ablation.png")


def cmd_estimate_probs(args) -> None:
    cfg = _run_config(args)
    corpus = _corpus(args.corpus)
    res = build(cfg)
    docs = [(res.preprocessor.document(r.text, r.id, cfg.level or r.level), r.label)
            for r in sorted(corpus, key=lambda r: r.id)]
    table = estimate_probability_table(docs, res.featurizer, at_least=cfg.at_least)
    tsv = table.to_tsv()
    if args.out:
        Path(args.out).write_text(tsv, encoding="utf-8")
    else:
        sys.stdout.write(tsv)
    if args.figures:
        from .plots import probability_curves
        probability_curves(table, Path(args.figures) / "prob_table.png")


def cmd_embed_demo(args) -> None:
    cfg = _run_config(args)
    if not cfg.embeddings:
        raise UsageError("embed-demo needs --embeddings")
    table = load_vectors(cfg.embeddings)
    if args.analogy:
        a, b, c = args.analogy
        print(analogy(table, a, b, c))
        return
    tokens = args.tokens.split(",") if args.tokens else sorted(table.vectors)
    missing = [t for t in tokens if t not in table]
    if missing:
        raise DataError(f"not in vocabulary: {missing}")
    coords = project_2d([table.vectors[t] for t in tokens])
    if args.project:
        write_projection_csv(args.project, tokens, coords)
    else:
        w = csv.writer(sys.stdout, lineterminator="\n")
        w.writerow(["token", "x", "y"])
        for t, (x, y) in zip(tokens, coords):
            w.writerow([t, repr(float(x)), repr(float(y))])
    if args.figures:
        from .plots import projection_scatter
        projection_scatter(tokens, coords, Path(args.figures) / "projection.png")


# --- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="farsent", description="Persian review sentiment pipeline.")
    p.add_argument("--version", action="version", version=f"farsent {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log warnings and progress to stderr")
    sub = p.add_subparsers(dest="command", metavar="command", parser_class=_Parser)

    s = sub.add_parser("preprocess", help="segment and tokenize text into JSON lines")
    _resource_flags(s)
    src = s.add_mutually_exclusive_group()
    src.add_argument("--corpus", help="labeled corpus (JSON lines)")
    src.add_argument("--input", help="plain text, one review per line (default stdin)")
    s.add_argument("--out", help="output file (default stdout)")
    s.set_defaults(func=cmd_preprocess)

    s = sub.add_parser("featurize", help="corpus to 17-feature CSV")
    _resource_flags(s)
    s.add_argument("--corpus", required=True, help="labeled corpus (JSON lines)")
    s.add_argument("--out", help="CSV output (default stdout)")
    s.set_defaults(func=cmd_featurize)

    s = sub.add_parser("train", help="train a classifier and write a model file")
    _resource_flags(s)
    src = s.add_mutually_exclusive_group()
    src.add_argument("--corpus", help="labeled corpus (JSON lines)")
    src.add_argument("--features", help="feature CSV from featurize")
    s.add_argument("--classifier", choices=CLASSIFIERS, help="default stack")
    s.add_argument("--model-out", required=True, help="model file to write")
    s.add_argument("--train-fraction", type=float, default=0.6, help="stratified training share (default 0.6)")
    s.add_argument("--all-data", action="store_true", help="train on every item")
    s.add_argument("--literal-stacking", action="store_true", default=None,
                   help="meta classifier sees the base models' own training predictions")
    s.add_argument("--embeddings", help="word-vector file (ffn classifier)")
    s.add_argument("--scalar-ffn-head", action="store_true", default=None,
                   help="ffn with one output unit and squared error")
    s.set_defaults(func=cmd_train)

    s = sub.add_parser("predict", help="labels and confidences for new text")
    _resource_flags(s)
    s.add_argument("--model", required=True)
    src = s.add_mutually_exclusive_group()
    src.add_argument("--corpus", help="corpus (JSON lines); labels are ignored")
    src.add_argument("--input", help="plain text, one review per line (default stdin)")
    s.add_argument("--embeddings", help="word-vector file (ffn models)")
    s.add_argument("--out", help="CSV output (default stdout)")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("evaluate", help="metrics on items the model was not trained on")
    _resource_flags(s)
    s.add_argument("--model", required=True)
    s.add_argument("--corpus", required=True)
    s.add_argument("--embeddings", help="word-vector file (ffn models)")
    s.add_argument("--include-train", action="store_true", help="also score the training items")
    s.add_argument("--report-csv", help="write the metrics as CSV")
    s.add_argument("--figures", metavar="DIR", help="write a confusion-matrix figure here")
    s.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("ablate", help="held-out accuracy per feature subset")
    _resource_flags(s)
    s.add_argument("--corpus", required=True)
    s.add_argument("--literal-stacking", action="store_true", default=None)
    s.add_argument("--drop-columns", action="store_true", help="remove excluded features instead of zeroing")
    s.add_argument("--out", help="CSV output")
    s.add_argument("--figures", metavar="DIR", help="write an accuracy bar chart here")
    s.set_defaults(func=cmd_ablate)

    s = sub.add_parser("estimate-probs", help="P(i) table from a labeled corpus")
    _resource_flags(s)
    s.add_argument("--corpus", required=True)
    s.add_argument("--at-least", action="store_true", default=None, help="P(at least i) instead of P(exactly i)")
    s.add_argument("--out", help="TSV output (default stdout)")
    s.add_argument("--figures", metavar="DIR", help="write the P(i) curves here")
    s.set_defaults(func=cmd_estimate_probs)

    s = sub.add_parser("embed-demo", help="analogy query or 2-D projection of word vectors")
    _resource_flags(s)
    s.add_argument("--embeddings", help="word-vector file")
    mode = s.add_mutually_exclusive_group()
    mode.add_argument("--analogy", nargs=3, metavar=("A", "B", "C"), help="token nearest A - B + C")
    mode.add_argument("--project", metavar="CSV", help="write token,x,y projection")
    s.add_argument("--tokens", help="comma-separated tokens to project (default all)")
    s.add_argument("--figures", metavar="DIR", help="write a scatter plot here")
    s.set_defaults(func=cmd_embed_demo)
    return p


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_usage(sys.stderr)
            raise UsageError("farsent: a command is required")
        logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR,
                            format="%(levelname)s %(name)s: %(message)s")
        args.func(args)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except (DataError, CorpusError, LexiconError, ModelFormatError, ConfigError, ValueError, OSError) as exc:
        print(f"farsent: error: {exc}", file=sys.stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
