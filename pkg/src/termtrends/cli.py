"""Command-line entry point.

Subcommands mirror the pipeline stages so any step can be re-run without
repeating the previous ones: ingest, train, eval, select, query, trend,
and run (their composition). Exit codes: 0 success, 1 usage error,
2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .corpus import TokenizerConfig, ingest_book, ingest_documents, load_stopwords, read_observations, write_observations
from .errors import DataError, NumericalError, UsageError
from .evaluate import read_keywords, score_suite, select_best_epoch, write_epoch_csv, write_suite_csv, write_summary_csv
from .models import GLOVE, SGNS, load_model
from .pipeline import RunConfig, read_config_file, run_pipeline
from .query import QueryExpression, top_k
from .training import SnapshotWriter, TrainerConfig, train
from .trends import export_trend_csv, load_selected_models, trend
from .windows import build_vocabulary

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    """Argparse reports usage problems as exceptions so exit codes stay ours."""

    def error(self, message: str):  # noqa: A003 - argparse API
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="termtrends", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("ingest", parents=[], help="tokenize a corpus into observations")
    p.add_argument("--corpus", type=Path, help="JSON Lines corpus of dated records")
    p.add_argument("--book", type=Path, help="plain-text book corpus (file or directory)")
    p.add_argument("--stopwords", type=Path, help="stopword file (default: bundled English list)")
    p.add_argument("--min-token-length", type=int, default=1)
    p.add_argument(
        "--exclude-section",
        action="append",
        default=[],
        metavar="MARKER",
        help='book heading marker "start" or "start..end"; repeatable',
    )
    p.add_argument("--out", type=Path, required=True, help="observations JSONL output")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train", help="train one model over an observations file")
    p.add_argument("--observations", type=Path, required=True)
    p.add_argument("--snapshots-dir", type=Path, required=True)
    p.add_argument("--label", default="all", help="snapshot label (default: all)")
    p.add_argument("--min-df", type=int, default=3, help="min distinct observations per token")
    _add_trainer_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("eval", help="score a model against a keyword suite")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--keywords", type=Path, required=True)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--suite-csv", type=Path, help="per-case report output")
    p.add_argument("--summary-csv", type=Path, help="D / T_effective output")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("select", help="pick the best epoch snapshot by suite score")
    p.add_argument("--snapshots", type=Path, required=True, help="directory of .vec snapshots")
    p.add_argument("--keywords", type=Path, required=True)
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--epochs-csv", type=Path, help="epoch/D audit table output")
    p.add_argument("--plot", type=Path, help="render the epoch curve to this image file")
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("query", help="top-K neighbors of a signed word expression")
    p.add_argument("--model", type=Path, required=True)
    p.add_argument("--expr", required=True, help='e.g. "+defect +classification" or "king -man +woman"')
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--out", type=Path, help="write the TSV here instead of stdout")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("trend", help="prefix rank trends across per-window models")
    p.add_argument("--models-dir", type=Path, required=True, help="one selected .vec per window")
    p.add_argument("--target", required=True, help='target expression, e.g. "+code +smells"')
    p.add_argument("--prefix", action="append", required=True, help="prefix group; repeatable")
    p.add_argument("--out", type=Path, required=True, help="trend CSV output")
    p.add_argument("--plot", type=Path, help="figure output (default: CSV path with .png)")
    p.add_argument("--no-plot", action="store_true", help="skip the figure")
    p.set_defaults(func=cmd_trend)

    p = sub.add_parser("run", help="full pipeline: ingest, window, train, score, select")
    p.add_argument("--config", type=Path, help="key=value settings file (flags override it)")
    p.add_argument("--corpus", type=Path)
    p.add_argument("--keywords", type=Path)
    p.add_argument("--out", dest="output_dir", type=Path)
    p.add_argument("--stopwords", type=Path)
    p.add_argument("--min-token-length", type=int)
    p.add_argument("--window-width", type=int, help="years per window (default 5)")
    p.add_argument("--window-step", type=int, help="years between window starts (default 1)")
    p.add_argument("--anchor-year", type=int, help="first window start (default: corpus minimum)")
    p.add_argument("--min-df", type=int, help="min distinct observations per token (default 3)")
    p.add_argument("--dim", type=int)
    p.add_argument("--context-window", type=int)
    p.add_argument("--x-max", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--epochs", type=int)
    p.add_argument("--backend", choices=[GLOVE, SGNS])
    p.add_argument("--negative-samples", type=int)
    p.add_argument("--top-k", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--deterministic", action=argparse.BooleanOptionalAction, default=None)
    p.add_argument("--jobs", type=int)
    p.add_argument("--figures", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_run)

    return parser


def _add_trainer_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--dim", type=int, default=100)
    p.add_argument("--context-window", type=int, default=10)
    p.add_argument("--x-max", type=float, default=100.0)
    p.add_argument("--alpha", type=float, default=0.75)
    p.add_argument("--learning-rate", type=float, default=0.05)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--backend", choices=[GLOVE, SGNS], default=GLOVE)
    p.add_argument("--negative-samples", type=int, default=5)
    p.add_argument("--seed", type=int, default=42)


def cmd_ingest(args: argparse.Namespace) -> None:
    if (args.corpus is None) == (args.book is None):
        raise UsageError("exactly one of --corpus or --book is required")
    config = TokenizerConfig(
        stopwords=load_stopwords(args.stopwords),
        min_token_length=args.min_token_length,
    )
    if args.corpus is not None:
        if args.exclude_section:
            raise UsageError("--exclude-section applies only to --book corpora")
        observations = ingest_documents(args.corpus, config)
    else:
        observations = ingest_book(args.book, config, args.exclude_section)
    write_observations(observations, args.out)
    print(f"wrote {len(observations)} observations to {args.out}")


def cmd_train(args: argparse.Namespace) -> None:
    observations = read_observations(args.observations)
    vocab = build_vocabulary(observations, args.min_df)
    config = TrainerConfig(
        dim=args.dim,
        context_window=args.context_window,
        x_max=args.x_max,
        alpha=args.alpha,
        learning_rate=args.learning_rate,
        max_epochs=args.epochs,
        backend=args.backend,
        negative_samples=args.negative_samples,
        seed=args.seed,
    )
    sink = SnapshotWriter(args.snapshots_dir, args.label)
    refs, losses = train(observations, vocab, config, sink)
    print(
        f"trained {len(refs)} epoch snapshots (|V|={len(vocab)}, dim={config.dim}) "
        f"into {args.snapshots_dir}; final epoch loss {losses[-1]:.6f}"
    )


def cmd_eval(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    keywords = read_keywords(args.keywords)
    suite = score_suite(keywords, model, args.top)
    if args.suite_csv:
        write_suite_csv(suite, args.suite_csv)
    if args.summary_csv:
        write_summary_csv(suite, args.summary_csv)
    print(
        f"D = {suite.mean_score:.6f} over {suite.effective_cases} effective cases "
        f"({suite.excluded_fraction * 100.0:.1f}% excluded)"
    )


def cmd_select(args: argparse.Namespace) -> None:
    snapshots = sorted(Path(args.snapshots).glob("*.vec"))
    if not snapshots:
        raise DataError(f"no .vec snapshots in {args.snapshots}")
    keywords = read_keywords(args.keywords)
    best, table = select_best_epoch(snapshots, keywords, args.top)
    if args.epochs_csv:
        write_epoch_csv(table, args.epochs_csv)
    if args.plot:
        from .plotting import plot_epoch_scores

        plot_epoch_scores(table, args.plot)
    best_entry = next(e for e in table if e.path == best)
    print(f"best epoch {best_entry.epoch} (D = {best_entry.score:.6f}): {best}")


def cmd_query(args: argparse.Namespace) -> None:
    model = load_model(args.model)
    expr = QueryExpression.parse(args.expr)
    neighbors = top_k(expr, model, args.top)
    lines = [f"{n.rank}\t{n.word}\t{n.cosine:.6f}" for n in neighbors]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_trend(args: argparse.Namespace) -> None:
    models = load_selected_models(args.models_dir)
    target = QueryExpression.parse(args.target)
    series = trend(models, target, args.prefix)
    export_trend_csv(series, args.out)
    print(f"wrote {sum(len(s.points) for s in series)} trend rows to {args.out}")
    if not args.no_plot:
        from .plotting import plot_trend

        plot_path = args.plot or Path(args.out).with_suffix(".png")
        plot_trend(series, plot_path)
        print(f"rendered trend figure to {plot_path}")


_RUN_CONVERTERS = {
    "corpus": Path,
    "keywords": Path,
    "output_dir": Path,
    "stopwords": Path,
    "min_token_length": int,
    "window_width": int,
    "window_step": int,
    "anchor_year": int,
    "min_df": int,
    "dim": int,
    "context_window": int,
    "x_max": float,
    "alpha": float,
    "learning_rate": float,
    "epochs": int,
    "backend": str,
    "negative_samples": int,
    "top_k": int,
    "seed": int,
    "deterministic": None,  # bool, handled below
    "jobs": int,
    "figures": None,
}


def _parse_bool(raw: str, key: str) -> bool:
    low = raw.lower()
    if low in ("true", "1", "yes"):
        return True
    if low in ("false", "0", "no"):
        return False
    raise UsageError(f"config key {key!r}: expected a boolean, got {raw!r}")


def resolve_run_config(args: argparse.Namespace) -> RunConfig:
    """Merge CLI flags over config-file values over built-in defaults."""
    file_values = read_config_file(args.config) if args.config else {}
    unknown = set(file_values) - set(_RUN_CONVERTERS)
    if unknown:
        raise UsageError(f"unknown config file keys: {', '.join(sorted(unknown))}")

    resolved: dict[str, object] = {}
    for key, converter in _RUN_CONVERTERS.items():
        value = getattr(args, key, None)
        if value is None and key in file_values:
            raw = file_values[key]
            if raw == "":
                value = None
            elif converter is None:
                value = _parse_bool(raw, key)
            else:
                try:
                    value = converter(raw)
                except ValueError:
                    raise UsageError(f"config key {key!r}: invalid value {raw!r}") from None
        if value is not None:
            resolved[key] = value

    for required in ("corpus", "keywords", "output_dir"):
        if required not in resolved:
            raise UsageError(f"missing required setting {required!r} (flag or config file)")
    return RunConfig(**resolved)


def cmd_run(args: argparse.Namespace) -> None:
    config = resolve_run_config(args)
    manifest = run_pipeline(config)
    trained = [w for w in manifest.windows if w.status == "trained"]
    print(f"run complete: {len(trained)}/{len(manifest.windows)} windows trained")
    for report in manifest.windows:
        if report.status == "trained":
            print(
                f"  {report.window.label}: D = {report.best_score:.4f} at epoch "
                f"{report.best_epoch} (T_eff = {report.effective_cases}, "
                f"{report.excluded_pct:.0f}% excluded)"
            )
        else:
            print(f"  {report.window.label}: {report.status}")
    print(f"manifest: {manifest.path}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_help()
            return 1
        logging.basicConfig(
            level=logging.INFO if args.verbose else logging.WARNING,
            format="%(levelname)s %(name)s: %(message)s",
        )
        args.func(args)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
