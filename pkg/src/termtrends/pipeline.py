"""End-to-end run orchestration and the run manifest.

A run executes ingest -> windows -> per-window vocabulary -> epoch sweep ->
suite scoring -> best-epoch selection, then writes a manifest listing every
artifact, the per-window metrics, and the fully resolved configuration.
Deterministic re-runs with the same configuration reproduce every vector
file and the manifest byte for byte: per-window seeds are derived from the
base seed and the window years, and no output embeds a timestamp.
"""

from __future__ import annotations

import dataclasses
import logging
import shutil
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .corpus import Observation, TokenizerConfig, ingest_documents, load_stopwords, write_observations
from .errors import DataError, NoScorableCasesError, NumericalError, TermTrendsError, UsageError
from .evaluate import (
    Keyword,
    read_keywords,
    score_suite,
    select_best_epoch,
    write_epoch_csv,
    write_suite_csv,
    write_summary_csv,
)
from .models import GLOVE, load_model
from .training import SnapshotWriter, TrainerConfig, train
from .windows import TimeWindow, build_vocabulary, build_windows

log = logging.getLogger(__name__)

PARTIAL_MARKER = "PARTIAL"

# Window outcomes recorded in the manifest.
TRAINED = "trained"
EMPTY = "empty"
NO_VOCABULARY = "no_vocabulary"
NO_SCORABLE_CASES = "no_scorable_cases"


@dataclass(frozen=True)
class RunConfig:
    """Resolved run settings; precedence is CLI flag > config file > default."""

    corpus: Path
    keywords: Path
    output_dir: Path
    stopwords: Path | None = None
    min_token_length: int = 1
    window_width: int = 5
    window_step: int = 1
    anchor_year: int | None = None
    min_df: int = 3
    dim: int = 100
    context_window: int = 10
    x_max: float = 100.0
    alpha: float = 0.75
    learning_rate: float = 0.05
    epochs: int = 200
    backend: str = GLOVE
    negative_samples: int = 5
    top_k: int = 20
    seed: int = 42
    deterministic: bool = True
    jobs: int = 1
    figures: bool = True

    def validate(self) -> None:
        for name in ("corpus", "keywords", "stopwords"):
            path = getattr(self, name)
            if path is not None and not Path(path).exists():
                raise DataError(f"{name} path does not exist: {path}")
        if self.jobs < 1:
            raise UsageError(f"jobs must be >= 1, got {self.jobs}")
        if self.jobs > 1 and self.deterministic:
            raise UsageError("jobs > 1 requires --no-deterministic")
        if self.top_k < 1:
            raise UsageError(f"top-k must be >= 1, got {self.top_k}")

    def trainer_config(self, seed: int) -> TrainerConfig:
        return TrainerConfig(
            dim=self.dim,
            context_window=self.context_window,
            x_max=self.x_max,
            alpha=self.alpha,
            learning_rate=self.learning_rate,
            max_epochs=self.epochs,
            backend=self.backend,
            negative_samples=self.negative_samples,
            seed=seed,
        )

    def as_items(self) -> list[tuple[str, str]]:
        """Field name/value pairs in declaration order, for the manifest echo."""
        items = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if value is None:
                rendered = ""
            elif isinstance(value, bool):
                rendered = "true" if value else "false"
            else:
                rendered = str(value)
            items.append((f.name, rendered))
        return items


def read_config_file(path: str | Path) -> dict[str, str]:
    """Flat key=value settings file; '#' comments and blank lines ignored."""
    path = Path(path)
    try:
        raw = path.read_text("utf-8")
    except OSError as exc:
        raise DataError(f"cannot read config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for lineno, line in enumerate(raw.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise DataError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


@dataclass(frozen=True)
class WindowReport:
    window: TimeWindow
    status: str
    n_observations: int
    vocab_size: int = 0
    best_epoch: int | None = None
    best_score: float | None = None
    effective_cases: int | None = None
    excluded_pct: float | None = None
    selected_model: str | None = None
    artifacts: tuple[str, ...] = ()


@dataclass(frozen=True)
class RunManifest:
    path: Path
    config: RunConfig
    windows: tuple[WindowReport, ...]
    artifacts: tuple[str, ...]


def derive_window_seed(base_seed: int, window: TimeWindow) -> int:
    """Stable per-window seed; identical across re-runs and job counts."""
    seq = np.random.SeedSequence([base_seed, window.start_year, window.end_year])
    return int(seq.generate_state(1)[0])


def _wrap_stage(stage: str, identifier: str, exc: TermTrendsError) -> TermTrendsError:
    message = f"stage '{stage}' failed for {identifier}: {exc}"
    if isinstance(exc, NumericalError):
        return NumericalError(message)
    return DataError(message)


@dataclass(frozen=True)
class _WindowJob:
    """Everything one window's training-and-selection job needs; picklable."""

    window: TimeWindow
    observations: tuple[Observation, ...]
    config: RunConfig
    keywords: tuple[Keyword, ...]
    window_dir: Path
    selected_dir: Path


def _run_window_job(job: _WindowJob) -> WindowReport:
    cfg = job.config
    window = job.window
    out_root = cfg.output_dir

    def rel(p: Path) -> str:
        return p.relative_to(out_root).as_posix()

    vocab = build_vocabulary(job.observations, cfg.min_df)
    if len(vocab) == 0:
        return WindowReport(
            window=window, status=NO_VOCABULARY, n_observations=len(job.observations)
        )

    job.window_dir.mkdir(parents=True, exist_ok=True)
    seed = derive_window_seed(cfg.seed, window)
    sink = SnapshotWriter(job.window_dir / "snapshots", window.label)
    refs, _losses = train(
        job.observations, vocab, cfg.trainer_config(seed), sink, window=window
    )
    artifacts = [rel(p) for p in refs]
    comments = [f"seed={cfg.seed}", f"window={window.label}"]

    try:
        best_path, table = select_best_epoch(refs, job.keywords, cfg.top_k)
    except NoScorableCasesError:
        epochs_csv = job.window_dir / "epochs.csv"
        write_epoch_csv([], epochs_csv, comments=comments)
        artifacts.append(rel(epochs_csv))
        return WindowReport(
            window=window,
            status=NO_SCORABLE_CASES,
            n_observations=len(job.observations),
            vocab_size=len(vocab),
            excluded_pct=100.0,
            artifacts=tuple(artifacts),
        )

    epochs_csv = job.window_dir / "epochs.csv"
    write_epoch_csv(table, epochs_csv, comments=comments)
    artifacts.append(rel(epochs_csv))

    best_model = load_model(best_path)
    suite = score_suite(job.keywords, best_model, cfg.top_k)
    suite_csv = job.window_dir / "suite.csv"
    summary_csv = job.window_dir / "summary.csv"
    write_suite_csv(suite, suite_csv, comments=comments + [f"epoch={best_model.epoch}"])
    write_summary_csv(suite, summary_csv, comments=comments + [f"epoch={best_model.epoch}"])
    artifacts += [rel(suite_csv), rel(summary_csv)]

    job.selected_dir.mkdir(parents=True, exist_ok=True)
    selected = job.selected_dir / best_path.name
    shutil.copyfile(best_path, selected)
    artifacts.append(rel(selected))

    if cfg.figures:
        from .plotting import plot_epoch_scores

        fig_path = plot_epoch_scores(
            table, job.window_dir / "epochs.png", title=f"window {window.label}"
        )
        artifacts.append(rel(fig_path))

    return WindowReport(
        window=window,
        status=TRAINED,
        n_observations=len(job.observations),
        vocab_size=len(vocab),
        best_epoch=best_model.epoch,
        best_score=suite.mean_score,
        effective_cases=suite.effective_cases,
        excluded_pct=100.0 * suite.excluded_fraction,
        selected_model=rel(selected),
        artifacts=tuple(artifacts),
    )


def run_pipeline(config: RunConfig) -> RunManifest:
    """Execute the full corpus-to-selection run and write the manifest.

    Any stage failure leaves a PARTIAL marker naming the stage and input
    in the output directory; a successful run removes it.
    """
    config.validate()
    out_root = Path(config.output_dir)
    out_root.mkdir(parents=True, exist_ok=True)
    marker = out_root / PARTIAL_MARKER
    artifacts: list[str] = []

    def fail(stage: str, identifier: str, exc: TermTrendsError) -> TermTrendsError:
        wrapped = _wrap_stage(stage, identifier, exc)
        marker.write_text(f"stage={stage}\ninput={identifier}\nerror={exc}\n", encoding="utf-8")
        return wrapped

    if marker.exists():
        marker.unlink()

    try:
        stopword_set = load_stopwords(config.stopwords)
        tokenizer = TokenizerConfig(stopwords=stopword_set, min_token_length=config.min_token_length)
        observations = ingest_documents(config.corpus, tokenizer)
        keywords = tuple(read_keywords(config.keywords))
    except TermTrendsError as exc:
        raise fail("ingest", str(config.corpus), exc) from exc

    obs_path = out_root / "observations.jsonl"
    write_observations(observations, obs_path)
    artifacts.append("observations.jsonl")
    log.info("ingested %d observations from %s", len(observations), config.corpus)

    try:
        windowed = build_windows(
            observations, config.window_width, config.window_step, anchor_year=config.anchor_year
        )
    except TermTrendsError as exc:
        raise fail("windows", str(config.corpus), exc) from exc

    jobs: list[_WindowJob] = []
    reports: dict[TimeWindow, WindowReport] = {}
    for window, members in windowed:
        if not members:
            reports[window] = WindowReport(window=window, status=EMPTY, n_observations=0)
            continue
        jobs.append(
            _WindowJob(
                window=window,
                observations=tuple(members),
                config=config,
                keywords=keywords,
                window_dir=out_root / "windows" / window.label,
                selected_dir=out_root / "selected",
            )
        )

    try:
        if config.jobs > 1 and len(jobs) > 1:
            with ProcessPoolExecutor(max_workers=config.jobs) as pool:
                for report in pool.map(_run_window_job, jobs):
                    reports[report.window] = report
        else:
            for job in jobs:
                log.info("training window %s (%d observations)", job.window.label, len(job.observations))
                reports[job.window] = _run_window_job(job)
    except TermTrendsError as exc:
        raise fail("train", "window processing", exc) from exc

    ordered = tuple(reports[w] for w, _ in windowed)
    for report in ordered:
        artifacts.extend(report.artifacts)

    manifest_path = out_root / "manifest.txt"
    manifest = RunManifest(
        path=manifest_path,
        config=config,
        windows=ordered,
        artifacts=tuple(sorted(set(artifacts))),
    )
    manifest_path.write_text(render_manifest(manifest), encoding="utf-8")
    if marker.exists():
        marker.unlink()
    return manifest


def render_manifest(manifest: RunManifest) -> str:
    """Human-readable structured text; deterministic for identical runs."""
    lines: list[str] = []
    lines.append("# termtrends run manifest")
    lines.append(f"tool_version = {__version__}")
    lines.append(f"seed = {manifest.config.seed}")
    lines.append("")
    lines.append("[config]")
    for key, value in manifest.config.as_items():
        lines.append(f"{key} = {value}")
    lines.append("")
    for report in manifest.windows:
        lines.append(f"[window {report.window.label}]")
        lines.append(f"status = {report.status}")
        lines.append(f"observations = {report.n_observations}")
        if report.status in (TRAINED, NO_SCORABLE_CASES):
            lines.append(f"vocabulary_size = {report.vocab_size}")
        if report.excluded_pct is not None:
            lines.append(f"excluded_pct = {report.excluded_pct:.2f}")
        if report.status == TRAINED:
            lines.append(f"best_epoch = {report.best_epoch}")
            lines.append(f"best_d = {report.best_score:.6f}")
            lines.append(f"t_effective = {report.effective_cases}")
            lines.append(f"selected_model = {report.selected_model}")
        lines.append("")
    lines.append("[artifacts]")
    lines.extend(manifest.artifacts)
    lines.append("")
    return "\n".join(lines)


def parse_manifest_artifacts(path: str | Path) -> list[str]:
    """Artifact paths (relative to the manifest's directory) listed in a manifest."""
    lines = Path(path).read_text("utf-8").splitlines()
    try:
        start = lines.index("[artifacts]") + 1
    except ValueError:
        raise DataError(f"{path}: no [artifacts] section") from None
    return [line for line in lines[start:] if line.strip()]
