from __future__ import annotations

import hashlib
from pathlib import Path

import pytest

from termtrends.cli import main
from termtrends.errors import DataError, UsageError
from termtrends.pipeline import (
    PARTIAL_MARKER,
    RunConfig,
    derive_window_seed,
    parse_manifest_artifacts,
    read_config_file,
    run_pipeline,
)
from termtrends.windows import TimeWindow

from conftest import DEMO_CORPUS, DEMO_KEYWORDS


def demo_config(out: Path, **kwargs) -> RunConfig:
    defaults = dict(
        corpus=DEMO_CORPUS,
        keywords=DEMO_KEYWORDS,
        output_dir=out,
        dim=6,
        epochs=3,
        context_window=5,
        seed=5,
        figures=False,
    )
    defaults.update(kwargs)
    return RunConfig(**defaults)


@pytest.fixture(scope="module")
def demo_run(tmp_path_factory):
    out = tmp_path_factory.mktemp("run")
    manifest = run_pipeline(demo_config(out))
    return out, manifest


def test_windows_cover_demo_years(demo_run):
    _, manifest = demo_run
    labels = [w.window.label for w in manifest.windows]
    assert labels[0] == "2000-2004"
    assert labels[-1] == "2005-2009"
    assert len(labels) == 6


def test_every_window_trained_with_selection(demo_run):
    _, manifest = demo_run
    for report in manifest.windows:
        assert report.status == "trained"
        assert report.best_epoch is not None
        assert 0.0 <= report.best_score <= 1.0
        assert report.selected_model is not None


def test_early_windows_show_exclusions(demo_run):
    _, manifest = demo_run
    # "cloud"-topic words only exist from 2007, so early windows exclude cases
    first, last = manifest.windows[0], manifest.windows[-1]
    assert first.excluded_pct > last.excluded_pct
    assert first.excluded_pct > 0


def test_manifest_lists_existing_files_and_nothing_else(demo_run):
    out, manifest = demo_run
    listed = set(parse_manifest_artifacts(manifest.path))
    assert listed == set(manifest.artifacts)
    for rel in listed:
        assert (out / rel).exists(), rel
    on_disk = {
        p.relative_to(out).as_posix()
        for p in out.rglob("*")
        if p.is_file()
    }
    assert on_disk == listed | {"manifest.txt"}


def test_manifest_echoes_config_and_seed(demo_run):
    _, manifest = demo_run
    text = manifest.path.read_text(encoding="utf-8")
    assert "seed = 5" in text
    assert "[config]" in text
    assert f"corpus = {DEMO_CORPUS}" in text
    assert "window_width = 5" in text


def test_csv_outputs_record_seed(demo_run):
    out, _ = demo_run
    epochs_csv = out / "windows" / "2000-2004" / "epochs.csv"
    assert epochs_csv.read_text(encoding="utf-8").startswith("# seed=5\n")


def test_selected_directory_has_one_model_per_window(demo_run):
    out, manifest = demo_run
    selected = sorted((out / "selected").glob("*.vec"))
    assert len(selected) == len(manifest.windows)


def test_deterministic_reruns_are_byte_identical(tmp_path):
    out = tmp_path / "rerun"
    config = demo_config(out, epochs=2)

    def digest_outputs():
        hashes = {}
        for path in sorted(out.rglob("*")):
            if path.is_file() and (path.suffix == ".vec" or path.name == "manifest.txt"):
                hashes[path.relative_to(out).as_posix()] = hashlib.sha256(
                    path.read_bytes()
                ).hexdigest()
        return hashes

    run_pipeline(config)
    first = digest_outputs()
    run_pipeline(config)
    second = digest_outputs()
    assert first
    assert first == second


def test_window_seed_derivation_is_stable():
    w = TimeWindow(2000, 2004)
    assert derive_window_seed(42, w) == derive_window_seed(42, w)
    assert derive_window_seed(42, w) != derive_window_seed(43, w)
    assert derive_window_seed(42, w) != derive_window_seed(42, TimeWindow(2001, 2005))


def test_failure_leaves_partial_marker(tmp_path):
    bad_keywords = tmp_path / "kw.txt"
    bad_keywords.write_text("onlyoneword\n", encoding="utf-8")
    out = tmp_path / "out"
    config = demo_config(out, keywords=bad_keywords)
    with pytest.raises(DataError, match="stage 'ingest'"):
        run_pipeline(config)
    marker = out / PARTIAL_MARKER
    assert marker.exists()
    assert "stage=ingest" in marker.read_text(encoding="utf-8")


def test_marker_removed_on_successful_rerun(tmp_path):
    out = tmp_path / "out"
    out.mkdir()
    (out / PARTIAL_MARKER).write_text("stale", encoding="utf-8")
    run_pipeline(demo_config(out, epochs=1))
    assert not (out / PARTIAL_MARKER).exists()


def test_validation_rejects_missing_paths(tmp_path):
    config = demo_config(tmp_path / "o", corpus=tmp_path / "missing.jsonl")
    with pytest.raises(DataError, match="corpus path"):
        run_pipeline(config)


def test_jobs_require_nondeterministic_mode(tmp_path):
    config = demo_config(tmp_path / "o", jobs=2)
    with pytest.raises(UsageError):
        run_pipeline(config)


def test_parallel_jobs_match_serial_outputs(tmp_path):
    serial_out = tmp_path / "serial"
    parallel_out = tmp_path / "parallel"
    run_pipeline(demo_config(serial_out, epochs=2))
    run_pipeline(demo_config(parallel_out, epochs=2, jobs=2, deterministic=False))

    serial = {
        p.relative_to(serial_out).as_posix(): p.read_bytes()
        for p in serial_out.rglob("*.vec")
    }
    parallel = {
        p.relative_to(parallel_out).as_posix(): p.read_bytes()
        for p in parallel_out.rglob("*.vec")
    }
    assert serial == parallel  # per-window seeds make job count irrelevant


def test_config_file_and_flag_precedence(tmp_path, capsys):
    config_file = tmp_path / "run.cfg"
    config_file.write_text(
        f"corpus = {DEMO_CORPUS}\n"
        f"keywords = {DEMO_KEYWORDS}\n"
        f"output_dir = {tmp_path / 'cfg_out'}\n"
        "dim = 4\n"
        "epochs = 2\n"
        "context_window = 5\n"
        "figures = false\n"
        "# comment line\n",
        encoding="utf-8",
    )
    code = main(["run", "--config", str(config_file), "--epochs", "1"])
    assert code == 0
    manifest_text = (tmp_path / "cfg_out" / "manifest.txt").read_text(encoding="utf-8")
    assert "dim = 4" in manifest_text  # from the file
    assert "epochs = 1" in manifest_text  # flag wins over the file


def test_config_file_unknown_key_rejected(tmp_path):
    config_file = tmp_path / "run.cfg"
    config_file.write_text("nonsense = 1\n", encoding="utf-8")
    assert main(["run", "--config", str(config_file)]) == 1


def test_run_requires_core_settings():
    assert main(["run"]) == 1


def test_read_config_file_rejects_bad_lines(tmp_path):
    path = tmp_path / "bad.cfg"
    path.write_text("no equals sign\n", encoding="utf-8")
    with pytest.raises(DataError, match=":1:"):
        read_config_file(path)


def test_figures_rendered_when_enabled(tmp_path):
    out = tmp_path / "figs"
    manifest = run_pipeline(demo_config(out, epochs=2, figures=True))
    pngs = list(out.rglob("*.png"))
    assert len(pngs) == len(manifest.windows)
    listed = set(manifest.artifacts)
    for png in pngs:
        assert png.relative_to(out).as_posix() in listed


def test_trend_cli_over_selected_models(demo_run, tmp_path, capsys):
    out, _ = demo_run
    trend_csv = tmp_path / "trend.csv"
    code = main(
        [
            "trend",
            "--models-dir", str(out / "selected"),
            "--target", "+defect",
            "--prefix", "class",
            "--prefix", "pred",
            "--out", str(trend_csv),
        ]
    )
    assert code == 0
    lines = trend_csv.read_text(encoding="utf-8").strip().splitlines()
    assert lines[0] == "window_start,window_end,prefix,min_rank,matched_word"
    assert len(lines) == 1 + 2 * 6  # 2 prefixes x 6 windows
    assert trend_csv.with_suffix(".png").exists()  # figure alongside the CSV
