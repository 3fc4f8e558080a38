"""Corpus report: delimited statistics plus matplotlib figures.

Figures are rendered through the Agg backend with fixed metadata so that
reruns produce byte-identical PNG files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from vozprep.corpus import CorpusStats, UtteranceWork

_PNG_METADATA = {"Software": "vozprep"}


def _save(fig, path) -> None:
    fig.savefig(path, format="png", dpi=100, metadata=_PNG_METADATA)
    plt.close(fig)


def write_stats_tsv(path, work: list[UtteranceWork], stats: CorpusStats) -> None:
    """Per-utterance word/second counts with a trailing TOTAL row."""
    with open(path, "w", encoding="utf-8") as f:
        f.write("id\twords\tseconds\n")
        for w in work:
            if not w.ok:
                continue
            words = len(w.normalized.split())
            f.write(f"{w.utt_id}\t{words}\t{w.trimmed_seconds:.6f}\n")
        f.write(f"TOTAL\t{stats.n_words}\t{stats.total_hours * 3600.0:.6f}\n")


def save_clip_seconds_figure(path, work: list[UtteranceWork]) -> None:
    seconds = [w.trimmed_seconds for w in work if w.ok]
    fig, ax = plt.subplots(figsize=(6, 4))
    if seconds:
        ax.hist(seconds, bins=min(20, max(5, len(seconds))), color="#4878d0",
                edgecolor="black")
    ax.set_xlabel("trimmed clip length (s)")
    ax.set_ylabel("utterances")
    ax.set_title("Clip durations after silence trimming")
    fig.tight_layout()
    _save(fig, path)


def save_words_figure(path, work: list[UtteranceWork]) -> None:
    words = [len(w.normalized.split()) for w in work if w.ok]
    fig, ax = plt.subplots(figsize=(6, 4))
    if words:
        ax.hist(words, bins=min(20, max(5, len(words))), color="#ee854a",
                edgecolor="black")
    ax.set_xlabel("words per utterance")
    ax.set_ylabel("utterances")
    ax.set_title("Transcript lengths")
    fig.tight_layout()
    _save(fig, path)


def save_mel_figure(path, mel_values: np.ndarray, utt_id: str) -> None:
    fig, ax = plt.subplots(figsize=(8, 4))
    im = ax.imshow(mel_values.T, origin="lower", aspect="auto",
                   interpolation="nearest", cmap="magma")
    ax.set_xlabel("frame")
    ax.set_ylabel("mel bin")
    ax.set_title(f"Normalized log-mel: {utt_id}")
    fig.colorbar(im, ax=ax, label="value")
    fig.tight_layout()
    _save(fig, path)


def save_phoneme_frames_figure(path, durations: list[int]) -> None:
    fig, ax = plt.subplots(figsize=(6, 4))
    if durations:
        upper = max(durations) + 1
        ax.hist(durations, bins=np.arange(0.5, upper + 0.5), color="#6acc64",
                edgecolor="black")
    ax.set_xlabel("frames per phoneme")
    ax.set_ylabel("count")
    ax.set_title("Aligned phoneme durations")
    fig.tight_layout()
    _save(fig, path)


def render_report(report_dir, work: list[UtteranceWork], stats: CorpusStats,
                  mel_preview: tuple[str, np.ndarray] | None = None,
                  phoneme_durations: list[int] | None = None) -> list[Path]:
    """Write the TSV and every applicable figure; returns the created paths."""
    report_dir = Path(report_dir)
    report_dir.mkdir(parents=True, exist_ok=True)
    created = []
    tsv = report_dir / "corpus_stats.tsv"
    write_stats_tsv(tsv, work, stats)
    created.append(tsv)
    fig_path = report_dir / "clip_seconds.png"
    save_clip_seconds_figure(fig_path, work)
    created.append(fig_path)
    fig_path = report_dir / "words_per_utterance.png"
    save_words_figure(fig_path, work)
    created.append(fig_path)
    if mel_preview is not None:
        utt_id, values = mel_preview
        fig_path = report_dir / "mel_preview.png"
        save_mel_figure(fig_path, values, utt_id)
        created.append(fig_path)
    if phoneme_durations:
        fig_path = report_dir / "phoneme_frames.png"
        save_phoneme_frames_figure(fig_path, phoneme_durations)
        created.append(fig_path)
    return created
