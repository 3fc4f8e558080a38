"""Batch corpus pipeline: manifest in, per-utterance artifacts out.

Two-pass execution: a parallel compute pass (normalize, G2P, DSP) followed
by a serial write pass in manifest order, so output trees are byte-identical
across reruns and worker counts.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from vozprep import formats
from vozprep.align import best_monotonic_path, durations_from_path
from vozprep.dsp import (
    FeatureConfig,
    MelSpectrogram,
    NormStats,
    mel_spectrogram,
    normalize_mel,
    read_wav,
    resample,
    trim_silence,
)
from vozprep.frontend import PhonemeInventory, grapheme_to_phoneme, normalize_text

TEXT_DIR = "text"
PHONEME_DIR = "phonemes"
FEATURE_DIR = "features"
DURATION_DIR = "durations"
REPORT_DIR = "report"
STATS_FILE = "norm_stats.txt"
INVENTORY_FILE = "inventory.txt"


@dataclass
class UtteranceWork:
    """Per-utterance compute result from pass 1."""

    utt_id: str
    error: str | None = None
    normalized: str | None = None
    phonemes: list[str] | None = None
    mel: np.ndarray | None = None  # unnormalized log-mel
    trimmed_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


@dataclass
class CorpusStats:
    n_samples: int
    n_words: int
    total_hours: float

    def __add__(self, other: "CorpusStats") -> "CorpusStats":
        return CorpusStats(
            self.n_samples + other.n_samples,
            self.n_words + other.n_words,
            self.total_hours + other.total_hours,
        )


@dataclass
class PipelineSummary:
    results: list[tuple[str, str, str]] = field(default_factory=list)  # id, status, detail

    def add_ok(self, utt_id: str, detail: str = "") -> None:
        self.results.append((utt_id, "ok", detail))

    def add_failure(self, utt_id: str, error: str) -> None:
        self.results.append((utt_id, "failed", error))

    @property
    def n_failed(self) -> int:
        return sum(1 for _, status, _ in self.results if status == "failed")

    @property
    def failures(self) -> list[tuple[str, str]]:
        return [(i, d) for i, status, d in self.results if status == "failed"]

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            for utt_id, status, detail in self.results:
                f.write(f"{utt_id}\t{status}\t{detail}\n")


def _compute_utterance(args) -> UtteranceWork:
    entry, root, cfg, need_audio = args
    work = UtteranceWork(utt_id=entry.utt_id)
    try:
        work.normalized = normalize_text(entry.transcript)
        work.phonemes = grapheme_to_phoneme(work.normalized)
        if need_audio:
            wav = read_wav(formats.resolve_audio(root, entry))
            wav = resample(wav, cfg.target_rate)
            wav = trim_silence(wav, cfg.trim_threshold_db)
            work.trimmed_seconds = wav.duration_seconds
            mel = mel_spectrogram(wav, cfg)
            work.mel = mel.values
    except Exception as exc:  # collected, reported per utterance
        work.error = f"{type(exc).__name__}: {exc}"
    return work


def compute_pass(entries, root, cfg: FeatureConfig, workers: int = 1,
                 need_audio: bool = True) -> list[UtteranceWork]:
    """Run the parallel compute pass; results come back in manifest order."""
    jobs = [(entry, str(root), cfg, need_audio) for entry in entries]
    if workers <= 1 or len(jobs) <= 1:
        return [_compute_utterance(job) for job in jobs]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_compute_utterance, jobs))


def norm_stats_from_work(work: list[UtteranceWork]) -> NormStats | None:
    mins, maxs = [], []
    for w in work:
        if w.ok and w.mel is not None and w.mel.size:
            mins.append(float(np.min(w.mel)))
            maxs.append(float(np.max(w.mel)))
    if not mins:
        return None
    return NormStats(min_val=min(mins), max_val=max(maxs))


def stats_from_work(work: list[UtteranceWork]) -> CorpusStats:
    n_words = sum(len(w.normalized.split()) for w in work if w.ok)
    seconds = sum(w.trimmed_seconds for w in work if w.ok)
    n_ok = sum(1 for w in work if w.ok)
    return CorpusStats(n_samples=n_ok, n_words=n_words, total_hours=seconds / 3600.0)


def align_utterance(work: UtteranceWork, posterior_path, inventory: PhonemeInventory,
                    expected_frames: int | None = None):
    """Extract per-phoneme durations from a posteriorgram file."""
    log_probs = formats.read_posteriors(posterior_path)
    if log_probs.shape[1] != inventory.num_classes:
        raise ValueError(
            f"posteriorgram has {log_probs.shape[1]} classes, "
            f"inventory implies {inventory.num_classes}"
        )
    if expected_frames is not None and log_probs.shape[0] != expected_frames:
        raise ValueError(
            f"posteriorgram frames {log_probs.shape[0]} != feature frames {expected_frames}"
        )
    labels = inventory.ids_for(work.phonemes)
    path = best_monotonic_path(log_probs, labels)
    return durations_from_path(path)


@dataclass
class PipelineConfig:
    feature: FeatureConfig = field(default_factory=FeatureConfig)
    workers: int = 1
    posteriors_dir: Path | None = None


def run_pipeline(entries, root, out_dir, cfg: PipelineConfig,
                 steps=("normalize", "g2p", "features", "align")) -> PipelineSummary:
    """Execute the requested steps and write the artifact tree under out_dir.

    Artifacts per utterance: text/<id>.txt, phonemes/<id>.phonemes,
    features/<id>.mel, durations/<id>.dur (the last only when a
    posteriorgram <id>.post is available). Reruns are byte-identical.
    """
    need_audio = "features" in set(steps)
    work = compute_pass(entries, root, cfg.feature, cfg.workers, need_audio=need_audio)
    return write_artifacts(work, out_dir, cfg, steps=steps)


def write_artifacts(work: list[UtteranceWork], out_dir, cfg: PipelineConfig,
                    steps=("normalize", "g2p", "features", "align")) -> PipelineSummary:
    """Serial write pass over pass-1 results, in manifest order."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    steps = set(steps)
    inventory = PhonemeInventory()

    stats = None
    if "features" in steps:
        stats = norm_stats_from_work(work)
        if stats is not None:
            stats.save(out / STATS_FILE)
    if "g2p" in steps or "align" in steps:
        inventory.save(out / INVENTORY_FILE)

    for sub, step in ((TEXT_DIR, "normalize"), (PHONEME_DIR, "g2p"),
                      (FEATURE_DIR, "features"), (DURATION_DIR, "align")):
        if step in steps:
            (out / sub).mkdir(exist_ok=True)

    summary = PipelineSummary()
    for w in work:
        if not w.ok:
            summary.add_failure(w.utt_id, w.error)
            continue
        try:
            written = []
            if "normalize" in steps:
                (out / TEXT_DIR / f"{w.utt_id}.txt").write_text(
                    w.normalized + "\n", encoding="utf-8")
                written.append("text")
            if "g2p" in steps:
                (out / PHONEME_DIR / f"{w.utt_id}.phonemes").write_text(
                    " ".join(w.phonemes) + "\n", encoding="utf-8")
                written.append("phonemes")
            if "features" in steps and w.mel is not None and stats is not None:
                mel = MelSpectrogram(values=w.mel, normalized=False, config=cfg.feature)
                normed = normalize_mel(mel, stats)
                formats.write_features(out / FEATURE_DIR / f"{w.utt_id}.mel", normed.values)
                written.append("features")
            if "align" in steps:
                written.append(_maybe_align(w, out, cfg, inventory))
            summary.add_ok(w.utt_id, ",".join(x for x in written if x))
        except Exception as exc:
            summary.add_failure(w.utt_id, f"{type(exc).__name__}: {exc}")
    return summary


def _maybe_align(w: UtteranceWork, out: Path, cfg: PipelineConfig,
                 inventory: PhonemeInventory) -> str:
    if cfg.posteriors_dir is None:
        return ""
    posterior_path = Path(cfg.posteriors_dir) / f"{w.utt_id}.post"
    if not posterior_path.exists():
        return ""
    expected = w.mel.shape[0] if w.mel is not None else _frames_on_disk(out, w.utt_id)
    durations = align_utterance(w, posterior_path, inventory, expected_frames=expected)
    formats.write_durations(out / DURATION_DIR / f"{w.utt_id}.dur", w.phonemes, durations)
    return "durations"


def _frames_on_disk(out: Path, utt_id: str) -> int | None:
    path = out / FEATURE_DIR / f"{utt_id}.mel"
    if path.exists():
        return formats.read_features(path).shape[0]
    return None
