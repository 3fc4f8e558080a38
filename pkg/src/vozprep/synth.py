"""Deterministic 5-utterance demo corpus for tests and CLI walkthroughs.

Audio is synthesized harmonic babble with silence margins (48 kHz PCM16
mono), posteriorgrams are built from an even segmentation of each
utterance's own phoneme sequence, so the whole pipeline including `align`
can run end to end without external data.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from vozprep import formats
from vozprep.dsp import FeatureConfig, Waveform, mel_spectrogram, resample, trim_silence, write_wav
from vozprep.frontend import PhonemeInventory, grapheme_to_phoneme, normalize_text

DEMO_TRANSCRIPTS = [
    ("utt_001", "¿Hola, Mundo?"),
    ("utt_002", "Tiene 16 años."),
    ("utt_003", "El perro pequeño corre por la calle."),
    ("utt_004", "Cien niños cantan y juegan."),
    ("utt_005", "¡Adiós! Hasta mañana, guerrero."),
]

_SOURCE_RATE = 48000


def _synth_audio(rng: np.ndarray, seconds: float, base_hz: float) -> np.ndarray:
    n = int(_SOURCE_RATE * seconds)
    t = np.arange(n) / _SOURCE_RATE
    # Three harmonics with slow amplitude wobble, loosely voice-like.
    signal = (
        0.50 * np.sin(2 * np.pi * base_hz * t)
        + 0.25 * np.sin(2 * np.pi * 2.0 * base_hz * t + 0.7)
        + 0.12 * np.sin(2 * np.pi * 3.1 * base_hz * t + 1.9)
    )
    signal *= 0.75 + 0.25 * np.sin(2 * np.pi * 2.3 * t)
    signal += 0.01 * rng.standard_normal(n)
    fade = min(n // 20, 960)
    ramp = np.linspace(0.0, 1.0, fade)
    signal[:fade] *= ramp
    signal[-fade:] *= ramp[::-1]
    signal *= 0.5 / np.max(np.abs(signal))
    margin = np.zeros(int(_SOURCE_RATE * 0.08))
    return np.concatenate([margin, signal, margin])


def _synth_posterior(n_frames: int, labels: list[int], n_classes: int) -> np.ndarray:
    """Even segmentation with probability 0.8 on the segment's label."""
    boundaries = np.linspace(0, n_frames, len(labels) + 1).round().astype(int)
    probs = np.full((n_frames, n_classes), 0.2 / (n_classes - 1))
    for i, label in enumerate(labels):
        lo, hi = boundaries[i], max(boundaries[i + 1], boundaries[i] + 1)
        probs[lo:hi, :] = 0.2 / (n_classes - 1)
        probs[lo:hi, label] = 0.8
    probs /= probs.sum(axis=1, keepdims=True)
    return np.log(probs)


def build_demo_corpus(root, seed: int = 20210901, cfg: FeatureConfig | None = None) -> Path:
    """Write wav/, posteriors/ and manifest.tsv under root; returns the manifest path."""
    cfg = cfg or FeatureConfig()
    root = Path(root)
    (root / "wav").mkdir(parents=True, exist_ok=True)
    (root / "posteriors").mkdir(parents=True, exist_ok=True)
    inventory = PhonemeInventory()
    entries = []
    for idx, (utt_id, transcript) in enumerate(DEMO_TRANSCRIPTS):
        rng = np.random.default_rng(seed + idx)
        seconds = 0.45 + 0.1 * idx
        samples = _synth_audio(rng, seconds, base_hz=170.0 + 25.0 * idx)
        wav_path = root / "wav" / f"{utt_id}.wav"
        write_wav(wav_path, Waveform(samples=samples, sample_rate=_SOURCE_RATE))
        entries.append(formats.ManifestEntry(utt_id, f"wav/{utt_id}.wav", transcript))

        # Posterior frame count must match the pipeline's mel frame count.
        wav = resample(Waveform(samples, _SOURCE_RATE), cfg.target_rate)
        wav = trim_silence(wav, cfg.trim_threshold_db)
        n_frames = mel_spectrogram(wav, cfg).n_frames
        phonemes = grapheme_to_phoneme(normalize_text(transcript))
        labels = inventory.ids_for(phonemes)
        log_probs = _synth_posterior(n_frames, labels, inventory.num_classes)
        formats.write_posteriors(root / "posteriors" / f"{utt_id}.post", log_probs)

    manifest_path = root / "manifest.tsv"
    formats.write_manifest(manifest_path, entries)
    return manifest_path
