"""Deterministic building blocks for a two-stage Spanish TTS data pipeline.

The package covers the non-neural core of the pipeline: transcript
normalization and rule-based G2P, log-mel feature extraction, CTC loss and
monotonic duration extraction over phoneme posteriorgrams, duration-driven
upsampling with positional embeddings, and the acoustic-model loss family.
Everything is pure and reproducible: identical inputs give byte-identical
outputs.
"""

from vozprep.frontend import (
    PhonemeInventory,
    expand_cardinal,
    grapheme_to_phoneme,
    normalize_text,
)
from vozprep.dsp import (
    FeatureConfig,
    MelSpectrogram,
    NormStats,
    Waveform,
    denormalize_mel,
    load_wav,
    mel_filterbank,
    mel_spectrogram,
    normalize_mel,
    resample,
    trim_silence,
)
from vozprep.align import (
    best_monotonic_path,
    ctc_loss,
    durations_from_path,
    min_ctc_frames,
)
from vozprep.upsample import (
    gaussian_upsample,
    gaussian_upsample_vjp,
    phoneme_relative_positions,
    repeat_upsample,
    sinusoidal_embedding,
)
from vozprep.losses import (
    LossConfig,
    combined_acoustic_loss,
    huber_log_duration_loss,
    l1_loss,
    ssim_loss,
)

__version__ = "0.1.0"

__all__ = [
    "PhonemeInventory",
    "expand_cardinal",
    "grapheme_to_phoneme",
    "normalize_text",
    "FeatureConfig",
    "MelSpectrogram",
    "NormStats",
    "Waveform",
    "denormalize_mel",
    "load_wav",
    "mel_filterbank",
    "mel_spectrogram",
    "normalize_mel",
    "resample",
    "trim_silence",
    "best_monotonic_path",
    "ctc_loss",
    "durations_from_path",
    "min_ctc_frames",
    "gaussian_upsample",
    "gaussian_upsample_vjp",
    "phoneme_relative_positions",
    "repeat_upsample",
    "sinusoidal_embedding",
    "LossConfig",
    "combined_acoustic_loss",
    "huber_log_duration_loss",
    "l1_loss",
    "ssim_loss",
]
