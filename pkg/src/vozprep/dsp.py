"""Audio feature extraction: load, resample, trim, log-mel, min-max normalize.

The chain mirrors a studio TTS preprocessing setup: 22.05 kHz mono audio,
1024-point Hann STFT with a 276-sample hop, a 100-filter HTK mel filterbank
with unit-area triangles, natural log with a 1e-5 floor, and corpus-level
min-max normalization onto [0, 4].
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.signal import resample_poly


@dataclass
class Waveform:
    samples: np.ndarray  # float64, mono
    sample_rate: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ValueError("mono required: samples must be one-dimensional")
        if self.sample_rate <= 0:
            raise ValueError("sample_rate must be positive")

    @property
    def duration_seconds(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class FeatureConfig:
    target_rate: int = 22050
    n_fft: int = 1024
    win_length: int = 1024
    hop_length: int = 276
    n_mels: int = 100
    fmin: float = 0.0
    fmax: float = 11025.0
    log_floor: float = 1e-5
    norm_lo: float = 0.0
    norm_hi: float = 4.0
    trim_threshold_db: float = -40.0

    def __post_init__(self):
        if self.win_length > self.n_fft:
            raise ValueError("win_length must not exceed n_fft")
        if self.hop_length > self.win_length:
            raise ValueError("hop_length must not exceed win_length")
        if self.fmax > self.target_rate / 2:
            raise ValueError("fmax must not exceed Nyquist")
        if self.norm_lo >= self.norm_hi:
            raise ValueError("norm_lo must be below norm_hi")


@dataclass
class MelSpectrogram:
    values: np.ndarray  # (T, n_mels)
    normalized: bool
    config: FeatureConfig

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 2:
            raise ValueError("mel values must be a T x M matrix")

    @property
    def n_frames(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class NormStats:
    min_val: float
    max_val: float

    def __post_init__(self):
        if not self.min_val < self.max_val:
            raise ValueError("degenerate stats: min_val must be below max_val")

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as f:
            f.write(f"min={self.min_val!r}\n")
            f.write(f"max={self.max_val!r}\n")

    @classmethod
    def load(cls, path) -> "NormStats":
        values = {}
        with open(path, encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if not line:
                    continue
                key, _, val = line.partition("=")
                values[key.strip()] = float(val)
        if "min" not in values or "max" not in values:
            raise ValueError(f"stats file {path} must define min= and max=")
        return cls(min_val=values["min"], max_val=values["max"])


# ---------------------------------------------------------------------------
# WAV I/O (RIFF/WAVE, PCM 16-bit mono only)
# ---------------------------------------------------------------------------


class WavFormatError(ValueError):
    pass


def load_wav(data: bytes) -> Waveform:
    """Decode a RIFF/WAVE file; int16 sample s maps to s/32768."""
    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE file")
    pos = 12
    fmt = None
    payload = None
    while pos + 8 <= len(data):
        chunk_id = data[pos:pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4:pos + 8])
        body = data[pos + 8:pos + 8 + size]
        if chunk_id == b"fmt ":
            if len(body) < 16:
                raise WavFormatError("truncated fmt chunk")
            fmt = struct.unpack("<HHIIHH", body[:16])
        elif chunk_id == b"data":
            if len(body) < size:
                raise WavFormatError("truncated data chunk")
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned
    if fmt is None:
        raise WavFormatError("missing fmt chunk")
    if payload is None:
        raise WavFormatError("missing data chunk")
    audio_format, channels, sample_rate, _, _, bits = fmt
    if audio_format != 1:
        raise WavFormatError(f"PCM required, got format tag {audio_format}")
    if channels != 1:
        raise WavFormatError(f"mono required, got {channels} channels")
    if bits != 16:
        raise WavFormatError(f"16-bit PCM required, got {bits} bits")
    if len(payload) % 2:
        raise WavFormatError("truncated data chunk: odd byte count")
    ints = np.frombuffer(payload, dtype="<i2")
    return Waveform(samples=ints.astype(np.float64) / 32768.0, sample_rate=sample_rate)


def read_wav(path) -> Waveform:
    with open(path, "rb") as f:
        return load_wav(f.read())


def write_wav(path, w: Waveform) -> None:
    """Encode as PCM 16-bit mono; samples are clipped to [-1, 1)."""
    clipped = np.clip(w.samples, -1.0, 32767 / 32768.0)
    ints = np.round(clipped * 32768.0).astype("<i2")
    payload = ints.tobytes()
    header = b"RIFF" + struct.pack("<I", 36 + len(payload)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, 1, 1, w.sample_rate, w.sample_rate * 2, 2, 16
    )
    header += b"data" + struct.pack("<I", len(payload))
    with open(path, "wb") as f:
        f.write(header + payload)


# ---------------------------------------------------------------------------
# Resampling and trimming
# ---------------------------------------------------------------------------


def resample(w: Waveform, target_rate: int) -> Waveform:
    """Polyphase windowed-sinc resampling at the reduced rational ratio.

    Output length is ceil(N * target / source); equal rates are identity.
    """
    if target_rate <= 0:
        raise ValueError("target_rate must be positive")
    if target_rate == w.sample_rate:
        return Waveform(samples=w.samples.copy(), sample_rate=w.sample_rate)
    if len(w.samples) == 0:
        return Waveform(samples=np.zeros(0), sample_rate=target_rate)
    g = math.gcd(target_rate, w.sample_rate)
    up, down = target_rate // g, w.sample_rate // g
    out = resample_poly(w.samples, up, down)
    n_out = -(-len(w.samples) * target_rate // w.sample_rate)  # ceil
    if len(out) < n_out:
        out = np.pad(out, (0, n_out - len(out)))
    elif len(out) > n_out:
        out = out[:n_out]
    return Waveform(samples=out, sample_rate=target_rate)


def trim_silence(w: Waveform, threshold_db: float) -> Waveform:
    """Drop leading/trailing 10 ms frames below peak * 10^(threshold/20)."""
    if threshold_db >= 0:
        raise ValueError("threshold_db must be negative")
    n = len(w.samples)
    peak = float(np.max(np.abs(w.samples))) if n else 0.0
    if peak == 0.0:
        return Waveform(samples=np.zeros(0), sample_rate=w.sample_rate)
    threshold = peak * 10.0 ** (threshold_db / 20.0)
    frame_len = max(1, w.sample_rate // 100)
    n_frames = -(-n // frame_len)
    loud = np.zeros(n_frames, dtype=bool)
    for k in range(n_frames):
        frame = w.samples[k * frame_len:(k + 1) * frame_len]
        loud[k] = np.max(np.abs(frame)) >= threshold
    keep = np.flatnonzero(loud)
    if keep.size == 0:
        return Waveform(samples=np.zeros(0), sample_rate=w.sample_rate)
    start = keep[0] * frame_len
    end = min(n, (keep[-1] + 1) * frame_len)
    return Waveform(samples=w.samples[start:end].copy(), sample_rate=w.sample_rate)


# ---------------------------------------------------------------------------
# Mel spectrogram
# ---------------------------------------------------------------------------


def hz_to_mel(freq):
    return 2595.0 * np.log10(1.0 + np.asarray(freq, dtype=np.float64) / 700.0)


def mel_to_hz(mel):
    return 700.0 * (10.0 ** (np.asarray(mel, dtype=np.float64) / 2595.0) - 1.0)


def mel_filter_centers(cfg: FeatureConfig) -> np.ndarray:
    """Center frequencies (Hz) of the n_mels triangular filters."""
    pts = np.linspace(hz_to_mel(cfg.fmin), hz_to_mel(cfg.fmax), cfg.n_mels + 2)
    return mel_to_hz(pts)[1:-1]


def mel_filterbank(cfg: FeatureConfig) -> np.ndarray:
    """(n_mels, n_fft//2 + 1) triangular filters, each with unit area in Hz."""
    n_bins = cfg.n_fft // 2 + 1
    fft_freqs = np.arange(n_bins) * cfg.target_rate / cfg.n_fft
    pts = mel_to_hz(np.linspace(hz_to_mel(cfg.fmin), hz_to_mel(cfg.fmax), cfg.n_mels + 2))
    fb = np.zeros((cfg.n_mels, n_bins))
    for m in range(cfg.n_mels):
        lo, center, hi = pts[m], pts[m + 1], pts[m + 2]
        rising = (fft_freqs - lo) / (center - lo)
        falling = (hi - fft_freqs) / (hi - center)
        tri = np.maximum(0.0, np.minimum(rising, falling))
        fb[m] = tri * (2.0 / (hi - lo))  # unit-area triangle
    return fb


def _reflect_pad(samples: np.ndarray, pad: int) -> np.ndarray:
    # np.pad(mode="reflect") caps pad at len-1; mirror indices have no cap.
    n = len(samples)
    if n == 1:
        return np.full(n + 2 * pad, samples[0])
    idx = np.arange(-pad, n + pad) % (2 * n - 2)
    idx = np.where(idx < n, idx, 2 * n - 2 - idx)
    return samples[idx]


def _stft_magnitude(samples: np.ndarray, cfg: FeatureConfig) -> np.ndarray:
    padded = _reflect_pad(samples, cfg.n_fft // 2)
    n_frames = 1 + len(samples) // cfg.hop_length
    window = np.hanning(cfg.win_length + 1)[:-1]  # periodic Hann
    starts = np.arange(n_frames) * cfg.hop_length
    frames = np.lib.stride_tricks.sliding_window_view(padded, cfg.n_fft)[starts]
    return np.abs(np.fft.rfft(frames * window, axis=1))


def mel_spectrogram(w: Waveform, cfg: FeatureConfig | None = None) -> MelSpectrogram:
    """Unnormalized log-mel features; T = 1 + floor(N / hop_length)."""
    cfg = cfg or FeatureConfig()
    if w.sample_rate != cfg.target_rate:
        raise ValueError(
            f"waveform rate {w.sample_rate} != configured rate {cfg.target_rate}; resample first"
        )
    if len(w.samples) < cfg.hop_length:
        raise ValueError(f"waveform shorter than one hop ({cfg.hop_length} samples)")
    magnitude = _stft_magnitude(w.samples, cfg)
    mel = magnitude @ mel_filterbank(cfg).T
    values = np.log(np.maximum(mel, cfg.log_floor))
    return MelSpectrogram(values=values, normalized=False, config=cfg)


def normalize_mel(m: MelSpectrogram, stats: NormStats) -> MelSpectrogram:
    """Affine map of [min_val, max_val] onto [norm_lo, norm_hi], clamped."""
    cfg = m.config
    clamped = np.clip(m.values, stats.min_val, stats.max_val)
    scale = (cfg.norm_hi - cfg.norm_lo) / (stats.max_val - stats.min_val)
    values = cfg.norm_lo + (clamped - stats.min_val) * scale
    return MelSpectrogram(values=values, normalized=True, config=cfg)


def denormalize_mel(m: MelSpectrogram, stats: NormStats) -> MelSpectrogram:
    """Exact inverse of :func:`normalize_mel` on the clamped range."""
    cfg = m.config
    scale = (stats.max_val - stats.min_val) / (cfg.norm_hi - cfg.norm_lo)
    values = stats.min_val + (m.values - cfg.norm_lo) * scale
    return MelSpectrogram(values=values, normalized=False, config=cfg)
