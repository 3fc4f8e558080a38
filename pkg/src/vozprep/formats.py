"""On-disk formats: binary matrix files, durations TSV, corpus manifest.

Binary layout (little-endian): 4-byte magic, u32 rows, u32 cols, then
rows*cols IEEE-754 f32 values row-major. Features use magic "MF01",
posteriorgrams "MP01".
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

FEATURE_MAGIC = b"MF01"
POSTERIOR_MAGIC = b"MP01"


class FileFormatError(ValueError):
    pass


def write_matrix(path, matrix: np.ndarray, magic: bytes) -> None:
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise FileFormatError("matrix files hold two-dimensional data")
    if not np.all(np.isfinite(m)):
        raise FileFormatError(f"refusing to write non-finite values to {path}")
    rows, cols = m.shape
    with open(path, "wb") as f:
        f.write(magic)
        f.write(struct.pack("<II", rows, cols))
        f.write(m.astype("<f4").tobytes())


def read_matrix(path, magic: bytes) -> np.ndarray:
    with open(path, "rb") as f:
        data = f.read()
    if len(data) < 12:
        raise FileFormatError(f"{path}: truncated header")
    if data[:4] != magic:
        raise FileFormatError(
            f"{path}: bad magic {data[:4]!r}, expected {magic.decode('ascii')!r}"
        )
    rows, cols = struct.unpack("<II", data[4:12])
    expected = 12 + 4 * rows * cols
    if len(data) != expected:
        raise FileFormatError(
            f"{path}: payload is {len(data) - 12} bytes, expected {expected - 12}"
        )
    flat = np.frombuffer(data, dtype="<f4", offset=12)
    m = flat.reshape(rows, cols).astype(np.float64)
    if not np.all(np.isfinite(m)):
        raise FileFormatError(f"{path}: non-finite values in payload")
    return m


def write_features(path, values: np.ndarray) -> None:
    write_matrix(path, values, FEATURE_MAGIC)


def read_features(path) -> np.ndarray:
    return read_matrix(path, FEATURE_MAGIC)


def write_posteriors(path, log_probs: np.ndarray) -> None:
    write_matrix(path, log_probs, POSTERIOR_MAGIC)


def read_posteriors(path) -> np.ndarray:
    return read_matrix(path, POSTERIOR_MAGIC)


def write_durations(path, symbols: list[str], durations) -> None:
    """UTF-8 TSV, one `symbol<TAB>frames` line per phoneme."""
    durations = list(durations)
    if len(symbols) != len(durations):
        raise ValueError("one duration per phoneme symbol required")
    with open(path, "w", encoding="utf-8") as f:
        for sym, frames in zip(symbols, durations):
            f.write(f"{sym}\t{int(frames)}\n")


def read_durations(path) -> tuple[list[str], list[int]]:
    symbols, durations = [], []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            sym, sep, frames = line.partition("\t")
            if not sep:
                raise FileFormatError(f"{path}:{lineno}: expected symbol<TAB>frames")
            symbols.append(sym)
            durations.append(int(frames))
    return symbols, durations


@dataclass(frozen=True)
class ManifestEntry:
    utt_id: str
    audio_path: str
    transcript: str


def read_manifest(path) -> list[ManifestEntry]:
    """UTF-8 TSV `id<TAB>audio_path<TAB>transcript`, one utterance per line."""
    entries = []
    seen = set()
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split("\t", 2)
            if len(parts) != 3:
                raise FileFormatError(
                    f"{path}:{lineno}: expected id<TAB>path<TAB>transcript"
                )
            utt_id, audio_path, transcript = parts
            if utt_id in seen:
                raise FileFormatError(f"{path}:{lineno}: duplicate id {utt_id!r}")
            seen.add(utt_id)
            entries.append(ManifestEntry(utt_id, audio_path, transcript))
    return entries


def write_manifest(path, entries: list[ManifestEntry]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for e in entries:
            f.write(f"{e.utt_id}\t{e.audio_path}\t{e.transcript}\n")


def resolve_audio(root, entry: ManifestEntry) -> Path:
    return Path(root) / entry.audio_path
