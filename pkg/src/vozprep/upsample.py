"""Phoneme-to-frame expansion: repetition, Gaussian upsampling, positions.

Gaussian upsampling places each phoneme's vector under a Gaussian centered
at the temporal midpoint of its duration segment and mixes vectors with
softmax-normalized weights per output frame. Frame positions are the frame
centers t + 0.5.
"""

from __future__ import annotations

import math

import numpy as np


def _as_matrix(h) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.ndim != 2 or h.shape[0] < 1 or h.shape[1] < 1:
        raise ValueError("hidden sequence must be an N x D matrix")
    return h


def repeat_upsample(h, durations) -> np.ndarray:
    """Repeat row i of h durations[i] times; zero durations skip the row."""
    h = _as_matrix(h)
    d = np.asarray(durations)
    if d.ndim != 1 or len(d) != h.shape[0]:
        raise ValueError(f"expected {h.shape[0]} durations, got shape {d.shape}")
    if not np.issubdtype(d.dtype, np.integer):
        if not np.all(d == np.floor(d)):
            raise ValueError("repetition needs integer durations")
        d = d.astype(np.int64)
    if np.any(d < 0):
        raise ValueError("durations must be non-negative")
    return np.repeat(h, d, axis=0)


def segment_centers(durations) -> np.ndarray:
    """Midpoints c_i = cumsum(d)_i - d_i / 2 of the duration segments."""
    d = np.asarray(durations, dtype=np.float64)
    return np.cumsum(d) - d / 2.0


def total_frames(durations) -> int:
    """Output frame count: round-half-up of the summed durations."""
    return int(math.floor(float(np.sum(durations)) + 0.5))


def default_ranges(durations) -> np.ndarray:
    """Fallback spread when no range predictor is present: max(d/3, 0.1)."""
    d = np.asarray(durations, dtype=np.float64)
    return np.maximum(d / 3.0, 0.1)


def _check_spec(h, durations, ranges):
    h = _as_matrix(h)
    d = np.asarray(durations, dtype=np.float64)
    s = np.asarray(ranges, dtype=np.float64)
    if d.shape != (h.shape[0],) or s.shape != (h.shape[0],):
        raise ValueError("durations and ranges must have one entry per phoneme")
    if np.any(d <= 0):
        raise ValueError("durations must be positive")
    if np.any(s <= 0):
        raise ValueError("ranges must be positive")
    return h, d, s


def _gaussian_weights(d: np.ndarray, s: np.ndarray, T: int) -> np.ndarray:
    centers = segment_centers(d)
    positions = np.arange(T) + 0.5
    z = -((positions[:, None] - centers[None, :]) ** 2) / (2.0 * s[None, :] ** 2)
    z -= np.max(z, axis=1, keepdims=True)
    w = np.exp(z)
    return w / np.sum(w, axis=1, keepdims=True)


def gaussian_upsample(h, durations, ranges=None):
    """Softmax-of-Gaussians expansion of phoneme vectors to frame level.

    Returns (frames, weights): frames is (T, D) with T = round(sum(d)),
    weights is the (T, N) mixing matrix whose rows sum to 1.
    """
    if ranges is None:
        ranges = default_ranges(durations)
    h, d, s = _check_spec(h, durations, ranges)
    T = total_frames(d)
    if T < 1:
        raise ValueError("summed durations round to zero frames")
    w = _gaussian_weights(d, s, T)
    return w @ h, w


def gaussian_upsample_vjp(h, durations, ranges, grad_frames):
    """Backpropagate a (T, D) cotangent through :func:`gaussian_upsample`.

    Returns (grad_h, grad_d, grad_sigma). The frame count T is treated as
    constant: round(sum(d)) is piecewise constant in d.
    """
    h, d, s = _check_spec(h, durations, ranges)
    T = total_frames(d)
    g = np.asarray(grad_frames, dtype=np.float64)
    if g.shape != (T, h.shape[1]):
        raise ValueError(f"cotangent must have shape {(T, h.shape[1])}")
    w = _gaussian_weights(d, s, T)

    grad_h = w.T @ g
    # Softmax backward: dz[t,i] = w[t,i] * (a[t,i] - sum_j w[t,j] a[t,j])
    # with a[t,i] = g[t] . h[i].
    a = g @ h.T  # (T, N)
    b = np.sum(w * a, axis=1, keepdims=True)
    dz = w * (a - b)

    centers = segment_centers(d)
    positions = np.arange(T) + 0.5
    diff = positions[:, None] - centers[None, :]  # (T, N)
    dz_dc = dz * diff / s[None, :] ** 2  # dz[t,i] * dz/dc_i
    dz_ds = dz * diff ** 2 / s[None, :] ** 3
    grad_sigma = np.sum(dz_ds, axis=0)
    grad_c = np.sum(dz_dc, axis=0)  # (N,)
    # c_i = sum_{j<=i} d_j - d_i/2, so dc_i/dd_j = 1 for j<i, 1/2 for j=i.
    suffix_sums = np.cumsum(grad_c[::-1])[::-1]  # sum_{i>=j} grad_c[i]
    grad_d = suffix_sums - 0.5 * grad_c
    return grad_h, grad_d, grad_sigma


def phoneme_relative_positions(durations) -> np.ndarray:
    """Each frame's 0-based offset inside its phoneme segment."""
    d = np.asarray(durations)
    if d.ndim != 1 or len(d) == 0:
        raise ValueError("durations must be a non-empty sequence")
    if not np.issubdtype(d.dtype, np.integer) or np.any(d < 1):
        raise ValueError("durations must be positive integers")
    return np.concatenate([np.arange(di, dtype=np.int64) for di in d])


def sinusoidal_embedding(positions, dim: int) -> np.ndarray:
    """Transformer-style sin/cos embedding of integer positions."""
    if dim % 2 != 0 or dim < 2:
        raise ValueError("embedding dim must be a positive even integer")
    pos = np.asarray(positions, dtype=np.float64)
    if np.any(pos < 0):
        raise ValueError("positions must be non-negative")
    k = np.arange(dim // 2, dtype=np.float64)
    inv_freq = 10000.0 ** (-2.0 * k / dim)
    angles = pos[:, None] * inv_freq[None, :]
    out = np.empty((len(pos), dim))
    out[:, 0::2] = np.sin(angles)
    out[:, 1::2] = np.cos(angles)
    return out
