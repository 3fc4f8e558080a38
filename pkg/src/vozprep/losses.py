"""Acoustic-model training objectives: L1, SSIM, Huber-on-log-durations.

All losses are means over elements and return analytic gradients on
request; every gradient is validated against central finite differences in
the test suite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LossConfig:
    lambda_l1: float = 1.0
    lambda_ssim: float = 1.0
    lambda_dur: float = 1.0
    ssim_window: int = 11
    ssim_sigma: float = 1.5
    dynamic_range: float = 4.0
    huber_delta: float = 1.0

    def __post_init__(self):
        if min(self.lambda_l1, self.lambda_ssim, self.lambda_dur) < 0:
            raise ValueError("loss weights must be non-negative")
        if self.dynamic_range <= 0 or self.huber_delta <= 0:
            raise ValueError("dynamic_range and huber_delta must be positive")
        if self.ssim_window % 2 == 0 or self.ssim_window < 3:
            raise ValueError("ssim_window must be an odd integer >= 3")

    @property
    def c1(self) -> float:
        return (0.01 * self.dynamic_range) ** 2

    @property
    def c2(self) -> float:
        return (0.03 * self.dynamic_range) ** 2


def _as_pair(pred, target):
    p = np.asarray(pred, dtype=np.float64)
    t = np.asarray(target, dtype=np.float64)
    if p.shape != t.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {t.shape}")
    return p, t


def l1_loss(pred, target, with_grad: bool = False):
    """Mean absolute error; subgradient 0 where pred equals target."""
    p, t = _as_pair(pred, target)
    diff = p - t
    loss = float(np.mean(np.abs(diff)))
    if not with_grad:
        return loss, None
    return loss, np.sign(diff) / diff.size


# ---------------------------------------------------------------------------
# SSIM
# ---------------------------------------------------------------------------


def _gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    half = size // 2
    x = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(x ** 2) / (2.0 * sigma ** 2))
    return g / np.sum(g)


def _corr1d_valid(x: np.ndarray, g: np.ndarray, axis: int) -> np.ndarray:
    windows = np.lib.stride_tricks.sliding_window_view(x, len(g), axis=axis)
    return np.tensordot(windows, g, axes=([-1], [0]))


def _filter(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Gaussian-windowed local mean with reflect borders."""
    half = len(g) // 2
    padded = np.pad(x, half, mode="reflect")
    return _corr1d_valid(_corr1d_valid(padded, g, 0), g, 1)


def _fold1d(q: np.ndarray, axis: int, half: int) -> np.ndarray:
    """Adjoint of reflect padding: fold border mass back onto the interior."""
    q = np.moveaxis(q, axis, 0)
    n = q.shape[0] - 2 * half
    out = q[half:half + n].copy()
    for j in range(half):
        out[half - j] += q[j]          # left: source index -(half - j)
        out[n - 2 - j] += q[n + half + j]  # right: mirrored past the end
    return np.moveaxis(out, 0, axis)


def _conv1d_full(c: np.ndarray, g: np.ndarray, axis: int) -> np.ndarray:
    c = np.moveaxis(c, axis, -1)
    out = np.apply_along_axis(np.convolve, -1, c, g, mode="full")
    return np.moveaxis(out, -1, axis)


def _filter_adjoint(c: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Transpose of :func:`_filter` as a linear map (g is symmetric)."""
    half = len(g) // 2
    q = _conv1d_full(_conv1d_full(c, g, 1), g, 0)
    return _fold1d(_fold1d(q, 1, half), 0, half)


def ssim_map(pred, target, cfg: LossConfig | None = None) -> np.ndarray:
    """Per-pixel structural similarity with Gaussian-weighted moments."""
    cfg = cfg or LossConfig()
    x, y = _as_pair(pred, target)
    if min(x.shape) < cfg.ssim_window:
        raise ValueError(
            f"inputs of shape {x.shape} are smaller than the {cfg.ssim_window}-wide window"
        )
    g = _gaussian_kernel(cfg.ssim_window, cfg.ssim_sigma)
    ux, uy = _filter(x, g), _filter(y, g)
    vx = _filter(x * x, g) - ux * ux
    vy = _filter(y * y, g) - uy * uy
    vxy = _filter(x * y, g) - ux * uy
    a1 = 2.0 * ux * uy + cfg.c1
    a2 = 2.0 * vxy + cfg.c2
    b1 = ux * ux + uy * uy + cfg.c1
    b2 = vx + vy + cfg.c2
    return (a1 * a2) / (b1 * b2)


def ssim_loss(pred, target, cfg: LossConfig | None = None, with_grad: bool = False):
    """1 - mean(SSIM map), optionally with the gradient w.r.t. pred."""
    cfg = cfg or LossConfig()
    x, y = _as_pair(pred, target)
    if min(x.shape) < cfg.ssim_window:
        raise ValueError(
            f"inputs of shape {x.shape} are smaller than the {cfg.ssim_window}-wide window"
        )
    g = _gaussian_kernel(cfg.ssim_window, cfg.ssim_sigma)
    ux, uy = _filter(x, g), _filter(y, g)
    vx = _filter(x * x, g) - ux * ux
    vy = _filter(y * y, g) - uy * uy
    vxy = _filter(x * y, g) - ux * uy
    a1 = 2.0 * ux * uy + cfg.c1
    a2 = 2.0 * vxy + cfg.c2
    b1 = ux * ux + uy * uy + cfg.c1
    b2 = vx + vy + cfg.c2
    s = (a1 * a2) / (b1 * b2)
    loss = 1.0 - float(np.mean(s))
    if not with_grad:
        return loss, None

    # dS w.r.t. the five filtered moments, then pull back through the
    # filter adjoint. vx and vxy fold their ux dependence into c_ux.
    inv_bb = 1.0 / (b1 * b2)
    ds_dvx = -s / b2
    ds_dvxy = 2.0 * a1 * inv_bb
    c_ux = 2.0 * uy * a2 * inv_bb - 2.0 * ux * s / b1 \
        + ds_dvx * (-2.0 * ux) + ds_dvxy * (-uy)
    c_uxx = ds_dvx
    c_uxy = ds_dvxy
    scale = -1.0 / s.size
    grad = scale * (
        _filter_adjoint(c_ux, g)
        + 2.0 * x * _filter_adjoint(c_uxx, g)
        + y * _filter_adjoint(c_uxy, g)
    )
    return loss, grad


# ---------------------------------------------------------------------------
# Huber on log durations
# ---------------------------------------------------------------------------


def huber_log_duration_loss(pred_log, target_durations, delta: float = 1.0,
                            with_grad: bool = False):
    """Mean Huber loss between predictions and ln(1 + d) duration targets."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    p = np.asarray(pred_log, dtype=np.float64)
    d = np.asarray(target_durations, dtype=np.float64)
    if p.shape != d.shape or p.ndim != 1:
        raise ValueError(f"length mismatch: {p.shape} vs {d.shape}")
    if np.any(d < 0):
        raise ValueError("durations must be non-negative")
    e = p - np.log1p(d)
    quad = np.abs(e) <= delta
    per_elem = np.where(quad, 0.5 * e * e, delta * (np.abs(e) - 0.5 * delta))
    loss = float(np.mean(per_elem))
    if not with_grad:
        return loss, None
    grad = np.where(quad, e, delta * np.sign(e)) / len(e)
    return loss, grad


def combined_acoustic_loss(pred_mel, target_mel, pred_log_dur, target_dur,
                           cfg: LossConfig | None = None):
    """Weighted sum of the three objectives plus the unweighted breakdown."""
    cfg = cfg or LossConfig()
    l1, _ = l1_loss(pred_mel, target_mel)
    ssim, _ = ssim_loss(pred_mel, target_mel, cfg)
    dur, _ = huber_log_duration_loss(pred_log_dur, target_dur, cfg.huber_delta)
    total = cfg.lambda_l1 * l1 + cfg.lambda_ssim * ssim + cfg.lambda_dur * dur
    return total, {"l1": l1, "ssim": ssim, "duration": dur}
