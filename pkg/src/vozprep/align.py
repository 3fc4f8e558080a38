"""CTC loss with gradients and most-likely monotonic path extraction.

Operates on phoneme posteriorgrams: (T, V+1) matrices of per-frame
log-probabilities where the last column is the CTC blank. Everything runs
in log space; exact zeros are -inf sentinels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

NEG_INF = -np.inf


@dataclass
class AlignmentPath:
    """Monotonic frame-to-phoneme assignment with its total log-probability."""

    assignment: np.ndarray  # (T,) indices into the label sequence
    score: float

    def __post_init__(self):
        self.assignment = np.asarray(self.assignment, dtype=np.int64)


def _check_posterior(log_probs: np.ndarray, tol: float = 1e-4) -> np.ndarray:
    log_probs = np.asarray(log_probs, dtype=np.float64)
    if log_probs.ndim != 2:
        raise ValueError("posteriorgram must be a T x (V+1) matrix")
    row_lse = _logsumexp_rows(log_probs)
    if np.any(np.abs(row_lse) > tol):
        worst = int(np.argmax(np.abs(row_lse)))
        raise ValueError(
            f"posteriorgram row {worst} is not normalized (logsumexp {row_lse[worst]:+.2e})"
        )
    return log_probs


def _logsumexp_rows(x: np.ndarray) -> np.ndarray:
    m = np.max(x, axis=1)
    safe = np.where(np.isfinite(m), m, 0.0)
    out = safe + np.log(np.sum(np.exp(x - safe[:, None]), axis=1))
    return np.where(np.isfinite(m), out, m)


def min_ctc_frames(labels) -> int:
    """Shortest T admitting an alignment: |y| plus one per repeated adjacent pair."""
    labels = list(labels)
    repeats = sum(1 for a, b in zip(labels, labels[1:]) if a == b)
    return len(labels) + repeats


def _extend_with_blanks(labels: np.ndarray, blank: int) -> np.ndarray:
    ext = np.full(2 * len(labels) + 1, blank, dtype=np.int64)
    ext[1::2] = labels
    return ext


def ctc_loss(log_probs: np.ndarray, labels, with_grad: bool = False):
    """CTC negative log-likelihood over all blank-augmented alignments.

    The blank is the last column of ``log_probs``. When ``with_grad`` is
    set, also returns the (T, V+1) gradient taken along distribution-
    preserving perturbations of the rows (perturb one log-probability,
    renormalize the row): grad[t, k] = p[t, k] - posterior(t, k), the
    forward-backward occupancy aggregated per class.
    """
    log_probs = _check_posterior(log_probs)
    T, n_classes = log_probs.shape
    blank = n_classes - 1
    labels = np.asarray(list(labels), dtype=np.int64)
    if len(labels) == 0:
        raise ValueError("empty label sequence")
    if np.any(labels < 0) or np.any(labels >= blank):
        bad = labels[(labels < 0) | (labels >= blank)][0]
        raise ValueError(f"label id {bad} outside inventory of {blank} phonemes")
    if T < min_ctc_frames(labels):
        raise ValueError(
            f"no admissible alignment: {T} frames < minimum {min_ctc_frames(labels)}"
        )

    ext = _extend_with_blanks(labels, blank)
    S = len(ext)
    emit = log_probs[:, ext]  # (T, S)
    # States allowed to skip from s-2: non-blank and different from ext[s-2].
    can_skip = np.zeros(S, dtype=bool)
    can_skip[2:] = (ext[2:] != blank) & (ext[2:] != ext[:-2])

    alpha = np.full((T, S), NEG_INF)
    alpha[0, 0] = emit[0, 0]
    if S > 1:
        alpha[0, 1] = emit[0, 1]
    for t in range(1, T):
        prev = alpha[t - 1]
        stay = prev
        step = np.concatenate(([NEG_INF], prev[:-1]))
        skip = np.concatenate(([NEG_INF, NEG_INF], prev[:-2]))
        skip = np.where(can_skip, skip, NEG_INF)
        alpha[t] = np.logaddexp(np.logaddexp(stay, step), skip) + emit[t]

    log_p = np.logaddexp(alpha[T - 1, S - 1], alpha[T - 1, S - 2] if S > 1 else NEG_INF)
    loss = -float(log_p)
    if not with_grad:
        return loss, None

    # beta[t, s]: log-probability of completing from state s with emissions
    # strictly after frame t, so that alpha[t] + beta[t] marginalizes paths.
    beta = np.full((T, S), NEG_INF)
    beta[T - 1, S - 1] = 0.0
    if S > 1:
        beta[T - 1, S - 2] = 0.0
    can_skip_fwd = np.zeros(S, dtype=bool)
    can_skip_fwd[:-2] = (ext[2:] != blank) & (ext[2:] != ext[:-2])
    for t in range(T - 2, -1, -1):
        nxt = beta[t + 1] + emit[t + 1]
        stay = nxt
        step = np.concatenate((nxt[1:], [NEG_INF]))
        skip = np.concatenate((nxt[2:], [NEG_INF, NEG_INF]))
        skip = np.where(can_skip_fwd, skip, NEG_INF)
        beta[t] = np.logaddexp(np.logaddexp(stay, step), skip)

    with np.errstate(invalid="ignore"):
        log_occ = alpha + beta - log_p  # (T, S), may hold -inf
    occupancy = np.exp(np.where(np.isnan(log_occ), NEG_INF, log_occ))
    class_occ = np.zeros((T, n_classes))
    for s, k in enumerate(ext):
        class_occ[:, k] += occupancy[:, s]
    grad = np.exp(log_probs) - class_occ
    return loss, grad


def best_monotonic_path(log_probs: np.ndarray, labels) -> AlignmentPath:
    """Best segmentation of T frames into |labels| contiguous segments.

    Maximizes the summed log-probability of each frame's assigned label;
    the blank column is ignored. Ties are broken by staying on the current
    phoneme as long as possible, so earlier phonemes absorb tied frames and
    the result is unique.
    """
    log_probs = np.asarray(log_probs, dtype=np.float64)
    if log_probs.ndim != 2:
        raise ValueError("posteriorgram must be a T x (V+1) matrix")
    T, n_classes = log_probs.shape
    labels = np.asarray(list(labels), dtype=np.int64)
    N = len(labels)
    if N == 0:
        raise ValueError("empty label sequence")
    if np.any(labels < 0) or np.any(labels >= n_classes):
        raise ValueError("label id outside posteriorgram classes")
    if T < N:
        raise ValueError(f"insufficient frames: {T} < {N} labels")

    emit = log_probs[:, labels]  # (T, N)
    # suffix[t, i]: best score for frames t..T-1 over labels i..N-1 with the
    # frame t assigned to label i.
    suffix = np.full((T, N), NEG_INF)
    suffix[T - 1, N - 1] = emit[T - 1, N - 1]
    for t in range(T - 2, -1, -1):
        stay = suffix[t + 1]
        advance = np.concatenate((suffix[t + 1, 1:], [NEG_INF]))
        best = np.maximum(stay, advance)
        # Label i at frame t is feasible only if N-1-i <= T-1-t remains.
        feasible = np.arange(N) >= N - 1 - (T - 1 - t)
        suffix[t] = np.where(feasible, emit[t] + best, NEG_INF)

    assignment = np.empty(T, dtype=np.int64)
    assignment[0] = 0
    i = 0
    for t in range(1, T):
        if i == N - 1:
            assignment[t] = i
            continue
        # Prefer staying on the current phoneme when scores tie, but never
        # starve the remaining labels of frames.
        can_stay = (T - 1 - t) >= (N - 1 - i)
        if can_stay and suffix[t, i] >= suffix[t, i + 1]:
            assignment[t] = i
        else:
            i += 1
            assignment[t] = i
    if i != N - 1:
        raise AssertionError("walk failed to consume all labels")
    return AlignmentPath(assignment=assignment, score=float(suffix[0, 0]))


def durations_from_path(path: AlignmentPath) -> np.ndarray:
    """Frames per phoneme; validates the path invariants first."""
    a = path.assignment
    if len(a) == 0:
        raise ValueError("empty alignment path")
    if a[0] != 0:
        raise ValueError("path must start at phoneme index 0")
    steps = np.diff(a)
    if np.any(steps < 0):
        raise ValueError("path is not monotonic")
    if np.any(steps > 1):
        raise ValueError("phoneme index skipped")
    n = int(a[-1]) + 1
    durations = np.bincount(a, minlength=n)
    return durations.astype(np.int64)
