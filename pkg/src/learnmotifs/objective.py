"""Hard and smooth motif frequency, diversity violation, and their gradients.

Motif sets are ``(K, L)`` float arrays; segment inputs may be a
:class:`~learnmotifs.segmentation.SegmentMatrix` or a ``(J, L)`` array and
thresholds a :class:`~learnmotifs.segmentation.Threshold` or a float.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, InvalidThreshold

_CHUNK_ELEMENTS = 1 << 22


def as_motifs(motifs):
    m = np.asarray(motifs, dtype=np.float64)
    if m.ndim == 1:
        m = m[None, :]
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"motifs must be a non-empty (K, L) array, got shape {m.shape}")
    return m


def as_segments(segments):
    s = np.asarray(getattr(segments, "data", segments), dtype=np.float64)
    if s.ndim != 2:
        raise DimensionMismatch(f"segments must be a (J, L) array, got shape {s.shape}")
    return s


def threshold_value(threshold):
    t = float(getattr(threshold, "value", threshold))
    if not t > 0 or not np.isfinite(t):
        raise InvalidThreshold(f"threshold must be positive and finite, got {t}")
    return t


def _check_lengths(m, s):
    if m.shape[1] != s.shape[1]:
        raise DimensionMismatch(f"motif length {m.shape[1]} != segment length {s.shape[1]}")


def squared_distances(a, b):
    """Squared Euclidean distance between every row of `a` and every row of `b`.

    Computed from explicit differences, never from the Gram expansion, so an
    exact copy always lies at distance 0.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    out = np.empty((a.shape[0], b.shape[0]))
    rows = max(1, _CHUNK_ELEMENTS // max(1, b.size))
    for lo in range(0, a.shape[0], rows):
        diff = a[lo:lo + rows, None, :] - b[None, :, :]
        out[lo:lo + rows] = np.einsum("kjl,kjl->kj", diff, diff)
    return out


def count_nontrivial(match_indices):
    """Count matches whose gap to the previous match (counted or not) exceeds 1.

    Returns the count and the counted indices. A run of adjacent matches
    contributes only its first index.
    """
    idx = np.asarray(match_indices, dtype=np.int64)
    if idx.size == 0:
        return 0, idx
    keep = np.ones(idx.size, dtype=bool)
    keep[1:] = np.diff(idx) > 1
    counted = idx[keep]
    return int(counted.size), counted


@dataclass
class HardFrequencyReport:
    """Nontrivial match counts of a motif set.

    ``matches[k]`` lists the counted segment indices of motif ``k``.
    """

    per_motif: np.ndarray
    matches: list = field(default_factory=list)

    @property
    def total(self):
        return int(np.sum(self.per_motif))


@dataclass
class MatchProfile:
    per_pair: np.ndarray
    total_smooth: float


def hard_frequency(motifs, segments, threshold):
    """Nontrivial number of segments within squared distance < T of each motif."""
    m = as_motifs(motifs)
    s = as_segments(segments)
    _check_lengths(m, s)
    t = float(getattr(threshold, "value", threshold))
    dist = squared_distances(m, s)
    per_motif = np.zeros(m.shape[0], dtype=np.int64)
    matches = []
    for k in range(m.shape[0]):
        count, counted = count_nontrivial(np.flatnonzero(dist[k] < t))
        per_motif[k] = count
        matches.append(counted.tolist())
    return HardFrequencyReport(per_motif, matches)


def _match_scores(m, s, t, alpha):
    return np.exp(-(alpha / t) * squared_distances(m, s))


def smooth_frequency(motifs, segments, threshold, alpha):
    """Gaussian-kernel match scores ``exp(-alpha/T * dist)`` and their mean."""
    m = as_motifs(motifs)
    s = as_segments(segments)
    _check_lengths(m, s)
    t = threshold_value(threshold)
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    scores = _match_scores(m, s, t, alpha)
    return MatchProfile(scores, float(scores.mean()))


def pairwise_motif_distances(motifs):
    """Symmetric ``(K, K)`` matrix of squared distances between motifs."""
    m = as_motifs(motifs)
    phi = squared_distances(m, m)
    phi = 0.5 * (phi + phi.T)
    np.fill_diagonal(phi, 0.0)
    return phi


def _pair_terms(m, t):
    phi = pairwise_motif_distances(m)
    k = m.shape[0]
    upper = np.triu_indices(k, 1)
    return phi, phi[upper]


def hard_violation(motifs, threshold):
    """Mean linear penalty ``1 - phi/(2T)`` over motif pairs closer than 2T.

    Zero for a single motif.
    """
    m = as_motifs(motifs)
    t = threshold_value(threshold)
    k = m.shape[0]
    if k < 2:
        return 0.0
    _, pairs = _pair_terms(m, t)
    terms = np.where(pairs < 2 * t, 1.0 - pairs / (2 * t), 0.0)
    return float(2.0 / (k * (k - 1)) * terms.sum())


def smooth_violation(motifs, threshold):
    """Mean squared penalty ``(1 - phi/(2T))**2`` over motif pairs closer than 2T."""
    m = as_motifs(motifs)
    t = threshold_value(threshold)
    k = m.shape[0]
    if k < 2:
        return 0.0
    _, pairs = _pair_terms(m, t)
    terms = np.where(pairs < 2 * t, (1.0 - pairs / (2 * t)) ** 2, 0.0)
    return float(2.0 / (k * (k - 1)) * terms.sum())


def is_diverse(motifs, threshold):
    """True when every motif pair is strictly farther apart than 2T."""
    m = as_motifs(motifs)
    if m.shape[0] < 2:
        return True
    t = float(getattr(threshold, "value", threshold))
    _, pairs = _pair_terms(m, t)
    return bool(np.all(pairs > 2 * t))


def objective(motifs, segments, threshold, alpha):
    return smooth_frequency(motifs, segments, threshold, alpha).total_smooth - smooth_violation(
        motifs, threshold
    )


def _grad_frequency(m, s, t, alpha, scores):
    k, _ = m.shape
    j = s.shape[0]
    coef = -2.0 * alpha / (k * j * t)
    # sum_j (M_k - S_j) F_kj  ==  M_k * sum_j F_kj - F @ S
    return coef * (m * scores.sum(axis=1)[:, None] - scores @ s)


def _grad_violation(m, t, phi):
    k = m.shape[0]
    if k < 2:
        return np.zeros_like(m)
    weights = np.where(phi < 2 * t, phi - 2 * t, 0.0)
    np.fill_diagonal(weights, 0.0)
    coef = 2.0 / (k * (k - 1) * t * t)
    return coef * (m * weights.sum(axis=1)[:, None] - weights @ m)


def grad_frequency(motifs, segments, threshold, alpha):
    """Gradient of the mean smooth frequency with respect to every motif value."""
    m = as_motifs(motifs)
    s = as_segments(segments)
    _check_lengths(m, s)
    t = threshold_value(threshold)
    return _grad_frequency(m, s, t, alpha, _match_scores(m, s, t, alpha))


def grad_violation(motifs, threshold):
    """Gradient of the smooth violation; zeros when K = 1."""
    m = as_motifs(motifs)
    t = threshold_value(threshold)
    return _grad_violation(m, t, pairwise_motif_distances(m))


def grad_objective(motifs, segments, threshold, alpha):
    return grad_frequency(motifs, segments, threshold, alpha) - grad_violation(motifs, threshold)
