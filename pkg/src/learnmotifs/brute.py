"""Search-based baseline: every segment is a motif candidate."""

from dataclasses import dataclass

import numpy as np

from .objective import as_segments, count_nontrivial, hard_frequency, squared_distances


def segment_frequencies(segments, threshold):
    """Nontrivial match count of each segment against all segments.

    The self-match at distance 0 is included, so a segment with no match
    directly before it counts at least 1. Cost is O(J^2 L).
    """
    s = as_segments(segments)
    t = float(getattr(threshold, "value", threshold))
    n = s.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    rows = max(1, (1 << 22) // max(1, s.size))
    for lo in range(0, n, rows):
        block = squared_distances(s[lo:lo + rows], s)
        for i, dist in enumerate(block):
            counts[lo + i], _ = count_nontrivial(np.flatnonzero(dist < t))
    return counts


@dataclass
class SearchResult:
    """Motifs picked by :func:`brute_force_search`.

    ``short_selection`` is set when fewer than K segments satisfied the
    diversity filter.
    """

    motifs: np.ndarray
    indices: list
    hard: object
    short_selection: bool


def brute_force_search(segments, threshold, n_motifs, counts=None):
    """Greedy top-K segments by frequency under the diversity filter.

    Step k takes the most frequent segment (lowest index on ties) whose
    squared distance to every earlier pick is strictly greater than 2T.

    Parameters
    ----------
    segments : SegmentMatrix or array_like
    threshold : Threshold or float
    n_motifs : int
    counts : array_like, optional
        Precomputed :func:`segment_frequencies`.

    Returns
    -------
    SearchResult
    """
    s = as_segments(segments)
    t = float(getattr(threshold, "value", threshold))
    if counts is None:
        counts = segment_frequencies(s, t)
    counts = np.asarray(counts)
    eligible = np.ones(s.shape[0], dtype=bool)
    picked = []
    for _ in range(int(n_motifs)):
        if not eligible.any():
            break
        candidates = np.flatnonzero(eligible)
        best = int(candidates[np.argmax(counts[candidates])])  # first max wins ties
        picked.append(best)
        eligible &= squared_distances(s[best:best + 1], s)[0] > 2 * t
    motifs = s[picked].copy()
    hard = hard_frequency(motifs, s, t) if picked else None
    return SearchResult(motifs, picked, hard, len(picked) < int(n_motifs))
