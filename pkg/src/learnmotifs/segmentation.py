"""Sliding-window Z-normalized segments and percentile distance thresholds."""

from dataclasses import dataclass

import numpy as np

from .errors import SeriesTooShort, TooFewSegments

CONSTANT_STD = 1e-8
DEFAULT_SAMPLE_BUDGET = 2_000_000


@dataclass(frozen=True)
class SegmentMatrix:
    """J Z-normalized windows of length L, one per row.

    Attributes
    ----------
    data : numpy.ndarray
        ``(J, L)`` float64 array.
    stride : int
        Points between consecutive window starts.
    source_offsets : numpy.ndarray
        Start index of every window in the raw series.
    """

    data: np.ndarray
    stride: int = 1
    source_offsets: np.ndarray = None

    def __post_init__(self):
        data = np.ascontiguousarray(self.data, dtype=np.float64)
        if data.ndim != 2:
            raise ValueError("segment matrix must be two-dimensional")
        offsets = self.source_offsets
        if offsets is None:
            offsets = np.arange(data.shape[0]) * self.stride
        offsets = np.asarray(offsets, dtype=np.int64)
        data.setflags(write=False)
        offsets.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "source_offsets", offsets)

    @property
    def n_segments(self):
        return self.data.shape[0]

    @property
    def length(self):
        return self.data.shape[1]


@dataclass(frozen=True)
class Threshold:
    """Squared-Euclidean match threshold T.

    ``percentile`` and ``sampled_pairs`` are set when T was derived from the
    pairwise distance distribution of a segment matrix.
    """

    value: float
    percentile: float = None
    sampled_pairs: int = None

    def __post_init__(self):
        if not self.value >= 0:
            raise ValueError(f"threshold must be non-negative, got {self.value}")

    def __float__(self):
        return float(self.value)


def znormalize(segment):
    """Z-normalize a vector with the population standard deviation.

    Segments whose standard deviation is below 1e-8 map to all zeros.

    >>> znormalize([1.0, 2.0, 3.0]).round(6)
    array([-1.224745,  0.      ,  1.224745])
    """
    x = np.asarray(segment, dtype=np.float64)
    std = x.std()
    if std < CONSTANT_STD:
        return np.zeros_like(x)
    return (x - x.mean()) / std


def extract_segments(series, length, stride=None):
    """Cut `series` into Z-normalized windows.

    Parameters
    ----------
    series : TimeSeries or array_like
    length : int
        Window length L.
    stride : int, optional
        Step between window starts, ``max(1, L // 2)`` when omitted.

    Returns
    -------
    SegmentMatrix
        ``floor((N - L) / stride) + 1`` rows.
    """
    values = np.asarray(getattr(series, "values", series), dtype=np.float64)
    length = int(length)
    if length < 1:
        raise ValueError("segment length must be positive")
    if stride is None:
        stride = max(1, length // 2)
    stride = int(stride)
    if stride < 1:
        raise ValueError("stride must be positive")
    n = values.size
    if n < length:
        raise SeriesTooShort(f"series of length {n} is shorter than window {length}")

    offsets = np.arange(0, n - length + 1, stride)
    windows = np.lib.stride_tricks.sliding_window_view(values, length)[offsets]
    mean = windows.mean(axis=1, keepdims=True)
    std = windows.std(axis=1, keepdims=True)
    flat = std[:, 0] < CONSTANT_STD
    data = (windows - mean) / np.where(flat[:, None], 1.0, std)
    data[flat] = 0.0
    return SegmentMatrix(data, stride=stride, source_offsets=offsets)


def _pair_index(linear, n):
    """Map linear indices over the upper triangle (i < j) to (i, j)."""
    linear = np.asarray(linear, dtype=np.int64)
    # row i starts at i*n - i*(i+1)/2 in row-major upper-triangle order
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * linear)) / 2).astype(np.int64)
    start = i * n - i * (i + 1) // 2
    # repair float rounding at row boundaries
    over = linear < start
    while np.any(over):
        i[over] -= 1
        start = i * n - i * (i + 1) // 2
        over = linear < start
    under = linear >= start + (n - 1 - i)
    while np.any(under):
        i[under] += 1
        start = i * n - i * (i + 1) // 2
        under = linear >= start + (n - 1 - i)
    j = linear - start + i + 1
    return i, j


def pairwise_segment_distances(data):
    """All J(J-1)/2 squared distances in upper-triangle row-major order."""
    out = []
    for i in range(data.shape[0] - 1):
        diff = data[i + 1:] - data[i]
        out.append(np.einsum("ij,ij->i", diff, diff))
    return np.concatenate(out)


def percentile_threshold(segments, pct, sample_budget=DEFAULT_SAMPLE_BUDGET, seed=0):
    """Threshold at the `pct`-th percentile of pairwise squared distances.

    All pairs are used when there are at most `sample_budget` of them,
    otherwise `sample_budget` distinct pairs are drawn with a generator seeded
    by `seed`. Percentiles interpolate linearly between order statistics.

    Parameters
    ----------
    segments : SegmentMatrix or array_like
    pct : float
        Percentile in percent, strictly between 0 and 100.
    sample_budget : int
    seed : int

    Returns
    -------
    Threshold
    """
    data = np.asarray(getattr(segments, "data", segments), dtype=np.float64)
    if not 0 < pct < 100:
        raise ValueError(f"percentile must lie in (0, 100), got {pct}")
    if sample_budget < 1:
        raise ValueError("sample budget must be positive")
    n = data.shape[0]
    if n < 2:
        raise TooFewSegments(f"need at least 2 segments, got {n}")
    total = n * (n - 1) // 2
    if total <= sample_budget:
        dists = pairwise_segment_distances(data)
    else:
        rng = np.random.default_rng(seed)
        picks = np.sort(rng.choice(total, size=sample_budget, replace=False))
        dists = np.empty(sample_budget)
        chunk = 1 << 16
        for lo in range(0, sample_budget, chunk):
            i, j = _pair_index(picks[lo:lo + chunk], n)
            diff = data[i] - data[j]
            dists[lo:lo + chunk] = np.einsum("ij,ij->i", diff, diff)
    value = float(np.percentile(dists, pct))
    return Threshold(value, percentile=float(pct), sampled_pairs=int(dists.size))
