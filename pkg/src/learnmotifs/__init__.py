"""Learning time-series motifs by gradient ascent on a smooth frequency objective."""

from .brute import brute_force_search, segment_frequencies
from .errors import MotifError
from .harness import DiscoveryReport, RunSpec, compare_table, generate_synthetic, run
from .learner import LearnConfig, LearnResult, learn_motifs, learn_with_restarts, restart_seed
from .objective import (
    grad_frequency,
    grad_objective,
    grad_violation,
    hard_frequency,
    hard_violation,
    objective,
    pairwise_motif_distances,
    smooth_frequency,
    smooth_violation,
)
from .segmentation import SegmentMatrix, Threshold, extract_segments, percentile_threshold, znormalize
from .series_io import TimeSeries, load_series, write_report, write_series

__version__ = "0.1.0"
