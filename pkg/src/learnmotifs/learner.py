"""Gradient-ascent motif learning with AdaGrad steps and random restarts."""

import hashlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatch, NonFiniteValue, TooFewSegments
from .objective import (
    _grad_frequency,
    _grad_violation,
    as_segments,
    hard_frequency,
    hard_violation,
    is_diverse,
    smooth_violation,
    squared_distances,
)


@dataclass(frozen=True)
class LearnConfig:
    """Hyper-parameters of one learning run.

    ``penalize_diversity=False`` drops the violation gradient from the
    update; it exists for ablation experiments only.
    """

    threshold: float
    n_motifs: int
    length: int
    alpha: float = 2.0
    eta: float = 0.1
    iters: int = 1000
    restarts: int = 200
    seed: int = 0
    trace: bool = False
    penalize_diversity: bool = True

    def __post_init__(self):
        t = float(getattr(self.threshold, "value", self.threshold))
        object.__setattr__(self, "threshold", t)
        if not t > 0:
            raise ConfigError(f"threshold must be positive, got {t}")
        for name in ("n_motifs", "length", "iters", "restarts"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be at least 1")
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        if not self.eta > 0:
            raise ConfigError(f"eta must be positive, got {self.eta}")


@dataclass
class LearnResult:
    motifs: np.ndarray
    hard: object
    hard_violation_final: float
    smooth_violation_final: float
    restart_index: int
    restart_seed: int
    init_segment_indices: list
    objective_trace: np.ndarray = None
    smooth_freq_trace: np.ndarray = None
    smooth_viol_trace: np.ndarray = None
    nonzero_violation: bool = False
    diverse: bool = True
    restart_totals: list = field(default_factory=list)

    @property
    def total(self):
        return self.hard.total


def restart_seed(seed, restart):
    """Stable 63-bit seed for restart `restart` of base seed `seed`."""
    digest = hashlib.blake2b(f"{int(seed)}:{int(restart)}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") >> 1


def learn_motifs(segments, cfg, seed, restart_index=0):
    """Run one gradient-ascent learning pass.

    Motifs start at K distinct random segments. Each iteration evaluates the
    match scores and pairwise motif distances once, computes the objective
    gradient for every motif value from them, then applies the per-coordinate
    AdaGrad update ``M += eta * g / sqrt(sum of g**2)``. Coordinates whose
    accumulated gradient is still zero are left unchanged.

    Parameters
    ----------
    segments : SegmentMatrix or array_like
        ``(J, L)`` segments with ``J >= cfg.n_motifs``.
    cfg : LearnConfig
    seed : int
        Seed of this pass's generator (initialization only).
    restart_index : int
        Recorded in the result.

    Returns
    -------
    LearnResult
    """
    s = as_segments(segments)
    n_seg, length = s.shape
    k = int(cfg.n_motifs)
    if length != cfg.length:
        raise DimensionMismatch(f"segments have length {length}, config expects {cfg.length}")
    if n_seg < k:
        raise TooFewSegments(f"{n_seg} segments cannot seed {k} distinct motifs")
    t = cfg.threshold
    alpha = cfg.alpha
    rng = np.random.default_rng(seed)
    init = np.sort(rng.choice(n_seg, size=k, replace=False))
    m = s[init].copy()
    accum = np.zeros_like(m)

    iters = int(cfg.iters)
    if cfg.trace:
        obj_trace = np.empty(iters)
        freq_trace = np.empty(iters)
        viol_trace = np.empty(iters)
    pair_coef = 2.0 / (k * (k - 1)) if k > 1 else 0.0

    for it in range(iters):
        scores = np.exp(-(alpha / t) * squared_distances(m, s))
        phi = squared_distances(m, m)
        phi = 0.5 * (phi + phi.T)
        np.fill_diagonal(phi, 0.0)
        grad = _grad_frequency(m, s, t, alpha, scores)
        if cfg.penalize_diversity:
            grad -= _grad_violation(m, t, phi)
        if cfg.trace:
            freq = scores.mean()
            pairs = phi[np.triu_indices(k, 1)]
            viol = pair_coef * np.where(pairs < 2 * t, (1 - pairs / (2 * t)) ** 2, 0.0).sum()
            freq_trace[it] = freq
            viol_trace[it] = viol
            obj_trace[it] = freq - viol
        accum += grad * grad
        active = accum > 0
        m[active] += cfg.eta * grad[active] / np.sqrt(accum[active])
        if not np.all(np.isfinite(m)):
            raise NonFiniteValue(f"motif values became non-finite at iteration {it}")

    result = LearnResult(
        motifs=m,
        hard=hard_frequency(m, s, t),
        hard_violation_final=hard_violation(m, t),
        smooth_violation_final=smooth_violation(m, t),
        restart_index=restart_index,
        restart_seed=seed,
        init_segment_indices=init.tolist(),
        diverse=is_diverse(m, t),
    )
    if cfg.trace:
        result.objective_trace = obj_trace
        result.smooth_freq_trace = freq_trace
        result.smooth_viol_trace = viol_trace
    return result


def _run_restart(args):
    segments, cfg, r = args
    return learn_motifs(segments, cfg, restart_seed(cfg.seed, r), restart_index=r)


def select_restart(results):
    """Best result by total hard frequency, preferring zero hard violation.

    Ties go to the lowest restart index. The winner is flagged with
    ``nonzero_violation`` when no restart reached zero violation.
    """
    clean = [r for r in results if r.hard_violation_final == 0]
    pool = clean or results
    best = pool[0]
    for r in pool[1:]:
        if r.total > best.total:
            best = r
    best.nonzero_violation = not clean
    best.restart_totals = [r.total for r in results]
    return best


def learn_with_restarts(segments, cfg, workers=1):
    """Run ``cfg.restarts`` independent passes and keep the best one.

    Restart ``r`` is seeded with ``restart_seed(cfg.seed, r)``, so running
    the passes in a process pool (``workers > 1``) gives the same result as
    running them sequentially.
    """
    s = as_segments(segments)
    jobs = [(s, cfg, r) for r in range(int(cfg.restarts))]
    if workers and workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_restart, jobs))
    else:
        results = [_run_restart(job) for job in jobs]
    return select_restart(results)
