"""Central finite-difference checks of the analytic gradients."""

from dataclasses import dataclass

import numpy as np

from .objective import (
    grad_frequency,
    grad_objective,
    grad_violation,
    objective,
    smooth_frequency,
    smooth_violation,
)

STEP = 1e-5
REL_TOL = 1e-4
ABS_TOL = 1e-8
SMALL = 1e-6


def finite_difference(func, x, step=STEP):
    """Central-difference gradient of scalar `func` at array `x`."""
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        orig = x[idx]
        x[idx] = orig + step
        fplus = func(x)
        x[idx] = orig - step
        fminus = func(x)
        x[idx] = orig
        grad[idx] = (fplus - fminus) / (2 * step)
    return grad


def gradient_error(analytic, numeric):
    """Worst error over entries, as (max relative error, max absolute error on small entries).

    Entries whose analytic magnitude is below 1e-6 are judged on absolute
    error only.
    """
    analytic = np.asarray(analytic)
    numeric = np.asarray(numeric)
    abs_err = np.abs(analytic - numeric)
    small = np.abs(analytic) < SMALL
    rel = np.zeros_like(abs_err)
    big = ~small
    rel[big] = abs_err[big] / np.maximum(np.abs(analytic[big]), np.abs(numeric[big]))
    max_rel = float(rel.max()) if big.any() else 0.0
    max_abs_small = float(abs_err[small].max()) if small.any() else 0.0
    return max_rel, max_abs_small


@dataclass
class CheckResult:
    name: str
    instance: int
    max_rel: float
    max_abs_small: float

    @property
    def passed(self):
        return self.max_rel < REL_TOL and self.max_abs_small < ABS_TOL


def random_instance(rng):
    """Random (motifs, segments, T, alpha) with K<=4, J<=8, L<=16, T in [0.1, 10].

    Motifs are placed near random segments, sometimes tightly clustered, so
    both the kernel scores and the diversity penalty are exercised.
    """
    k = int(rng.integers(1, 5))
    j = int(rng.integers(1, 9))
    length = int(rng.integers(1, 17))
    t = float(rng.uniform(0.1, 10.0))
    alpha = float(rng.choice([1.0, 2.0, 3.0]))
    segments = rng.standard_normal((j, length))
    spread = np.sqrt(t / length)
    centre = segments[rng.integers(0, j)]
    motifs = centre + spread * rng.uniform(0.1, 1.5) * rng.standard_normal((k, length))
    return motifs, segments, t, alpha


def check_instance(motifs, segments, t, alpha, index=0):
    shape = motifs.shape
    checks = [
        ("frequency",
         grad_frequency(motifs, segments, t, alpha),
         lambda m: smooth_frequency(m.reshape(shape), segments, t, alpha).total_smooth),
        ("violation",
         grad_violation(motifs, t),
         lambda m: smooth_violation(m.reshape(shape), t)),
        ("objective",
         grad_objective(motifs, segments, t, alpha),
         lambda m: objective(m.reshape(shape), segments, t, alpha)),
    ]
    out = []
    for name, analytic, func in checks:
        numeric = finite_difference(func, motifs)
        out.append(CheckResult(name, index, *gradient_error(analytic, numeric)))
    return out


def run_suite(n_instances=100, seed=0):
    """Check all three gradients on `n_instances` seeded random instances."""
    rng = np.random.default_rng(seed)
    results = []
    for i in range(n_instances):
        results.extend(check_instance(*random_instance(rng), index=i))
    return results
