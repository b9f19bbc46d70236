"""End-to-end evaluation: learned motifs vs. the brute-force baseline."""

import csv
import io
import json
import math
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .brute import brute_force_search, segment_frequencies
from .errors import ConfigError, InfeasiblePacking, MissingMethod
from .learner import LearnConfig, learn_with_restarts
from .segmentation import (
    DEFAULT_SAMPLE_BUDGET,
    Threshold,
    extract_segments,
    percentile_threshold,
)
from .series_io import TimeSeries, load_series, write_report

METHODS = ("brute", "learn")


@dataclass
class RunSpec:
    """Everything needed to reproduce one discovery run.

    Exactly one of `threshold` (an explicit T) and `percentile` (in percent,
    e.g. ``1`` for the 1st percentile) must be given.
    """

    input: str
    length: int
    motifs: int
    format: str = "plain"
    column: int = None
    delimiter: str = None
    stride: int = None
    threshold: float = None
    percentile: float = None
    sample_budget: int = DEFAULT_SAMPLE_BUDGET
    alphas: tuple = (1.0, 2.0, 3.0)
    eta: float = 0.1
    iters: int = 1000
    restarts: int = 200
    seed: int = 0
    methods: tuple = METHODS
    trace: bool = False
    output: str = None
    output_format: str = "json"
    record_timing: bool = False

    def __post_init__(self):
        if (self.threshold is None) == (self.percentile is None):
            raise ConfigError("give exactly one of an explicit threshold or a percentile")
        if self.threshold is not None and not self.threshold > 0:
            raise ConfigError("threshold must be positive")
        if self.percentile is not None and not 0 < self.percentile < 100:
            raise ConfigError("percentile must lie in (0, 100)")
        if not self.methods:
            raise ConfigError("select at least one method")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ConfigError(f"unknown methods: {sorted(unknown)}")
        # run methods in a fixed order whatever the flag order was
        self.methods = tuple(m for m in METHODS if m in self.methods)
        if not self.alphas:
            raise ConfigError("alpha grid is empty")
        self.alphas = tuple(sorted({float(a) for a in self.alphas}))
        if any(a <= 0 for a in self.alphas):
            raise ConfigError("alpha values must be positive")
        if self.length < 1 or self.motifs < 1:
            raise ConfigError("length and motif count must be positive")
        if self.stride is None:
            self.stride = max(1, self.length // 2)
        if self.stride < 1:
            raise ConfigError("stride must be positive")
        if self.eta <= 0 or self.iters < 1 or self.restarts < 1 or self.sample_budget < 1:
            raise ConfigError("eta, iters, restarts and sample budget must be positive")
        if self.output_format not in ("json", "csv"):
            raise ConfigError(f"unknown output format {self.output_format!r}")


@dataclass
class MethodResult:
    name: str
    motifs: np.ndarray
    frequencies: list
    matches: list
    flags: list = field(default_factory=list)
    seconds: float = 0.0
    extra: dict = field(default_factory=dict)
    trace: dict = None

    @property
    def total_frequency(self):
        return int(sum(self.frequencies))

    def to_dict(self, record_timing=False):
        out = {
            "name": self.name,
            "motifs": np.asarray(self.motifs, dtype=float).tolist(),
            "frequencies": [int(f) for f in self.frequencies],
            "total_frequency": self.total_frequency,
            "matches": [[int(j) for j in m] for m in self.matches],
            "flags": list(self.flags),
        }
        out.update(self.extra)
        if record_timing:
            out["seconds"] = self.seconds
        if self.trace is not None:
            out["trace"] = self.trace
        return out


@dataclass
class DiscoveryReport:
    config: dict
    methods: list
    record_timing: bool = False

    def method(self, name):
        for m in self.methods:
            if m.name == name:
                return m
        raise MissingMethod(f"report has no {name!r} method")

    def to_dict(self):
        return {
            "config": self.config,
            "methods": [m.to_dict(self.record_timing) for m in self.methods],
        }


def _resolve_threshold(spec, segments):
    if spec.threshold is not None:
        return Threshold(float(spec.threshold))
    return percentile_threshold(segments, spec.percentile, spec.sample_budget, spec.seed)


def _run_brute(segments, t, k):
    start = time.perf_counter()
    counts = segment_frequencies(segments, t)
    found = brute_force_search(segments, t, k, counts=counts)
    flags = ["ShortSelection"] if found.short_selection else []
    return MethodResult(
        name="brute",
        motifs=found.motifs,
        frequencies=found.hard.per_motif.tolist(),
        matches=found.hard.matches,
        flags=flags,
        seconds=time.perf_counter() - start,
        extra={"segment_indices": found.indices},
    )


def _run_learn(segments, t, spec, workers):
    start = time.perf_counter()
    best = None
    best_alpha = None
    per_alpha = {}
    for alpha in spec.alphas:  # ascending, so ties keep the smaller alpha
        cfg = LearnConfig(
            threshold=t,
            n_motifs=spec.motifs,
            length=spec.length,
            alpha=alpha,
            eta=spec.eta,
            iters=spec.iters,
            restarts=spec.restarts,
            seed=spec.seed,
            trace=spec.trace,
        )
        result = learn_with_restarts(segments, cfg, workers=workers)
        per_alpha[repr(alpha)] = result.total
        if best is None or result.total > best.total:
            best, best_alpha = result, alpha
    flags = ["NonzeroViolation"] if best.nonzero_violation else []
    trace = None
    if spec.trace:
        trace = {
            "objective": best.objective_trace.tolist(),
            "smooth_frequency": best.smooth_freq_trace.tolist(),
            "smooth_violation": best.smooth_viol_trace.tolist(),
        }
    return MethodResult(
        name="learn",
        motifs=best.motifs,
        frequencies=best.hard.per_motif.tolist(),
        matches=best.hard.matches,
        flags=flags,
        seconds=time.perf_counter() - start,
        extra={
            "alpha": best_alpha,
            "alpha_totals": per_alpha,
            "restart_index": best.restart_index,
            "init_segment_indices": best.init_segment_indices,
            "hard_violation": best.hard_violation_final,
            "smooth_violation": best.smooth_violation_final,
            "diverse": best.diverse,
        },
        trace=trace,
    )


def run(spec, series=None, workers=1):
    """Execute a :class:`RunSpec` and return its report.

    Both methods are scored on the same segment matrix and threshold. The
    learner is run once per alpha in the grid and the alpha with the highest
    total hard frequency is kept. The report is written to ``spec.output``
    when set.
    """
    if series is None:
        series = load_series(spec.input, spec.format, spec.column, spec.delimiter)
    segments = extract_segments(series, spec.length, spec.stride)
    t = _resolve_threshold(spec, segments)

    methods = []
    if "brute" in spec.methods:
        methods.append(_run_brute(segments, t, spec.motifs))
    if "learn" in spec.methods:
        methods.append(_run_learn(segments, t, spec, workers))

    config = {
        "input": str(spec.input),
        "format": spec.format,
        "column": spec.column,
        "n_points": len(series),
        "length": spec.length,
        "stride": spec.stride,
        "n_segments": segments.n_segments,
        "motifs": spec.motifs,
        "threshold": t.value,
        "percentile": t.percentile,
        "sampled_pairs": t.sampled_pairs,
        "sample_budget": spec.sample_budget,
        "alphas": list(spec.alphas),
        "eta": spec.eta,
        "iters": spec.iters,
        "restarts": spec.restarts,
        "seed": spec.seed,
        "methods": list(spec.methods),
    }
    report = DiscoveryReport(config, methods, record_timing=spec.record_timing)
    if spec.output:
        write_report(report, spec.output, spec.output_format)
    return report


def generate_synthetic(length, pattern_length, occurrences, noise_sd, seed, amplitude=None):
    """Random walk with a smooth pattern implanted at random places.

    The walk has unit-variance Gaussian steps. The pattern is a seeded sum of
    three sinusoids scaled to standard deviation `amplitude` (default
    ``4 * sqrt(pattern_length)``, well above the walk's drift over one
    pattern). Each copy is added to the walk at a non-overlapping offset drawn
    uniformly over all valid placements, plus fresh N(0, noise_sd) noise.

    Returns
    -------
    TimeSeries
        ``metadata["offsets"]`` holds the sorted implant offsets.
    """
    length, pattern_length, occurrences = int(length), int(pattern_length), int(occurrences)
    if length < 1 or pattern_length < 1 or occurrences < 1:
        raise ConfigError("length, pattern length and occurrences must be positive")
    if noise_sd < 0:
        raise ConfigError("noise_sd must be non-negative")
    if occurrences * pattern_length > length:
        raise InfeasiblePacking(
            f"{occurrences} copies of length {pattern_length} do not fit in {length} points"
        )
    if occurrences * pattern_length > length / 2:
        raise ConfigError("implants may cover at most half of the series")

    walk_rng, pattern_rng, place_rng = (
        np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(3)
    )
    values = np.cumsum(walk_rng.standard_normal(length))

    x = np.linspace(0.0, 1.0, pattern_length)
    pattern = np.zeros(pattern_length)
    for _ in range(3):
        weight = pattern_rng.uniform(0.5, 1.0)
        cycles = pattern_rng.uniform(1.0, 4.0)
        phase = pattern_rng.uniform(0.0, 2 * np.pi)
        pattern += weight * np.sin(2 * np.pi * cycles * x + phase)
    pattern -= pattern.mean()
    if pattern.std() > 0:
        pattern /= pattern.std()
    if amplitude is None:
        amplitude = 4.0 * math.sqrt(pattern_length)
    pattern *= amplitude

    # uniform over non-overlapping placements: sorted free-space cuts + packed copies
    free = length - occurrences * pattern_length
    cuts = np.sort(place_rng.integers(0, free + 1, size=occurrences))
    offsets = cuts + np.arange(occurrences) * pattern_length
    for off in offsets:
        values[off:off + pattern_length] += pattern + place_rng.normal(0.0, noise_sd, pattern_length)

    meta = {
        "offsets": offsets.tolist(),
        "pattern_length": pattern_length,
        "noise_sd": float(noise_sd),
        "amplitude": float(amplitude),
        "seed": int(seed),
    }
    return TimeSeries(values, source=f"synthetic:seed={seed}", metadata=meta)


COMPARE_HEADER = [
    "dataset", "K", "L", "pct", "bfm_total", "lm_total", "winner", "improvement", "improvement_sd",
]


def _as_dict(report):
    if isinstance(report, DiscoveryReport):
        return report.to_dict()
    if isinstance(report, (str, Path)):
        return json.loads(Path(report).read_text(encoding="utf-8"))
    return report


def _method_total(data, name):
    for m in data["methods"]:
        if m["name"] == name:
            return int(m["total_frequency"])
    raise MissingMethod(f"report for {data['config'].get('input')!r} lacks the {name!r} method")


def compare_rows(reports):
    """One comparison row per report (dataset, K, L, pct, totals, winner, gain)."""
    rows = []
    for report in reports:
        data = _as_dict(report)
        cfg = data["config"]
        bfm = _method_total(data, "brute")
        lm = _method_total(data, "learn")
        if lm == bfm:
            winner, gain = "tie", 0.0
        else:
            winner = "LM" if lm > bfm else "BFM"
            gain = (lm - bfm) / bfm if bfm else math.inf
        rows.append({
            "dataset": Path(str(cfg.get("input", ""))).stem,
            "K": cfg.get("motifs"),
            "L": cfg.get("length"),
            "pct": cfg.get("percentile"),
            "bfm_total": bfm,
            "lm_total": lm,
            "winner": winner,
            "improvement": gain,
        })
    return rows


def compare_table(reports):
    """CSV text comparing LM and BFM totals across reports.

    A final ``SUMMARY`` row carries the win counts and the mean and sample
    standard deviation of the finite relative improvements.
    """
    rows = compare_rows(reports)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_HEADER)
    for r in rows:
        writer.writerow([
            r["dataset"], r["K"], r["L"], "" if r["pct"] is None else r["pct"],
            r["bfm_total"], r["lm_total"], r["winner"], repr(float(r["improvement"])), "",
        ])
    if rows:
        wins = {w: sum(r["winner"] == w for r in rows) for w in ("LM", "BFM", "tie")}
        gains = [r["improvement"] for r in rows if math.isfinite(r["improvement"])]
        mean = statistics.fmean(gains) if gains else math.nan
        sd = statistics.stdev(gains) if len(gains) > 1 else 0.0
        writer.writerow([
            "SUMMARY", "", "", "", "", "",
            ";".join(f"{w}={n}" for w, n in wins.items()), repr(mean), repr(sd),
        ])
    return buf.getvalue()
