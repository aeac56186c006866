"""Recursive driver: sample intervals, flag the shortest significant ones.

Each call on a segment [s, e] draws a set of candidate sub-intervals
(exhaustively when the segment is small enough, otherwise by uniform random
pairs or a deterministic point grid), measures every candidate's deviation
from the best constant median fit, and keeps the shortest candidate whose
deviation clears the global threshold (largest deviation, then smallest
start, breaks ties).  That candidate is then searched once more, inside
itself, for its own shortest significant sub-interval; the winner joins the
output set and the recursion continues to its left and right.

With overlap "none", the child segments are [s, s~] and [e~, e] for a
detected [s~, e~]; with "midpoint", the children extend to the detected
interval's midpoint: [s, floor((s~+e~)/2)] and [floor((s~+e~)/2)+1, e],
which gives the follow-up searches longer segments to work with.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import groupby

import numpy as np

from .deviation import DeviationResult, deviation_from_constant_model
from .errors import DegenerateIntervalError, ValidationError
from .model import (
    DetectionConfig,
    DetectionReport,
    Interval,
    Series,
    SignificanceRegion,
)
from .threshold import ThresholdSpec, lambda_alpha, mc_norm_quantile

# replicates for the Monte-Carlo threshold fallback (only ever hit for T = 2)
MC_FALLBACK_REPS = 5000


@dataclass(frozen=True)
class IntervalSample:
    """Candidate sub-intervals drawn for one segment."""

    intervals: tuple[Interval, ...]
    provenance: str  # "exhaustive" | "random" | "grid"


def total_subintervals(s: int, e: int) -> int:
    """Number of sub-intervals [a, b] of [s, e] with b - a >= 1."""
    n = e - s + 1
    return n * (n - 1) // 2


def _all_subintervals(s: int, e: int) -> tuple[Interval, ...]:
    return tuple(
        Interval(a, b) for a in range(s, e) for b in range(a + 1, e + 1)
    )


def _grid_point_count(M: int) -> int:
    """Smallest K with K*(K-1)/2 >= M."""
    k = max(2, int((1 + np.sqrt(1 + 8 * M)) / 2))
    while k * (k - 1) // 2 < M:
        k += 1
    while (k - 1) * (k - 2) // 2 >= M:
        k -= 1
    return k


def draw_intervals(
    s: int, e: int, M: int, mode: str, rng: np.random.Generator
) -> IntervalSample:
    """Draw at least-M candidate sub-intervals of [s, e] (all of them when
    the segment admits no more than M).

    Random mode draws index pairs uniformly with replacement and redraws any
    degenerate pair (a == b), so exactly M candidates come back.  Grid mode
    places the smallest point grid admitting M pairs (approximately
    equispaced, endpoints included) and returns every point pair.
    """
    if e - s < 1:
        raise DegenerateIntervalError(f"cannot sample inside [{s}, {e}]")
    if M >= total_subintervals(s, e):
        return IntervalSample(_all_subintervals(s, e), "exhaustive")
    if mode == "random":
        pairs: list[Interval] = []
        while len(pairs) < M:
            need = M - len(pairs)
            a = rng.integers(s, e + 1, size=need)
            b = rng.integers(s, e + 1, size=need)
            keep = a != b
            lo = np.minimum(a, b)[keep]
            hi = np.maximum(a, b)[keep]
            pairs.extend(Interval(int(x), int(y)) for x, y in zip(lo, hi))
        return IntervalSample(tuple(pairs), "random")
    if mode == "grid":
        k = _grid_point_count(M)
        xs = s + (e - s) * np.arange(k, dtype=np.float64) / (k - 1)
        points = np.unique(np.floor(xs + 0.5).astype(np.int64))
        intervals = tuple(
            Interval(int(points[i]), int(points[j]))
            for i in range(points.shape[0])
            for j in range(i + 1, points.shape[0])
        )
        return IntervalSample(intervals, "grid")
    raise ValidationError(f"unknown sampling mode {mode!r}")


def overlap_taus(mode: str, s_det: int, e_det: int) -> tuple[int, int]:
    """Child-segment extensions (tau_l, tau_r) for a detected [s_det, e_det].

    The recursion continues on [s, s_det + tau_l] and [e_det - tau_r, e]:
    (0, 0) for no overlap; for midpoint overlap the children end at / start
    after mid = floor((s_det + e_det)/2), i.e. tau_l = mid - s_det and
    tau_r = e_det - mid - 1.
    """
    if mode == "none":
        return 0, 0
    if mode == "midpoint":
        mid = (s_det + e_det) // 2
        return mid - s_det, e_det - mid - 1
    raise ValidationError(f"unknown overlap mode {mode!r}")


def select_candidate(
    sample: IntervalSample, deviations, lam: float
) -> Interval | None:
    """Shortest interval with deviation above lam; largest deviation, then
    smallest (s, e), breaks ties.  None when nothing clears the threshold."""
    best: Interval | None = None
    best_key: tuple[int, float, int, int] | None = None
    for interval, d in zip(sample.intervals, deviations):
        d = d.d_value if isinstance(d, DeviationResult) else float(d)
        if not d > lam:
            continue
        key = (interval.length, -d, interval.s, interval.e)
        if best_key is None or key < best_key:
            best, best_key = interval, key
    return best


class _RunState:
    """Per-detection scratch: series, gate, threshold, deviation memo."""

    def __init__(self, series: Series, config: DetectionConfig, lam: float):
        self.series = series
        self.config = config
        self.lam = lam
        self.cache: dict[tuple[int, int], DeviationResult] = {}

    def deviation(self, interval: Interval) -> DeviationResult:
        key = (interval.s, interval.e)
        hit = self.cache.get(key)
        if hit is None:
            hit = deviation_from_constant_model(
                self.series.segment(interval.s, interval.e), self.config.max_len
            )
            self.cache[key] = hit
        return hit


def _evaluate_and_select(
    intervals, state: _RunState
) -> tuple[Interval, DeviationResult] | None:
    """Fused evaluate+select: walk candidates in increasing length and stop
    at the first length admitting a significant interval.

    Deviations of intervals longer than the shortest significant length can
    never influence the selection, so skipping them is output-identical to
    evaluating the full sample.
    """
    ordered = sorted(intervals, key=lambda iv: (iv.length, iv.s, iv.e))
    for _, group in groupby(ordered, key=lambda iv: iv.length):
        best: tuple[Interval, DeviationResult] | None = None
        for interval in group:
            res = state.deviation(interval)
            if res.d_value > state.lam and (
                best is None or res.d_value > best[1].d_value
            ):
                best = (interval, res)
        if best is not None:
            return best
    return None


def shortest_significant_subinterval(
    s0: int,
    e0: int,
    series: Series,
    config: DetectionConfig,
    rng: np.random.Generator,
    lam: float,
    _state: _RunState | None = None,
) -> Interval:
    """Shortest significant sub-interval of a significant candidate [s0, e0].

    Re-runs the sample/evaluate/select pipeline inside [s0, e0] with the
    candidate itself force-included, so a significant interval always exists;
    falls back to [s0, e0] defensively.
    """
    state = _state if _state is not None else _RunState(series, config, lam)
    if e0 - s0 == 1:
        return Interval(s0, e0)
    sample = draw_intervals(s0, e0, config.M, config.sampling, rng)
    candidates = list(sample.intervals)
    parent = Interval(s0, e0)
    if parent not in candidates:
        candidates.append(parent)
    chosen = _evaluate_and_select(candidates, state)
    return chosen[0] if chosen is not None else parent


def rnsp_recurse(
    s: int,
    e: int,
    series: Series,
    config: DetectionConfig,
    rng: np.random.Generator,
    lam: float,
    out: list[SignificanceRegion],
    _state: _RunState | None = None,
) -> None:
    """Detect significant intervals within [s, e], appending to ``out``."""
    state = _state if _state is not None else _RunState(series, config, lam)
    if e - s < 1:
        return
    sample = draw_intervals(s, e, config.M, config.sampling, rng)
    chosen = _evaluate_and_select(sample.intervals, state)
    if chosen is None:
        return
    candidate, _ = chosen
    found = shortest_significant_subinterval(
        candidate.s, candidate.e, series, config, rng, lam, _state=state
    )
    res = state.deviation(found)
    out.append(
        SignificanceRegion(
            interval=found,
            deviation=res.d_value,
            best_level=res.best_level if res.best_level is not None else float("nan"),
            midpoint=(found.s + found.e) // 2,
        )
    )
    tau_l, tau_r = overlap_taus(config.overlap, found.s, found.e)
    rnsp_recurse(s, found.s + tau_l, series, config, rng, lam, out, _state=state)
    rnsp_recurse(found.e - tau_r, e, series, config, rng, lam, out, _state=state)


def resolve_threshold(T: int, config: DetectionConfig) -> ThresholdSpec:
    """Threshold selection order: override, then analytic, then Monte Carlo."""
    if config.threshold_override is not None:
        return ThresholdSpec(
            T=T,
            alpha=config.alpha,
            lambda_constant=float("nan"),
            value=config.threshold_override,
            method="override",
        )
    if T >= 3:
        return lambda_alpha(T, config.alpha)
    return mc_norm_quantile(T, config.alpha, MC_FALLBACK_REPS, seed=config.seed)


def detect(series: Series, config: DetectionConfig = DetectionConfig()) -> DetectionReport:
    """Run the full procedure on a validated series.

    Deterministic for a fixed (series, config): all sampling randomness
    derives from ``config.seed``.
    """
    if not isinstance(series, Series):
        raise ValidationError("detect expects a validated Series")
    T = series.T
    spec = resolve_threshold(T, config)
    rng = np.random.default_rng(np.random.SeedSequence([config.seed]))
    state = _RunState(series, config, spec.value)
    out: list[SignificanceRegion] = []
    rnsp_recurse(1, T, series, config, rng, spec.value, out, _state=state)
    return DetectionReport(
        regions=tuple(out),
        threshold=spec.value,
        threshold_method=spec.method,
        config=config,
        T=T,
    )
