"""Core domain types: series, intervals, configuration and detection output.

Indexing convention: observation positions are 1-based and intervals are
closed, so ``Interval(s, e)`` covers observations ``s..e`` inclusive and has
length ``e - s + 1``.  Conversion to Python's 0-based half-open slices happens
only at array-access boundaries (``Series.segment``).

All types here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EmptyOrTooShortError, NonFiniteValueError, ValidationError

SAMPLING_MODES = ("random", "grid")
OVERLAP_MODES = ("none", "midpoint")


@dataclass(frozen=True, eq=False)
class Series:
    """A validated univariate observation sequence (finite values, T >= 2)."""

    values: np.ndarray

    @property
    def T(self) -> int:
        return int(self.values.shape[0])

    def segment(self, s: int, e: int) -> np.ndarray:
        """Read-only view of observations s..e (1-based, inclusive)."""
        if not (1 <= s <= e <= self.T):
            raise ValidationError(f"segment [{s}, {e}] out of range for T={self.T}")
        return self.values[s - 1 : e]


def validate_series(raw: Sequence[float] | np.ndarray) -> Series:
    """Validate a raw sequence into a :class:`Series`.

    Raises :class:`EmptyOrTooShortError` for fewer than two observations and
    :class:`NonFiniteValueError` (with the first offending 1-based index) for
    NaN/Inf entries.  Missing values are rejected, never imputed.
    """
    values = np.array(raw, dtype=np.float64).reshape(-1)
    if values.shape[0] < 2:
        raise EmptyOrTooShortError(
            f"series needs at least 2 observations, got {values.shape[0]}"
        )
    finite = np.isfinite(values)
    if not finite.all():
        raise NonFiniteValueError(int(np.argmin(finite)) + 1)
    values.setflags(write=False)
    return Series(values)


@dataclass(frozen=True, order=True)
class Interval:
    """Closed 1-based index pair [s, e] describing a data sub-segment."""

    s: int
    e: int

    def __post_init__(self):
        if not (1 <= self.s <= self.e):
            raise ValidationError(f"invalid interval [{self.s}, {self.e}]")

    @property
    def length(self) -> int:
        return self.e - self.s + 1


@dataclass(frozen=True)
class DetectionConfig:
    """Knobs for one detection run.

    alpha
        Global significance level in (0, 1).
    M
        Minimum guaranteed number of candidate sub-intervals evaluated per
        segment (the draw becomes exhaustive when a segment has fewer).
    sampling
        ``"random"`` (uniform pairs with replacement) or ``"grid"``
        (all pairs from an equispaced point grid).
    overlap
        ``"none"`` (child segments abut the detected interval) or
        ``"midpoint"`` (children extend to the detected interval's midpoint).
    max_len
        Optional cap L: any candidate interval with e - s > L is assigned
        deviation zero and can never be flagged.
    seed
        64-bit integer; every random choice in the run derives from it.
    threshold_override
        Optional positive threshold that bypasses the analytic/Monte-Carlo
        choice entirely.
    """

    alpha: float = 0.1
    M: int = 1000
    sampling: str = "random"
    overlap: str = "none"
    max_len: int | None = None
    seed: int = 0
    threshold_override: float | None = None

    def __post_init__(self):
        if not (0.0 < self.alpha < 1.0):
            raise ValidationError("alpha must lie in (0,1)")
        if self.M < 1:
            raise ValidationError("M must be a positive integer")
        if self.sampling not in SAMPLING_MODES:
            raise ValidationError(f"sampling must be one of {SAMPLING_MODES}")
        if self.overlap not in OVERLAP_MODES:
            raise ValidationError(f"overlap must be one of {OVERLAP_MODES}")
        if self.max_len is not None and self.max_len < 2:
            raise ValidationError("max_len must be >= 2 when present")
        if self.threshold_override is not None and not self.threshold_override > 0:
            raise ValidationError("threshold_override must be positive")


@dataclass(frozen=True)
class SignificanceRegion:
    """A returned interval that must contain a median change-point.

    ``deviation`` is the interval's minimal-fit deviation value (always above
    the run's threshold), ``best_level`` the constant fit achieving it, and
    ``midpoint`` the location estimate floor((s+e)/2).
    """

    interval: Interval
    deviation: float
    best_level: float
    midpoint: int

    def __post_init__(self):
        if self.interval.length < 2:
            raise ValidationError("a significance region spans at least 2 points")
        if not self.deviation >= 0.0:
            raise ValidationError("deviation must be nonnegative")


@dataclass(frozen=True)
class DetectionReport:
    """Ordered detection output plus the threshold and configuration echo."""

    regions: tuple[SignificanceRegion, ...]
    threshold: float
    threshold_method: str
    config: DetectionConfig
    T: int
    # regions are stored in order of discovery; with overlap "none" their
    # interiors are pairwise disjoint (endpoints may coincide).
