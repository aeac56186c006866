"""Deviation of a data segment from the best-fitting constant median model.

For a segment y of length n, every real constant c induces a residual sign
vector sign(y - c).  Only finitely many distinct sign vectors exist, and all
of them are realised by the candidate levels

    one value strictly below min(y),
    each sorted data value,
    each midpoint of consecutive distinct sorted values,
    one value strictly above max(y)

(2n+1 levels before deduplication).  The deviation measure is the minimum,
over candidate levels, of the anchored multiresolution sup-norm of the
residual signs: small when some constant median explains the segment, large
when every constant fit leaves a sign imbalance somewhere.

sign(0) = 0 throughout.  This matters: on a constant segment the level placed
exactly at the data value yields an all-zero sign vector and hence deviation
0; mapping ties to +/-1 instead would yield sqrt(n) and spurious detections
for data with mass points.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SegmentTooShortError
from .norms import msup_norm_lr_rows


@dataclass(frozen=True)
class DeviationResult:
    """Minimal-fit deviation of one segment.

    ``best_level`` is the smallest candidate level achieving the minimum
    (None when the max-length gate produced the result without a search).
    """

    d_value: float
    best_level: float | None
    gated: bool = False


def candidate_levels(y_segment: np.ndarray) -> np.ndarray:
    """Strictly increasing candidate constants realising every sign pattern.

    The outer levels are fixed at min(y) - 1 and max(y) + 1; any values
    strictly outside the data range yield the same sign patterns.  Duplicate
    levels (tied data, midpoint rounding collisions) are deduplicated.
    """
    y = np.asarray(y_segment, dtype=np.float64)
    if y.shape[0] < 2:
        raise SegmentTooShortError("candidate levels need at least 2 points")
    u = np.unique(y)
    m = u.shape[0]
    levels = np.empty(2 * m + 1, dtype=np.float64)
    levels[0] = u[0] - 1.0
    levels[1::2] = u
    if m > 1:
        levels[2:-1:2] = 0.5 * (u[:-1] + u[1:])
    levels[-1] = u[-1] + 1.0
    return np.unique(levels)


def sign_residuals(y_segment: np.ndarray, level: float) -> np.ndarray:
    """Entrywise sign(y_t - level) with sign(0) = 0 (exact float comparison)."""
    y = np.asarray(y_segment, dtype=np.float64)
    return np.sign(y - level)


def _sign_matrix(y: np.ndarray, levels: np.ndarray) -> np.ndarray:
    """Residual sign vectors for all levels at once (one row per level)."""
    return np.sign(y[None, :] - levels[:, None])


def deviation_from_constant_model(
    y_segment: np.ndarray, max_len: int | None = None
) -> DeviationResult:
    """Minimum anchored norm of residual signs over all candidate levels.

    When ``max_len`` is given and the segment spans e - s > max_len, the
    measure is gated to zero without a search, so over-long intervals are
    never flagged.  Ties across levels resolve to the smallest level.
    O(n^2) worst case.
    """
    y = np.asarray(y_segment, dtype=np.float64)
    n = y.shape[0]
    if n < 2:
        raise SegmentTooShortError("deviation needs a segment of at least 2 points")
    if max_len is not None and n - 1 > max_len:
        return DeviationResult(0.0, None, gated=True)
    levels = candidate_levels(y)
    norms = msup_norm_lr_rows(_sign_matrix(y, levels))
    best = int(np.argmin(norms))  # first minimum = smallest level
    return DeviationResult(float(norms[best]), float(levels[best]), gated=False)
