"""Global significance thresholds for the sign multiresolution norm.

The detection threshold is the (1 - alpha)-quantile of the full-system norm
of a length-T vector of independent symmetric signs.  Three routes:

* analytic: an extreme-value approximation
      lambda_alpha = a_T + tau / a_T,
      a_T = sqrt(2 * ln(T / sqrt(ln T))),
      alpha = 1 - exp(-2 * C * exp(-tau)),
  with calibration constant C = 0.274 (natural logarithms throughout);
* Monte Carlo: empirical upper quantile over simulated Rademacher vectors,
  for validation and for T too small for the asymptotic formula;
* override: a user-supplied value.

Because entries with sign 0 only ever shrink the norm (removing zeros and
shortening denominators majorises every partial sum), a threshold valid for
the no-ties case is valid in general; both routes simulate/assume the
zero-free case.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EmptyOrTooShortError, TooShortForAsymptoticError, ValidationError
from .norms import msup_norm_all_rows

DEFAULT_LAMBDA_CONSTANT = 0.274

# cap per-chunk matrix size when batching Monte-Carlo replicates
_CHUNK_ELEMENTS = 1 << 22


@dataclass(frozen=True)
class ThresholdSpec:
    """A resolved threshold: value plus how it was obtained."""

    T: int
    alpha: float
    lambda_constant: float
    value: float
    method: str  # "analytic" | "monte_carlo" | "override"


def tau_from_alpha(alpha: float, lambda_constant: float = DEFAULT_LAMBDA_CONSTANT) -> float:
    """Unique tau solving 1 - exp(-2 * C * exp(-tau)) = alpha."""
    if not (0.0 < alpha < 1.0):
        raise ValidationError("alpha must lie in (0,1)")
    if not lambda_constant > 0.0:
        raise ValidationError("lambda_constant must be positive")
    return -math.log(math.log(1.0 / (1.0 - alpha)) / (2.0 * lambda_constant))


def asymptotic_scale(T: int) -> float:
    """a_T = sqrt(2 * ln(T / sqrt(ln T))); needs T >= 3."""
    if T < 3:
        raise TooShortForAsymptoticError(
            f"analytic threshold needs T >= 3, got {T}; use the Monte-Carlo route"
        )
    return math.sqrt(2.0 * math.log(T / math.sqrt(math.log(T))))


def lambda_alpha(
    T: int, alpha: float, lambda_constant: float = DEFAULT_LAMBDA_CONSTANT
) -> ThresholdSpec:
    """Analytic threshold a_T + tau / a_T at global level alpha."""
    a = asymptotic_scale(T)
    tau = tau_from_alpha(alpha, lambda_constant)
    return ThresholdSpec(
        T=T,
        alpha=alpha,
        lambda_constant=lambda_constant,
        value=a + tau / a,
        method="analytic",
    )


def _sign_norm_samples(
    T: int, n_reps: int, seed_key: tuple[int, ...], zero_prob: float = 0.0
) -> np.ndarray:
    """Full-system norms of n_reps simulated sign vectors of length T.

    Replicate i draws from its own stream seeded by (*seed_key, i), so the
    result is independent of chunking or scheduling.  With zero_prob = rho,
    entries are 0 w.p. rho and +/-1 each w.p. (1 - rho)/2 (rho = 0 gives the
    Rademacher case).
    """
    if T < 1:
        raise EmptyOrTooShortError("need T >= 1")
    norms = np.empty(n_reps, dtype=np.float64)
    chunk = max(1, _CHUNK_ELEMENTS // max(T, 1))
    lo_cut = zero_prob
    hi_cut = zero_prob + (1.0 - zero_prob) / 2.0
    for start in range(0, n_reps, chunk):
        stop = min(start + chunk, n_reps)
        block = np.empty((stop - start, T), dtype=np.float64)
        for i in range(start, stop):
            rng = np.random.default_rng(np.random.SeedSequence([*seed_key, i]))
            u = rng.random(T)
            row = np.where(u < hi_cut, 1.0, -1.0)
            if zero_prob > 0.0:
                row[u < lo_cut] = 0.0
            block[i - start] = row
        norms[start:stop] = msup_norm_all_rows(block)
    return norms


def empirical_upper_quantile(values: np.ndarray, q: float) -> float:
    """Smallest sample value with at least a q fraction of the sample <= it."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    k = max(1, math.ceil(q * v.shape[0]))
    return float(v[k - 1])


def mc_norm_quantile(T: int, alpha: float, n_reps: int, seed: int = 0) -> ThresholdSpec:
    """Monte-Carlo threshold: empirical (1 - alpha)-quantile of the norm.

    Simulates independent length-T Rademacher sign vectors and takes the
    upper empirical quantile (conservative for coverage).
    """
    if not (0.0 < alpha < 1.0):
        raise ValidationError("alpha must lie in (0,1)")
    if n_reps < 100:
        raise ValidationError("n_reps must be at least 100")
    norms = _sign_norm_samples(T, n_reps, (seed,))
    return ThresholdSpec(
        T=T,
        alpha=alpha,
        lambda_constant=DEFAULT_LAMBDA_CONSTANT,
        value=empirical_upper_quantile(norms, 1.0 - alpha),
        method="monte_carlo",
    )


@dataclass(frozen=True)
class CalibrationCell:
    """Diagnostics for one (T, alpha) pair of the calibration grid."""

    T: int
    alpha: float
    quantile: float
    tau_hat: float
    lambda_hat: float


@dataclass(frozen=True)
class LambdaCalibration:
    """Calibration output: the averaged constant plus per-cell diagnostics."""

    lambda_hat: float
    cells: tuple[CalibrationCell, ...]


def calibrate_lambda_constant(
    T_grid, alpha_grid, n_reps: int = 1000, seed: int = 0
) -> LambdaCalibration:
    """Re-estimate the extreme-value constant from Monte-Carlo quantiles.

    For each (T, alpha) pair: match a_T + tau_hat / a_T to the Monte-Carlo
    quantile, invert the tail formula for the constant, then average over the
    grid.  Per-T norm samples are simulated once (streams keyed by (seed, T))
    and re-quantiled for every alpha.
    """
    T_grid = [int(t) for t in T_grid]
    alpha_grid = [float(a) for a in alpha_grid]
    if not T_grid or not alpha_grid:
        raise ValidationError("calibration grids must be nonempty")
    norms_by_T: dict[int, np.ndarray] = {}
    for T in T_grid:
        if T not in norms_by_T:
            norms_by_T[T] = _sign_norm_samples(T, n_reps, (seed, T))
    cells = []
    for T in T_grid:
        a = asymptotic_scale(T)
        for alpha in alpha_grid:
            if not (0.0 < alpha < 1.0):
                raise ValidationError("alpha must lie in (0,1)")
            q = empirical_upper_quantile(norms_by_T[T], 1.0 - alpha)
            tau_hat = (q - a) * a
            lam_hat = math.log(1.0 / (1.0 - alpha)) * math.exp(tau_hat) / 2.0
            cells.append(CalibrationCell(T, alpha, q, tau_hat, lam_hat))
    estimate = sum(c.lambda_hat for c in cells) / len(cells)
    return LambdaCalibration(lambda_hat=estimate, cells=tuple(cells))
