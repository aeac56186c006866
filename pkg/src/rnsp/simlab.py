"""Simulation models, coverage metrics and repeated-detection experiments.

The model registry covers seven null models (constant median, assorted
noise: Gaussian, Poisson, heterogeneous-scale Gaussian, Bernoulli, Cauchy
and two mixtures) and four change-point models (Blocks, Cauchy3, Bursts,
PoissonCP).  Each generator documents its recipe; heavy-tailed and discrete
draws use fixed inverse-CDF algorithms so seeded paths are stable across
platforms.

A returned interval [a, b] counts as *genuine* when it brackets a true
change-point pair, i.e. some true change-point eta satisfies a <= eta and
eta + 1 <= b.  A path is *covered* when every returned interval is genuine
(vacuously so when none are returned); for null models that simply means no
interval came back.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .engine import detect
from .errors import UnknownModelError, ValidationError
from .model import DetectionConfig, DetectionReport, Series, validate_series


def _cauchy(rng: np.random.Generator, size: int, loc: np.ndarray | float) -> np.ndarray:
    """Standard Cauchy via inverse CDF: loc + tan(pi * (U - 1/2))."""
    u = rng.random(size)
    return np.asarray(loc) + np.tan(np.pi * (u - 0.5))


def _poisson(rng: np.random.Generator, lam: np.ndarray) -> np.ndarray:
    """Poisson via CDF inversion (one uniform per draw; fine for small means).

    Returns the smallest k with F(k) >= U.  Iterations are capped far out in
    the tail so a pathological uniform cannot loop unboundedly.
    """
    lam = np.asarray(lam, dtype=np.float64)
    u = rng.random(lam.shape)
    k = np.zeros(lam.shape, dtype=np.float64)
    p = np.exp(-lam)
    cdf = p.copy()
    cap = int(np.max(lam) + 40.0 * math.sqrt(np.max(lam)) + 50.0)
    for _ in range(cap):
        active = u > cdf
        if not active.any():
            break
        k[active] += 1.0
        p[active] *= lam[active] / k[active]
        cdf[active] += p[active]
    return k


def _steps(values, lengths) -> np.ndarray:
    return np.repeat(np.asarray(values, dtype=np.float64), lengths)


def _blocks_fixture() -> dict:
    path = resources.files("rnsp").joinpath("data/blocks_signal.json")
    return json.loads(path.read_text())


def blocks_signal() -> tuple[np.ndarray, tuple[int, ...]]:
    """The noiseless blocks benchmark signal and its change-point positions."""
    fx = _blocks_fixture()
    cps = tuple(int(c) for c in fx["change_points"])
    bounds = (0, *cps, fx["length"])
    lengths = np.diff(bounds)
    return _steps(fx["levels"], lengths), cps


@dataclass(frozen=True)
class ModelSpec:
    """A registered simulation model: name, implied length, true change-points."""

    name: str
    T: int
    true_cps: tuple[int, ...]


def _gen_plain_gauss(rng):
    return rng.standard_normal(100)


def _gen_plain_poisson(rng):
    return _poisson(rng, np.full(200, 1.0))


def _gen_heterogeneous_gauss(rng):
    scale = _steps([1, 8, 1], [100, 50, 100])
    return scale * rng.standard_normal(250)


def _gen_symmetric_bernoulli(rng):
    return (rng.random(200) < 0.5).astype(np.float64)


def _gen_plain_cauchy(rng):
    return _cauchy(rng, 100, 0.0)


def _gen_mix1(rng):
    # draw from {1,2,3} with probs (.35,.3,.35); entries != 2 become N(0,1)
    u = rng.random(300)
    y = np.full(300, 2.0)
    not_two = (u < 0.35) | (u >= 0.65)
    y[not_two] = rng.standard_normal(int(not_two.sum()))
    return y


def _gen_mix2(rng):
    return _poisson(rng, np.full(200, 5.0)) + rng.standard_normal(200) / 30.0


def _gen_cauchy3(rng):
    loc = _steps([1, 2, 1], [100, 100, 100])
    return _cauchy(rng, 300, loc)


def _gen_bursts(rng):
    scale = _steps([1, 3, 1, 3, 1, 4], [200, 80, 200, 80, 200, 40])
    return (scale * rng.standard_normal(800)) ** 2


def _gen_poisson_cp(rng):
    lam = _steps([1, 4, 10, 2], [50, 50, 50, 200])
    return _poisson(rng, lam)


def _gen_blocks(rng):
    signal, _ = blocks_signal()
    return signal + 10.0 * rng.standard_normal(signal.shape[0])


_REGISTRY: dict[str, tuple[ModelSpec, object]] = {}


def _register(name, T, cps, gen):
    _REGISTRY[name] = (ModelSpec(name, T, tuple(cps)), gen)


_register("PlainGauss", 100, (), _gen_plain_gauss)
_register("PlainPoisson", 200, (), _gen_plain_poisson)
_register("HeterogeneousGauss", 250, (), _gen_heterogeneous_gauss)
_register("SymmetricBernoulli", 200, (), _gen_symmetric_bernoulli)
_register("PlainCauchy", 100, (), _gen_plain_cauchy)
_register("Mix1", 300, (), _gen_mix1)
_register("Mix2", 200, (), _gen_mix2)
_register("Cauchy3", 300, (100, 200), _gen_cauchy3)
_register("Bursts", 800, (200, 280, 480, 560, 760), _gen_bursts)
_register("PoissonCP", 350, (50, 100, 150), _gen_poisson_cp)
_register("Blocks", 2048, blocks_signal()[1], _gen_blocks)

NULL_MODELS = (
    "PlainGauss",
    "PlainPoisson",
    "HeterogeneousGauss",
    "SymmetricBernoulli",
    "PlainCauchy",
    "Mix1",
    "Mix2",
)
CHANGE_MODELS = ("Blocks", "Cauchy3", "Bursts", "PoissonCP")
MODEL_NAMES = NULL_MODELS + CHANGE_MODELS


def model_spec(name: str) -> ModelSpec:
    try:
        return _REGISTRY[name][0]
    except KeyError:
        raise UnknownModelError(
            f"unknown model {name!r}; available: {', '.join(MODEL_NAMES)}"
        ) from None


def generate(
    model: str | ModelSpec, rng: np.random.Generator
) -> tuple[Series, tuple[int, ...]]:
    """One sample path of a registered model plus its true change-points."""
    name = model.name if isinstance(model, ModelSpec) else model
    spec = model_spec(name)
    values = _REGISTRY[name][1](rng)
    series = validate_series(values)
    assert series.T == spec.T
    return series, spec.true_cps


@dataclass(frozen=True)
class RunMetrics:
    """Per-path genuineness summary of one detection report."""

    covered: bool
    n_regions: int
    n_genuine: int
    prop_genuine: float | None  # None when no regions were returned
    avg_genuine_len: float | None  # None when no genuine regions


def evaluate_run(report: DetectionReport, true_cps) -> RunMetrics:
    """Score a report against known change-points (see module docstring)."""
    cps = tuple(true_cps)
    genuine_lengths = []
    for region in report.regions:
        a, b = region.interval.s, region.interval.e
        if any(a <= eta and eta + 1 <= b for eta in cps):
            genuine_lengths.append(region.interval.length)
    n_regions = len(report.regions)
    n_genuine = len(genuine_lengths)
    return RunMetrics(
        covered=n_genuine == n_regions,
        n_regions=n_regions,
        n_genuine=n_genuine,
        prop_genuine=(n_genuine / n_regions) if n_regions else None,
        avg_genuine_len=(sum(genuine_lengths) / n_genuine) if n_genuine else None,
    )


@dataclass(frozen=True)
class ExperimentRow:
    """Aggregate over simulated paths (undefined per-path ratios are skipped)."""

    model: str
    n_paths: int
    coverage_count: int
    mean_prop_genuine: float | None
    mean_n_genuine: float
    mean_avg_genuine_len: float | None

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "n_paths": self.n_paths,
            "coverage_count": self.coverage_count,
            "mean_prop_genuine": self.mean_prop_genuine,
            "mean_n_genuine": self.mean_n_genuine,
            "mean_avg_genuine_len": self.mean_avg_genuine_len,
        }


def path_seeds(seed: int, n_paths: int) -> list[tuple[np.random.SeedSequence, int]]:
    """Deterministic per-path randomness: path i derives SeedSequence([seed, i]);
    its first child stream generates the data, the second one (collapsed to a
    64-bit integer) seeds the detection run."""
    out = []
    for i in range(n_paths):
        gen_ss, det_ss = np.random.SeedSequence([seed, i]).spawn(2)
        out.append((gen_ss, int(det_ss.generate_state(1, np.uint64)[0])))
    return out


def worker_count() -> int:
    """Path-level parallelism cap from the RNSP_THREADS environment variable."""
    raw = os.environ.get("RNSP_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"RNSP_THREADS must be an integer, got {raw!r}") from None


def run_paths(
    model: str | ModelSpec, n_paths: int, config: DetectionConfig, seed: int
) -> list[RunMetrics]:
    """Independent generate+detect runs; order of results follows path index."""
    if n_paths < 1:
        raise ValidationError("n_paths must be >= 1")
    name = model.name if isinstance(model, ModelSpec) else model
    model_spec(name)  # fail fast on unknown names
    seeds = path_seeds(seed, n_paths)

    def one(path_index: int) -> RunMetrics:
        gen_ss, det_seed = seeds[path_index]
        series, cps = generate(name, np.random.default_rng(gen_ss))
        report = detect(series, _with_seed(config, det_seed))
        return evaluate_run(report, cps)

    workers = worker_count()
    if workers == 1:
        return [one(i) for i in range(n_paths)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(one, range(n_paths)))


def _with_seed(config: DetectionConfig, seed: int) -> DetectionConfig:
    return DetectionConfig(
        alpha=config.alpha,
        M=config.M,
        sampling=config.sampling,
        overlap=config.overlap,
        max_len=config.max_len,
        seed=seed,
        threshold_override=config.threshold_override,
    )


def aggregate(model: str, metrics: list[RunMetrics]) -> ExperimentRow:
    props = [m.prop_genuine for m in metrics if m.prop_genuine is not None]
    lens = [m.avg_genuine_len for m in metrics if m.avg_genuine_len is not None]
    return ExperimentRow(
        model=model,
        n_paths=len(metrics),
        coverage_count=sum(m.covered for m in metrics),
        mean_prop_genuine=(sum(props) / len(props)) if props else None,
        mean_n_genuine=sum(m.n_genuine for m in metrics) / len(metrics),
        mean_avg_genuine_len=(sum(lens) / len(lens)) if lens else None,
    )


def run_experiment(
    model: str | ModelSpec, n_paths: int, config: DetectionConfig, seed: int
) -> ExperimentRow:
    """Generate n_paths paths, detect on each, and aggregate the metrics."""
    name = model.name if isinstance(model, ModelSpec) else model
    return aggregate(name, run_paths(name, n_paths, config, seed))
