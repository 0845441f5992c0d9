"""Detector cascades built from photon doublers.

One photon enters a binary tree of ``depth`` doublers feeding n = 2**depth
leaf detectors. A doubler succeeds with probability ``eta_dbl``; on failure
the photon is lost, unless residual detection is enabled, in which case a
detector at that node sees it. Every detector present (leaves, plus one
residual detector per doubler when enabled) dark-counts independently. A
detection event is at least k clicks.

Analytics use click-count generating polynomials propagated up the tree.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P

from . import _kernels
from .errors import InvalidArgument

RNG_ALGORITHM = "numpy Philox4x64-10, one SeedSequence child per chunk"
CHUNK_TRIALS = 1 << 16


@dataclass(frozen=True)
class DetectorModel:
    eta: float
    dark_prob: float = 0.0

    def __post_init__(self):
        for name in ("eta", "dark_prob"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InvalidArgument(f"{name} must lie in [0, 1], got {v}")

    @property
    def click_with_photon(self) -> float:
        return 1.0 - (1.0 - self.eta) * (1.0 - self.dark_prob)


@dataclass(frozen=True)
class CascadeSpec:
    depth: int = 0
    k: int = 1
    eta_dbl: float = 1.0
    detect_residual: bool = False

    def __post_init__(self):
        if self.depth < 0:
            raise InvalidArgument("depth must be nonnegative")
        if self.k < 1:
            raise InvalidArgument("k must be at least 1")
        if self.k > self.n:
            raise InvalidArgument(f"k={self.k} exceeds the number of copies n={self.n}")
        if not 0.0 <= self.eta_dbl <= 1.0:
            raise InvalidArgument(f"eta_dbl must lie in [0, 1], got {self.eta_dbl}")

    @property
    def n(self) -> int:
        return 1 << self.depth

    @property
    def detector_count(self) -> int:
        return self.n + (self.n - 1 if self.detect_residual else 0)


def _bernoulli(p: float) -> np.ndarray:
    return np.array([1.0 - p, p])


def click_polynomials(spec: CascadeSpec, model: DetectorModel) -> tuple[np.ndarray, np.ndarray]:
    """Click-count distributions (coefficient j = P(j clicks)) with and without a photon."""
    p_click, dark = model.click_with_photon, model.dark_prob
    with_photon = _bernoulli(p_click)
    empty = _bernoulli(dark)
    res_dark = _bernoulli(dark) if spec.detect_residual else np.array([1.0])
    res_photon = _bernoulli(p_click) if spec.detect_residual else np.array([1.0])
    for _ in range(spec.depth):
        empty_pair = P.polymul(empty, empty)
        success = P.polymul(P.polymul(with_photon, with_photon), res_dark)
        failure = P.polymul(empty_pair, res_photon)
        with_photon = P.polyadd(spec.eta_dbl * success, (1.0 - spec.eta_dbl) * failure)
        empty = P.polymul(empty_pair, res_dark)
    return with_photon, empty


def _tail(poly: np.ndarray, k: int) -> float:
    return float(min(1.0, max(0.0, math.fsum(poly[k:]))))


def effective_efficiency(spec: CascadeSpec, model: DetectorModel) -> float:
    """P(at least k clicks | one photon enters)."""
    return _tail(click_polynomials(spec, model)[0], spec.k)


def dark_click_probability(spec: CascadeSpec, model: DetectorModel) -> float:
    """P(at least k clicks | no photon); Binomial(n, dark) tail without residual detectors."""
    return _tail(click_polynomials(spec, model)[1], spec.k)


def doubling_threshold(eta: float) -> float:
    """Doubler efficiency above which one doubling step beats a bare detector."""
    if not 0.0 < eta <= 1.0:
        raise InvalidArgument(f"eta must lie in (0, 1], got {eta}")
    return 1.0 / (2.0 - eta)


def residual_efficiency(eta: float, eta_dbl: float) -> float:
    """Depth-1, k=1 efficiency when the undoubled photon is also detected."""
    if not 0.0 <= eta <= 1.0 or not 0.0 <= eta_dbl <= 1.0:
        raise InvalidArgument("eta and eta_dbl must lie in [0, 1]")
    return eta_dbl * eta * (2.0 - eta) + (1.0 - eta_dbl) * eta


@dataclass(frozen=True)
class CountsResult:
    signal_counts: int
    noise_counts: int
    trials: int
    seed: int
    rng: str = RNG_ALGORITHM
    backend: str = _kernels.BACKEND

    @property
    def snr(self) -> float:
        return self.signal_counts / self.noise_counts if self.noise_counts else math.inf

    def to_dict(self) -> dict:
        return {
            "signal_counts": self.signal_counts,
            "noise_counts": self.noise_counts,
            "snr": self.snr if self.noise_counts else None,
            "trials": self.trials,
            "seed": self.seed,
            "rng": self.rng,
            "backend": self.backend,
        }


def uniforms_per_trial(spec: CascadeSpec) -> int:
    return 2 * spec.n + (spec.n - 1 if spec.detect_residual else 0)


def _chunk_counts(child: np.random.SeedSequence, size: int, spec, model, photon_prob, kernel) -> tuple[int, int]:
    rng = np.random.Generator(np.random.Philox(child))
    u = rng.random((size, uniforms_per_trial(spec)))
    return kernel(
        u,
        spec.depth,
        spec.k,
        model.click_with_photon,
        model.dark_prob,
        spec.eta_dbl,
        spec.detect_residual,
        photon_prob,
    )


def simulate_counts(
    spec: CascadeSpec,
    model: DetectorModel,
    rep_rate: int,
    photon_prob: float,
    seed: int | None = None,
    workers: int = 1,
    kernel=None,
) -> CountsResult:
    """Seeded Monte Carlo over ``rep_rate`` trials.

    Trials are split into fixed chunks, each with its own SeedSequence child,
    so results do not depend on ``workers``.
    """
    if rep_rate < 1:
        raise InvalidArgument("rep_rate must be at least 1")
    if not 0.0 <= photon_prob <= 1.0:
        raise InvalidArgument("photon_prob must lie in [0, 1]")
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    seed = int(seed) & (2**64 - 1)
    kernel = kernel or _kernels.cascade_trials
    sizes = [CHUNK_TRIALS] * (rep_rate // CHUNK_TRIALS)
    if rep_rate % CHUNK_TRIALS:
        sizes.append(rep_rate % CHUNK_TRIALS)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    jobs = list(zip(children, sizes))

    def one(job):
        return _chunk_counts(job[0], job[1], spec, model, photon_prob, kernel)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(one, jobs))
    else:
        parts = [one(job) for job in jobs]
    signal = sum(p[0] for p in parts)
    noise = sum(p[1] for p in parts)
    backend = "cython" if kernel is getattr(_kernels.compiled_backend, "cascade_trials", None) else "python"
    return CountsResult(signal, noise, rep_rate, seed, backend=backend)


def expected_counts(spec: CascadeSpec, model: DetectorModel, rep_rate: int, photon_prob: float) -> dict[str, float]:
    """Analytic means and binomial standard deviations for :func:`simulate_counts`."""
    ps = photon_prob * effective_efficiency(spec, model)
    pn = (1.0 - photon_prob) * dark_click_probability(spec, model)
    return {
        "signal_mean": rep_rate * ps,
        "signal_std": math.sqrt(rep_rate * ps * (1 - ps)),
        "noise_mean": rep_rate * pn,
        "noise_std": math.sqrt(rep_rate * pn * (1 - pn)),
        "snr": ps / pn if pn > 0 else math.inf,
    }
