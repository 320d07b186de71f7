"""Confidence intervals for benchmark means and their coverage simulation."""

from __future__ import annotations

from dataclasses import dataclass, field
from statistics import NormalDist
from typing import Optional, Sequence

import numpy as np

METHODS = (
    "pooled-normal",
    "wilson",
    "question-plugin",
    "question-plugin-jeffreys",
    "question-sd",
)


@dataclass(frozen=True)
class Interval:
    low: float
    high: float
    method: str
    level: float
    degenerate: bool = False

    def contains(self, x: float) -> bool:
        return self.low <= x <= self.high


def _z(level: float) -> float:
    return NormalDist().inv_cdf(0.5 + level / 2)


def ci(p_hat: float, n: int, method: str = "pooled-normal", level: float = 0.95,
       question_data: Optional[Sequence[float]] = None, runs: int = 4) -> Interval:
    """Build one interval.  The question-* methods need per-question means."""
    if not 0.0 <= p_hat <= 1.0:
        raise ValueError(f"p_hat {p_hat} outside [0, 1]")
    if n < 1:
        raise ValueError("n must be >= 1")
    z = _z(level)
    if method == "pooled-normal":
        half = z * np.sqrt(p_hat * (1 - p_hat) / n)
        lo, hi = p_hat - half, p_hat + half
    elif method == "wilson":
        denom = 1 + z * z / n
        center = (p_hat + z * z / (2 * n)) / denom
        half = (z / denom) * np.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n))
        lo, hi = center - half, center + half
    elif method in ("question-plugin", "question-plugin-jeffreys", "question-sd"):
        if question_data is None:
            raise ValueError(f"{method} requires per-question means")
        pj = np.asarray(question_data, dtype=float)
        q = len(pj)
        if method == "question-plugin":
            var = float((pj * (1 - pj) / runs).sum()) / (q * q)
        elif method == "question-plugin-jeffreys":
            xj = pj * runs
            sm = (xj + 0.5) / (runs + 1)
            var = float((sm * (1 - sm) / runs).sum()) / (q * q)
        else:
            var = float(pj.var(ddof=1)) / q if q > 1 else 0.0
        half = z * np.sqrt(var)
        lo, hi = p_hat - half, p_hat + half
    else:
        raise ValueError(f"unknown interval method {method!r}")
    degenerate = hi - lo <= 0
    return Interval(max(0.0, float(lo)), min(1.0, float(hi)), method, level, degenerate)


@dataclass
class CoverageReport:
    coverage: dict          # (method, level) -> empirical coverage
    mu: float | list        # true mean(s) used
    n_sims: int
    runs: int
    seed: int
    per_model: dict = field(default_factory=dict)

    def get(self, method: str, level: float = 0.95) -> float:
        return self.coverage[(method, level)]


def _interval_bounds(X: np.ndarray, runs: int, method: str, z: float):
    """Vectorized (low, high) per simulation row; X is (sims, q) successes."""
    sims, q = X.shape
    n = q * runs
    p_hat = X.sum(axis=1) / n
    if method == "pooled-normal":
        half = z * np.sqrt(p_hat * (1 - p_hat) / n)
        return p_hat - half, p_hat + half
    if method == "wilson":
        denom = 1 + z * z / n
        center = (p_hat + z * z / (2 * n)) / denom
        half = (z / denom) * np.sqrt(p_hat * (1 - p_hat) / n + z * z / (4 * n * n))
        return center - half, center + half
    if method == "question-plugin":
        pj = X / runs
        var = (pj * (1 - pj) / runs).sum(axis=1) / (q * q)
    elif method == "question-plugin-jeffreys":
        sm = (X + 0.5) / (runs + 1)
        var = (sm * (1 - sm) / runs).sum(axis=1) / (q * q)
    elif method == "question-sd":
        pj = X / runs
        var = pj.var(axis=1, ddof=1) / q
    else:
        raise ValueError(f"unknown interval method {method!r}")
    half = z * np.sqrt(var)
    return p_hat - half, p_hat + half


def simulate_coverage(p, n_sims: int = 1000, runs: int = 4,
                      methods: Sequence[str] = METHODS,
                      levels: Sequence[float] = (0.95,),
                      seed: int = 0) -> CoverageReport:
    """Monte Carlo coverage of each interval method.

    `p` holds fitted per-question success probabilities: shape (q,) for one
    model, or (m, q) to aggregate coverage across models.  Each simulation
    draws `runs` Bernoulli samples per question and checks whether each
    interval contains the true mean mu = mean(p_j).  Intervals are clipped
    to [0, 1] before the containment check.
    """
    P = np.atleast_2d(np.asarray(p, dtype=float))
    rng = np.random.default_rng(seed)
    hits = {(meth, lv): 0 for meth in methods for lv in levels}
    per_model = {(meth, lv): [] for meth in methods for lv in levels}
    mus = []
    for row in P:
        mu = float(row.mean())
        mus.append(mu)
        X = rng.binomial(runs, row, size=(n_sims, len(row))).astype(float)
        for meth in methods:
            for lv in levels:
                lo, hi = _interval_bounds(X, runs, meth, _z(lv))
                lo = np.clip(lo, 0.0, 1.0)
                hi = np.clip(hi, 0.0, 1.0)
                contained = int(((lo <= mu) & (mu <= hi)).sum())
                hits[(meth, lv)] += contained
                per_model[(meth, lv)].append(contained / n_sims)
    total = n_sims * len(P)
    coverage = {k: v / total for k, v in hits.items()}
    return CoverageReport(
        coverage=coverage,
        mu=mus if len(mus) > 1 else mus[0],
        n_sims=n_sims,
        runs=runs,
        seed=seed,
        per_model=per_model,
    )
