"""Log-additive cost imputation: log c_mb = mu_m + beta_b, least squares."""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal
from typing import Iterable

import numpy as np


class UnderIdentified(Exception):
    """Model/benchmark incidence graph is disconnected; joint fit would be
    meaningless extrapolation across components."""

    def __init__(self, components: list[set[str]]):
        super().__init__(f"incidence graph has {len(components)} components")
        self.components = components


@dataclass
class CostObservation:
    model: str
    benchmark: str
    cost: float  # per-problem cost, > 0


@dataclass
class CostModelFit:
    models: list[str]
    benchmarks: list[str]
    mu: np.ndarray      # per model
    beta: np.ndarray    # per benchmark, sum(beta) == 0
    residuals: np.ndarray

    def predict(self, model: str, benchmark: str) -> float:
        i = self.models.index(model)
        j = self.benchmarks.index(benchmark)
        return math.exp(self.mu[i] + self.beta[j])


def _components(observations) -> list[set[str]]:
    adj: dict[str, set[str]] = {}
    for o in observations:
        a, b = f"m:{o.model}", f"b:{o.benchmark}"
        adj.setdefault(a, set()).add(b)
        adj.setdefault(b, set()).add(a)
    seen = set()
    comps = []
    for start in adj:
        if start in seen:
            continue
        comp = set()
        stack = [start]
        while stack:
            n = stack.pop()
            if n in comp:
                continue
            comp.add(n)
            stack.extend(adj[n] - comp)
        seen |= comp
        comps.append(comp)
    return comps


def fit_cost_model(observations: Iterable[CostObservation]) -> CostModelFit:
    obs = list(observations)
    if not obs:
        raise ValueError("no cost observations")
    for o in obs:
        if o.cost <= 0:
            raise ValueError(f"non-positive cost for {o.model}/{o.benchmark}")
    comps = _components(obs)
    if len(comps) > 1:
        raise UnderIdentified(comps)

    models = sorted({o.model for o in obs})
    benchmarks = sorted({o.benchmark for o in obs})
    mi = {m: i for i, m in enumerate(models)}
    bi = {b: i for i, b in enumerate(benchmarks)}

    n, M, B = len(obs), len(models), len(benchmarks)
    A = np.zeros((n, M + B))
    y = np.zeros(n)
    for k, o in enumerate(obs):
        A[k, mi[o.model]] = 1.0
        A[k, M + bi[o.benchmark]] = 1.0
        y[k] = math.log(o.cost)

    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    mu, beta = sol[:M], sol[M:]
    # fix the gauge: shifting mu by +c and beta by -c leaves predictions
    # unchanged; report the representative with sum(beta) == 0
    shift = beta.mean()
    beta = beta - shift
    mu = mu + shift
    residuals = y - A @ np.concatenate([mu, beta])
    return CostModelFit(models, benchmarks, mu, beta, residuals)


def expected_cost(fit: CostModelFit | None, model: str, registry,
                  observed: dict[tuple[str, str], float] | None = None) -> Decimal:
    """Problem-count-weighted mean per-problem cost over non-deprecated,
    cost-included benchmarks; observed costs where present, imputed elsewhere.
    """
    observed = observed or {}
    total = Decimal(0)
    weight = 0
    for spec in registry.active_benchmarks():
        if spec.cost_excluded:
            continue
        key = (model, spec.benchmark_id)
        if key in observed:
            c = Decimal(str(observed[key]))
        elif fit is not None and model in fit.models and \
                spec.benchmark_id in fit.benchmarks:
            c = Decimal(str(fit.predict(model, spec.benchmark_id)))
        else:
            continue
        total += c * spec.size
        weight += spec.size
    if weight == 0:
        raise ValueError(f"no cost data for model {model}")
    return total / weight
