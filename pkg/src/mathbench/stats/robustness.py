"""Ranking diagnostics: Spearman correlation and leave-one-family-out."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .irt import IRTConfig, IRTFit, ResponseMatrix, expected_performance, fit_irt


def _average_ranks(values) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(len(v), dtype=float)
    i = 0
    sorted_v = v[order]
    while i < len(v):
        j = i
        while j + 1 < len(v) and sorted_v[j + 1] == sorted_v[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2 + 1  # average rank for ties
        i = j + 1
    return ranks


def spearman(a, b) -> float:
    """Rank correlation with average-rank tie handling."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) != len(b):
        raise ValueError("rankings cover different item sets")
    if len(a) < 2:
        raise ValueError("need at least two items")
    ra, rb = _average_ranks(a), _average_ranks(b)
    ra -= ra.mean()
    rb -= rb.mean()
    denom = np.sqrt((ra @ ra) * (rb @ rb))
    if denom == 0:
        raise ValueError("constant ranking")
    return float((ra @ rb) / denom)


@dataclass
class FamilyAblation:
    family: str
    expected_performance: dict[str, float]
    ranks: dict[str, int]
    rank_shift: dict[str, int]      # vs the full fit; positive = dropped
    dropped_models: list[str]


@dataclass
class RankShiftTable:
    full_ranks: dict[str, int]
    ablations: list[FamilyAblation]

    def max_shift(self, top_k: int | None = None) -> int:
        models = set(self.full_ranks)
        if top_k is not None:
            models = {m for m, r in self.full_ranks.items() if r <= top_k}
        return max(
            (abs(a.rank_shift[m]) for a in self.ablations for m in models
             if m in a.rank_shift),
            default=0,
        )

    def top_k_retention(self, k: int = 10) -> float:
        top = {m for m, r in self.full_ranks.items() if r <= k}
        kept = []
        for a in self.ablations:
            ab_top = {m for m, r in a.ranks.items() if r <= k}
            kept.append(len(top & ab_top) / len(top))
        return min(kept) if kept else 1.0


def _ranks_from_scores(scores: dict[str, float]) -> dict[str, int]:
    ordered = sorted(scores, key=lambda m: (-scores[m], m))
    return {m: i + 1 for i, m in enumerate(ordered)}


def leave_one_family_out(matrix: ResponseMatrix,
                         config: IRTConfig | None = None) -> RankShiftTable:
    """Refit expected performance with each benchmark family removed."""
    if matrix.family_tags is None:
        raise ValueError("matrix carries no family tags")
    families = sorted(set(matrix.family_tags))
    if len(families) < 2:
        raise ValueError("need at least two families")

    full_fit = fit_irt(matrix, config)
    full_ep = expected_performance(full_fit)
    full_ranks = _ranks_from_scores(full_ep)

    ablations = []
    tags = np.array(matrix.family_tags)
    for fam in families:
        keep = tags != fam
        sub_mask = matrix.mask[:, keep]
        have_obs = sub_mask.any(axis=1)
        dropped = [m for m, ok in zip(matrix.models, have_obs) if not ok]
        rows = np.flatnonzero(have_obs)
        cols_obs = sub_mask[rows].any(axis=0)
        sub = ResponseMatrix(
            models=[matrix.models[i] for i in rows],
            questions=[q for q, k in zip(matrix.questions, keep) if k],
            successes=matrix.successes[np.ix_(rows, np.flatnonzero(keep))],
            runs=matrix.runs[np.ix_(rows, np.flatnonzero(keep))],
            mask=sub_mask[rows],
            family_tags=[f for f, k in zip(matrix.family_tags, keep) if k],
        )
        # questions can lose all observations when a family dominated a model
        unobserved_q = ~sub.mask.any(axis=0)
        if unobserved_q.any():
            qkeep = ~unobserved_q
            sub = ResponseMatrix(
                models=sub.models,
                questions=[q for q, k in zip(sub.questions, qkeep) if k],
                successes=sub.successes[:, qkeep],
                runs=sub.runs[:, qkeep],
                mask=sub.mask[:, qkeep],
                family_tags=[f for f, k in zip(sub.family_tags, qkeep) if k],
            )
        fit = fit_irt(sub, config)
        ep = expected_performance(fit)
        ranks = _ranks_from_scores(ep)
        shift = {m: ranks[m] - full_ranks[m] for m in ranks}
        ablations.append(FamilyAblation(fam, ep, ranks, shift, dropped))
    return RankShiftTable(full_ranks, ablations)
