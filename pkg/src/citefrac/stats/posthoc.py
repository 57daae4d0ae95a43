"""Dunnett's C post-hoc pairwise comparisons for unequal variances.

For groups i, j with v = s^2/n and q(df) the upper studentized-range
critical value at the group's own degrees of freedom:

    critical_diff = sqrt((v_i + v_j) / 2)
                    * (q(n_i - 1) * v_i + q(n_j - 1) * v_j) / (v_i + v_j)

A pair is significantly different iff |mean_i - mean_j| exceeds its
critical difference.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np

from ..errors import TooFewGroups
from .distributions import studentized_range_quantile
from .results import PairwiseDecision


@lru_cache(maxsize=None)
def _q_crit(alpha: float, k: int, df: float) -> float:
    return studentized_range_quantile(alpha, k, df)


def dunnett_c(
    groups: Mapping[str, Sequence[float]], alpha: float = 0.05
) -> list[PairwiseDecision]:
    """All-pairs comparisons; output ordered by sorted (name_i, name_j)."""
    if len(groups) < 2:
        raise TooFewGroups(f"need at least 2 groups, got {len(groups)}")
    for name, g in groups.items():
        if len(g) < 2:
            raise TooFewGroups(f"group {name!r} has {len(g)} values, need >= 2")
    k = len(groups)
    stats = {}
    for name, g in groups.items():
        a = np.asarray(g, dtype=float)
        stats[name] = (float(a.mean()), float(a.var(ddof=1)) / len(a), len(a))

    decisions: list[PairwiseDecision] = []
    for name_i, name_j in combinations(sorted(groups), 2):
        mean_i, v_i, n_i = stats[name_i]
        mean_j, v_j, n_j = stats[name_j]
        mean_diff = mean_i - mean_j
        if v_i + v_j == 0.0:
            # No sampling variance at all: any mean difference is real.
            decisions.append(
                PairwiseDecision(name_i, name_j, mean_diff, 0.0, mean_diff != 0.0)
            )
            continue
        q_i = _q_crit(alpha, k, n_i - 1)
        q_j = _q_crit(alpha, k, n_j - 1)
        critical = (
            np.sqrt((v_i + v_j) / 2.0) * (q_i * v_i + q_j * v_j) / (v_i + v_j)
        )
        decisions.append(
            PairwiseDecision(
                name_i, name_j, mean_diff, float(critical),
                abs(mean_diff) > critical,
            )
        )
    return decisions
