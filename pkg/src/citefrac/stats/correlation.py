"""Pearson and Spearman correlation with t-based significance."""
from __future__ import annotations

import math
from typing import Mapping, Sequence

import numpy as np

from ..errors import ConstantInput, LengthMismatch
from .distributions import t_two_tailed
from .results import CorrelationMatrix, TestResult


def rankdata(values: Sequence[float]) -> np.ndarray:
    """1-based ranks with ties given the mean of their rank positions."""
    a = np.asarray(values, dtype=float)
    order = np.argsort(a, kind="mergesort")
    ranks = np.empty(len(a), dtype=float)
    i = 0
    while i < len(a):
        j = i
        while j + 1 < len(a) and a[order[j + 1]] == a[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0
        i = j + 1
    return ranks


def _corr_p(r: float, n: int) -> float:
    if abs(r) >= 1.0:
        return 0.0
    t = r * math.sqrt((n - 2) / (1.0 - r * r))
    return t_two_tailed(t, n - 2)


def pearson(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Pearson product-moment correlation with a two-tailed t p-value."""
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    n = len(x)
    if n < 3:
        raise LengthMismatch(f"need at least 3 observations, got {n}")
    a = np.asarray(x, dtype=float) - np.mean(x)
    b = np.asarray(y, dtype=float) - np.mean(y)
    denom = math.sqrt(float(np.sum(a * a)) * float(np.sum(b * b)))
    if denom == 0.0:
        raise ConstantInput("correlation undefined for constant input")
    r = float(np.sum(a * b)) / denom
    r = max(-1.0, min(1.0, r))
    return TestResult(statistic=r, df=n - 2, p_value=_corr_p(r, n), method="pearson")


def spearman(x: Sequence[float], y: Sequence[float]) -> TestResult:
    """Spearman rank correlation: Pearson on average-ranked data."""
    if len(x) != len(y):
        raise LengthMismatch(f"lengths differ: {len(x)} vs {len(y)}")
    result = pearson(rankdata(x), rankdata(y))
    return TestResult(
        statistic=result.statistic,
        df=result.df,
        p_value=result.p_value,
        method="spearman",
    )


def correlation_matrix(
    columns: Mapping[str, Sequence[float]], n: int | None = None
) -> CorrelationMatrix:
    """All pairwise Pearson and Spearman correlations over named columns."""
    labels = list(columns)
    data = [list(map(float, columns[name])) for name in labels]
    if n is None:
        n = len(data[0]) if data else 0
    for name, col in zip(labels, data):
        if len(col) != n:
            raise LengthMismatch(f"column {name!r} has length {len(col)}, expected {n}")
    m = len(labels)
    pear = np.eye(m)
    spear = np.eye(m)
    pear_p = np.zeros((m, m))
    spear_p = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            rp = pearson(data[i], data[j])
            rs = spearman(data[i], data[j])
            pear[i, j] = pear[j, i] = rp.statistic
            spear[i, j] = spear[j, i] = rs.statistic
            pear_p[i, j] = pear_p[j, i] = rp.p_value
            spear_p[i, j] = spear_p[j, i] = rs.p_value
    return CorrelationMatrix(
        labels=labels,
        pearson=pear,
        spearman=spear,
        pearson_p=pear_p,
        spearman_p=spear_p,
    )
