"""Tie-aware rank correlation between equal-length series.

Two interchangeable methods are provided. RANK_PEARSON assigns average
ranks to ties and takes the Pearson correlation of the rank vectors; it is
the tie-correct definition and the default. CLASSIC_D2 evaluates the
textbook formula rho = 1 - 6*sum(d^2) / (n*(n^2-1)) on the same average
ranks. On tie-free inputs the two are algebraically identical, and both are
arranged here as a single division of exactly-representable intermediates,
so they agree bit-for-bit in that case.

Count series are usually sparse, so degenerate inputs get fixed
conventions instead of the 0/0 the plain definitions produce:

* both series constant (includes length < 2) -> 1.0: two flat signals rank
  identically everywhere;
* exactly one series constant -> 0.0: a flat signal carries no ordering
  evidence about a varying one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .windows import IdlePolicy, SignalPair, remove_idle


class SpearmanMethod(Enum):
    RANK_PEARSON = "rank-pearson"
    CLASSIC_D2 = "classic-d2"


@dataclass(frozen=True)
class CorrelationResult:
    """Correlation of one signal pair, with and without idle windows.

    `rho_without_zeros` is None only when idle removal leaves fewer than
    two windows and neither constancy convention applies to the full
    series; verdict logic treats that marker as "does not exceed any
    threshold".
    """

    label_a: str
    label_b: str
    rho_with_zeros: float
    rho_without_zeros: Optional[float]
    n_with: int
    n_without: int
    method: SpearmanMethod


def rank_average(values: Sequence) -> list[float]:
    """Ranks 1..n with tied values sharing the mean of their positions.

    The rank sum is always n*(n+1)/2. Ranks land on the half-integer grid,
    so they are exact floats.
    """
    n = len(values)
    if n == 0:
        raise ValueError("cannot rank an empty sequence")
    order = sorted(range(n), key=lambda i: values[i])
    ranks = [0.0] * n
    i = 0
    while i < n:
        j = i
        tied = values[order[i]]
        while j + 1 < n and values[order[j + 1]] == tied:
            j += 1
        mean_rank = (i + j + 2) / 2  # positions i+1 .. j+1, averaged
        for k in range(i, j + 1):
            ranks[order[k]] = mean_rank
        i = j + 1
    return ranks


def _is_constant(values: Sequence) -> bool:
    return all(v == values[0] for v in values)


def spearman(
    a: Sequence,
    b: Sequence,
    method: SpearmanMethod = SpearmanMethod.RANK_PEARSON,
) -> float:
    """Rank correlation of two equal-length series, in [-1, 1].

    Degenerate conventions (identical for both methods): length < 2 returns
    1.0, both-constant returns 1.0, exactly-one-constant returns 0.0.
    Raises ValueError on a length mismatch.
    """
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    n = len(a)
    if n < 2:
        return 1.0
    const_a, const_b = _is_constant(a), _is_constant(b)
    if const_a and const_b:
        return 1.0
    if const_a or const_b:
        return 0.0

    ranks_a = rank_average(a)
    ranks_b = rank_average(b)

    if method is SpearmanMethod.CLASSIC_D2:
        d2 = sum((x - y) ** 2 for x, y in zip(ranks_a, ranks_b))
        nn = float(n * (n * n - 1))
        # Single-division arrangement of 1 - 6*d2/nn: every intermediate is
        # an exact dyadic, which keeps this bit-identical to the rank-Pearson
        # route whenever there are no ties.
        return (nn - 6.0 * d2) / nn

    mean = sum(ranks_a) / n  # == (n+1)/2 for either rank vector
    cov = sum((x - mean) * (y - mean) for x, y in zip(ranks_a, ranks_b))
    var_a = sum((x - mean) ** 2 for x in ranks_a)
    var_b = sum((y - mean) ** 2 for y in ranks_b)
    return cov / math.sqrt(var_a * var_b)


def correlate_pair(
    pair: SignalPair,
    method: SpearmanMethod = SpearmanMethod.RANK_PEARSON,
    idle: IdlePolicy = IdlePolicy.BOTH_ZERO,
) -> CorrelationResult:
    """Correlate a pair on the full grid and again with idle windows removed.

    When removal leaves fewer than two windows there is nothing left to
    rank, so the constancy conventions are judged on the full series: two
    signals that never varied still correlate perfectly (1.0), one flat
    signal against a varying one scores 0.0, and anything else is marked
    undefined (None).
    """
    rho_with = spearman(pair.a.values, pair.b.values, method)
    trimmed = remove_idle(pair, idle)
    n_without = trimmed.a.grid.window_count

    rho_without: Optional[float]
    if n_without >= 2:
        rho_without = spearman(trimmed.a.values, trimmed.b.values, method)
    else:
        const_a = _is_constant(pair.a.values) if pair.a.values else True
        const_b = _is_constant(pair.b.values) if pair.b.values else True
        if const_a and const_b:
            rho_without = 1.0
        elif const_a or const_b:
            rho_without = 0.0
        else:
            rho_without = None

    return CorrelationResult(
        label_a=pair.a.label,
        label_b=pair.b.label,
        rho_with_zeros=rho_with,
        rho_without_zeros=rho_without,
        n_with=pair.a.grid.window_count,
        n_without=n_without,
        method=method,
    )
