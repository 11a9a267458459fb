"""Exact worst-case and average-case complexity envelopes.

Worst-case envelopes are closed-form expressions in the source count c,
depth N, and order dimension r.  Average-case envelopes follow the uniform
merge model: starting from t_0 = c distinct vertices, the 2*t_k child slots
of stage k are identified by a uniformly random set partition, so stage
sizes form a Markov chain weighted by Stirling/Bell ratios.  All arithmetic
is exact (big integers and fractions).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

AVERAGE_GUARD_N = 12
AVERAGE_GUARD_WIDTH = 512  # cap on c * 2^N so the exact DP stays tractable


class GuardExceeded(ValueError):
    pass


@lru_cache(maxsize=None)
def _stirling_row(n: int) -> tuple[int, ...]:
    """Stirling numbers of the second kind S(n, 0..n)."""
    if n == 0:
        return (1,)
    prev = _stirling_row(n - 1)
    row = [0] * (n + 1)
    for k in range(1, n + 1):
        row[k] = k * (prev[k] if k <= n - 1 else 0) + prev[k - 1]
    return tuple(row)


def stirling2(n: int, k: int) -> int:
    if k < 0 or k > n:
        return 0
    return _stirling_row(n)[k]


def bell_number(n: int) -> int:
    return sum(_stirling_row(n))


def ceil_log2(x: int) -> int:
    if x < 1:
        raise ValueError("x must be positive")
    return (x - 1).bit_length()


def envelope_worst(c: int, N: int, r: int) -> dict:
    """The four closed-form bounds plus their naive/certified ratio.

    Log factors are evaluated as max(1, ceil(log2(c * 2^N))) so every value
    is an exact integer or rational.
    """
    if c < 1 or N < 1 or r < 1:
        raise ValueError("c, N, r must be >= 1")
    width = c * 2**N
    logf = max(1, ceil_log2(width))
    naive_agg = c * c * 4**N
    harmonic = width * logf ** (r - 1)
    naive_w = width ** (3 * N)
    certified_w = N * width**5
    exp = 3 * N - 5
    ratio = Fraction(width**exp, N) if exp >= 0 else Fraction(1, N * width ** (-exp))
    return {
        "naive_aggregation": naive_agg,
        "harmonic_evaluation": harmonic,
        "naive_wasserstein": naive_w,
        "certified_wasserstein": certified_w,
        "ratio": ratio,
    }


def _check_average_guard(c: int, N: int):
    if c < 1 or N < 1:
        raise ValueError("c and N must be >= 1")
    if N > AVERAGE_GUARD_N or c * 2**N > AVERAGE_GUARD_WIDTH:
        raise GuardExceeded(
            f"average-case DP guarded at N <= {AVERAGE_GUARD_N} "
            f"and c*2^N <= {AVERAGE_GUARD_WIDTH}"
        )


def merge_model_moment(c: int, N: int, power: int) -> Fraction:
    """Exact E[(t_0 + ... + t_N)^power] under the uniform merge model.

    The DP carries, for each current stage size t, the conditional moments
    E[S^m, t_k = t] for m = 0..power, where S is the running size sum.
    Each state stores integer numerators over one shared denominator, so the
    hot loop is pure big-integer arithmetic; fractions are only normalized
    when states merge.
    """
    _check_average_guard(c, N)
    # state: t -> (numerator vector for m = 0..power, common denominator)
    dist: dict[int, tuple[list[int], int]] = {
        c: ([c**m for m in range(power + 1)], 1)
    }
    for _ in range(N):
        pending: dict[int, list[tuple[list[int], int]]] = {}
        for t, (nums, den) in dist.items():
            bell = bell_number(2 * t)
            row = _stirling_row(2 * t)
            new_den = den * bell
            for t2 in range(1, 2 * t + 1):
                s2 = row[t2]
                if s2 == 0:
                    continue
                powers = [t2**i for i in range(power + 1)]
                # E[(S + t2)^m] expands binomially over the carried moments
                shifted = [
                    s2 * sum(comb(m, i) * powers[m - i] * nums[i] for i in range(m + 1))
                    for m in range(power + 1)
                ]
                pending.setdefault(t2, []).append((shifted, new_den))
        dist = {}
        for t2, parts in pending.items():
            if len(parts) == 1:
                dist[t2] = parts[0]
                continue
            common = 1
            for _, den in parts:
                common = common * den // _gcd(common, den)
            acc = [0] * (power + 1)
            for nums, den in parts:
                scale = common // den
                for m in range(power + 1):
                    acc[m] += nums[m] * scale
            shrink = common
            for v in acc:
                shrink = _gcd(shrink, v)
                if shrink == 1:
                    break
            if shrink > 1:
                acc = [v // shrink for v in acc]
                common //= shrink
            dist[t2] = (acc, common)
    total = Fraction(0)
    for nums, den in dist.values():
        total += Fraction(nums[power], den)
    return total


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def envelope_average(c: int, N: int, mode: str) -> Fraction:
    """Average-case envelope: E[(sum t_j)^(3N)] or N * E[(sum t_j)^5]."""
    if mode == "naive":
        return merge_model_moment(c, N, 3 * N)
    if mode == "certified":
        return N * merge_model_moment(c, N, 5)
    raise ValueError("mode must be 'naive' or 'certified'")


def average_ratio(c: int, N: int) -> Fraction:
    return envelope_average(c, N, "naive") / envelope_average(c, N, "certified")


def sandwich_bounds(c: int, N: int) -> tuple[Fraction, Fraction]:
    """Pointwise bounds on the average ratio from the structural size range.

    The ratio is a weighted mean of (sum t_j)^(3N-5), so it lies between the
    values of that power at the extreme sizes c and c*(2^(N+1)-1); for
    3N - 5 < 0 the power is decreasing and the endpoints swap.
    """
    exp = 3 * N - 5
    top = c * (2 ** (N + 1) - 1)

    def val(x: int) -> Fraction:
        return Fraction(x**exp, N) if exp >= 0 else Fraction(1, N * x ** (-exp))

    lo, hi = val(c), val(top)
    return (lo, hi) if lo <= hi else (hi, lo)


__all__ = [
    "GuardExceeded",
    "average_ratio",
    "bell_number",
    "ceil_log2",
    "envelope_average",
    "envelope_worst",
    "merge_model_moment",
    "sandwich_bounds",
    "stirling2",
]
