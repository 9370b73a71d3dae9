"""Partition sums and finite-level pressure estimates for the Stern-Brocot system.

Diameters of the level-n intervals are reciprocals of products of adjacent
level denominators.  Integer exponents are summed exactly in rational
arithmetic and only converted to the log domain at the end; fractional
exponents go through a canonically ordered log-sum-exp.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from gmpy2 import mpfr, mpq
import gmpy2
from scipy.special import logsumexp

from .errors import DomainError, LevelTooLargeError
from .exact import DEFAULT_LEVEL_GUARD

FAMILIES = ("all", "C", "C-complement", "even")

#: Default exponent sample: spans the analytic region, the transition at t = 1,
#: and the vanishing region beyond it.
DEFAULT_T_SET = (-2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0)


@dataclass(frozen=True)
class PressureProbe:
    t: float
    family: str
    n: int
    log_sum: float
    estimate: float


@dataclass(frozen=True)
class SandwichReport:
    n: int
    t: float
    passed: bool
    pair_violations: tuple[tuple[int, int, int], ...]  # (pair index, product, parent product)
    sum_lower_ok: bool
    sum_upper_ok: bool
    max_ratio_pair: tuple[int, Fraction] | None  # (pair index, parent/child diameter ratio)


def level_denominators(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[int]:
    """Denominators of the n-th Stern-Brocot sequence (2**n + 1 exact integers)."""
    if n < 0:
        raise DomainError(f"level must be non-negative, got {n}")
    if n > guard:
        raise LevelTooLargeError(n, guard)
    t = [1, 1]
    for _ in range(n):
        nxt = []
        for a, b in zip(t, t[1:]):
            nxt.append(a)
            nxt.append(a + b)
        nxt.append(t[-1])
        t = nxt
    return t


def _family_products(n: int, family: str, guard: int):
    """Adjacent-denominator products whose reciprocals are the family diameters.

    For the merged even intervals the diameter is a sum of two reciprocals, so
    those are returned as (product, product) pairs instead.
    """
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}")
    if family == "all":
        if n < 0:
            raise DomainError(f"level must be non-negative, got {n}")
    elif n < 1 or (family == "even" and n < 2):
        raise DomainError(f"family {family!r} needs a larger level than {n}")
    t = level_denominators(n, guard)
    prods = [a * b for a, b in zip(t, t[1:])]
    if family == "all":
        return prods
    if n == 1:
        return [prods[1]] if family == "C" else [prods[0]]
    if family == "C":
        return [p for j, p in enumerate(prods, start=1) if j % 4 in (2, 3)]
    if family == "C-complement":
        return [p for j, p in enumerate(prods, start=1) if j % 4 in (0, 1)]
    selected = [p for j, p in enumerate(prods, start=1) if j % 4 in (2, 3)]
    return list(zip(selected[0::2], selected[1::2]))


def _log_fraction(value: Fraction | mpq) -> float:
    """Log of a positive rational; exact 0.0 at 1 and exact multiples of log 2 at powers of 2."""
    num, den = int(value.numerator), int(value.denominator)
    if num <= 0:
        raise DomainError("log of a non-positive partition sum")
    if num == den:
        return 0.0
    if den == 1 and num & (num - 1) == 0:
        return (num.bit_length() - 1) * math.log(2)
    if num == 1 and den & (den - 1) == 0:
        return -(den.bit_length() - 1) * math.log(2)
    with gmpy2.context(precision=128):
        return float(gmpy2.log(mpfr(num)) - gmpy2.log(mpfr(den)))


def _exact_partition_value(n: int, t: int, family: str, guard: int) -> mpq:
    prods = _family_products(n, family, guard)
    total = mpq(0)
    if family == "even":
        for a, b in prods:
            total += (mpq(1, a) + mpq(1, b)) ** t
        return total
    if t == 0:
        return mpq(len(prods))
    if t > 0:
        for p in prods:
            total += mpq(1, p ** t)
    else:
        for p in prods:
            total += p ** (-t)
    return total


def partition_value_exact(n: int, t: int, family: str = "all",
                          guard: int = DEFAULT_LEVEL_GUARD) -> Fraction:
    """Exact partition sum of diameters**t for an integer exponent."""
    v = _exact_partition_value(n, int(t), family, guard)
    return Fraction(int(v.numerator), int(v.denominator))


def pressure_probe(n: int, t: float, family: str = "all",
                   guard: int = DEFAULT_LEVEL_GUARD) -> PressureProbe:
    """Finite-level pressure data: the log partition sum and its per-level rate."""
    if n < 1:
        raise DomainError(f"pressure probes need n >= 1, got {n}")
    if float(t).is_integer():
        value = _exact_partition_value(n, int(t), family, guard)
        num, den = int(value.numerator), int(value.denominator)
        # powers of two yield estimates that are exact rational multiples of log 2
        if den == 1 and num & (num - 1) == 0:
            k = num.bit_length() - 1
            log_sum = k * math.log(2)
            estimate = math.log(2) * (k / n)
        elif num == 1 and den & (den - 1) == 0:
            k = den.bit_length() - 1
            log_sum = -k * math.log(2)
            estimate = -math.log(2) * (k / n)
        else:
            log_sum = _log_fraction(value)
            estimate = log_sum / n
        return PressureProbe(t=float(t), family=family, n=n, log_sum=log_sum, estimate=estimate)
    prods = _family_products(n, family, guard)
    if family == "even":
        logs = np.array([np.logaddexp(-math.log(a), -math.log(b)) for a, b in prods])
        logs *= t
    else:
        logs = -t * np.log(np.array([float(p) for p in prods]))
    log_sum = float(logsumexp(logs))  # summands already in canonical level order
    return PressureProbe(t=float(t), family=family, n=n, log_sum=log_sum, estimate=log_sum / n)


def partition_sum(n: int, t: float, family: str = "all",
                  guard: int = DEFAULT_LEVEL_GUARD) -> float:
    """log of the partition sum of diameters**t over the chosen family."""
    return pressure_probe(n, t, family, guard).log_sum


def pressure_estimate(n: int, t: float, family: str = "all",
                      guard: int = DEFAULT_LEVEL_GUARD) -> float:
    """Finite-n proxy for the pressure: log partition sum divided by n."""
    return pressure_probe(n, t, family, guard).estimate


def sandwich_check(n: int, t: float, guard: int = DEFAULT_LEVEL_GUARD) -> SandwichReport:
    """Exact per-pair diameter bounds between level n members and level n-1.

    The 2**(n-1) member intervals of level n biject with the level-(n-1)
    intervals: the left member of each even pair matches the odd-indexed parent
    interval, the right member the even-indexed one.  Each matched pair (I, J)
    must satisfy diam(J)/(n+1) <= diam(I) <= diam(J); the factor n+1 (rather
    than n) is necessary, since boundary pairs with a unit denominator attain
    denominator ratio exactly n.  The per-pair bounds imply the partition-sum
    sandwich for every exponent; the sums themselves are re-checked exactly for
    integer t and in floating point otherwise.
    """
    if n < 2:
        raise DomainError(f"sandwich check needs n >= 2, got {n}")
    t_prev = level_denominators(n - 1, guard)
    t_cur = level_denominators(n, guard)
    prev_prods = [a * b for a, b in zip(t_prev, t_prev[1:])]
    cur_prods = [a * b for a, b in zip(t_cur, t_cur[1:])]
    member_prods = [p for j, p in enumerate(cur_prods, start=1) if j % 4 in (2, 3)]

    violations = []
    max_ratio: Fraction = Fraction(0)
    max_idx = 0
    for j, (child, parent) in enumerate(zip(member_prods, prev_prods), start=1):
        # diam(I) = 1/child, diam(J) = 1/parent
        if not parent <= child <= (n + 1) * parent:
            violations.append((j, child, parent))
        ratio = Fraction(child, parent)
        if ratio > max_ratio:
            max_ratio, max_idx = ratio, j

    abs_t = abs(float(t))
    if float(t).is_integer():
        s_prev = _exact_partition_value(n - 1, int(t), "all", guard)
        s_cur = _exact_partition_value(n, int(t), "C", guard)
        scale = mpq(n + 1) ** int(round(abs_t))
        lower_ok = s_cur * scale >= s_prev
        upper_ok = s_cur <= s_prev * scale
    else:
        s_prev = partition_sum(n - 1, t, "all", guard)
        s_cur = partition_sum(n, t, "C", guard)
        margin = 1e-12
        lower_ok = s_cur >= s_prev - abs_t * math.log(n + 1) - margin
        upper_ok = s_cur <= s_prev + abs_t * math.log(n + 1) + margin
    return SandwichReport(
        n=n, t=float(t), passed=not violations and lower_ok and upper_ok,
        pair_violations=tuple(violations), sum_lower_ok=bool(lower_ok),
        sum_upper_ok=bool(upper_ok),
        max_ratio_pair=(max_idx, max_ratio) if max_idx else None,
    )
