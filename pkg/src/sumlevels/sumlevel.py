"""Sum-level sets: exact enumeration, exact/compensated measures, tail measures.

The level-n sum-level set is a disjoint union of 2**(n-1) Stern-Brocot
intervals of order n, namely those whose Farey code ends in R.  Its Lebesgue
measure is computed three ways in this package: an exact rational sum over the
Farey tree (here), an exact sum over integer compositions (here, used as an
independent cross-check), and a discretized transfer-operator run (see
`transfer`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np
from gmpy2 import mpq
from numba import njit

from .errors import DomainError, LevelTooLargeError
from .exact import DEFAULT_LEVEL_GUARD, SBInterval, CFWord

#: Exact rational sums: common denominators grow superexponentially with n.
DEFAULT_EXACT_GUARD = 25

#: Compensated float sums: 2**(n-1) leaf terms, iterated in canonical order.
DEFAULT_FLOAT_GUARD = 36


@dataclass(frozen=True)
class IntervalFamily:
    """An ordered, pairwise-disjoint family of Stern-Brocot intervals."""

    level: int
    members: tuple[SBInterval, ...]
    tag: str  # "C" | "C-complement" | "T" | "even-intervals"

    def total_measure(self) -> Fraction:
        return sum((m.diameter for m in self.members), Fraction(0))


@dataclass(frozen=True)
class MeasureValue:
    """A measure in [0,1], exact when the method admits it."""

    approx: float
    method: str  # "exact" | "compensated" | "operator"
    exact: Fraction | None = None

    def __post_init__(self):
        if self.exact is not None:
            err = abs(Fraction(self.approx) - self.exact)
            if err > self.exact * Fraction(1, 2**50):
                raise DomainError("approx value drifted from its exact counterpart")


def _check(n: int, low: int, guard: int) -> None:
    if n < low:
        raise DomainError(f"level must be >= {low}, got {n}")
    if n > guard:
        raise LevelTooLargeError(n, guard)


def _walk(p: int, q: int, r: int, s: int, orient: int, depth: int,
          last: str | None) -> Iterator[tuple[int, int, int, int, str]]:
    """Yield the depth-`depth` descendants of [p/q, r/s] left to right.

    `orient` is +1 when the Moebius map sending [0,1] onto the interval is
    increasing.  Appending R flips the orientation (u1 is decreasing), so which
    geometric child carries which code letter depends on the current sign.
    """
    if depth == 0:
        yield p, q, r, s, last
        return
    mp, mq = p + r, q + s
    if orient == 1:
        yield from _walk(p, q, mp, mq, orient, depth - 1, "L")
        yield from _walk(mp, mq, r, s, -orient, depth - 1, "R")
    else:
        yield from _walk(p, q, mp, mq, -orient, depth - 1, "R")
        yield from _walk(mp, mq, r, s, orient, depth - 1, "L")


def _level_intervals_with_last(n: int) -> Iterator[tuple[int, int, int, int, str]]:
    return _walk(0, 1, 1, 1, 1, n, None)


def enumerate_sum_level(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> IntervalFamily:
    """The 2**(n-1) Stern-Brocot intervals of order n with Farey code ending in R."""
    _check(n, 1, guard)
    members = []
    for k, (p, q, r, s, last) in enumerate(_level_intervals_with_last(n), start=1):
        if last == "R":
            members.append(SBInterval(Fraction(p, q), Fraction(r, s), level=n, index=k))
    return IntervalFamily(level=n, members=tuple(members), tag="C")


def complement_family(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> IntervalFamily:
    """The order-n Stern-Brocot intervals outside the sum-level set (codes ending in L)."""
    _check(n, 1, guard)
    members = []
    for k, (p, q, r, s, last) in enumerate(_level_intervals_with_last(n), start=1):
        if last == "L":
            members.append(SBInterval(Fraction(p, q), Fraction(r, s), level=n, index=k))
    return IntervalFamily(level=n, members=tuple(members), tag="C-complement")


def even_interval_family(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[tuple[Fraction, Fraction]]:
    """Adjacent member pairs of the level-n family merged into the classical even intervals.

    Not Stern-Brocot intervals themselves (the merged endpoints are not
    unimodular neighbours), hence returned as plain endpoint pairs.
    """
    _check(n, 2, guard)
    fam = enumerate_sum_level(n, guard)
    merged = []
    for a, b in zip(fam.members[0::2], fam.members[1::2]):
        if a.right != b.left:
            raise DomainError("sum-level members did not pair into adjacent intervals")
        merged.append((a.left, b.right))
    return merged


def farey_codes(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[tuple[str, SBInterval]]:
    """All (Farey code, interval) pairs of order n, intervals in increasing order."""
    _check(n, 1, guard)
    out: list[tuple[str, SBInterval]] = []

    def rec(p, q, r, s, orient, code):
        if len(code) == n:
            out.append((code, SBInterval(Fraction(p, q), Fraction(r, s), level=n)))
            return
        mp, mq = p + r, q + s
        if orient == 1:
            rec(p, q, mp, mq, 1, code + "L")
            rec(mp, mq, r, s, -1, code + "R")
        else:
            rec(p, q, mp, mq, 1, code + "R")
            rec(mp, mq, r, s, -1, code + "L")

    rec(0, 1, 1, 1, 1, "")
    return out


def sb_codes(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[tuple[str, SBInterval]]:
    """All (Stern-Brocot code, interval) pairs of order n, in increasing order.

    Both generators are increasing maps, so code order is plain lexicographic
    with A < B and coincides with interval order.
    """
    _check(n, 1, guard)
    out: list[tuple[str, SBInterval]] = []

    def rec(p, q, r, s, code):
        if len(code) == n:
            out.append((code, SBInterval(Fraction(p, q), Fraction(r, s), level=n)))
            return
        mp, mq = p + r, q + s
        rec(p, q, mp, mq, code + "A")
        rec(mp, mq, r, s, code + "B")

    rec(0, 1, 1, 1, "")
    return out


def sum_level_farey_codes(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[str]:
    """Farey codes of the level-n family, in interval order."""
    _check(n, 1, guard)
    return [code for code, _ in farey_codes(n, guard) if code.endswith("R")]


def sum_level_sb_codes(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[str]:
    """Stern-Brocot codes of the level-n family: words whose last two letters differ."""
    _check(n, 1, guard)
    if n == 1:
        return ["B"]
    return [code for code, _ in sb_codes(n, guard) if code[-1] != code[-2]]


# ---------------------------------------------------------------------------
# Measures

def _rchild_sum(q0: int, q1: int, depth: int) -> mpq:
    # Denominator pairs in code order: the interval of code W has endpoint
    # denominators (q0, q1) = (den W(0), den W(1)); children are L:(q0, q0+q1)
    # and R:(q1, q0+q1), and the R-child diameter is 1/(q1*(q0+q1)).
    if depth == 0:
        return mpq(1, q1 * (q0 + q1))
    return _rchild_sum(q0, q0 + q1, depth - 1) + _rchild_sum(q1, q0 + q1, depth - 1)


def lambda_exact(n: int, guard: int = DEFAULT_EXACT_GUARD) -> MeasureValue:
    """Exact Lebesgue measure of the level-n sum-level set.

    Sums the R-child diameters over the depth-(n-1) Farey code tree.  The two
    depth-1 subtrees are mirror images with identical denominator pairs, so the
    sum is twice one subtree.
    """
    _check(n, 1, guard)
    if n == 1:
        total = mpq(1, 2)
    else:
        total = 2 * _rchild_sum(1, 2, n - 2)
    exact = Fraction(int(total.numerator), int(total.denominator))
    return MeasureValue(approx=float(exact), method="exact", exact=exact)


def _composition_sum(rem: int, q: int, q_prev: int) -> mpq:
    if rem == 0:
        return mpq(1, q * (q + q_prev))
    total = mpq(0)
    for a in range(1, rem + 1):
        total += _composition_sum(rem - a, a * q + q_prev, q)
    return total


def lambda_exact_by_compositions(n: int, guard: int = DEFAULT_EXACT_GUARD) -> Fraction:
    """Independent route to the same measure: cylinder diameters over compositions of n."""
    _check(n, 1, guard)
    total = _composition_sum(n, 1, 0)
    return Fraction(int(total.numerator), int(total.denominator))


@njit(cache=True)
def _compensated_rchild_sum(depth: int) -> float:  # pragma: no cover - compiled
    # Neumaier-compensated DFS over the full tree below the (1,2) node,
    # canonical order (L-child before R-child).  Deterministic by construction.
    cap = depth + 2
    st_q0 = np.empty(2 * cap, dtype=np.int64)
    st_q1 = np.empty(2 * cap, dtype=np.int64)
    st_d = np.empty(2 * cap, dtype=np.int64)
    top = 0
    st_q0[0], st_q1[0], st_d[0] = 1, 2, depth
    s = 0.0
    c = 0.0
    while top >= 0:
        q0 = st_q0[top]
        q1 = st_q1[top]
        d = st_d[top]
        top -= 1
        if d == 0:
            term = 1.0 / (q1 * (q0 + q1))
            t = s + term
            if abs(s) >= abs(term):
                c += (s - t) + term
            else:
                c += (term - t) + s
            s = t
        else:
            # push R first so L pops first
            top += 1
            st_q0[top], st_q1[top], st_d[top] = q1, q0 + q1, d - 1
            top += 1
            st_q0[top], st_q1[top], st_d[top] = q0, q0 + q1, d - 1
    return s + c


def lambda_compensated(n: int, guard: int = DEFAULT_FLOAT_GUARD) -> MeasureValue:
    """Same Farey-tree sum accumulated in compensated floating arithmetic."""
    _check(n, 1, guard)
    if n == 1:
        return MeasureValue(approx=0.5, method="compensated")
    return MeasureValue(approx=2.0 * _compensated_rchild_sum(n - 2), method="compensated")


def lambda_auto(n: int,
                exact_guard: int = DEFAULT_EXACT_GUARD,
                float_guard: int = DEFAULT_FLOAT_GUARD,
                grid: int | None = None) -> MeasureValue:
    """Pick the cheapest trustworthy method for the requested level."""
    if n <= exact_guard:
        return lambda_exact(n, exact_guard)
    if n <= float_guard:
        return lambda_compensated(n, float_guard)
    from .transfer import lambda_operator  # local import avoids a cycle
    return lambda_operator(n, M=grid if grid else 1 << 16)


def pullback_check(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> bool:
    """Exact set identity: the Farey-map preimage of level n equals level n+1."""
    _check(n, 1, guard)
    current = enumerate_sum_level(n, guard)
    expected = {(m.left, m.right) for m in enumerate_sum_level(n + 1, guard).members}
    preimages = set()
    for m in current.members:
        # u0(x) = x/(1+x) is increasing, u1(x) = 1/(1+x) is decreasing
        preimages.add((m.left / (1 + m.left), m.right / (1 + m.right)))
        preimages.add((1 / (1 + m.right), 1 / (1 + m.left)))
    return preimages == expected


def tail_cylinder_measure(word: CFWord, threshold: int) -> Fraction:
    """Exact measure of the points of a cylinder whose next digit is >= threshold.

    The union over a >= threshold of the extended cylinders telescopes to
    1/(q_k (threshold*q_k + q_{k-1})).
    """
    if threshold < 1:
        raise DomainError(f"threshold must be >= 1, got {threshold}")
    if not word.digits:
        raise DomainError("tail measure needs a non-empty word")
    q, q_prev = word.convergent_denominators()
    return Fraction(1, q * (threshold * q + q_prev))


def e_set_threshold(n: int, eps: float) -> int:
    """The integer digit threshold ceil(n * (log n)**eps)."""
    if n < 2:
        raise DomainError(f"threshold needs n >= 2 (log 1 = 0 degenerates), got {n}")
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    return math.ceil(n * math.log(n) ** eps)


def e_set_measure(n: int, eps: float, guard: int = DEFAULT_EXACT_GUARD) -> MeasureValue:
    """Exact measure of the level-n set with an oversized next digit.

    Sums, over all compositions (a_1, ..., a_k) of n, the tail measure of the
    continuation digit a_{k+1} >= ceil(n (log n)**eps).
    """
    _check(n, 2, guard)
    ell = e_set_threshold(n, eps)

    def rec(rem: int, q: int, q_prev: int) -> mpq:
        if rem == 0:
            return mpq(1, q * (ell * q + q_prev))
        total = mpq(0)
        for a in range(1, rem + 1):
            total += rec(rem - a, a * q + q_prev, q)
        return total

    total = rec(n, 1, 0)
    exact = Fraction(int(total.numerator), int(total.denominator))
    return MeasureValue(approx=float(exact), method="exact", exact=exact)
