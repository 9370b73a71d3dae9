"""Digit statistics of Lebesgue-random points and exact clock-tail measures.

Sampling draws dyadic rationals k/2^B from a counter-mode SHA-256 stream, so a
run is a pure function of (seed, count, B) no matter how it is scheduled.
Digits are extracted exactly; a digit index is trusted only while the cylinder
of the convergents is much wider than the dyadic spacing (q_k^2 <= 2^(B-8)),
which bounds the probability that the true uniform point falls in a different
cylinder.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .errors import DomainError, InsufficientDepthError, LevelTooLargeError
from .exact import CFWord
from .sumlevel import DEFAULT_EXACT_GUARD, tail_cylinder_measure, e_set_threshold

DEFAULT_BITS = 256


@dataclass(frozen=True)
class DigitSample:
    """One dyadic sample with its exactly extracted digit word."""

    sample_id: int
    numerator: int
    bits: int
    digits: tuple[int, ...]
    valid_depth: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.numerator, 2 ** self.bits)


@dataclass(frozen=True)
class StatRecord:
    n: int
    khintchine: float | None
    algebraic: float | None
    theta: int
    ratio: float | None


def _uniform_bits(seed: int, counter: int, bits: int) -> int:
    """`bits` uniform bits from a SHA-256 counter stream keyed by the seed."""
    out = 0
    produced = 0
    block = 0
    while produced < bits:
        digest = hashlib.sha256(f"{seed}:{counter}:{block}".encode()).digest()
        out = (out << 256) | int.from_bytes(digest, "big")
        produced += 256
        block += 1
    return out >> (produced - bits)


def _extract_digits(p: int, q: int, q_cap_sq: int) -> tuple[tuple[int, ...], int]:
    """Gauss-map digit extraction on p/q, stopping at the trust cutoff."""
    digits: list[int] = []
    qk, qk_prev = 1, 0
    while p:
        a, r = divmod(q, p)
        qk, qk_prev = a * qk + qk_prev, qk
        if qk * qk > q_cap_sq:
            break
        digits.append(a)
        p, q = r, p
    return tuple(digits), len(digits)


def sample_digits(seed: int, count: int, bits: int = DEFAULT_BITS) -> list[DigitSample]:
    """Deterministic uniform dyadic samples with exact digit words."""
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if bits < 64:
        raise DomainError(f"need at least 64 bits of resolution, got {bits}")
    cap = 2 ** (bits - 8)
    samples = []
    for i in range(count):
        num = _uniform_bits(seed, i, bits)
        digits, depth = _extract_digits(num, 2 ** bits, cap)
        samples.append(DigitSample(sample_id=i, numerator=num, bits=bits,
                                   digits=digits, valid_depth=depth))
    return samples


def theta(digits: CFWord | tuple[int, ...], n: int) -> int:
    """Largest k whose digit partial sum stays <= n (0 when a_1 already exceeds n)."""
    seq = digits.digits if isinstance(digits, CFWord) else tuple(digits)
    if n < 0:
        raise DomainError(f"theta needs n >= 0, got {n}")
    total = 0
    k = 0
    for a in seq:
        if total + a > n:
            return k
        total += a
        k += 1
    if total >= n:
        return k
    raise InsufficientDepthError(f"digit sum {total} of the available word is below n={n}")


def hits_sum_level(digits: tuple[int, ...], n: int) -> bool:
    """Whether some digit partial sum equals n exactly."""
    total = 0
    for a in digits:
        total += a
        if total >= n:
            return total == n
    raise InsufficientDepthError(f"digit sum {total} never reaches n={n}")


def in_e_set(digits: tuple[int, ...], n: int, eps: float) -> bool:
    """Whether the partial sum hits n and the next digit is >= the e-set threshold."""
    ell = e_set_threshold(n, eps)
    total = 0
    for i, a in enumerate(digits):
        total += a
        if total == n:
            if i + 1 >= len(digits):
                raise InsufficientDepthError("continuation digit beyond the trusted depth")
            return digits[i + 1] >= ell
        if total > n:
            return False
    raise InsufficientDepthError(f"digit sum {total} never reaches n={n}")


def in_theta_tail(digits: tuple[int, ...], n: int, eps: float) -> bool:
    """Whether the digit after the clock stop exceeds eps times the stopped sum.

    The strict inequality a/s > eps is realized on integers as
    a >= floor(eps*s) + 1, with eps taken at its exact binary value.
    """
    k = theta(digits, n)
    if k == 0:
        return False
    if k >= len(digits):
        raise InsufficientDepthError("clock continuation digit beyond the trusted depth")
    s = sum(digits[:k])
    bound = math.floor(Fraction(eps) * s) + 1
    return digits[k] >= bound


def stat_series(sample: DigitSample, n_grid: list[int]) -> list[StatRecord]:
    """Khintchine-type digit statistics at the requested indices.

    Entries whose logarithms would be taken of non-positive arguments are
    reported as absent (None) rather than computed.
    """
    digits = sample.digits
    records = []
    for n in n_grid:
        if n < 1 or n + 1 > sample.valid_depth:
            raise InsufficientDepthError(f"index {n} exceeds the trusted depth {sample.valid_depth}")
        kh = None
        if n >= 3:  # log log n must be positive
            kh = math.log(digits[n - 1] / n) / math.log(math.log(n))
        partial = sum(digits[:n])
        alg = None
        if partial >= 3:
            alg = math.log(digits[n] / partial) / math.log(math.log(partial))
        th = theta(digits, n)
        ratio = None
        if th > 0 and th < len(digits):
            ratio = digits[th] / sum(digits[:th])
        records.append(StatRecord(n=n, khintchine=kh, algebraic=alg, theta=th, ratio=ratio))
    return records


def theta_tail_exact(n: int, eps: float, guard: int = DEFAULT_EXACT_GUARD) -> Fraction:
    """Exact measure of the clock-tail event at level n.

    Enumerates every word (a_1, ..., a_k) with digit sum m <= n as the maximal
    prefix (the clock stops at k exactly when the next digit exceeds n - m) and
    adds the tail measure with threshold max(floor(eps*m) + 1, n - m + 1).
    """
    if n < 2:
        raise DomainError(f"theta tail needs n >= 2, got {n}")
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    if n > guard:
        raise LevelTooLargeError(n, guard)
    eps_exact = Fraction(eps)

    def rec(rem: int, m: int, q: int, q_prev: int) -> mpq:
        total = mpq(0)
        if m > 0:
            thr = max(math.floor(eps_exact * m) + 1, n - m + 1)
            total += mpq(1, q * (thr * q + q_prev))
        for a in range(1, rem + 1):
            total += rec(rem - a, m + a, a * q + q_prev, q)
        return total

    total = rec(n, 0, 1, 0)
    return Fraction(int(total.numerator), int(total.denominator))


def empirical_frequency(samples: list[DigitSample], predicate) -> float:
    """Fraction of samples satisfying a digit predicate."""
    hits = sum(1 for s in samples if predicate(s.digits))
    return hits / len(samples)


def binomial_sigma(p: float, count: int) -> float:
    return math.sqrt(p * (1.0 - p) / count)
