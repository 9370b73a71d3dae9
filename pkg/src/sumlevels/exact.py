"""Exact rational kernel: Stern-Brocot levels, binary codings, and the two interval maps.

Everything in this module is computed with arbitrary-precision rationals
(`fractions.Fraction`); no floating point enters any value returned here.
Binary codes act on [0,1] as compositions of Moebius maps, tracked as integer
2x2 matrices so endpoints stay exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, LevelTooLargeError, UntranslatableCodeError

#: A rational number in lowest terms with positive denominator.
Rational = Fraction

#: Levels above this raise LevelTooLargeError unless the caller passes a
#: larger guard explicitly (2**30 intervals is the default memory ceiling).
DEFAULT_LEVEL_GUARD = 30

ZERO = Fraction(0)
ONE = Fraction(1)
HALF = Fraction(1, 2)


def _check_level(n: int, guard: int) -> None:
    if n < 0:
        raise DomainError(f"level must be non-negative, got {n}")
    if n > guard:
        raise LevelTooLargeError(n, guard)


@dataclass(frozen=True)
class SBInterval:
    """A Stern-Brocot interval [s/t, s'/t'] between adjacent tree fractions.

    Adjacency is enforced: s'*t - s*t' == 1, which makes the diameter exactly
    1/(t*t').
    """

    left: Fraction
    right: Fraction
    level: int
    index: int | None = None  # 1-based position within its level, when known

    def __post_init__(self):
        if not (ZERO <= self.left < self.right <= ONE):
            raise DomainError(f"endpoints [{self.left}, {self.right}] are not ordered in [0,1]")
        det = (self.right.numerator * self.left.denominator
               - self.left.numerator * self.right.denominator)
        if det != 1:
            raise DomainError(f"endpoints {self.left}, {self.right} are not unimodular neighbours")

    @property
    def diameter(self) -> Fraction:
        return Fraction(1, self.left.denominator * self.right.denominator)

    def mediant(self) -> Fraction:
        return Fraction(self.left.numerator + self.right.numerator,
                        self.left.denominator + self.right.denominator)

    def contains(self, x: Fraction) -> bool:
        return self.left <= x <= self.right


@dataclass(frozen=True)
class CFWord:
    """A finite continued-fraction digit word (a_1, ..., a_k), all digits >= 1."""

    digits: tuple[int, ...]

    def __post_init__(self):
        if any(a < 1 for a in self.digits):
            raise DomainError(f"continued-fraction digits must be >= 1, got {self.digits}")

    def __len__(self) -> int:
        return len(self.digits)

    def convergent_denominators(self) -> tuple[int, int]:
        """Return (q_k, q_{k-1}) for the word, with q_0 = 1 and q_{-1} = 0."""
        q, q_prev = 1, 0
        for a in self.digits:
            q, q_prev = a * q + q_prev, q
        return q, q_prev

    def convergents(self) -> tuple[int, int, int, int]:
        """Return (p_k, q_k, p_{k-1}, q_{k-1})."""
        p, p_prev = 0, 1
        q, q_prev = 1, 0
        for a in self.digits:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
        return p, q, p_prev, q_prev

    def value(self) -> Fraction:
        p, q, _, _ = self.convergents()
        return Fraction(p, q)


# Moebius maps (a*x + b) / (c*x + d) as integer matrices (a, b, c, d).
# A, B generate the Stern-Brocot coding; L, R the Farey (inverse-branch) coding.
_LETTER_MAPS = {
    "A": (1, 0, 1, 1),   # x / (1+x)
    "B": (0, 1, -1, 2),  # 1 / (2-x)
    "L": (1, 0, 1, 1),   # u0: x / (1+x)
    "R": (0, 1, 1, 1),   # u1: 1 / (1+x)
}

_SB_ALPHABET = frozenset("AB")
_FAREY_ALPHABET = frozenset("LR")


@dataclass(frozen=True)
class BinaryCode:
    """A word over {A,B} (Stern-Brocot coding) or {L,R} (Farey coding)."""

    letters: str

    def __post_init__(self):
        if not self.letters:
            raise DomainError("binary codes must be non-empty")
        used = set(self.letters)
        if not (used <= _SB_ALPHABET or used <= _FAREY_ALPHABET):
            raise DomainError(f"code {self.letters!r} mixes alphabets")

    @property
    def alphabet(self) -> str:
        return "AB" if set(self.letters) <= _SB_ALPHABET else "LR"

    def __len__(self) -> int:
        return len(self.letters)


def mediant(a: Fraction, b: Fraction) -> Fraction:
    return Fraction(a.numerator + b.numerator, a.denominator + b.denominator)


def sb_level(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[Fraction]:
    """The n-th Stern-Brocot sequence restricted to [0,1]: 2**n + 1 fractions.

    Level n+1 copies level n into the odd positions and inserts the mediants
    of neighbours into the even positions.
    """
    _check_level(n, guard)
    level = [ZERO, ONE]
    for _ in range(n):
        nxt = []
        for a, b in zip(level, level[1:]):
            nxt.append(a)
            nxt.append(mediant(a, b))
        nxt.append(level[-1])
        level = nxt
    return level


def sb_intervals(n: int, guard: int = DEFAULT_LEVEL_GUARD) -> list[SBInterval]:
    """The 2**n Stern-Brocot intervals of order n, in increasing order."""
    fractions = sb_level(n, guard)
    return [SBInterval(a, b, level=n, index=k)
            for k, (a, b) in enumerate(zip(fractions, fractions[1:]), start=1)]


def _compose(letters: str) -> tuple[int, int, int, int]:
    a, b, c, d = 1, 0, 0, 1
    for letter in letters:
        e, f, g, h = _LETTER_MAPS[letter]
        a, b, c, d = a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h
    return a, b, c, d


def apply_code(code: BinaryCode) -> SBInterval:
    """Image of [0,1] under the code, first letter applied outermost.

    The endpoints are the images of 0 and 1; they are returned sorted since an
    odd number of orientation-reversing letters flips them.
    """
    a, b, c, d = _compose(code.letters)
    e0 = Fraction(b, d)
    e1 = Fraction(a + b, c + d)
    lo, hi = (e0, e1) if e0 < e1 else (e1, e0)
    return SBInterval(lo, hi, level=len(code))


def _runs(letters: str) -> list[tuple[str, int]]:
    runs: list[tuple[str, int]] = []
    for ch in letters:
        if runs and runs[-1][0] == ch:
            runs[-1] = (ch, runs[-1][1] + 1)
        else:
            runs.append((ch, 1))
    return runs


def code_to_cylinder(code: BinaryCode) -> CFWord:
    """Translate a full-cylinder code into its continued-fraction word.

    Farey codes must end in R (L^{a1-1} R L^{a2-1} R ... L^{ak-1} R).  SB codes
    must end in a letter change; pure powers A^k and B^k cover [0, 1/(k+1)] and
    [k/(k+1), 1], which are not cylinders -- except the single letter B, whose
    interval [1/2, 1] happens to be the cylinder of the word (1).
    """
    letters = code.letters
    if code.alphabet == "LR":
        if letters[-1] != "R":
            raise UntranslatableCodeError(f"Farey code {letters!r} does not end in R")
        digits = []
        pending = 0
        for ch in letters:
            if ch == "L":
                pending += 1
            else:
                digits.append(pending + 1)
                pending = 0
        return CFWord(tuple(digits))

    runs = _runs(letters)
    if len(runs) == 1:
        if letters == "B":
            return CFWord((1,))
        raise UntranslatableCodeError(f"SB code {letters!r} is a pure power, not a cylinder")
    if runs[-1][1] != 1:
        raise UntranslatableCodeError(f"SB code {letters!r} does not end in a letter change")
    counts = [c for _, c in runs[:-1]]
    if letters[0] == "A":
        return CFWord((counts[0] + 1, *counts[1:]))
    return CFWord((1, *counts))


def cf_cylinder_interval(word: CFWord) -> SBInterval:
    """The cylinder of all x whose expansion starts with the given digits.

    Endpoints are p_k/q_k and (p_k + p_{k-1})/(q_k + q_{k-1}); the diameter is
    1/(q_k (q_k + q_{k-1})).  As a Stern-Brocot interval its order is the digit
    sum of the word.
    """
    if not word.digits:
        raise DomainError("cylinder words must be non-empty")
    p, q, p_prev, q_prev = word.convergents()
    e0 = Fraction(p, q)
    e1 = Fraction(p + p_prev, q + q_prev)
    lo, hi = (e0, e1) if e0 < e1 else (e1, e0)
    return SBInterval(lo, hi, level=sum(word.digits))


def farey_map(x: Fraction) -> Fraction:
    """T(x) = x/(1-x) on [0, 1/2], (1-x)/x on (1/2, 1]."""
    x = Fraction(x)
    if not (ZERO <= x <= ONE):
        raise DomainError(f"farey_map requires x in [0,1], got {x}")
    if x <= HALF:
        return x / (1 - x)
    return (1 - x) / x


def gauss_map(x: Fraction) -> Fraction:
    """g(x) = 1/x mod 1, for x in (0, 1]."""
    x = Fraction(x)
    if not (ZERO <= x <= ONE):
        raise DomainError(f"gauss_map requires x in [0,1], got {x}")
    if x == 0:
        raise DomainError("gauss_map is undefined at 0 (division by zero)")
    inv = 1 / x
    return inv - (inv.numerator // inv.denominator)


def cf_digits(x: Fraction, max_k: int | None = None) -> CFWord:
    """First digits of the regular continued-fraction expansion of a rational.

    The terminating expansion is canonical: its last digit is >= 2 whenever the
    word is longer than one digit (the Euclidean algorithm produces this form
    directly).
    """
    x = Fraction(x)
    if not (ZERO < x < ONE):
        raise DomainError(f"cf_digits requires x in (0,1), got {x}")
    p, q = x.numerator, x.denominator
    digits: list[int] = []
    while p:
        if max_k is not None and len(digits) >= max_k:
            break
        a, r = divmod(q, p)
        digits.append(a)
        p, q = r, p
    return CFWord(tuple(digits))
