"""Seeded sampling, digit statistics, and exact clock-tail measures."""

import math
from fractions import Fraction as F

import pytest

import sumlevels as sl
from sumlevels import diophantine as dio
from sumlevels.errors import DomainError, InsufficientDepthError


def test_sampling_is_deterministic():
    a = dio.sample_digits(seed=42, count=50)
    b = dio.sample_digits(seed=42, count=50)
    assert a == b
    c = dio.sample_digits(seed=43, count=50)
    assert a != c


def test_sample_prefix_independent_of_count():
    # counter-mode splitting: sample i does not depend on how many follow
    long = dio.sample_digits(seed=7, count=20)
    short = dio.sample_digits(seed=7, count=5)
    assert long[:5] == short


def test_sample_digits_match_exact_expansion():
    for s in dio.sample_digits(seed=3, count=20):
        word = sl.cf_digits(s.value, max_k=s.valid_depth)
        assert word.digits[:s.valid_depth] == s.digits
        assert s.valid_depth == len(s.digits)


def test_sample_digits_validation():
    with pytest.raises(DomainError):
        dio.sample_digits(seed=1, count=0)
    with pytest.raises(DomainError):
        dio.sample_digits(seed=1, count=1, bits=32)


def test_theta_values():
    assert dio.theta((1,) * 10, 5) == 5
    assert dio.theta((3, 2, 1), 4) == 1
    assert dio.theta((7, 1), 5) == 0
    assert dio.theta((2, 3), 5) == 2
    with pytest.raises(InsufficientDepthError):
        dio.theta((1, 1), 5)


def test_theta_consistency_on_samples():
    for s in dio.sample_digits(seed=11, count=30):
        for n in (5, 10, 15):
            k = dio.theta(s.digits, n)
            assert sum(s.digits[:k]) <= n
            if k < len(s.digits):
                assert sum(s.digits[:k + 1]) > n


def test_hits_sum_level():
    assert dio.hits_sum_level((2, 3, 1), 5)
    assert not dio.hits_sum_level((2, 4), 5)
    assert dio.hits_sum_level((5, 9), 5)
    with pytest.raises(InsufficientDepthError):
        dio.hits_sum_level((1, 1), 5)


def test_in_e_set():
    # n=4, eps=1: threshold ceil(4*log 4) = 6
    assert dio.in_e_set((2, 2, 6), 4, 1.0)
    assert not dio.in_e_set((2, 2, 5), 4, 1.0)
    assert not dio.in_e_set((3, 2, 99), 4, 1.0)  # never hits the level


def test_in_theta_tail():
    # digits (3,2,...): theta_4 = 1, sum 3; eps=0.5 needs a_2 >= floor(1.5)+1 = 2
    assert dio.in_theta_tail((3, 2), 4, 0.5)
    # digits (3,1,...): theta_4 = 2 with sum 4, so a_3 >= floor(2)+1 = 3 decides
    assert dio.in_theta_tail((3, 1, 9), 4, 0.5)
    assert not dio.in_theta_tail((3, 1, 1, 5), 4, 0.5)
    assert not dio.in_theta_tail((9, 9), 4, 0.5)  # theta = 0 excluded


def test_stat_series_noble_pattern():
    s = dio.DigitSample(sample_id=0, numerator=1, bits=256,
                        digits=(1,) * 40, valid_depth=40)
    for rec in dio.stat_series(s, [5, 10, 20]):
        assert rec.khintchine < 0
        assert rec.algebraic < 0
        assert rec.theta == rec.n
        assert rec.ratio == pytest.approx(1.0 / rec.n)


def test_stat_series_constant_twos():
    s = dio.DigitSample(sample_id=0, numerator=1, bits=256,
                        digits=(2,) * 30, valid_depth=30)
    rec = dio.stat_series(s, [10])[0]
    assert rec.khintchine == pytest.approx(math.log(2 / 10) / math.log(math.log(10)))
    assert rec.theta == 5
    assert rec.ratio == pytest.approx(2 / 10)


def test_stat_series_theta_zero_has_no_ratio():
    s = dio.DigitSample(sample_id=0, numerator=1, bits=256,
                        digits=(7, 1, 1, 1, 1, 1, 1), valid_depth=7)
    rec = dio.stat_series(s, [5])[0]
    assert rec.theta == 0
    assert rec.ratio is None


def test_stat_series_depth_guard():
    s = dio.DigitSample(sample_id=0, numerator=1, bits=256,
                        digits=(1, 1, 1), valid_depth=3)
    with pytest.raises(InsufficientDepthError):
        dio.stat_series(s, [3])


def test_theta_tail_exact_hand_value():
    # n=2, eps=1.  Maximal prefixes: (1) with threshold max(2,2)=2 -> 1/3;
    # (2) and (1,1) with threshold max(3,1)=3 -> 1/14 each.
    assert dio.theta_tail_exact(2, 1.0) == F(1, 3) + F(1, 14) + F(1, 14)
    assert dio.theta_tail_exact(2, 1.0) == F(10, 21)


def test_theta_tail_decreases_in_eps():
    values = [dio.theta_tail_exact(6, eps) for eps in (0.25, 0.5, 1.0, 2.0, 4.0)]
    assert values == sorted(values, reverse=True)
    assert all(0 < v < 1 for v in values)


def test_theta_tail_matches_direct_enumeration():
    # independent oracle: walk all prefixes and their continuation digit directly
    n, eps = 5, 0.5
    eps_f = F(1, 2)

    def brute(digits, q, q_prev, total):
        acc = F(0)
        if total > 0:
            # continuation digit a makes (digits) the maximal prefix iff total + a > n
            for a in range(1, 400):
                if total + a > n and a > eps_f * total:
                    acc += sl.cf_cylinder_interval(sl.CFWord(tuple(digits) + (a,))).diameter
            # every digit >= 400 qualifies, so the telescoped tail finishes the union
            acc += sl.tail_cylinder_measure(sl.CFWord(tuple(digits)), 400)
        if total < n:
            for a in range(1, n - total + 1):
                acc += brute(digits + [a], a * q + q_prev, q, total + a)
        return acc

    assert dio.theta_tail_exact(n, eps) == brute([], 1, 0, 0)


def test_empirical_frequency_and_sigma():
    samples = dio.sample_digits(seed=5, count=200)
    freq = dio.empirical_frequency(samples, lambda d: dio.hits_sum_level(d, 1))
    assert 0.3 < freq < 0.7  # lambda(C_1) = 1/2, loose band at 200 samples
    assert dio.binomial_sigma(0.5, 100) == pytest.approx(0.05)
