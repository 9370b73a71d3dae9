"""Partition sums, pressure estimates, and the level-to-level sandwich."""

import math
from fractions import Fraction as F

import pytest

import sumlevels as sl
from sumlevels import pressure as pr
from sumlevels.errors import DomainError, LevelTooLargeError


@pytest.mark.parametrize("n", range(0, 9))
def test_level_denominators_match_tree(n):
    assert pr.level_denominators(n) == [f.denominator for f in sl.sb_level(n)]


def test_level_denominators_guard():
    with pytest.raises(LevelTooLargeError):
        pr.level_denominators(31)


def test_partition_sum_trivial_values():
    for n in (1, 5, 12):
        assert pr.partition_sum(n, 1.0, "all") == 0.0
    assert pr.partition_sum(5, 0.0, "all") == pytest.approx(5 * math.log(2))
    assert pr.partition_sum(3, 1.0, "C") == pytest.approx(math.log(3 / 10))


def test_partition_value_exact_is_the_measure_at_t_one():
    for n in range(1, 11):
        assert pr.partition_value_exact(n, 1, "C") == sl.lambda_exact(n).exact
        assert pr.partition_value_exact(n, 1, "all") == 1
        assert pr.partition_value_exact(n, 0, "all") == 2 ** n


def test_partition_value_negative_exponent():
    # t=-1 sums the denominator products themselves
    t = pr.level_denominators(2)
    assert pr.partition_value_exact(2, -1, "all") == sum(a * b for a, b in zip(t, t[1:]))


def test_even_family_merges_pairs():
    # level 2 has a single even interval [1/3, 2/3]
    assert pr.partition_value_exact(2, 1, "even") == F(1, 3)
    assert pr.partition_value_exact(3, 1, "even") == F(3, 10)


def test_pressure_estimate_exact_specials():
    for n in (1, 7, 20):
        assert pr.pressure_estimate(n, 1.0, "all") == 0.0
        assert pr.pressure_estimate(n, 0.0, "all") == math.log(2)
    assert pr.pressure_estimate(20, 0.0, "C") == pytest.approx(19 / 20 * math.log(2), rel=1e-15)


@pytest.mark.parametrize("t", [1.0, 1.5, 2.0])
@pytest.mark.parametrize("n", [2, 6, 10])
def test_pressure_nonpositive_beyond_one(n, t):
    assert pr.pressure_estimate(n, t, "all") <= 0.0


def test_pressure_probe_fractional_t():
    probe = pr.pressure_probe(4, 0.5, "all")
    exact = math.log(float(sum(F(1, p) ** F(1, 2)
                               for p in pr._family_products(4, "all", 30))))
    assert probe.log_sum == pytest.approx(exact, rel=1e-12)
    assert probe.estimate == pytest.approx(probe.log_sum / 4)


def test_family_validation():
    with pytest.raises(DomainError):
        pr.partition_sum(3, 1.0, "bogus")
    with pytest.raises(DomainError):
        pr.partition_sum(1, 1.0, "even")  # even intervals need n >= 2


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("t", [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0])
def test_sandwich_check_passes(n, t):
    report = pr.sandwich_check(n, t)
    assert report.passed
    assert not report.pair_violations
    idx, ratio = report.max_ratio_pair
    assert 1 <= ratio <= n + 1


@pytest.mark.parametrize("m", range(1, 16))
def test_adjacent_denominator_ratio_bound(m):
    t = pr.level_denominators(m)
    for a, b in zip(t, t[1:]):
        assert F(1, m + 1) <= F(a, b) <= m + 1


@pytest.mark.parametrize("n", range(2, 11))
@pytest.mark.parametrize("t", [-1.5, -0.5, 0.5, 1.5])
def test_partial_pressure_tracks_full_pressure(n, t):
    # the sandwich forces the two finite-level estimates together at rate log(n+1)/n
    gap = abs(n * pr.pressure_estimate(n, t, "C")
              - (n - 1) * pr.pressure_estimate(n - 1, t, "all"))
    assert gap <= abs(t) * math.log(n + 1) + 1e-9


@pytest.mark.parametrize("n", range(2, 9))
@pytest.mark.parametrize("t", [-2, -1, 1, 2])
def test_even_split_factor(n, t):
    # pairwise (x+y)^t vs x^t + y^t: two-sided factor 2^(t-1) for t >= 1;
    # for t < 0 only one side is uniform in the pair shape
    s_c = pr.partition_value_exact(n, t, "C")
    s_even = pr.partition_value_exact(n, t, "even")
    if t >= 1:
        assert s_c <= s_even <= F(2) ** (t - 1) * s_c
    else:
        assert s_even <= s_c


def test_sandwich_small_case_numbers():
    # level 2 against level 1: sums 1/3 and 1, factor 3 exactly at the boundary
    report = pr.sandwich_check(2, 1.0)
    assert report.passed
    assert pr.partition_value_exact(2, 1, "C") == F(1, 3)
    assert pr.partition_value_exact(1, 1, "all") == 1
    _, ratio = report.max_ratio_pair
    assert ratio == 3  # the (n+1) bound is attained, n alone would fail
