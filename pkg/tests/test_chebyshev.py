import math

import mpmath
import numpy as np
import pytest

from dqc1pf.chebyshev import (
    assemble_trace,
    bessel_coefficients,
    bessel_i,
    chebyshev_T,
    chebyshev_table,
    make_budget,
    sample_budget,
    truncation_order,
)

# mpmath.besseli at 40 digits
BESSEL_AT_ONE = {
    0: 1.266065877752008335598244625214717537608,
    1: 0.5651591039924850272076960276098633073289,
    2: 0.1357476697670382811828525699949909229499,
    3: 0.02216842492433190247628574762989961552942,
}


def test_bessel_at_zero():
    assert bessel_i(0, 0.0) == 1.0
    assert bessel_i(3, 0.0) == 0.0


@pytest.mark.parametrize("k,expected", sorted(BESSEL_AT_ONE.items()))
def test_bessel_frozen_values(k, expected):
    assert bessel_i(k, 1.0) == pytest.approx(expected, rel=1e-15)


@pytest.mark.parametrize("beta", [0.01, 0.25, 0.5, 1.0, 1.7, 2.0, 4.0])
@pytest.mark.parametrize("k", [0, 1, 2, 5, 9, 15, 25])
def test_bessel_against_mpmath(k, beta):
    expected = float(mpmath.besseli(k, beta))
    assert bessel_i(k, beta) == pytest.approx(expected, rel=2e-15, abs=1e-300)


@pytest.mark.parametrize("beta", [0.25, 0.5, 1.0, 2.0])
@pytest.mark.parametrize("k", range(1, 13))
def test_bessel_recurrence(k, beta):
    lhs = bessel_i(k - 1, beta) - bessel_i(k + 1, beta)
    rhs = 2 * k / beta * bessel_i(k, beta)
    assert lhs == pytest.approx(rhs, rel=1e-12)


@pytest.mark.parametrize("beta", [0.1, 0.5, 1.0])
def test_bessel_tail_decay(beta):
    for K in range(20, 30):
        assert bessel_i(K, beta) < 1e-12


def test_bessel_huge_order_underflows_cleanly():
    assert bessel_i(400, 0.5) == 0.0


def test_bessel_coefficients_monotone():
    for beta in (0.3, 1.0, 2.0):
        c = bessel_coefficients(12, beta)
        assert c[0] >= 1.0
        assert all(v > 0 for v in c)
        assert all(a >= b for a, b in zip(c, c[1:]))


def test_chebyshev_examples():
    assert chebyshev_T(0, 0.3) == 1.0
    assert chebyshev_T(1, -0.7) == -0.7
    assert chebyshev_T(2, -1.0) == 1.0
    assert chebyshev_T(3, 0.5) == pytest.approx(-1.0, abs=1e-15)


def test_chebyshev_clamps_and_rejects():
    assert chebyshev_T(5, 1.0 + 5e-13) == 1.0
    with pytest.raises(ValueError):
        chebyshev_T(2, 1.1)


def test_chebyshev_matches_cosine():
    thetas = np.linspace(0.0, math.pi, 37)
    for k in range(33):
        for t in thetas:
            assert chebyshev_T(k, math.cos(t)) == pytest.approx(math.cos(k * t), abs=1e-10)


def test_chebyshev_endpoints_exact():
    for k in range(40):
        assert chebyshev_T(k, 1.0) == 1.0
        assert chebyshev_T(k, -1.0) == (-1.0) ** k


def test_chebyshev_table_matches_scalar(rng):
    x = rng.uniform(-1, 1, 50)
    table = chebyshev_table(8, x)
    for k in range(9):
        assert np.allclose(table[k], [chebyshev_T(k, v) for v in x], atol=1e-14)


@pytest.mark.parametrize("m,expected", [(2, 10), (3, 11), (4, 12)])
def test_truncation_order_table_mode(m, expected):
    assert truncation_order(m, 0.1, "table") == expected
    assert truncation_order(m, 0.1, "ceil") == expected + 1


def test_truncation_order_ceil_examples():
    assert truncation_order(2, 0.1, "ceil") == 11
    assert truncation_order(0, 1 - 1e-9, "ceil") == 5


@pytest.mark.parametrize(
    "n,expected", [(2, 10_763_353), (3, 172_213_657), (4, 2_755_418_514)]
)
def test_sample_budget_reproduces_table(n, expected):
    q = sample_budget(n, n + 1, 3, 0.1, 0.1, "base10")
    assert isinstance(q, int)
    assert abs(q - expected) / expected < 1e-4


def test_sample_budget_natural_log():
    q10 = sample_budget(2, 3, 3, 0.1, 0.1, "base10")
    qe = sample_budget(2, 3, 3, 0.1, 0.1, "natural")
    assert qe == pytest.approx(2.478e7, rel=1e-3)
    assert qe / q10 == pytest.approx(math.log(60) / math.log10(60), rel=1e-6)


def test_sample_budget_is_exact_big_integer():
    q = sample_budget(600, 601, 3, 0.1, 0.1)
    assert q > 2**63
    mpmath.mp.dps = 50
    expected = mpmath.mpf(2) ** 2403 * mpmath.log(60) / (mpmath.mpf("0.1") / (2 * mpmath.e)) ** 2
    assert abs(mpmath.mpf(q) / expected - 1) < 1e-14


def test_assemble_trace_examples():
    budget = make_budget(1, 1, 1.0, K=3, Q=1)
    assert assemble_trace(1, budget, [-1.0, 0.0, -1.0]) == pytest.approx(3.7067868133376505, rel=1e-15)

    empty = make_budget(3, 1, 0.7, K=0, Q=1)
    assert assemble_trace(3, empty, []) == bessel_i(0, 0.7) * 8

    cold = make_budget(2, 1, 0.0, K=4, Q=1)
    assert assemble_trace(2, cold, [3.0, -2.0, 9.0, 1.0]) == 4.0

    with pytest.raises(ValueError):
        assemble_trace(1, budget, [1.0])


def test_make_budget_defaults():
    b = make_budget(3, 5, 1.0)
    assert b.K == truncation_order(5, 0.1, "ceil")
    assert b.Q == sample_budget(3, 6, b.K, 0.1, 0.1, "natural")
    assert len(b.bessel) == b.K + 1
