from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fountain_bfa import bounds as B
from oracles import brute_rank_prob, enumerate_events


def prk_product(m, n):
    return math.prod(1 - 2.0 ** (k - m) for k in range(n))


@pytest.mark.parametrize("m,n", [(1, 1), (2, 1), (2, 2), (3, 2), (3, 3), (4, 2), (4, 3)])
def test_rank_probabilities_against_enumeration(m, n):
    assert B.p_rk(m, n) == pytest.approx(brute_rank_prob(m, n), abs=1e-14)
    assert B.p_rk_star(m, n) == pytest.approx(brute_rank_prob(m, n, nonzero_cols=True), abs=1e-14)


@given(st.integers(1, 400), st.integers(0, 400))
def test_rank_probability_product_form(m, n):
    n = min(n, m)
    assert B.p_rk(m, n) == pytest.approx(prk_product(m, n), rel=1e-12, abs=1e-300)
    assert B.p_rk(m, n) >= 1 - 2.0 ** (n - m) - 1e-12
    # conditioning on non-zero columns removes a factor (1 - 2^-m) per column
    assert B.p_rk_star(m, n) == pytest.approx(B.p_rk(m, n) / (1 - 2.0 ** -m) ** n, rel=1e-12)


def test_nonzero_column_ratio_is_single_factor_only_for_one_column():
    for m in range(1, 10):
        assert B.p_rk_star(m, 1) == pytest.approx(B.p_rk(m, 1) * 2 ** m / (2 ** m - 1), rel=1e-14)
    assert B.p_rk_star(2, 2) == pytest.approx(2 / 3)
    assert B.p_rk(2, 2) * 4 / 3 == pytest.approx(0.5)


def test_rank_tables_domain():
    with pytest.raises(ValueError):
        B.p_rk(3, 4)
    assert B.p_rk(5, 0) == 1.0 and B.p_rk_star(0, 0) == 1.0


@pytest.mark.parametrize("n,l,m", [(1, 1, 2), (1, 2, 3), (2, 1, 3), (2, 2, 3)])
@pytest.mark.parametrize("p0", [0.6, 0.95])
def test_exact_values_against_enumeration(p0, n, l, m):
    ref = enumerate_events(p0, n, l, m)
    assert B.p_E(p0, n, l, m) == pytest.approx(ref["E"], abs=1e-13)
    assert B.p_G(p0, n, l, m) == pytest.approx(ref["G"], abs=1e-13)
    assert B.p_E1_E3(p0, n, l, m) == pytest.approx(ref["E1E3"], abs=1e-13)


def test_enumeration_does_not_depend_on_source():
    a = enumerate_events(0.8, 2, 1, 3)
    b = enumerate_events(0.8, 2, 1, 3, x_rows=[1, 0])
    for k in ("E", "G", "E1E3"):
        assert a[k] == pytest.approx(b[k], abs=1e-14)


def test_noiseless_p_E_is_rank_probability():
    for n, l, m in [(3, 2, 3), (5, 5, 9), (10, 4, 30)]:
        assert B.p_E(1.0, n, l, m) == pytest.approx(B.p_rk(m, n), rel=1e-12)
        assert B.p_E1_E3(1.0, n, l, m) == pytest.approx(B.p_rk(m, n), rel=1e-12)


@pytest.mark.parametrize("p0", [0.7, 0.95])
def test_p_E_non_decreasing_in_m(p0):
    vals = [B.p_E(p0, 6, 5, m) for m in range(0, 40)]
    assert all(b >= a - 1e-15 for a, b in zip(vals, vals[1:]))
    assert vals[0] == 0.0


def test_state_tables_mass():
    # paths on which incorrect basis rows get dependent patterns cannot
    # reach E, so the table is only a sub-distribution when p0 < 1
    T = B.p_E_table(0.8, 4, 3, 9)
    assert np.all(T >= 0) and T.sum() < 1
    assert B.p_E_table(1.0, 4, 3, 9).sum() == pytest.approx(1.0, abs=1e-12)
    T = B.p_G_table(4, 9)
    assert T.sum() == pytest.approx(1.0, abs=1e-12)


def test_hoeffding_window_and_exact_ceiling():
    assert B.n_of_eps(0.5, 10, 0.1) == 4
    # (0.7 - 0.1) * 10 is not exactly 6 in binary, the ceiling follows the true value
    assert B.n_of_eps(0.7, 10, 0.1) == math.ceil((B.Fraction(0.7) - B.Fraction(0.1)) * 10)
    with pytest.raises(B.NotApplicable):
        B.p_E_hoeffding(0.9, 10, 10, 11, 0.05)
    with pytest.raises(B.NotApplicable):
        B.p_E_hoeffding(0.9, 10, 10, 40, 0.95)
    v, eps = B.best_p_E_hoeffding(0.9, 10, 10, 30)
    assert 0 < v < B.p_E(0.9, 10, 10, 30) and 0 < eps < 0.9


def test_h_hat_is_real_maximiser():
    for n in (1, 2, 5, 20, 100):
        for i in range(n + 1, n + 40):
            hh = B.h_hat(n, i)
            f = lambda h: (1 - 2.0 ** (n - i + h)) * (1 - 2.0 ** -h) ** n  # noqa: E731
            grid = np.linspace(1e-6, i - n - 1e-9, 4001)
            assert f(hh) >= max(f(h) for h in grid) - 1e-9
            # best_h sees only floor/ceil of h_hat; it matches a full integer scan
            best = max(range(0, i - n + 1), key=lambda h: B.h_factor(n, i, h))
            assert B.best_h(n, i)[1] == pytest.approx(B.h_factor(n, i, best), abs=1e-15)


def test_h_hat_large_arguments_finite():
    assert math.isfinite(B.h_hat(1000, 2200))
    assert B.h_factor(5, 10, 0) == 0.0 and B.h_factor(5, 10, 5) == 0.0


def test_attendance_probabilities():
    pc, pe = B.attendance_probs(0.8, 3, 3, 5)
    assert pc == 0.5
    num = 0.2 * 2 / 7
    den = 0.8 + 0.2 * 3 / 7
    assert pe == pytest.approx(num / den, rel=1e-14)
    assert pe == pytest.approx(0.0645161290, rel=1e-8)
    assert B.attendance_probs(0.8, 3, 3, 3) == (0.5, 0.0)
    with pytest.raises(ValueError):
        B.attendance_probs(0.8, 3, 3, 7)


def test_attendance_gap_for_large_l():
    # exponents only: no 2^l is formed
    pc, pe = B.attendance_probs(0.9, 1000, 5000, 5000)
    assert pc == 0.5 and 0 <= pe < pc


def test_all_bounds_row():
    row = B.all_bounds(0.9, 4, 4, 6)
    assert tuple(row) == B.BOUND_COLUMNS
    assert row["p_E_hoeffding"] is not None
    row = B.all_bounds(0.9, 4, 4, 4)
    assert row["p_E_hoeffding"] is None and row["p_G_hoeffding"] is None


def test_input_validation():
    for args in [(0.0, 2, 2, 3), (1.1, 2, 2, 3), (0.9, 0, 2, 3), (0.9, 2, 0, 3), (0.9, 2, 2, -1)]:
        with pytest.raises(ValueError):
            B.p_E(*args)
    with pytest.raises(ValueError):
        B.BoundInputs(0.9, 2, 2, 3, epsilon=0.95)
