from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fountain_bfa.bfa import (BasisState, NoValidNStar, Verdict, decode_efficient,
                              decode_efficient_rows, decode_rows, decode_straightforward,
                              find_basis, find_basis_rows, format_bq, process_symbol, recover,
                              select_by_threshold, select_reliable, sort_by_reliability)
from fountain_bfa.channel import ReceivedSymbol, symbols_from_matrix
from fountain_bfa.gf2 import BitMatrix, BitVector, SingularSystem, rank, triangulate
from oracles import encode as oracle_encode, events, replay

from conftest import TOY_N, TOY_X

STRAIGHT_DISPLAY = ["1101 | 100", "0110 | 110", "0011 | 101", "---- | ---", "---- | ---"]
TRIANGULATED_DISPLAY = ["1011 | 100", "0110 | 110", "0011 | 011", "---- | ---", "---- | ---"]


def test_straightforward_worked_example(toy_symbols):
    res = decode_straightforward(toy_symbols)
    assert format_bq(res.state, 5).splitlines() == STRAIGHT_DISPLAY
    assert res.state.N == [1, 2, 2]
    assert res.basis == (1, 2, 3)
    assert set(res.selected) == {2, 3}
    assert res.verdict is Verdict.SUCCESS
    assert res.x_hat.to_array().tolist() == TOY_X
    assert res.basis_report == [(1, True, 1), (2, True, 2), (3, True, 2), (4, False, None), (5, False, None)]


def test_process_symbol_step_by_step(toy_symbols):
    st_ = BasisState(2, 2)
    for i in range(3):
        process_symbol(st_, toy_symbols[i], i + 1)
        st_.check_invariants()
    assert st_.r == 3 and st_.N == [0, 0, 0]
    process_symbol(st_, toy_symbols[3], 4)
    assert st_.N == [0, 1, 1]
    assert st_.lrs[4] == 0b110  # basis rows 2 and 3
    assert st_.combine(st_.lrs[4]) == toy_symbols[3].row_bits()
    with pytest.raises(ValueError):
        process_symbol(st_, ReceivedSymbol.from_string("101", 2), 5)


def test_first_symbol_becomes_basis():
    st_ = BasisState(3, 1)
    assert st_.absorb(0b0101, 1)
    assert st_.r == 1 and st_.N == [0]
    assert not st_.absorb(0, 2)
    assert st_.N == [0]


def test_triangulated_worked_example(toy_matrix):
    tri = triangulate(toy_matrix, 2)
    permuted = symbols_from_matrix(tri.apply(toy_matrix), TOY_N)
    state = find_basis(permuted)
    assert format_bq(state, 5).splitlines() == TRIANGULATED_DISPLAY
    res = decode_efficient(symbols_from_matrix(toy_matrix, TOY_N))
    assert format_bq(res.state, 5).splitlines() == TRIANGULATED_DISPLAY
    assert res.verdict is Verdict.SUCCESS
    # permuted rows 1 and 3 are original rows 2 and 3
    assert set(res.selected) == {2, 3}
    assert res.x_hat.to_array().tolist() == TOY_X


def test_copies_of_one_row():
    sym = ReceivedSymbol.from_string("0110", 2)
    st_ = find_basis([sym] * 7)
    assert st_.r == 1 and st_.N == [6]
    assert decode_straightforward([sym] * 7).verdict is not Verdict.SUCCESS


def test_select_by_threshold_examples():
    assert select_by_threshold([1, 2, 2], 2) == (2, 3)
    with pytest.raises(NoValidNStar):
        select_by_threshold([2, 2, 1], 1)
    with pytest.raises(NoValidNStar):
        select_by_threshold([3, 1, 0], 4)
    assert select_by_threshold([0, 0], 2) == (1, 2)
    assert select_by_threshold([5, 0, 3, 3], 3) == (1, 3, 4)


@given(st.lists(st.integers(0, 6), min_size=1, max_size=10), st.integers(1, 10))
def test_threshold_selection_property(counts, n):
    try:
        picked = select_by_threshold(counts, n)
    except NoValidNStar:
        ranked = sorted(counts, reverse=True)
        assert len(counts) < n or (len(counts) > n and ranked[n - 1] == ranked[n])
        return
    assert len(picked) == n
    chosen = [counts[j - 1] for j in picked]
    rest = [c for j, c in enumerate(counts, 1) if j not in picked]
    assert not rest or min(chosen) > max(rest)


def test_select_reliable_uses_state(toy_symbols):
    assert select_reliable(find_basis(toy_symbols), 2) == (2, 3)


def test_recover_examples(toy_symbols):
    assert recover(toy_symbols[1:3]).to_array().tolist() == TOY_X
    units = [ReceivedSymbol(BitVector(1 << k, 3), BitVector(v, 2)) for k, v in enumerate([1, 2, 3])]
    assert recover(units).rows == [1, 2, 3]
    with pytest.raises(SingularSystem):
        recover([toy_symbols[1], toy_symbols[1]])
    with pytest.raises(ValueError):
        recover(toy_symbols[:3])


def test_empty_and_rank_deficient_inputs():
    assert decode_rows([], 2, 2).verdict is Verdict.RANK_DEFICIENT
    assert decode_efficient([], 2, 2).verdict is Verdict.RANK_DEFICIENT
    syms = [ReceivedSymbol.from_string("1000", 2)]
    assert decode_straightforward(syms).verdict is Verdict.RANK_DEFICIENT


def _random_rows(rng, m, n, l, density=0.5):
    return [int(v) for v in (rng.random((m, n + l)) < density) @ (1 << np.arange(n + l, dtype=object))]


@given(st.integers(1, 12), st.integers(1, 4), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_basis_bookkeeping_matches_replay(m, n, l, seed):
    rng = np.random.default_rng(seed)
    rows = _random_rows(rng, m, n, l)
    state = BasisState(n, l)
    for i, r in enumerate(rows, 1):
        state.absorb(r, i)
        state.check_invariants()
    assert state.r == rank(BitMatrix(rows, n + l))
    basis, counts, lrs = replay(rows, [True] * m)
    assert [i - 1 for i in state.basis_index] == basis
    assert state.N == counts
    assert {i - 1: q for i, q in state.lrs.items()} == lrs
    assert len(state.lrs) == m - state.r
    # basis rows form a prefix of the processed order
    assert sorted(state.order[:state.r]) == sorted(state.basis_index)


@given(st.integers(2, 14), st.integers(1, 6), st.integers(1, 4), st.integers(0, 2 ** 32 - 1))
def test_identity_prefix_after_triangulation(m, n, l, seed):
    rng = np.random.default_rng(seed)
    rows = _random_rows(rng, m, n, l, density=0.3)
    M = BitMatrix(rows, n + l)
    tri = triangulate(M, l)
    P = tri.apply(M)
    state = BasisState(n, l)
    for i, r in enumerate(P.rows, 1):
        state.absorb(r, i)
        assert state.identity_prefix_holds(tri.gamma)


def _source(rng, n, l):
    return [int(v) for v in rng.integers(0, 2 ** l, n)]


@pytest.mark.parametrize("decode", [decode_rows, decode_efficient_rows])
def test_noiseless_success_iff_full_rank(decode):
    rng = np.random.default_rng(99)
    for _ in range(400):
        n, l = int(rng.integers(1, 7)), int(rng.integers(1, 5))
        m = int(rng.integers(1, 12))
        x = _source(rng, n, l)
        a = [int(v) for v in rng.integers(0, 2 ** n, m)]
        rows = [ai | (oracle_encode(x, ai) << n) for ai in a]
        res = decode(rows, n, l)
        full = rank(BitMatrix(a, n)) == n
        assert res.success == full
        if full:
            assert res.x_hat.rows == x


def test_success_iff_events_E_and_F():
    # every pattern of corrupted rows for a handful of small instances
    rng = np.random.default_rng(7)
    n, l = 2, 2
    checked = 0
    for _ in range(60):
        m = int(rng.integers(3, 8))
        x = _source(rng, n, l)
        a = [int(v) for v in rng.integers(0, 2 ** n, m)]
        for bad in itertools.product([False, True], repeat=m):
            pats = [int(rng.integers(1, 2 ** l)) if b else 0 for b in bad]
            rows = [ai | ((oracle_encode(x, ai) ^ s) << n) for ai, s in zip(a, pats)]
            res = decode_rows(rows, n, l)
            ev = events(rows, a, pats, n)
            ok = res.success and res.x_hat.rows == x
            assert ok == (ev["E"] and ev["F"])
            checked += 1
    assert checked > 1000


def test_efficient_matches_straightforward_on_identity_triangulation():
    rows = BitMatrix.from_strings(["1000", "0101", "1110", "0111"])
    assert triangulate(rows, 2).is_identity()
    syms = symbols_from_matrix(rows, 2)
    a, b = decode_straightforward(syms), decode_efficient(syms)
    assert a.verdict == b.verdict and a.x_hat == b.x_hat and a.state.N == b.state.N


@given(st.integers(1, 10), st.integers(1, 4), st.integers(1, 3), st.integers(0, 2 ** 32 - 1))
def test_efficient_returns_caller_coordinates(m, n, l, seed):
    rng = np.random.default_rng(seed)
    x = _source(rng, n, l)
    a = [int(v) for v in rng.integers(0, 2 ** n, m)]
    rows = [ai | (oracle_encode(x, ai) << n) for ai in a]
    res = decode_efficient_rows(rows, n, l)
    if res.success:
        assert res.x_hat.rows == x
    assert sorted(i for i, *_ in res.basis_report) == list(range(1, m + 1))
    assert all(1 <= i <= m for i in res.selected)


def test_sort_by_reliability():
    mk = lambda r: ReceivedSymbol.from_string("101", 2, r)  # noqa: E731
    syms = [mk(1.0), mk(5.0), mk(3.0)]
    assert [s.reliability for s in sort_by_reliability(syms)] == [5.0, 3.0, 1.0]
    same = [mk(2.0), mk(2.0), mk(2.0)]
    assert all(a is b for a, b in zip(sort_by_reliability(same), same))
    plain = [ReceivedSymbol.from_string("101", 2) for _ in range(3)]
    assert all(a is b for a, b in zip(sort_by_reliability(plain), plain))
    with pytest.raises(ValueError):
        sort_by_reliability([mk(1.0), ReceivedSymbol.from_string("101", 2)])
