"""Basis-finding decoder for fountain codes with erroneous received symbols.

The decoder walks the received rows ``(a_i, y_i)`` in order and keeps

* ``B``: one reduced row per pivot column (``B[t]`` has leading index t),
* ``Q``: for each ``B[t]`` the set of basis rows whose XOR gives it,
* ``N``: how many linear representations of non-basis rows each basis
  row takes part in.

Basis rows that take part in the most representations are treated as the
most reliable; the ``n`` of them picked by a unique threshold are solved for
the source symbols.  The efficient variant first permutes ``(A, y)`` into a
lower-triangular-plus-inactive layout so most eliminations stay sparse.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

from .channel import ReceivedSymbol
from .gf2 import BitMatrix, SingularSystem, Triangulation, iter_bits, solve_square, triangulate

__all__ = [
    "BasisState",
    "DecodeResult",
    "Verdict",
    "NoValidNStar",
    "process_symbol",
    "find_basis",
    "find_basis_rows",
    "select_reliable",
    "select_by_threshold",
    "recover",
    "decode_straightforward",
    "decode_efficient",
    "decode_rows",
    "sort_by_reliability",
    "format_bq",
]


class NoValidNStar(Exception):
    """No attendance threshold captures exactly ``n`` basis rows."""


class Verdict(enum.Enum):
    SUCCESS = "success"
    NO_VALID_N_STAR = "no_valid_n_star"
    RANK_DEFICIENT = "rank_deficient"
    SINGULAR_SYSTEM = "singular_system"


class BasisState:
    """Live bookkeeping of the basis search over ``n + l`` columns.

    ``B`` and ``Q`` are indexed by 0-based pivot column.  Bit ``j`` of a Q
    entry refers to basis row ``j + 1``; Q entries have fixed capacity, so
    growing the basis needs no work on existing entries.
    """

    def __init__(self, n: int, l: int):
        self.n = n
        self.l = l
        self.width = n + l
        self.r = 0
        self.B: list[int | None] = [None] * self.width
        self.Q: list[int | None] = [None] * self.width
        self.N: list[int] = []
        self.basis_index: list[int] = []
        self.rows: dict[int, int] = {}
        self.lrs: dict[int, int] = {}
        self.order: list[int] = []

    @property
    def processed(self) -> int:
        return len(self.order)

    def absorb(self, bits: int, index: int) -> bool:
        """Process one packed row; True when it becomes a basis row."""
        self.rows[index] = bits
        self.order.append(index)
        B, Q = self.B, self.Q
        b, q = bits, 0
        while b:
            low = b & -b
            t = low.bit_length() - 1
            bt = B[t]
            if bt is None:
                r = self.r
                self.r = r + 1
                B[t] = b
                Q[t] = q | (1 << r)
                self.N.append(0)
                self.basis_index.append(index)
                # keep the basis as a prefix of the processed rows
                order = self.order
                order[r], order[-1] = order[-1], order[r]
                return True
            b ^= bt
            q ^= Q[t]
        N = self.N
        for j in iter_bits(q):
            N[j] += 1
        self.lrs[index] = q
        return False

    def basis_rows(self) -> list[int]:
        return [self.rows[i] for i in self.basis_index]

    def combine(self, q: int) -> int:
        """XOR of the basis rows named by the mask ``q``."""
        acc = 0
        for j in iter_bits(q):
            acc ^= self.rows[self.basis_index[j]]
        return acc

    def check_invariants(self) -> None:
        """Assert the B/Q/N bookkeeping is consistent; raises AssertionError."""
        valid = [t for t in range(self.width) if self.B[t] is not None]
        assert len(valid) == self.r == len(self.basis_index) == len(self.N)
        for t in valid:
            b = self.B[t]
            assert (b & -b).bit_length() - 1 == t, "leading index does not match slot"
            assert self.Q[t] >> self.r == 0
            assert self.combine(self.Q[t]) == b, f"B[{t + 1}] != Q[{t + 1}] . basis"
        extra = self.processed - self.r
        assert all(0 <= v <= extra for v in self.N)
        for idx, q in self.lrs.items():
            assert self.combine(q) == self.rows[idx]

    def identity_prefix_holds(self, gamma: int) -> bool:
        """True when valid slots ``t <= gamma`` restrict to ``e_t`` on the first gamma columns."""
        mask = (1 << gamma) - 1
        return all(self.B[t] is None or (self.B[t] & mask) == 1 << t for t in range(gamma))


@dataclass
class DecodeResult:
    verdict: Verdict
    x_hat: BitMatrix | None = None
    basis_report: list[tuple[int, bool, int | None]] = field(default_factory=list)
    selected: tuple[int, ...] = ()
    state: BasisState | None = field(default=None, repr=False)
    triangulation: Triangulation | None = field(default=None, repr=False)

    @property
    def success(self) -> bool:
        return self.verdict is Verdict.SUCCESS

    @property
    def basis(self) -> tuple[int, ...]:
        """Original indices of the basis rows."""
        return tuple(i for i, is_basis, _ in self.basis_report if is_basis)

    def attendance(self) -> dict[int, int]:
        """Original basis row index -> attendance count."""
        return {i: c for i, is_basis, c in self.basis_report if is_basis}


def process_symbol(state: BasisState, sym: ReceivedSymbol, index: int) -> BasisState:
    """Feed one received symbol (1-based ``index``) into the basis search."""
    if sym.a.length != state.n or sym.y.length != state.l:
        raise ValueError("symbol dimensions do not match the state")
    state.absorb(sym.row_bits(), index)
    return state


def find_basis_rows(rows: Sequence[int], n: int, l: int, indices: Sequence[int] | None = None) -> BasisState:
    state = BasisState(n, l)
    if indices is None:
        indices = range(1, len(rows) + 1)
    for bits, idx in zip(rows, indices):
        state.absorb(bits, idx)
    return state


def _dims(symbols: Sequence[ReceivedSymbol], n: int | None, l: int | None) -> tuple[int, int]:
    if symbols:
        n0, l0 = symbols[0].a.length, symbols[0].y.length
        if (n is not None and n != n0) or (l is not None and l != l0):
            raise ValueError("explicit n/l disagree with the symbols")
        if any(s.a.length != n0 or s.y.length != l0 for s in symbols):
            raise ValueError("symbols have inconsistent dimensions")
        return n0, l0
    if n is None or l is None:
        raise ValueError("n and l are required when no symbols are given")
    return n, l


def find_basis(symbols: Sequence[ReceivedSymbol]) -> BasisState:
    """Run the basis search over all symbols in input order."""
    if not symbols:
        raise ValueError("need at least one symbol")
    n, l = _dims(symbols, None, None)
    return find_basis_rows([s.row_bits() for s in symbols], n, l)


def select_by_threshold(counts: Sequence[int], n: int) -> tuple[int, ...]:
    """1-based positions whose count reaches the unique threshold keeping exactly n."""
    r = len(counts)
    if n < 1 or r < n:
        raise NoValidNStar(f"basis has {r} rows, need {n}")
    ranked = sorted(counts, reverse=True)
    if r > n and ranked[n - 1] == ranked[n]:
        raise NoValidNStar(f"tie at attendance {ranked[n - 1]} straddles position {n}")
    n_star = ranked[n - 1]
    return tuple(j + 1 for j, c in enumerate(counts) if c >= n_star)


def select_reliable(state: BasisState, n: int) -> tuple[int, ...]:
    """Basis positions (1-based, in basis order) of the n most-attended rows."""
    return select_by_threshold(state.N, n)


def recover(symbols: Sequence[ReceivedSymbol]) -> BitMatrix:
    """Solve the ``n`` selected symbols for the source matrix."""
    n, l = _dims(symbols, None, None)
    if len(symbols) != n:
        raise ValueError(f"need exactly {n} symbols, got {len(symbols)}")
    return _recover_rows([s.row_bits() for s in symbols], n, l)


def _recover_rows(rows: Sequence[int], n: int, l: int) -> BitMatrix:
    amask = (1 << n) - 1
    A = BitMatrix([r & amask for r in rows], n)
    y = BitMatrix([r >> n for r in rows], l)
    return solve_square(A, y)


def _report(state: BasisState, m_indices: Sequence[int]) -> list[tuple[int, bool, int | None]]:
    pos = {idx: j for j, idx in enumerate(state.basis_index)}
    report = []
    for idx in sorted(m_indices):
        j = pos.get(idx)
        report.append((idx, j is not None, state.N[j] if j is not None else None))
    return report


def decode_rows(rows: Sequence[int], n: int, l: int, indices: Sequence[int] | None = None) -> DecodeResult:
    """Basis search, threshold selection and recovery on packed rows."""
    if indices is None:
        indices = list(range(1, len(rows) + 1))
    if not rows:
        return DecodeResult(Verdict.RANK_DEFICIENT)
    state = find_basis_rows(rows, n, l, indices)
    report = _report(state, indices)
    if state.r < n:
        return DecodeResult(Verdict.RANK_DEFICIENT, basis_report=report, state=state)
    try:
        picked = select_reliable(state, n)
    except NoValidNStar:
        return DecodeResult(Verdict.NO_VALID_N_STAR, basis_report=report, state=state)
    selected = tuple(state.basis_index[j - 1] for j in picked)
    try:
        x_hat = _recover_rows([state.rows[i] for i in selected], n, l)
    except SingularSystem:
        return DecodeResult(Verdict.SINGULAR_SYSTEM, basis_report=report, selected=selected, state=state)
    return DecodeResult(Verdict.SUCCESS, x_hat, report, selected, state)


def decode_straightforward(symbols: Sequence[ReceivedSymbol], n: int | None = None,
                           l: int | None = None) -> DecodeResult:
    """Decode in input order with plain Gaussian elimination."""
    n, l = _dims(symbols, n, l)
    return decode_rows([s.row_bits() for s in symbols], n, l)


def _permute_a(rows: Sequence[int], n: int, col_perm: Sequence[int]) -> list[int]:
    # new column k holds old column col_perm[k]; only the a-block moves
    where = [0] * n
    for k in range(n):
        where[col_perm[k] - 1] = k
    amask = (1 << n) - 1
    out = []
    for r in rows:
        a = 0
        for c in iter_bits(r & amask):
            a |= 1 << where[c]
        out.append(a | (r & ~amask))
    return out


def decode_efficient_rows(rows: Sequence[int], n: int, l: int) -> DecodeResult:
    M = BitMatrix(rows, n + l)
    tri = triangulate(M, protected_suffix_cols=l)
    perm_rows = [rows[i - 1] for i in tri.row_perm]
    perm_rows = _permute_a(perm_rows, n, tri.col_perm)
    res = decode_rows(perm_rows, n, l, indices=list(tri.row_perm))
    res.triangulation = tri
    if res.x_hat is not None:
        x = [0] * n
        for k in range(n):
            x[tri.col_perm[k] - 1] = res.x_hat.rows[k]
        res.x_hat = BitMatrix(x, l)
    return res


def decode_efficient(symbols: Sequence[ReceivedSymbol], n: int | None = None,
                     l: int | None = None) -> DecodeResult:
    """Triangulate ``(A, y)`` with the y-columns kept inactive, then decode.

    Row indices in the result refer to the caller's input order and the
    recovered source rows are returned in the caller's column order.
    """
    n, l = _dims(symbols, n, l)
    if not symbols:
        return DecodeResult(Verdict.RANK_DEFICIENT)
    return decode_efficient_rows([s.row_bits() for s in symbols], n, l)


def sort_by_reliability(symbols: Sequence[ReceivedSymbol]) -> list[ReceivedSymbol]:
    """Stable sort, most reliable first.  All or none must carry a reliability."""
    have = [s.reliability is not None for s in symbols]
    if not any(have):
        return list(symbols)
    if not all(have):
        raise ValueError("either every symbol or no symbol may carry a reliability")
    return sorted(symbols, key=lambda s: -s.reliability)


def format_bq(state: BasisState, n_slots: int | None = None) -> str:
    """``[B | Q]`` dump, one slot per line; empty slots print as dashes."""
    n_slots = state.width if n_slots is None else n_slots
    lines = []
    for t in range(n_slots):
        b = state.B[t] if t < state.width else None
        if b is None:
            lines.append("-" * state.width + " | " + "-" * state.r)
            continue
        bs = "".join("1" if (b >> k) & 1 else "0" for k in range(state.width))
        q = state.Q[t]
        qs = "".join("1" if (q >> k) & 1 else "0" for k in range(state.r))
        lines.append(f"{bs} | {qs}")
    return "\n".join(lines)
