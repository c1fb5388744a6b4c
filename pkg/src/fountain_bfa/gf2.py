"""Bit-packed linear algebra over GF(2).

Rows are stored as Python integers: bit ``k`` of the integer holds column
``k + 1``, so column 1 lives in bit 0 of word 0.  ``BitVector.to_words``
exposes the same layout as little-endian 64-bit machine words.  All public
index vocabulary (columns, rows, permutations) is 1-based.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "BitVector",
    "BitMatrix",
    "Triangulation",
    "SingularSystem",
    "xor_assign",
    "leading_index",
    "rank",
    "triangulate",
    "solve_square",
    "lowest_bit_index",
    "iter_bits",
    "format_matrix",
    "parse_matrix",
]


class SingularSystem(ArithmeticError):
    """Raised when a square system over GF(2) has no unique solution."""


def _mask(n: int) -> int:
    return (1 << n) - 1


def lowest_bit_index(bits: int) -> int:
    """0-based position of the lowest set bit; ``-1`` for zero."""
    return (bits & -bits).bit_length() - 1


def iter_bits(bits: int):
    """Yield 0-based positions of set bits, lowest first."""
    while bits:
        low = bits & -bits
        yield low.bit_length() - 1
        bits ^= low


class BitVector:
    """A fixed-length row over GF(2).

    Bits beyond ``length`` are always zero.  Vectors are mutable only through
    :func:`xor_assign`; treat them as values once shared.
    """

    __slots__ = ("bits", "length")

    def __init__(self, bits: int, length: int):
        if length < 0:
            raise ValueError("length must be non-negative")
        if bits < 0 or bits >> length:
            raise ValueError(f"bits do not fit in {length} columns")
        self.bits = bits
        self.length = length

    @classmethod
    def zeros(cls, length: int) -> BitVector:
        return cls(0, length)

    @classmethod
    def from_string(cls, s: str) -> BitVector:
        """Parse a 0/1 string, column 1 leftmost."""
        s = s.replace(" ", "")
        bits = 0
        for k, ch in enumerate(s):
            if ch == "1":
                bits |= 1 << k
            elif ch != "0":
                raise ValueError(f"invalid bit character {ch!r}")
        return cls(bits, len(s))

    @classmethod
    def from_array(cls, arr: Iterable[int]) -> BitVector:
        arr = np.asarray(list(arr) if not isinstance(arr, np.ndarray) else arr).astype(np.uint8) & 1
        bits = int.from_bytes(np.packbits(arr, bitorder="little").tobytes(), "little")
        return cls(bits, int(arr.size))

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> k) & 1 else "0" for k in range(self.length))

    def to_array(self) -> np.ndarray:
        nbytes = (self.length + 7) // 8
        raw = np.frombuffer(self.bits.to_bytes(nbytes, "little"), dtype=np.uint8)
        return np.unpackbits(raw, bitorder="little")[: self.length].copy()

    def to_words(self) -> np.ndarray:
        """Little-endian uint64 words; bit 0 of word 0 is column 1."""
        nwords = max(1, (self.length + 63) // 64)
        return np.frombuffer(self.bits.to_bytes(8 * nwords, "little"), dtype="<u8").copy()

    def weight(self) -> int:
        return self.bits.bit_count()

    def leading_index(self) -> int | None:
        return leading_index(self)

    def __getitem__(self, col: int) -> int:
        if not 1 <= col <= self.length:
            raise IndexError(col)
        return (self.bits >> (col - 1)) & 1

    def __xor__(self, other: BitVector) -> BitVector:
        if self.length != other.length:
            raise ValueError("length mismatch")
        return BitVector(self.bits ^ other.bits, self.length)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitVector):
            return NotImplemented
        return self.length == other.length and self.bits == other.bits

    def __hash__(self) -> int:
        return hash((self.bits, self.length))

    def __len__(self) -> int:
        return self.length

    def __repr__(self) -> str:
        return f"BitVector('{self.to_string()}')"


def xor_assign(dst: BitVector, src: BitVector) -> BitVector:
    """In place ``dst ^= src``; returns ``dst``."""
    if dst.length != src.length:
        raise ValueError(f"length mismatch: {dst.length} vs {src.length}")
    dst.bits ^= src.bits
    return dst


def leading_index(v: BitVector | int) -> int | None:
    """1-based index of the leftmost non-zero entry, or None for the zero vector."""
    bits = v.bits if isinstance(v, BitVector) else v
    if not bits:
        return None
    return (bits & -bits).bit_length()


class BitMatrix:
    """Dense matrix over GF(2) stored as a list of packed integer rows."""

    __slots__ = ("rows", "n_cols")

    def __init__(self, rows: Sequence[int], n_cols: int):
        rows = [int(r) for r in rows]
        for r in rows:
            if r < 0 or r >> n_cols:
                raise ValueError(f"row does not fit in {n_cols} columns")
        self.rows = rows
        self.n_cols = n_cols

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.n_cols)

    @classmethod
    def zeros(cls, n_rows: int, n_cols: int) -> BitMatrix:
        return cls([0] * n_rows, n_cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls([1 << k for k in range(n)], n)

    @classmethod
    def from_strings(cls, rows: Sequence[str]) -> BitMatrix:
        vecs = [BitVector.from_string(s) for s in rows]
        if not vecs:
            return cls([], 0)
        n_cols = vecs[0].length
        if any(v.length != n_cols for v in vecs):
            raise ValueError("ragged rows")
        return cls([v.bits for v in vecs], n_cols)

    @classmethod
    def from_vectors(cls, vecs: Sequence[BitVector], n_cols: int | None = None) -> BitMatrix:
        if n_cols is None:
            if not vecs:
                raise ValueError("n_cols required for an empty matrix")
            n_cols = vecs[0].length
        if any(v.length != n_cols for v in vecs):
            raise ValueError("ragged rows")
        return cls([v.bits for v in vecs], n_cols)

    @classmethod
    def from_array(cls, arr) -> BitMatrix:
        arr = np.atleast_2d(np.asarray(arr, dtype=np.uint8) & 1)
        m, n = arr.shape
        if n == 0:
            return cls([0] * m, 0)
        packed = np.packbits(arr, axis=1, bitorder="little")
        return cls([int.from_bytes(row.tobytes(), "little") for row in packed], n)

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.n_rows, self.n_cols), dtype=np.uint8)
        for i, r in enumerate(self.rows):
            out[i] = BitVector(r, self.n_cols).to_array()
        return out

    def row(self, i: int) -> BitVector:
        """Row ``i`` (1-based) as a BitVector."""
        return BitVector(self.rows[i - 1], self.n_cols)

    def copy(self) -> BitMatrix:
        return BitMatrix(list(self.rows), self.n_cols)

    def hstack(self, other: BitMatrix) -> BitMatrix:
        """``[self | other]``: other's columns follow self's."""
        if self.n_rows != other.n_rows:
            raise ValueError("row count mismatch")
        return BitMatrix([a | (b << self.n_cols) for a, b in zip(self.rows, other.rows)],
                         self.n_cols + other.n_cols)

    def col_slice(self, start: int, stop: int) -> BitMatrix:
        """Columns ``start..stop`` inclusive, 1-based."""
        width = stop - start + 1
        mask = _mask(width)
        return BitMatrix([(r >> (start - 1)) & mask for r in self.rows], width)

    def take_rows(self, indices: Iterable[int]) -> BitMatrix:
        """Rows at the given 1-based indices, in that order."""
        return BitMatrix([self.rows[i - 1] for i in indices], self.n_cols)

    def permute_cols(self, col_perm: Sequence[int]) -> BitMatrix:
        """New column ``k`` is old column ``col_perm[k-1]``."""
        if sorted(col_perm) != list(range(1, self.n_cols + 1)):
            raise ValueError("not a permutation of the columns")
        if list(col_perm) == list(range(1, self.n_cols + 1)):
            return self.copy()
        out = []
        for r in self.rows:
            v = 0
            for k, c in enumerate(col_perm):
                if (r >> (c - 1)) & 1:
                    v |= 1 << k
            out.append(v)
        return BitMatrix(out, self.n_cols)

    def matmul(self, other: BitMatrix) -> BitMatrix:
        """Matrix product over GF(2)."""
        if self.n_cols != other.n_rows:
            raise ValueError("inner dimension mismatch")
        out = []
        for r in self.rows:
            acc = 0
            for k in iter_bits(r):
                acc ^= other.rows[k]
            out.append(acc)
        return BitMatrix(out, other.n_cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self.n_cols == other.n_cols and self.rows == other.rows

    def __repr__(self) -> str:
        body = ", ".join(repr(BitVector(r, self.n_cols).to_string()) for r in self.rows)
        return f"BitMatrix([{body}])"


def rank(M: BitMatrix) -> int:
    """Rank over GF(2); works on a scratch copy of the rows."""
    pivots: dict[int, int] = {}
    for r in M.rows:
        while r:
            low = r & -r
            p = pivots.get(low)
            if p is None:
                pivots[low] = r
                break
            r ^= p
    return len(pivots)


def solve_square(M: BitMatrix, rhs: BitMatrix) -> BitMatrix:
    """Solve ``M X = rhs`` for an invertible n x n matrix ``M``.

    Gauss-Jordan elimination on the augmented rows ``[M | rhs]``.
    Raises SingularSystem when ``M`` is rank deficient.
    """
    n = M.n_rows
    if M.n_cols != n:
        raise ValueError(f"M must be square, got {M.shape}")
    if rhs.n_rows != n:
        raise ValueError("rhs row count mismatch")
    l = rhs.n_cols
    aug = [a | (b << n) for a, b in zip(M.rows, rhs.rows)]
    for col in range(n):
        bit = 1 << col
        piv = next((i for i in range(col, n) if aug[i] & bit), None)
        if piv is None:
            raise SingularSystem(f"column {col + 1} has no pivot")
        aug[col], aug[piv] = aug[piv], aug[col]
        prow = aug[col]
        for i in range(n):
            if i != col and aug[i] & bit:
                aug[i] ^= prow
    mask = _mask(l)
    return BitMatrix([(r >> n) & mask for r in aug], l)


@dataclass(frozen=True)
class Triangulation:
    """Row and column permutations bringing a matrix to ``[L R]`` form.

    ``row_perm[k-1]`` is the original row placed at position ``k`` and
    ``col_perm[k-1]`` the original column placed at position ``k``.  The
    leading ``gamma`` columns form the lower-triangular block ``L`` with a
    unit diagonal.
    """

    row_perm: tuple[int, ...]
    col_perm: tuple[int, ...]
    gamma: int

    def apply(self, M: BitMatrix) -> BitMatrix:
        return M.take_rows(self.row_perm).permute_cols(self.col_perm)

    def is_identity(self) -> bool:
        return (self.row_perm == tuple(range(1, len(self.row_perm) + 1))
                and self.col_perm == tuple(range(1, len(self.col_perm) + 1)))


def triangulate(M: BitMatrix, protected_suffix_cols: int = 0) -> Triangulation:
    """Greedy peeling into ``[L R]`` form.

    Only the first ``n_cols - protected_suffix_cols`` columns may enter
    ``L``.  At each step the lowest-indexed unused row with exactly one
    active column is pivoted on that column.  When no such row exists, the
    active column with the largest residual degree (ties: lowest index) is
    inactivated and moved to ``R``.
    """
    m, n_cols = M.shape
    if not 0 <= protected_suffix_cols <= n_cols:
        raise ValueError("protected_suffix_cols out of range")
    n_act = n_cols - protected_suffix_cols
    act_mask = _mask(n_act)
    rows = [r & act_mask for r in M.rows]

    col_rows: list[list[int]] = [[] for _ in range(n_act)]
    for i, r in enumerate(rows):
        for c in iter_bits(r):
            col_rows[c].append(i)
    deg = [r.bit_count() for r in rows]
    col_deg = [len(c) for c in col_rows]
    active = [True] * n_act
    used = [False] * m

    heap = [i for i in range(m) if deg[i] == 1]
    heapq.heapify(heap)
    pivot_rows: list[int] = []
    pivot_cols: list[int] = []
    inactivated: list[int] = []
    remaining = sum(1 for d in deg if d > 0)

    def drop_column(c: int) -> None:
        nonlocal remaining
        active[c] = False
        for i in col_rows[c]:
            if used[i]:
                continue
            deg[i] -= 1
            if deg[i] == 1:
                heapq.heappush(heap, i)
            elif deg[i] == 0:
                remaining -= 1

    while remaining > 0:
        while heap and (used[heap[0]] or deg[heap[0]] != 1):
            heapq.heappop(heap)
        if heap:
            i = heapq.heappop(heap)
            residual = rows[i]
            c = next(c for c in iter_bits(residual) if active[c])
            used[i] = True
            remaining -= 1
            for cc in iter_bits(rows[i]):
                col_deg[cc] -= 1
            pivot_rows.append(i)
            pivot_cols.append(c)
            drop_column(c)
        else:
            best = max((c for c in range(n_act) if active[c]), key=lambda c: (col_deg[c], -c))
            inactivated.append(best)
            drop_column(best)

    chosen_cols = set(pivot_cols) | set(inactivated)
    leftover = [c for c in range(n_act) if c not in chosen_cols]
    col_perm = pivot_cols + inactivated + leftover + list(range(n_act, n_cols))
    chosen_rows = set(pivot_rows)
    row_perm = pivot_rows + [i for i in range(m) if i not in chosen_rows]
    return Triangulation(tuple(i + 1 for i in row_perm), tuple(c + 1 for c in col_perm),
                         len(pivot_rows))


def format_matrix(M: BitMatrix) -> str:
    """Text form: ``"n_rows n_cols"`` then one 0/1 row per line."""
    lines = [f"{M.n_rows} {M.n_cols}"]
    lines += [BitVector(r, M.n_cols).to_string() for r in M.rows]
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> BitMatrix:
    lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
    n_rows, n_cols = (int(tok) for tok in lines[0].split())
    body = lines[1:]
    if len(body) != n_rows:
        raise ValueError(f"expected {n_rows} rows, found {len(body)}")
    M = BitMatrix.from_strings(body) if body else BitMatrix([], n_cols)
    if body and M.n_cols != n_cols:
        raise ValueError(f"expected {n_cols} columns, found {M.n_cols}")
    return M
