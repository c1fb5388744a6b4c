"""Symbol-level error channel.

Each transmitted symbol arrives intact with probability ``p0``; otherwise
its payload is XORed with an error pattern drawn uniformly from the
``2**l - 1`` non-zero patterns.  The coefficient vector ``a`` is never
touched: corrupting the seed that generates ``a`` is equivalent to
corrupting ``y``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .gf2 import BitMatrix, BitVector
from .lt import encode_bits

__all__ = ["ChannelParams", "ReceivedSymbol", "transmit", "draw_error_pattern", "is_correct",
           "symbols_from_matrix"]


@dataclass(frozen=True)
class ChannelParams:
    p0: float
    l: int

    def __post_init__(self):
        if not 0 < self.p0 <= 1:
            raise ValueError(f"p0 must lie in (0, 1], got {self.p0}")
        if self.l < 1:
            raise ValueError("l must be >= 1")
        # the correct payload must stay the single most likely outcome
        if not self.p0 > (1 - self.p0) / (2 ** self.l - 1):
            raise ValueError(f"p0 = {self.p0} too small for l = {self.l}")

    @property
    def pattern_prob(self) -> float:
        """Probability of each individual non-zero error pattern."""
        return (1 - self.p0) / (2 ** self.l - 1)


@dataclass
class ReceivedSymbol:
    a: BitVector
    y: BitVector
    reliability: float | None = None

    def __post_init__(self):
        if self.reliability is not None and self.reliability < 0:
            raise ValueError("reliability must be non-negative")

    @property
    def n(self) -> int:
        return self.a.length

    @property
    def l(self) -> int:
        return self.y.length

    def row_bits(self) -> int:
        """Packed ``(a, y)``: columns ``1..n`` hold ``a``, ``n+1..n+l`` hold ``y``."""
        return self.a.bits | (self.y.bits << self.a.length)

    @classmethod
    def from_string(cls, s: str, n: int, reliability: float | None = None) -> ReceivedSymbol:
        v = BitVector.from_string(s)
        return cls(BitVector(v.bits & ((1 << n) - 1), n),
                   BitVector(v.bits >> n, v.length - n), reliability)


def draw_error_pattern(rng: np.random.Generator, l: int) -> int:
    """Uniform non-zero pattern in l bits, by rejection."""
    nbytes = (l + 7) // 8
    mask = (1 << l) - 1
    while True:
        s = int.from_bytes(rng.bytes(nbytes), "little") & mask
        if s:
            return s


def _corrupt(rng: np.random.Generator, p0: float, l: int) -> int:
    if p0 >= 1 or rng.random() < p0:
        return 0
    return draw_error_pattern(rng, l)


def transmit(z: BitVector, params: ChannelParams, seed) -> tuple[BitVector, BitVector]:
    """Send one payload; returns ``(y, s)`` with ``y = z ^ s``."""
    if z.length != params.l:
        raise ValueError(f"payload has {z.length} bits, channel expects {params.l}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.Generator(np.random.PCG64(seed))
    s = _corrupt(rng, params.p0, params.l)
    return BitVector(z.bits ^ s, params.l), BitVector(s, params.l)


def is_correct(sym: ReceivedSymbol, x: BitMatrix) -> bool:
    """True iff ``a x == y`` for the ground-truth source ``x``."""
    return encode_bits(x.rows, sym.a.bits) == sym.y.bits


def symbols_from_matrix(M: BitMatrix, n: int, reliabilities: Sequence[float] | None = None):
    """Split the rows of ``(A, y)`` into ReceivedSymbols."""
    out = []
    l = M.n_cols - n
    for i, r in enumerate(M.rows):
        rel = None if reliabilities is None else reliabilities[i]
        out.append(ReceivedSymbol(BitVector(r & ((1 << n) - 1), n), BitVector(r >> n, l), rel))
    return out
