"""Sum-product baseline over the LT generator graph.

Each of the ``l`` payload bit positions is an independent binary problem:
check node ``i`` observes bit ``y_i[b]`` of a received symbol and constrains
the XOR of the source bits selected by ``a_i``.  Messages for all bit
positions travel together as ``(edges, l)`` arrays; a bit position stops
updating once its hard decisions satisfy every check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from .channel import ReceivedSymbol
from .gf2 import BitMatrix, BitVector

__all__ = ["LLR_CAP", "BpConfig", "BpResult", "GeneratorGraph", "bit_llr",
           "check_node_update", "bp_decode", "bp_decode_rows"]

LLR_CAP = 38.0
_TINY = 1e-300


def bit_llr(p0: float, l: int) -> float:
    """Channel LLR of one payload bit, capped at ``LLR_CAP``.

    A symbol bit is right with probability
    ``p0 + (1 - p0) (2**(l-1) - 1) / (2**l - 1)``.
    """
    if l < 1 or not 0 < p0 <= 1:
        raise ValueError("need l >= 1 and 0 < p0 <= 1")
    q = p0 + (1 - p0) * ((2 ** (l - 1) - 1) / (2 ** l - 1))
    if q >= 1:
        return LLR_CAP
    return float(np.clip(math.log(q / (1 - q)), -LLR_CAP, LLR_CAP))


@dataclass(frozen=True)
class BpConfig:
    max_iterations: int = 100
    damping: float = 0.0
    early_stop: bool = True

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not 0 <= self.damping <= 1:
            raise ValueError("damping must lie in [0, 1]")


class GeneratorGraph:
    """Bipartite graph: edge (i, j) iff bit j of ``a_i`` is set.

    Rows with ``a = 0`` carry no information about the source and get no
    check node.
    """

    def __init__(self, a_rows: Sequence[int], n: int):
        checks, vars_ = [], []
        for i, a in enumerate(a_rows):
            while a:
                low = a & -a
                checks.append(i)
                vars_.append(low.bit_length() - 1)
                a ^= low
        self.n = n
        self.m = len(a_rows)
        self.check_idx = np.asarray(checks, dtype=np.int64)
        self.var_idx = np.asarray(vars_, dtype=np.int64)
        E = len(checks)
        ones = np.ones(E)
        self.V = sp.csr_matrix((ones, (self.var_idx, np.arange(E))), shape=(n, E))
        self.H = sp.csr_matrix((ones, (self.check_idx, self.var_idx)), shape=(self.m, n))

        # edges are grouped by check already; one segment per used check
        self.used = np.unique(self.check_idx)
        self.edge_start = np.searchsorted(self.check_idx, self.used).astype(np.int64)
        u_of_check = np.zeros(self.m, dtype=np.int64)
        u_of_check[self.used] = np.arange(len(self.used))
        self.seg_of = u_of_check[self.check_idx]

    @property
    def n_edges(self) -> int:
        return len(self.check_idx)


@dataclass
class BpResult:
    x_hat: BitMatrix
    iterations: int
    converged: np.ndarray  # per bit position: all checks satisfied


def _phi(x: np.ndarray) -> np.ndarray:
    """``-log tanh(x/2)``; its own inverse on (0, inf)."""
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(2.0 / np.expm1(x))


def _check_messages(v2c: np.ndarray, ch: np.ndarray, g: GeneratorGraph) -> np.ndarray:
    """Check->variable LLRs from variable->check and channel LLRs.

    Arrays are bit-position major: ``v2c`` is (L, edges) and ``ch`` is
    (L, used checks).  Magnitudes combine as sums of ``phi``; the channel
    enters every check as one more incoming message.
    """
    st, seg = g.edge_start, g.seg_of
    a = np.abs(v2c)
    ach = np.abs(ch)
    # below _TINY phi overflows; such messages count as exact zeros
    zero = a < _TINY
    zch = ach < _TINY
    ph = _phi(np.maximum(a, _TINY))
    phch = _phi(np.maximum(ach, _TINY))
    any_zero = bool(zero.any() or zch.any())
    if any_zero:
        ph[zero] = 0.0
        phch[zch] = 0.0
    S = np.add.reduceat(ph, st, axis=1) + phch
    mag = _phi(np.maximum(S[:, seg] - ph, 0.0))
    if any_zero:
        Z = np.add.reduceat(zero.view(np.int8), st, axis=1, dtype=np.int64) + zch
        mag[(Z[:, seg] - zero) > 0] = 0.0

    # rounding in S - ph can overshoot; the exact value never exceeds the
    # smallest of the other incoming magnitudes
    m1 = np.minimum(np.minimum.reduceat(a, st, axis=1), ach)
    m1e = m1[:, seg]
    is_m1 = a == m1e
    ch_is_m1 = ach == m1
    n_m1 = np.add.reduceat(is_m1.view(np.int8), st, axis=1, dtype=np.int64) + ch_is_m1
    m2 = np.minimum(np.minimum.reduceat(np.where(is_m1, np.inf, a), st, axis=1),
                    np.where(ch_is_m1, np.inf, ach))
    others = np.where(is_m1 & (n_m1[:, seg] == 1), m2[:, seg], m1e)
    np.minimum(mag, others, out=mag)
    np.minimum(mag, LLR_CAP, out=mag)

    # +0.0 counts as positive, so a zero input never flips the parity
    sgn = np.copysign(1.0, v2c + 0.0)
    total = np.multiply.reduceat(sgn, st, axis=1) * np.copysign(1.0, ch + 0.0)
    mag *= total[:, seg] * sgn
    return mag


def check_node_update(channel_llr: float, incoming: Sequence[float]) -> np.ndarray:
    """Messages a single check node sends back along each of its edges."""
    incoming = np.asarray(incoming, dtype=float)
    g = GeneratorGraph([(1 << len(incoming)) - 1], len(incoming))
    return _check_messages(incoming[None, :], np.array([[float(channel_llr)]]), g)[0]


def bp_decode_rows(a_rows: Sequence[int], y_rows: Sequence[int], n: int, l: int,
                   p0: float, config: BpConfig = BpConfig()) -> BpResult:
    g = GeneratorGraph(a_rows, n)
    llr = bit_llr(p0, l)
    Y = np.zeros((g.m, l), dtype=np.uint8)
    for i, y in enumerate(y_rows):
        Y[i] = BitVector(y, l).to_array()
    x_bits = np.zeros((n, l), dtype=np.uint8)
    converged = np.zeros(l, dtype=bool)
    if g.n_edges == 0:
        return BpResult(BitMatrix.from_array(x_bits), 0, converged)

    used = g.used
    Yu = Y[used].T.copy()  # (l, used checks)
    ch = llr * (1.0 - 2.0 * Yu)
    cols = np.arange(l)
    # messages are (bit positions, edges)
    v2c = np.zeros((l, g.n_edges))
    c2v = np.zeros((l, g.n_edges))
    Hu = g.H[used]
    it = 0
    for it in range(1, config.max_iterations + 1):
        new = _check_messages(v2c, ch[cols], g)
        c2v = new if config.damping == 0 else (1 - config.damping) * new + config.damping * c2v
        post = (g.V @ c2v.T).T
        v2c = np.clip(post[:, g.var_idx] - c2v, -LLR_CAP, LLR_CAP)
        hard = (post < 0).astype(np.uint8)
        x_bits[:, cols] = hard.T
        if config.early_stop:
            synd = (Hu @ hard.T).T.astype(np.int64) & 1
            ok = np.all(synd == Yu[cols], axis=1)
            if ok.any():
                converged[cols[ok]] = True
                keep = ~ok
                cols, v2c, c2v = cols[keep], v2c[keep], c2v[keep]
                if cols.size == 0:
                    break
    return BpResult(BitMatrix.from_array(x_bits), it, converged)


def bp_decode(symbols: Sequence[ReceivedSymbol], n: int, p0: float,
              config: BpConfig = BpConfig()) -> BpResult:
    """Flooding sum-product per payload bit; ties in the posterior decide 0."""
    if not symbols:
        raise ValueError("need at least one symbol")
    l = symbols[0].y.length
    if any(s.a.length != n or s.y.length != l for s in symbols):
        raise ValueError("symbol dimensions are inconsistent")
    return bp_decode_rows([s.a.bits for s in symbols], [s.y.bits for s in symbols], n, l, p0, config)
