"""LT and random fountain encoding.

Degree distributions follow Luby's ideal and robust soliton.  Encoding rows
are reproducible from a 64-bit seed through numpy's PCG64 generator, which
is what a sender would transmit in place of the row itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gf2 import BitMatrix, BitVector, iter_bits

__all__ = [
    "DegreeDistribution",
    "EncodingRow",
    "isd",
    "rsd",
    "sample_row",
    "sample_row_bits",
    "sample_rows_bits",
    "random_fountain_bits",
    "random_fountain_rows_bits",
    "random_fountain_row",
    "encode",
    "encode_bits",
    "format_distribution",
]


@dataclass(frozen=True)
class DegreeDistribution:
    """pmf over degrees ``1..n``; ``pmf[d-1]`` is the probability of degree ``d``."""

    n: int
    pmf: np.ndarray
    cdf: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pmf = np.asarray(self.pmf, dtype=float)
        if pmf.shape != (self.n,):
            raise ValueError(f"pmf must have {self.n} entries")
        if np.any(pmf < 0):
            raise ValueError("negative probability")
        if abs(pmf.sum() - 1.0) > 1e-12:
            raise ValueError(f"pmf sums to {pmf.sum()!r}")
        cdf = np.cumsum(pmf)
        cdf[-1] = 1.0
        pmf.setflags(write=False)
        cdf.setflags(write=False)
        object.__setattr__(self, "pmf", pmf)
        object.__setattr__(self, "cdf", cdf)

    def prob(self, d: int) -> float:
        return float(self.pmf[d - 1]) if 1 <= d <= self.n else 0.0

    def mean(self) -> float:
        return float(np.dot(np.arange(1, self.n + 1), self.pmf))

    def sample_degree(self, u: float) -> int:
        """Inverse-cdf lookup for a uniform ``u`` in [0, 1)."""
        return int(np.searchsorted(self.cdf, u, side="right")) + 1


@dataclass(frozen=True)
class EncodingRow:
    a: BitVector
    seed: int

    @property
    def degree(self) -> int:
        return self.a.weight()


def _ideal(n: int) -> np.ndarray:
    d = np.arange(1, n + 1, dtype=float)
    rho = np.empty(n)
    rho[0] = 1.0 / n
    rho[1:] = 1.0 / (d[1:] * (d[1:] - 1.0))
    return rho


def isd(n: int) -> DegreeDistribution:
    """Ideal soliton: ``1/n`` at degree 1, ``1/(d(d-1))`` above."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rho = _ideal(n)
    return DegreeDistribution(n, rho / rho.sum())


def rsd(n: int, delta: float, c: float) -> DegreeDistribution:
    """Robust soliton with spike position ``ceil(n/R)``.

    ``R = c sqrt(n) ln(n/delta)``; the ``R/(dn)`` head runs over
    ``d < ceil(n/R)`` and the spike ``(R/n) ln(R/delta)`` sits at
    ``ceil(n/R)`` when that lies in ``1..n``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 < delta < 1 or c <= 0:
        raise ValueError("need 0 < delta < 1 and c > 0")
    R = c * math.sqrt(n) * math.log(n / delta)
    if R <= 0:
        raise ValueError(f"R = {R} is not positive; choose delta < n")
    rho = _ideal(n)
    tau = np.zeros(n)
    spike = math.ceil(n / R)
    head = min(spike - 1, n)
    d = np.arange(1, head + 1, dtype=float)
    tau[:head] = R / (d * n)
    if spike <= n:
        tau[spike - 1] = R / n * math.log(R / delta)
    total = rho + tau
    return DegreeDistribution(n, total / total.sum())


def _generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def sample_row_bits(dist: DegreeDistribution, rng: np.random.Generator) -> int:
    """Draw one LT row as packed bits from an existing generator."""
    n = dist.n
    d = dist.sample_degree(rng.random())
    # partial Fisher-Yates: only the first d slots are ever touched
    picks = rng.integers(np.arange(d), n)
    swapped: dict[int, int] = {}
    bits = 0
    for k in range(d):
        j = int(picks[k])
        vj = swapped.get(j, j)
        swapped[j] = swapped.get(k, k)
        bits |= 1 << vj
    return bits


def sample_rows_bits(dist: DegreeDistribution, rng: np.random.Generator, m: int) -> list[int]:
    """``m`` LT rows at once; same law as ``sample_row_bits`` with fewer generator calls."""
    n = dist.n
    degs = np.searchsorted(dist.cdf, rng.random(m), side="right") + 1
    starts = np.concatenate(([0], np.cumsum(degs)[:-1]))
    # position k within its row, for the Fisher-Yates lower bounds
    offs = np.arange(int(degs.sum())) - np.repeat(starts, degs)
    picks = rng.integers(offs, n).tolist()
    out = []
    pos = 0
    for d in degs.tolist():
        swapped: dict[int, int] = {}
        bits = 0
        for k in range(d):
            j = picks[pos + k]
            vj = swapped.get(j, j)
            swapped[j] = swapped.get(k, k)
            bits |= 1 << vj
        out.append(bits)
        pos += d
    return out


def sample_row(dist: DegreeDistribution, n: int, seed: int) -> EncodingRow:
    """LT row: degree by inverse cdf, then ``d`` distinct uniform positions."""
    if dist.n != n:
        raise ValueError("distribution size does not match n")
    bits = sample_row_bits(dist, _generator(seed))
    return EncodingRow(BitVector(bits, n), seed)


def random_fountain_bits(n: int, rng: np.random.Generator) -> int:
    nbytes = (n + 7) // 8
    return int.from_bytes(rng.bytes(nbytes), "little") & ((1 << n) - 1)


def random_fountain_rows_bits(n: int, rng: np.random.Generator, m: int) -> list[int]:
    """``m`` independent uniform ``n``-bit rows from one byte draw."""
    nbytes = (n + 7) // 8
    buf = rng.bytes(nbytes * m)
    mask = (1 << n) - 1
    return [int.from_bytes(buf[i * nbytes:(i + 1) * nbytes], "little") & mask for i in range(m)]


def random_fountain_row(n: int, seed: int) -> EncodingRow:
    """Each of the ``n`` entries i.i.d. uniform over {0, 1}."""
    return EncodingRow(BitVector(random_fountain_bits(n, _generator(seed)), n), seed)


def encode_bits(x_rows, a_bits: int) -> int:
    """XOR of the source rows selected by ``a_bits`` (packed ints)."""
    acc = 0
    for k in iter_bits(a_bits):
        acc ^= x_rows[k]
    return acc


def encode(x: BitMatrix, a: BitVector) -> BitVector:
    """``y = a x``: the XOR of the source symbols at the ones of ``a``."""
    if a.length != x.n_rows:
        raise ValueError(f"a has {a.length} entries but x has {x.n_rows} rows")
    return BitVector(encode_bits(x.rows, a.bits), x.n_cols)


def format_distribution(dist: DegreeDistribution) -> str:
    """One ``"d pmf[d]"`` line per degree, 17 significant digits."""
    return "".join(f"{d} {p:.17g}\n" for d, p in enumerate(dist.pmf, start=1))
