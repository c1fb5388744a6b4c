"""Frame-error-rate bounds for basis-finding decoding of random fountain codes.

Notation: ``n`` source symbols of ``l`` bits, ``m`` received symbols, each
correct with probability ``p0``; incorrect symbols carry a uniform non-zero
error pattern.  ``E`` is the event that the basis contains ``n`` correct
rows and ``G`` the sufficient event "enough independent correct rows,
independent error patterns, and every correct basis row attends at least
one representation".

Everything is evaluated without forming ``2**(n+l)`` literally.  The two
dynamic programs run as scaled forward recursions: the state table is
renormalised every step and the scale is accumulated in log space, so
states below ~1e-300 of the running maximum are the only thing lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.special import gammaln
from scipy.stats import binom

__all__ = [
    "NotApplicable",
    "BoundInputs",
    "RankTables",
    "p_rk",
    "p_rk_star",
    "log_p_rk",
    "log_p_rk_star",
    "p_E",
    "p_E_table",
    "p_E1_E3",
    "n_of_eps",
    "p_E_hoeffding",
    "best_p_E_hoeffding",
    "p_G",
    "p_G_table",
    "h_hat",
    "h_factor",
    "best_h",
    "p_G_approx",
    "p_G_hoeffding",
    "best_p_G_hoeffding",
    "attendance_probs",
    "all_bounds",
    "BOUND_COLUMNS",
]

LN2 = math.log(2.0)


class NotApplicable(ValueError):
    """The bound's validity window excludes these parameters."""


@dataclass(frozen=True)
class BoundInputs:
    p0: float
    n: int
    l: int
    m: int
    epsilon: float | None = None

    def __post_init__(self):
        if not 0 < self.p0 <= 1:
            raise ValueError("p0 must lie in (0, 1]")
        if self.n < 1 or self.l < 1 or self.m < 0:
            raise ValueError("need n >= 1, l >= 1, m >= 0")
        if self.epsilon is not None and not 0 < self.epsilon < self.p0:
            raise ValueError("epsilon must lie in (0, p0)")


def _log1m_pow2(k):
    """``log(1 - 2**k)`` for ``k < 0``; ``-inf`` at ``k == 0``."""
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore"):
        return np.log1p(-np.exp2(k))


def _log_pow2m1(k):
    """``log(2**k - 1)``; ``-inf`` at ``k == 0``."""
    k = np.asarray(k, dtype=float)
    with np.errstate(divide="ignore"):
        return k * LN2 + np.log1p(-np.exp2(-k))


class RankTables:
    """``log P_rk(i, i)`` for ``i = 0..m_max`` built by the one-step recurrence.

    Any ``P_rk(m, n)`` is then a difference of two table entries.
    """

    def __init__(self, m_max: int):
        steps = _log1m_pow2(-np.arange(1, m_max + 1, dtype=float))
        self.log_diag = np.concatenate([[0.0], np.cumsum(steps)])

    @property
    def m_max(self) -> int:
        return len(self.log_diag) - 1

    def log_prk(self, m: int, n: int) -> float:
        if not 0 <= n <= m:
            raise ValueError(f"need m >= n >= 0, got m={m}, n={n}")
        return float(self.log_diag[m] - self.log_diag[m - n])

    def log_prk_star(self, m: int, n: int) -> float:
        if not 0 <= n <= m:
            raise ValueError(f"need m >= n >= 0, got m={m}, n={n}")
        if n == 0:
            return 0.0
        return self.log_prk(m, n) - n * float(_log1m_pow2(-m))


@lru_cache(maxsize=8)
def _tables(m_max: int) -> RankTables:
    return RankTables(m_max)


def _rank_tables(m: int) -> RankTables:
    # round up so nearby calls share one table
    size = 64
    while size < m:
        size *= 2
    return _tables(size)


def log_p_rk(m: int, n: int) -> float:
    return _rank_tables(m).log_prk(m, n)


def log_p_rk_star(m: int, n: int) -> float:
    return _rank_tables(m).log_prk_star(m, n)


def p_rk(m: int, n: int) -> float:
    """Probability that a uniform ``m x n`` binary matrix has rank ``n``."""
    return math.exp(log_p_rk(m, n))


def p_rk_star(m: int, n: int) -> float:
    """As :func:`p_rk` but every column is drawn uniformly among the non-zero ones."""
    return math.exp(log_p_rk_star(m, n))


def _log_binom_pmf(m: int, p0: float) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return binom.logpmf(np.arange(m + 1), m, p0)


def _check(p0, n, l, m):
    BoundInputs(p0, n, l, m)


# -- P(E) -------------------------------------------------------------------

def _p_E_coefficients(p0: float, n: int, l: int):
    nc = np.arange(n + 1, dtype=float)[:, None]
    ne = np.arange(l + 1, dtype=float)[None, :]
    q = 1.0 - p0
    with np.errstate(divide="ignore"):
        # correct row already spanned by the correct basis rows
        stay_c = p0 * np.exp2(nc - n)
        # incorrect row spanned by the whole basis, error pattern non-zero
        stay_e = q * np.exp((nc - n) * LN2 + _log_pow2m1(ne) - _log_pow2m1(l))
        # correct row outside the span of n_c - 1 correct rows
        grow_c = p0 * np.exp(_log1m_pow2(nc - 1 - n))
        # incorrect row whose pattern leaves the span of n_e - 1 patterns
        grow_e = q * np.exp(_log1m_pow2(ne - 1 - l) - _log1m_pow2(-l))
    return stay_c + stay_e, grow_c, grow_e


def _p_E_forward(p0: float, n: int, l: int, m: int):
    """Scaled forward pass; returns (table, log_scale) after m steps."""
    stay, grow_c, grow_e = _p_E_coefficients(p0, n, l)
    T = np.zeros((n + 1, l + 1))
    T[0, 0] = 1.0
    log_scale = 0.0
    for _ in range(m):
        new = T * stay
        new[1:, :] += T[:-1, :] * grow_c[1:, :]
        new[:, 1:] += T[:, :-1] * grow_e[:, 1:]
        s = new.max()
        if s == 0.0:
            return new, -math.inf
        T = new / s
        log_scale += math.log(s)
    return T, log_scale


def p_E_table(p0: float, n: int, l: int, i: int) -> np.ndarray:
    """``P_E(i, n_c, n_e)`` for all ``n_c, n_e`` (plain probabilities, may underflow)."""
    T, log_scale = _p_E_forward(p0, n, l, i)
    if log_scale == -math.inf:
        return np.zeros_like(T)
    return T * math.exp(log_scale)


def p_E(p0: float, n: int, l: int, m: int) -> float:
    """Probability that the basis holds ``n`` correct rows; O(m n l)."""
    _check(p0, n, l, m)
    T, log_scale = _p_E_forward(p0, n, l, m)
    tail = T[n, :].sum()
    if tail == 0.0 or log_scale == -math.inf:
        return 0.0
    return min(1.0, math.exp(log_scale + math.log(tail)))


def p_E1_E3(p0: float, n: int, l: int, m: int) -> float:
    """Enough independent correct rows and independent error patterns; O(max(m, l))."""
    _check(p0, n, l, m)
    lb = _log_binom_pmf(m, p0)
    total = 0.0
    for i in range(max(n, m - l), m + 1):
        if lb[i] == -np.inf:
            continue
        total += math.exp(lb[i] + log_p_rk(i, n) + log_p_rk_star(l, m - i))
    return min(1.0, total)


# -- Hoeffding-style closed forms ------------------------------------------

def n_of_eps(p0: float, m: int, eps: float) -> int:
    """``ceil((p0 - eps) m)`` evaluated exactly on the given floats."""
    return math.ceil((Fraction(p0) - Fraction(eps)) * m)


def _hoeffding_window(p0, n, l, m, eps) -> int:
    _check(p0, n, l, m)
    if not 0 < eps < p0:
        raise NotApplicable("epsilon must lie in (0, p0)")
    ne = n_of_eps(p0, m, eps)
    if not (ne > n and m - ne < l):
        raise NotApplicable(f"n(eps) = {ne} outside (n, m - l) window")
    return ne


def p_E_hoeffding(p0: float, n: int, l: int, m: int, eps: float) -> float:
    """O(1) lower bound on P(E); raises NotApplicable outside its window."""
    ne = _hoeffding_window(p0, n, l, m, eps)
    return ((-math.expm1(-2 * eps * eps * m))
            * (1 - 2.0 ** (n - ne))
            * (1 - 2.0 ** (m - ne - l)))


def _eps_grid(p0: float, points: int) -> np.ndarray:
    return p0 * np.arange(1, points + 1) / (points + 1)


def _best(fn, p0, n, l, m, points):
    best = None
    for eps in _eps_grid(p0, points):
        try:
            v = fn(p0, n, l, m, float(eps))
        except NotApplicable:
            continue
        if best is None or v > best[0]:
            best = (v, float(eps))
    if best is None:
        raise NotApplicable("no epsilon on the grid satisfies the window")
    return best


def best_p_E_hoeffding(p0: float, n: int, l: int, m: int, points: int = 64) -> tuple[float, float]:
    """Largest :func:`p_E_hoeffding` over an epsilon grid; returns (bound, eps)."""
    return _best(p_E_hoeffding, p0, n, l, m, points)


# -- P(G) -------------------------------------------------------------------

def _p_G_kernel(n: int):
    r = np.arange(n + 1)
    # K0[r0', r0] = C(r0', r0) 2^-r0'  (zero above the diagonal)
    rp, r0 = np.meshgrid(r, r, indexing="ij")
    with np.errstate(invalid="ignore", divide="ignore"):
        logK = gammaln(rp + 1) - gammaln(r0 + 1) - gammaln(rp - r0 + 1) - rp * LN2
    K0 = np.where(r0 <= rp, np.exp(np.where(r0 <= rp, logK, 0.0)), 0.0)
    w = np.exp2(r - n)[:, None]
    grow = -np.expm1((r[1:] - 1 - n) * LN2)[:, None]
    return K0, w, grow


def _p_G_step(P, K0, w, grow):
    new = (P @ K0) * w
    new[1:, 1:] += P[:-1, :-1] * grow
    return new


def p_G_table(n: int, i: int) -> np.ndarray:
    """``P_G(i, r, r0)`` for all ``0 <= r0 <= r <= n`` (rows r, columns r0)."""
    K0, w, grow = _p_G_kernel(n)
    P = np.zeros((n + 1, n + 1))
    P[0, 0] = 1.0
    for _ in range(i):
        P = _p_G_step(P, K0, w, grow)
    return P


def _p_G_forward(n: int, m: int) -> np.ndarray:
    """``P_G(i, n, 0)`` for ``i = 0..m``."""
    K0, w, grow = _p_G_kernel(n)
    P = np.zeros((n + 1, n + 1))
    P[0, 0] = 1.0
    out = np.zeros(m + 1)
    out[0] = P[n, 0]
    for i in range(1, m + 1):
        P = _p_G_step(P, K0, w, grow)
        out[i] = P[n, 0]
    return out


def p_G(p0: float, n: int, l: int, m: int) -> float:
    """Probability of the sufficient event G; O(m n^3)."""
    _check(p0, n, l, m)
    pg = _p_G_forward(n, m)
    lb = _log_binom_pmf(m, p0)
    total = 0.0
    for i in range(max(n, m - l), m + 1):
        if lb[i] == -np.inf or pg[i] == 0.0:
            continue
        total += math.exp(lb[i] + log_p_rk_star(l, m - i)) * float(pg[i])
    return min(1.0, total)


def h_hat(n: int, i: int) -> float:
    """Real maximiser of ``(1 - 2^(n-i+h)) (1 - 2^-h)^n`` over ``h``."""
    if i < n:
        raise ValueError("need i >= n")
    k = i - n + 2
    log2_b = math.log2(n) + k
    log2_sum = log2_b + math.log2(1 + 2.0 ** (2 * math.log2(n - 1) - log2_b)) if n > 1 else log2_b
    half = log2_sum / 2
    # sqrt(a + b) - (n - 1) = b / (sqrt(a + b) + (n - 1))
    denom = float(np.logaddexp2(half, math.log2(n - 1))) if n > 1 else half
    return log2_b - denom - 1


def h_factor(n: int, i: int, h: int) -> float:
    """``(1 - 2^(n-i+h)) (1 - 2^-h)^n``."""
    if h <= 0 or n - i + h >= 0:
        return 0.0
    return -math.expm1((n - i + h) * LN2) * math.exp(n * math.log1p(-2.0 ** -h))


def _h_candidates(n: int, i: int) -> list[int]:
    if i <= n:
        return [0]
    hh = h_hat(n, i)
    return sorted({min(max(c, 0), i - n) for c in (math.floor(hh), math.ceil(hh))})


def best_h(n: int, i: int) -> tuple[int, float]:
    """Best integer ``h`` in ``0..i-n`` using only the neighbours of h_hat."""
    return max(((h, h_factor(n, i, h)) for h in _h_candidates(n, i)), key=lambda t: t[1])


def _split_factor(n: int, i: int, h: int) -> float:
    """``P_rk(i-h, n) (1 - 2^-h)^n``."""
    if h <= 0 or i - h < n:
        return 0.0
    return math.exp(log_p_rk(i - h, n) + n * math.log1p(-2.0 ** -h))


def p_G_approx(p0: float, n: int, l: int, m: int) -> float:
    """Lower bound on P(G) avoiding the cubic DP; O(max(m, l))."""
    _check(p0, n, l, m)
    lb = _log_binom_pmf(m, p0)
    total = 0.0
    for i in range(max(n, m - l), m + 1):
        if lb[i] == -np.inf:
            continue
        f = max(_split_factor(n, i, h) for h in _h_candidates(n, i))
        if f > 0:
            total += math.exp(lb[i] + log_p_rk_star(l, m - i)) * f
    return min(1.0, total)


def p_G_hoeffding(p0: float, n: int, l: int, m: int, eps: float) -> float:
    """O(1) lower bound on P(G); raises NotApplicable outside its window."""
    ne = _hoeffding_window(p0, n, l, m, eps)
    return ((-math.expm1(-2 * eps * eps * m))
            * (1 - 2.0 ** (m - ne - l))
            * best_h(n, ne)[1])


def best_p_G_hoeffding(p0: float, n: int, l: int, m: int, points: int = 64) -> tuple[float, float]:
    return _best(p_G_hoeffding, p0, n, l, m, points)


def attendance_probs(p0: float, n: int, l: int, r: int) -> tuple[float, float]:
    """Chance that a correct / incorrect basis row attends a random representation.

    ``r`` basis rows of which ``n`` are correct.  Returns ``(p_c, p_e)``.
    """
    if not n <= r <= n + l:
        raise ValueError(f"need n <= r <= n + l, got r={r}")
    if not 0 < p0 <= 1:
        raise ValueError("p0 must lie in (0, 1]")
    k = r - n
    # ratios over 2^l - 1 kept as exponent differences
    if k == 0:
        return 0.5, 0.0
    log_d = float(_log_pow2m1(l))
    num = (1 - p0) * math.exp((k - 1) * LN2 - log_d)
    den = p0 + (1 - p0) * math.exp(float(_log_pow2m1(k)) - log_d)
    return 0.5, num / den


BOUND_COLUMNS = ("p0", "n", "l", "m", "p_E", "p_E1_E3", "p_E_hoeffding",
                 "p_G", "p_G_approx", "p_G_hoeffding")


def all_bounds(p0: float, n: int, l: int, m: int, eps_points: int = 64,
               with_p_G: bool = True) -> dict:
    """Every bound at one point; inapplicable entries are None."""
    row = {"p0": p0, "n": n, "l": l, "m": m,
           "p_E": p_E(p0, n, l, m), "p_E1_E3": p_E1_E3(p0, n, l, m)}
    try:
        row["p_E_hoeffding"] = best_p_E_hoeffding(p0, n, l, m, eps_points)[0]
    except NotApplicable:
        row["p_E_hoeffding"] = None
    row["p_G"] = p_G(p0, n, l, m) if with_p_G else None
    row["p_G_approx"] = p_G_approx(p0, n, l, m)
    try:
        row["p_G_hoeffding"] = best_p_G_hoeffding(p0, n, l, m, eps_points)[0]
    except NotApplicable:
        row["p_G_hoeffding"] = None
    return row
