"""Basis-finding decoding of fountain codes over symbol-error channels.

Submodules:

- ``gf2``: bit-packed GF(2) vectors and matrices, rank, solve, triangulation
- ``lt``: soliton degree distributions, LT and random fountain rows
- ``channel``: symbol-level error channel
- ``bfa``: basis-finding decoder, straightforward and triangulated
- ``bp``: per-bit sum-product baseline
- ``bounds``: frame-error bounds for random fountain codes
- ``sim``: Monte Carlo FER harness; ``cli`` wraps it
"""

from __future__ import annotations

from .bfa import (BasisState, DecodeResult, NoValidNStar, Verdict, decode_efficient,
                  decode_straightforward, find_basis, format_bq, recover, select_reliable,
                  sort_by_reliability)
from .bounds import (NotApplicable, all_bounds, attendance_probs, p_E, p_E1_E3, p_G,
                     p_G_approx, p_rk, p_rk_star)
from .bp import BpConfig, bit_llr, bp_decode
from .channel import ChannelParams, ReceivedSymbol, transmit
from .gf2 import BitMatrix, BitVector, SingularSystem, rank, solve_square, triangulate
from .lt import DegreeDistribution, encode, isd, random_fountain_row, rsd, sample_row

__version__ = "0.1.0"

__all__ = [
    "BitVector", "BitMatrix", "SingularSystem", "rank", "solve_square", "triangulate",
    "DegreeDistribution", "isd", "rsd", "sample_row", "random_fountain_row", "encode",
    "ChannelParams", "ReceivedSymbol", "transmit",
    "BasisState", "DecodeResult", "Verdict", "NoValidNStar", "find_basis", "select_reliable",
    "recover", "decode_straightforward", "decode_efficient", "sort_by_reliability", "format_bq",
    "BpConfig", "bit_llr", "bp_decode",
    "NotApplicable", "p_rk", "p_rk_star", "p_E", "p_E1_E3", "p_G", "p_G_approx",
    "attendance_probs", "all_bounds",
]
