"""
Decoding five noisy symbols by hand
===================================

Two source symbols of two bits each are sent as five encoded symbols,
and two of those arrive corrupted.  We follow the basis search row by row,
look at how often each basis row takes part in representing the others,
and let the decoder pick the trustworthy ones.
"""

from fountain_bfa import (BasisState, BitMatrix, decode_efficient, decode_straightforward,
                          format_bq)
from fountain_bfa.channel import symbols_from_matrix
from fountain_bfa.gf2 import format_matrix

# each row is (a | y): two coefficient bits followed by two payload bits
rows = BitMatrix.from_strings(["1101", "1011", "1110", "0101", "1000"])
symbols = symbols_from_matrix(rows, 2)

# Feed the symbols one at a time.  A symbol outside the current span joins
# the basis; one inside it is written as a XOR of basis rows, and every
# basis row used gets its attendance counter bumped.
state = BasisState(2, 2)
for i, sym in enumerate(symbols, 1):
    joined = state.absorb(sym.row_bits(), i)
    print(f"symbol {i}: {'joins the basis' if joined else 'represented'}; counters {state.N}")

print()
print(format_bq(state, 5))

# Rows 2 and 3 each attend two representations, row 1 only one.  The two
# best-attended rows are the reliable ones, and solving them gives x.
res = decode_straightforward(symbols)
print("\nverdict:", res.verdict.name)
print("selected rows:", res.selected)
print("x_hat:\n" + format_matrix(res.x_hat))

# The triangulated variant permutes rows and columns first so elimination
# does less work.  The basis display changes, the answer does not.
eff = decode_efficient(symbols)
print("\ntriangulated:")
print(format_bq(eff.state, 5))
print("same x_hat:", eff.x_hat == res.x_hat)
