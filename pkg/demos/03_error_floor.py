"""
The error floor
===============

Adding more received symbols helps only up to a point.  Past that, the
failure probability is set by how the incorrect symbols line up, and it
stops falling.  We trace 1 - p_E against m for a few block sizes.
"""

import numpy as np

from fountain_bfa import bounds

p0 = 0.9
for n, l in ((10, 10), (20, 20), (20, 40)):
    ms = np.arange(n + 5, 6 * n, n // 2)
    fail = [1 - bounds.p_E(p0, n, l, int(m)) for m in ms]
    print(f"n={n}, l={l}")
    for m, f in zip(ms, fail):
        # a crude log-scale bar
        bar = "#" * max(0, int(20 + np.log10(max(f, 1e-20))))
        print(f"  m={m:>3}  {f:9.2e}  {bar}")

# Longer payloads push the floor down: a wrong payload is less likely to
# collide with the span of the others.
print("\nfloor at m = 6n:", {l: f"{1 - bounds.p_E(p0, 20, l, 120):.2e}" for l in (10, 20, 40)})
