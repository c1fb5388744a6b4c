"""
Basis finding against belief propagation
========================================

Sum-product decoding treats each payload bit on its own and cannot tell a
corrupted symbol from a clean one.  The basis-finding decoder instead
votes whole symbols out.  A small LT code shows the gap.
"""

import math

from fountain_bfa.sim import Code, DecoderKind, ExperimentConfig, run_point

n = l = 30
p0, overhead = 0.97, 15.0
base = dict(n=n, l=l, p0_list=[p0], overhead_list=[overhead], code=Code.LT, delta=0.05, c=0.1,
            master_seed=1, min_frame_errors=20)

for decoder, budget in ((DecoderKind.BFA_EFFICIENT, 3000), (DecoderKind.BP, 60)):
    cfg = ExperimentConfig(decoder=decoder, max_trials=budget, max_iter=50, **base)
    pt = run_point(cfg, p0, overhead)
    half = 1.96 * math.sqrt(max(pt.fer_EF * (1 - pt.fer_EF), 1e-12) / pt.trials)
    print(f"{decoder.value:>14}: m={pt.m} fer={pt.fer_EF:.4f} +- {half:.4f} "
          f"({pt.frame_errors_EF} errors in {pt.trials} frames"
          f"{', budget hit' if pt.censored else ''})")
