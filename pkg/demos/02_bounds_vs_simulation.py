"""
How often does the basis hold every correct symbol?
===================================================

For random fountain codes the probability that the greedy basis contains
n correct rows has an exact recursion.  Here we compare it with a quick
Monte Carlo run and list the cheaper lower bounds next to it.
"""

from fountain_bfa import bounds
from fountain_bfa.sim import Code, DecoderKind, ExperimentConfig, run_point

n = l = 10
p0 = 0.9
trials = 3000

print(f"{'m':>3} {'1 - p_E':>10} {'simulated':>10} {'p_E1_E3':>9} {'p_G':>9} {'p_G_approx':>10}")
for m in (15, 20, 25, 30):
    # overhead is the expected number of surplus correct symbols
    overhead = round(p0 * m - n, 10)
    cfg = ExperimentConfig(n=n, l=l, p0_list=[p0], overhead_list=[overhead], code=Code.RANDOM,
                           decoder=DecoderKind.BFA_STRAIGHT, min_frame_errors=trials + 1,
                           max_trials=trials, batch_size=500)
    pt = run_point(cfg, p0, overhead)
    print(f"{m:>3} {1 - bounds.p_E(p0, n, l, m):>10.5f} {pt.fer_E:>10.5f} "
          f"{bounds.p_E1_E3(p0, n, l, m):>9.5f} {bounds.p_G(p0, n, l, m):>9.5f} "
          f"{bounds.p_G_approx(p0, n, l, m):>10.5f}")

# The recursion is cheap enough for large blocks where naive products of
# probabilities would underflow.
print("\np_E(0.9, 1000, 100, 1200) =", bounds.p_E(0.9, 1000, 100, 1200))
