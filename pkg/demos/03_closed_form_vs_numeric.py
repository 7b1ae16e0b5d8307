# Closed-form minimal output entropy, l_p norms and capacity against numerical optimization.
import numpy as np

from mixchan import MixedUnitaryChannel, OptimizerConfig, closed_form_profile, maximize_lp, minimize_convex_trace, xlogx
from mixchan.functionals import holevo_quantity

channel = MixedUnitaryChannel.from_cosets([3], [0.5, 0.3, 0.2])
profile = closed_form_profile(channel, ps=(2, 3))
print(f"closed form: S_min = {profile.s_min:.6f} bits, C = {profile.capacity:.6f} bits, lp = {profile.lp}")

cfg = OptimizerConfig(restarts=64, seed=42)
ent = minimize_convex_trace(channel, xlogx(), cfg)
print(f"numeric S_min = {-ent.best_value:.6f} (best start {ent.start_kinds[ent.best_index]})")
print("spread of random-restart optima:", np.ptp(ent.values))
for p in (2, 3):
    print(f"numeric ||Phi||_{p} = {maximize_lp(channel, p, cfg).best_value:.6f}")

# the computational basis with a uniform prior achieves the capacity
print("Holevo quantity of the basis ensemble:", holevo_quantity(channel, np.full(3, 1 / 3), np.eye(3)))
