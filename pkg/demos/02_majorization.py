# Coset marginals, the majorization condition, and sampled majorization of channel outputs.
import numpy as np

from mixchan import MixedUnitaryChannel, channel_majorized_report, majorization_condition, marginal
from mixchan.channel import random_pure_states

# coset-uniform weights satisfy the condition by construction
good = MixedUnitaryChannel.from_cosets([3], [0.5, 0.3, 0.2])
print("marginal:", marginal(good), "condition:", majorization_condition(good).satisfied)

# a table that is not constant on the coset a = 0
bad = MixedUnitaryChannel.from_labels([2], {((0,), (0,)): 0.5, ((0,), (1,)): 0.25, ((1,), (0,)): 0.125, ((1,), (1,)): 0.125})
res = majorization_condition(bad)
print("condition:", res.satisfied, res.clause, [str(w) for w in res.witness])

# every sampled output spectrum is majorized by the marginal; basis inputs hit it exactly
rng = np.random.default_rng(0)
report = channel_majorized_report(good, marginal(good), random_pure_states(3, 10_000, rng))
print("worst margin over 10^4 random inputs:", report.worst_margin)
print("basis input spectrum:", np.linalg.eigvalsh(good.apply_to_pure(np.eye(3)[1]))[::-1])
