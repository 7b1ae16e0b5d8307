# One-mode amplifier: capacity g(kN + N_c) - g(N_c), covariance transform, coherent constellations.
import numpy as np

from mixchan.bosonic import (
    AmplifierParams,
    GaussianState,
    amplifier_capacity,
    amplifier_transform,
    compose_amplifiers,
    constellation_energy,
    energy_bound,
    gaussian_entropy,
)

for n in (0.0, 0.5, 1.0, 4.0):
    print(f"k=2, N_c=0, N={n}: C = {amplifier_capacity(AmplifierParams(2.0, 0.0, n)):.6f} bits")

params = AmplifierParams(2.0, 0.25)
out = amplifier_transform(params, GaussianState.coherent(1 + 0.5j))
print("coherent output mean", out.mean, "cov", out.cov.tolist(), "entropy", gaussian_entropy(out))

# two amplifiers in a row act like one with gain k1 k2 and noise k2 N1 + N2
chain = compose_amplifiers(AmplifierParams(1.5, 0.1), AmplifierParams(3.0, 0.2))
print("composed:", chain)

points = np.array([1, 1j, -1, -1j]) * 0.6
prior = np.full(4, 0.25)
print("QPSK energy", constellation_energy(prior, points), "bound for N=0.5:", energy_bound(0.5))
