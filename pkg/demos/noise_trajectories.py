"""
Trajectory noise against the exact density matrix
=================================================

Every shot samples its own Pauli errors.  For small circuits the density
matrix gives the exact answer to compare against.
"""

import math

from qblockmatch.noise import NoiseModel, exact_density_distribution, run_noisy_trajectories
from qblockmatch.sim import Circuit, cnot, h

bell = Circuit(2, (h(0), cnot(0, 1)))
noise = NoiseModel(fidelity_1q=1.0, fidelity_2q=0.9)

shots = 20000
res = run_noisy_trajectories(bell, noise, [0, 1], shots, seed=0)
exact = exact_density_distribution(bell, noise, [0, 1])

for k in range(4):
    bits = format(k, "02b")
    p = exact[k]
    est = res.histogram.get(bits, 0) / shots
    sigma = math.sqrt(p * (1 - p) / shots)
    print(f"{bits}: trajectories {est:.4f}  exact {p:.4f}  ({abs(est - p) / sigma:.1f} sigma)")

# %%
# A CNOT error of X or Y on either qubit breaks the parity, so "01" and "10"
# show up with total probability 8/15 * 0.1.

print("odd parity:", exact[1] + exact[2], "expected", 8 / 15 * 0.1)
