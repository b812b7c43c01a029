"""
Pixel differences with a Fourier-space subtractor
=================================================

The result register is moved into the Fourier basis, the operands are added
and subtracted as controlled phases, and an inverse QFT reads out a - b.
"""

from qblockmatch import build_subtractor, gate_counts, run_subtraction, ssd_distance
from qblockmatch.noise import NoiseModel
from qblockmatch.qft import modal_value, signed_decode

circuit, layout = build_subtractor(4)
rep = gate_counts(circuit)
print("registers:", layout.a_register, layout.b_register, layout.sum_register)
print(f"{rep.total_qubits} qubits, {rep.cnot_count} CNOTs, depth {rep.depth}")

# 9 - 8 comes out as 0001 every time
print(run_subtraction(9, 8, shots=1000, seed=0))

# negative differences wrap around; read them as two's complement
hist = run_subtraction(3, 5, shots=1000, seed=0)
v = modal_value(hist)
print(f"3 - 5 -> {v:04b} -> {signed_decode(v, 4)}")

# %%
# Sum of squared differences, one subtraction per pixel.  4-bit pixels can
# differ by 15, which needs a 5-bit signed register.

print(ssd_distance([9, 9, 9, 9], [9, 9, 8, 9]))
print(ssd_distance([15, 0, 3, 3], [0, 15, 3, 4], bits=5))

# %%
# Depolarizing noise on the CNOTs erodes the success rate quickly because
# the circuit is deep.

for f in (1.0, 0.999, 0.99, 0.98):
    hist = run_subtraction(9, 8, noise=NoiseModel(1.0, f), shots=2000, seed=0)
    print(f"CNOT fidelity {f:<6} P(0001) = {hist.get('0001', 0) / 2000:.3f}")
