"""Draper-style subtraction in Fourier space and the SSD built from it.

Layout for ``bits``-wide operands: ``a`` on qubits ``[0, bits)``, ``b`` on
``[bits, 2 bits)`` and the result on ``[2 bits, 3 bits)``, LSB first.

The QFT here omits the final swaps. After it, result qubit ``j`` carries the
phase ``2 pi x / 2**(j + 1)``, so adding ``2**m`` means rotating qubit ``j``
by ``pi / 2**(j - m)`` for every ``j >= m`` (rotations with ``j < m`` are
whole turns and are left out).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ArgumentError, ShapeError
from .noise import NoiseModel, run_noisy_trajectories
from .sim import Circuit, GateOp, cphase, h, marginal_probabilities, simulate, x, counts_to_histogram
from .swap import run_seeds

DEFAULT_BITS = 4


@dataclass(frozen=True)
class AdderLayout:
    bits: int
    a_register: tuple[int, ...]
    b_register: tuple[int, ...]
    sum_register: tuple[int, ...]

    @classmethod
    def for_bits(cls, bits: int) -> "AdderLayout":
        return cls(
            bits,
            tuple(range(bits)),
            tuple(range(bits, 2 * bits)),
            tuple(range(2 * bits, 3 * bits)),
        )

    @property
    def num_qubits(self) -> int:
        return 3 * self.bits


def _check_bits(bits: int):
    if bits < 1:
        raise ArgumentError(f"bits must be >= 1, got {bits}")


def _qft_ops(qubits) -> list[GateOp]:
    n = len(qubits)
    ops = []
    for j in reversed(range(n)):
        ops.append(h(qubits[j]))
        for k in reversed(range(j)):
            ops.append(cphase(qubits[k], qubits[j], math.pi / 2 ** (j - k)))
    return ops


def qft_circuit(bits: int, inverse: bool = False) -> Circuit:
    _check_bits(bits)
    circ = Circuit(bits, tuple(_qft_ops(list(range(bits)))))
    return circ.inverse() if inverse else circ


def _phase_fan(control: int, weight_exp: int, target_reg, sign: float) -> list[GateOp]:
    """Controlled addition of ``sign * 2**weight_exp`` onto a Fourier-space register."""
    return [
        cphase(control, target_reg[j], sign * math.pi / 2 ** (j - weight_exp))
        for j in range(weight_exp, len(target_reg))
    ]


def build_subtractor(bits: int) -> tuple[Circuit, AdderLayout]:
    """Circuit leaving ``(a - b) mod 2**bits`` on the result register."""
    _check_bits(bits)
    layout = AdderLayout.for_bits(bits)
    res = layout.sum_register
    qft = Circuit(bits, tuple(_qft_ops(list(range(bits)))))
    ops = list(qft.remap(res, layout.num_qubits).ops)
    for m, q in enumerate(layout.a_register):
        ops.extend(_phase_fan(q, m, res, +1.0))
    for m, q in enumerate(layout.b_register):
        ops.extend(_phase_fan(q, m, res, -1.0))
    ops.extend(qft.inverse().remap(res, layout.num_qubits).ops)
    return Circuit(layout.num_qubits, tuple(ops)), layout


def operand_circuit(a: int, b: int, bits: int) -> Circuit:
    """Subtractor preceded by X gates writing ``a`` and ``b`` as basis states."""
    sub, layout = build_subtractor(bits)
    limit = 1 << bits
    for name, value in (("a", a), ("b", b)):
        if not 0 <= value < limit:
            raise ArgumentError(f"operand {name}={value} does not fit in {bits} bits")
    prep = [x(q) for m, q in enumerate(layout.a_register) if (a >> m) & 1]
    prep += [x(q) for m, q in enumerate(layout.b_register) if (b >> m) & 1]
    return Circuit(layout.num_qubits, tuple(prep) + sub.ops)


@lru_cache(maxsize=4096)
def _ideal_distribution(a: int, b: int, bits: int) -> tuple[float, ...]:
    layout = AdderLayout.for_bits(bits)
    state = simulate(operand_circuit(a, b, bits))
    return tuple(marginal_probabilities(state, layout.sum_register))


def subtraction_distribution(a: int, b: int, bits: int = DEFAULT_BITS) -> np.ndarray:
    """Exact noiseless readout distribution of the result register."""
    return np.array(_ideal_distribution(int(a), int(b), int(bits)))


def run_subtraction(a: int, b: int, bits: int = DEFAULT_BITS, noise: NoiseModel | None = None,
                    shots: int = 4000, seed: int = 0) -> dict[str, int]:
    if shots < 1:
        raise ArgumentError(f"shots must be >= 1, got {shots}")
    circuit = operand_circuit(a, b, bits)
    layout = AdderLayout.for_bits(bits)
    if noise is not None and not noise.is_ideal:
        return run_noisy_trajectories(circuit, noise, layout.sum_register, shots, seed).histogram
    p = subtraction_distribution(a, b, bits)
    p = np.clip(p, 0.0, None)
    counts = np.random.default_rng(seed).multinomial(shots, p / p.sum())
    return counts_to_histogram(counts, bits)


def modal_value(histogram: dict[str, int]) -> int:
    """Most frequent outcome; ties go to the smaller value."""
    best = max(histogram.items(), key=lambda kv: (kv[1], -int(kv[0], 2)))
    return int(best[0], 2)


def signed_decode(value: int, bits: int) -> int:
    """Two's-complement reading into ``[-2**(bits-1), 2**(bits-1))``."""
    return value - (1 << bits) if value >= 1 << (bits - 1) else value


def ssd_distance(img1, img2, bits: int = DEFAULT_BITS, noise: NoiseModel | None = None,
                 shots: int = 4000, seed: int = 0) -> float:
    """Sum of squared pixel differences, each difference from its own subtractor run.

    The result is exact only when every difference lies in
    ``[-2**(bits-1), 2**(bits-1))``; 4-bit pixels need ``bits=5`` for that.
    """
    v1 = np.asarray(img1).ravel()
    v2 = np.asarray(img2).ravel()
    if v1.shape != v2.shape:
        raise ShapeError(f"vector lengths differ: {v1.size} vs {v2.size}")
    total = 0
    for i, sub in enumerate(run_seeds(seed, v1.size)):
        hist = run_subtraction(int(v1[i]), int(v2[i]), bits, noise, shots, sub)
        diff = signed_decode(modal_value(hist), bits)
        total += diff * diff
    return float(total)
