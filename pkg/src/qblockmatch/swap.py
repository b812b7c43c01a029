"""Swap-test Euclidean distance.

The ancilla of the swap test between the ``phi`` qubit and the label qubit of
``psi`` reads 0 with probability ``p0 = 1/2 + D^2 / (4 Z)``, so
``overlap = 2 p0 - 1`` and ``D = sqrt(2 Z overlap)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .encoding import PairEncoding, build_pair_encoding
from .errors import ArgumentError, CapacityError
from .noise import NoiseModel, run_noisy_trajectories
from .sim import MAX_QUBITS, Circuit, cswap, h, qubit_probabilities, sample_counts, simulate

ANCILLA = 0
PHI_QUBIT = 1


@dataclass(frozen=True)
class DistanceEstimate:
    mean_distance: float
    std_distance: float
    runs: int
    shots_per_run: int
    p0_mean: float
    Z: float
    seed: int
    run_distances: np.ndarray = field(repr=False, default=None)


def swap_test_layout(data_qubits: int) -> dict[str, object]:
    """Qubit roles of the swap-test circuit for a ``data_qubits``-qubit data register."""
    psi = list(range(2, 3 + data_qubits))
    return {"ancilla": ANCILLA, "phi": PHI_QUBIT, "psi": psi, "label": psi[-1]}


def swap_test_width(length: int, max_qubits: int = MAX_QUBITS) -> int:
    """Qubits needed to compare two ``length``-pixel vectors; checked before any encoding."""
    k = max(1, (max(length, 1) - 1).bit_length())
    width = k + 3
    if width > max_qubits:
        raise CapacityError(f"{length}-pixel vectors need {width} qubits, limit is {max_qubits}")
    return width


def build_swap_test_circuit(enc: PairEncoding) -> Circuit:
    k = enc.data_qubits
    layout = swap_test_layout(k)
    n = k + 3
    ops = [h(ANCILLA)]
    ops.extend(enc.phi_circuit.remap([PHI_QUBIT], n).ops)
    ops.extend(enc.psi_circuit.remap(layout["psi"], n).ops)
    ops.append(cswap(ANCILLA, PHI_QUBIT, layout["label"]))
    ops.append(h(ANCILLA))
    return Circuit(n, tuple(ops))


def overlap_from_p0(p0: float) -> float:
    if not 0.0 <= p0 <= 1.0:
        raise ArgumentError(f"p0 must be a probability, got {p0}")
    return min(max(2.0 * p0 - 1.0, 0.0), 1.0)


def distance_from_overlap(overlap: float, Z: float) -> float:
    if Z <= 0:
        raise ArgumentError(f"Z must be positive, got {Z}")
    if not 0.0 <= overlap <= 1.0:
        raise ArgumentError(f"overlap must lie in [0, 1], got {overlap}")
    return math.sqrt(2.0 * Z * overlap)


def exact_p0(A, B) -> float:
    """Noiseless ancilla P(0) from the full state vector."""
    swap_test_width(np.asarray(A).size)
    enc = build_pair_encoding(A, B)
    return qubit_probabilities(simulate(build_swap_test_circuit(enc)), ANCILLA)[0]


def run_seeds(seed: int, runs: int) -> list[int]:
    """Independent per-run seeds derived from a master seed."""
    children = np.random.SeedSequence(seed).spawn(runs)
    return [int(c.generate_state(1, dtype=np.uint32)[0]) for c in children]


def estimate_distance(A, B, shots: int = 4000, runs: int = 20,
                      noise: NoiseModel | None = None, seed: int = 0) -> DistanceEstimate:
    """Average of per-run swap-test distances; std over runs is the error bar."""
    if shots < 1 or runs < 1:
        raise ArgumentError("shots and runs must be >= 1")
    swap_test_width(np.asarray(A).size)
    enc = build_pair_encoding(A, B)
    circuit = build_swap_test_circuit(enc)
    noisy = noise is not None and not noise.is_ideal
    state = None if noisy else simulate(circuit)

    p0s = np.empty(runs)
    dists = np.empty(runs)
    for r, sub in enumerate(run_seeds(seed, runs)):
        if noisy:
            result = run_noisy_trajectories(circuit, noise, [ANCILLA], shots, sub)
            zeros = result.histogram.get("0", 0)
        else:
            zeros = sample_counts(state, [ANCILLA], shots, sub).get("0", 0)
        p0s[r] = zeros / shots
        dists[r] = distance_from_overlap(overlap_from_p0(p0s[r]), enc.Z)

    std = float(dists.std(ddof=1)) if runs > 1 else 0.0
    return DistanceEstimate(
        mean_distance=float(dists.mean()),
        std_distance=std,
        runs=runs,
        shots_per_run=shots,
        p0_mean=float(p0s.mean()),
        Z=enc.Z,
        seed=seed,
        run_distances=dists,
    )
