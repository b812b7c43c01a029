"""Depolarizing gate noise.

The production engine samples Pauli trajectories on pure states. A dense
density-matrix evolution of the same channel serves as the exact oracle for
circuits of up to six qubits.

Noise follows every gate of the *decomposed* circuit: ``p_1q`` after each
single-qubit gate, ``p_2q`` after each CNOT. Gate fidelity ``F`` maps to
``p = 1 - F``. With probability ``p`` one of the ``4**k - 1`` non-identity
Pauli strings on the gate's ``k`` qubits is applied, uniformly at random.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ArgumentError, CapacityError
from .sim import (
    Circuit,
    StateVector,
    apply_op_batch,
    apply_pauli_batch,
    counts_to_histogram,
    decompose_to_basis,
    outcome_index,
)

DENSITY_MAX_QUBITS = 6
_CHUNK = 512


def fidelity_to_depolarizing(fidelity: float) -> float:
    if not 0.0 < fidelity <= 1.0:
        raise ArgumentError(f"gate fidelity must be in (0, 1], got {fidelity}")
    return 1.0 - fidelity


@dataclass(frozen=True)
class NoiseModel:
    fidelity_1q: float = 1.0
    fidelity_2q: float = 1.0

    def __post_init__(self):
        fidelity_to_depolarizing(self.fidelity_1q)
        fidelity_to_depolarizing(self.fidelity_2q)

    @property
    def p_1q(self) -> float:
        return fidelity_to_depolarizing(self.fidelity_1q)

    @property
    def p_2q(self) -> float:
        return fidelity_to_depolarizing(self.fidelity_2q)

    @property
    def is_ideal(self) -> bool:
        return self.p_1q == 0.0 and self.p_2q == 0.0

    def probability_for(self, arity: int) -> float:
        if arity == 1:
            return self.p_1q
        if arity == 2:
            return self.p_2q
        raise ArgumentError(f"noise is defined for 1- and 2-qubit gates, not arity {arity}")


@dataclass
class TrajectoryResult:
    histogram: dict[str, int]
    trajectories: int
    seed: int
    counts: np.ndarray = field(repr=False, default=None)

    def probability(self, bits: str) -> float:
        return self.histogram.get(bits, 0) / self.trajectories


def _check_p(p: float):
    if not 0.0 <= p < 1.0:
        raise ArgumentError(f"depolarizing probability must be in [0, 1), got {p}")


def _pauli_digits(code: int, k: int) -> list[int]:
    """Split a Pauli-string code in [1, 4**k) into one digit per qubit."""
    return [(code >> (2 * j)) & 3 for j in range(k)]


def apply_depolarizing(state: StateVector, qubits: Sequence[int], p: float,
                       rng: np.random.Generator) -> StateVector:
    """One stochastic draw of the ``len(qubits)``-qubit depolarizing channel."""
    qubits = list(qubits)
    if not 1 <= len(qubits) <= 2:
        raise ArgumentError("depolarizing noise acts on one or two qubits")
    _check_p(p)
    if rng.random() >= p:
        return state
    code = int(rng.integers(1, 4 ** len(qubits)))
    amps = state.amplitudes[None, :]
    for q, pauli in zip(qubits, _pauli_digits(code, len(qubits))):
        amps = apply_pauli_batch(amps, pauli, q, state.num_qubits)
    return StateVector(state.num_qubits, amps[0].copy())


def _gate_noise(basis: Circuit, noise: NoiseModel) -> np.ndarray:
    return np.array([noise.probability_for(op.arity) for op in basis.ops])


def _sample_rows(probs: np.ndarray, u: np.ndarray) -> np.ndarray:
    cdf = np.cumsum(probs, axis=-1)
    cdf /= cdf[..., -1:]
    if cdf.ndim == 1:
        return np.minimum(np.searchsorted(cdf, u, side="right"), cdf.shape[0] - 1)
    out = (cdf <= u[:, None]).sum(axis=1)
    return np.minimum(out, cdf.shape[1] - 1)


def run_noisy_trajectories(circuit: Circuit, noise: NoiseModel, measured_qubits: Sequence[int],
                           shots: int, seed: int) -> TrajectoryResult:
    """Monte Carlo estimate of the noisy readout histogram of ``measured_qubits``.

    Every trajectory replays the decomposed circuit, inserting a depolarizing
    draw after every gate, then reads the measured qubits once. Random numbers
    for all trajectories come from one generator seeded with ``seed`` and are
    drawn up front, so the result is independent of batching.

    Trajectories that draw no error at all end in the ideal state; they share
    one precomputed distribution. Errored trajectories are evolved in batches,
    each starting from the cached ideal state just before its first error.
    """
    if shots < 1:
        raise ArgumentError(f"shots must be >= 1, got {shots}")
    measured = tuple(measured_qubits)
    basis = decompose_to_basis(circuit)
    n = basis.num_qubits
    n_gates = len(basis.ops)
    p_gate = _gate_noise(basis, noise)

    rng = np.random.default_rng(seed)
    errs = rng.random((shots, n_gates)) < p_gate if n_gates else np.zeros((shots, 0), bool)
    arity = np.array([op.arity for op in basis.ops], dtype=np.int64)
    paulis = rng.integers(1, 4 ** np.maximum(arity, 1), size=(shots, n_gates)) if n_gates \
        else np.zeros((shots, 0), np.int64)
    u = rng.random(shots)

    readout = outcome_index(n, measured)
    n_out = 1 << len(measured)

    # prefix[g] = ideal state after the first g gates
    prefix = np.empty((n_gates + 1, 1 << n), dtype=np.complex128)
    prefix[0] = 0.0
    prefix[0, 0] = 1.0
    for g, op in enumerate(basis.ops):
        prefix[g + 1] = apply_op_batch(prefix[g][None, :], op, n)[0]
    ideal = np.bincount(readout, weights=np.abs(prefix[-1]) ** 2, minlength=n_out)

    outcomes = np.empty(shots, dtype=np.int64)
    errored = errs.any(axis=1)
    clean = ~errored
    outcomes[clean] = _sample_rows(ideal, u[clean])

    rows = np.flatnonzero(errored)
    if rows.size:
        first = errs[rows].argmax(axis=1)
        order = np.argsort(first, kind="stable")
        rows, first = rows[order], first[order]
        for start in range(0, rows.size, _CHUNK):
            chunk = rows[start:start + _CHUNK]
            outcomes[chunk] = _evolve_errored(
                basis, prefix, errs[chunk], paulis[chunk], first[start:start + _CHUNK],
                readout, n_out, u[chunk])

    counts = np.bincount(outcomes, minlength=n_out)
    return TrajectoryResult(counts_to_histogram(counts, len(measured)), shots, seed, counts)


def _evolve_errored(basis, prefix, errs, paulis, first, readout, n_out, u):
    n = basis.num_qubits
    m = errs.shape[0]
    states = np.empty((m, 1 << n), dtype=np.complex128)
    active = 0  # rows are sorted by first-error gate; rows[:active] are live
    for g, op in enumerate(basis.ops):
        if active:
            states[:active] = apply_op_batch(states[:active], op, n)
        joined = active + int(np.searchsorted(first[active:], g, side="right"))
        if joined > active:
            states[active:joined] = prefix[g + 1]
            active = joined
        hit = np.flatnonzero(errs[:active, g])
        if hit.size == 0:
            continue
        codes = paulis[hit, g]
        for code in np.unique(codes):
            sel = hit[codes == code]
            block = states[sel]
            for q, pauli in zip(op.targets, _pauli_digits(int(code), op.arity)):
                block = apply_pauli_batch(block, pauli, q, n)
            states[sel] = block
    probs = np.abs(states) ** 2
    marg = np.zeros((m, n_out))
    for v in range(n_out):
        marg[:, v] = probs[:, readout == v].sum(axis=1)
    return _sample_rows(marg, u)


# ---------------------------------------------------------------------------
# exact oracle


def _conjugate(rho: np.ndarray, op, n: int) -> np.ndarray:
    left = apply_op_batch(rho.T, op, n).T  # U rho
    return apply_op_batch(left.conj(), op, n).conj()  # (U (U rho)^dagger)^dagger


def _pauli_conjugate(rho: np.ndarray, qubits, digits, n: int) -> np.ndarray:
    left = rho.T
    for q, d in zip(qubits, digits):
        left = apply_pauli_batch(left, d, q, n)
    left = left.T.conj()
    for q, d in zip(qubits, digits):
        left = apply_pauli_batch(left, d, q, n)
    return left.conj()


def depolarize_density(rho: np.ndarray, qubits: Sequence[int], p: float, n: int) -> np.ndarray:
    """Exact depolarizing channel on ``qubits`` of an ``n``-qubit density matrix."""
    if p == 0.0:
        return rho
    k = len(qubits)
    n_paulis = 4 ** k - 1
    acc = np.zeros_like(rho)
    for code in range(1, n_paulis + 1):
        acc += _pauli_conjugate(rho, qubits, _pauli_digits(code, k), n)
    return (1.0 - p) * rho + (p / n_paulis) * acc


def density_matrix(circuit: Circuit, noise: NoiseModel | None = None,
                   check_trace: bool = False) -> np.ndarray:
    """Final density matrix of the decomposed circuit under depolarizing noise."""
    n = circuit.num_qubits
    if n > DENSITY_MAX_QUBITS:
        raise CapacityError(f"density oracle handles at most {DENSITY_MAX_QUBITS} qubits, got {n}")
    noise = noise or NoiseModel()
    basis = decompose_to_basis(circuit)
    rho = np.zeros((1 << n, 1 << n), dtype=np.complex128)
    rho[0, 0] = 1.0
    for op in basis.ops:
        rho = _conjugate(rho, op, n)
        rho = depolarize_density(rho, op.targets, noise.probability_for(op.arity), n)
        if check_trace and abs(np.trace(rho).real - 1.0) > 1e-10:
            raise AssertionError(f"trace drifted to {np.trace(rho)} after {op!r}")
    return rho


def exact_density_distribution(circuit: Circuit, noise: NoiseModel | None,
                               qubits: Sequence[int]) -> np.ndarray:
    rho = density_matrix(circuit, noise)
    diag = np.clip(np.diag(rho).real, 0.0, None)
    idx = outcome_index(circuit.num_qubits, tuple(qubits))
    return np.bincount(idx, weights=diag, minlength=1 << len(qubits))


def exact_density_probabilities(circuit: Circuit, noise: NoiseModel | None,
                                qubit: int) -> tuple[float, float]:
    p = exact_density_distribution(circuit, noise, [qubit])
    p = p / p.sum()
    return float(p[0]), float(p[1])
