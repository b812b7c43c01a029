"""Amplitude encoding of pixel vectors and the two swap-test input states.

``|psi> = (|0>|A> + |1>|B>) / sqrt(2)`` and
``|phi> = (|A| |0> - |B| |1>) / sqrt(Z)`` with ``Z = |A|^2 + |B|^2``.
All amplitudes are real, so state preparation only needs RY and CNOT.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, EncodingError, ShapeError
from .sim import Circuit, GateOp, cnot, ry


@dataclass(frozen=True)
class BlockVector:
    values: np.ndarray
    norm: float

    @classmethod
    def from_values(cls, values) -> "BlockVector":
        arr = np.asarray(values, dtype=np.int64).ravel()
        if arr.size and arr.min() < 0:
            raise EncodingError("pixel values must be non-negative")
        return cls(arr, float(np.sqrt(np.dot(arr, arr))))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class PairEncoding:
    A: BlockVector
    B: BlockVector
    Z: float
    psi_circuit: Circuit
    phi_circuit: Circuit

    @property
    def data_qubits(self) -> int:
        return self.psi_circuit.num_qubits - 1


def _next_pow2(n: int) -> int:
    return 1 << max(0, (n - 1).bit_length())


def pad_pow2(values) -> np.ndarray:
    arr = np.asarray(values).ravel()
    size = max(2, _next_pow2(arr.size))
    out = np.zeros(size, dtype=arr.dtype)
    out[: arr.size] = arr
    return out


def normalize(values) -> tuple[np.ndarray, float]:
    """Zero-pad to a power of two (at least 2) and scale to unit length."""
    arr = np.asarray(values)
    if arr.size == 0:
        raise EncodingError("cannot encode an empty vector")
    if np.any(arr < 0):
        raise EncodingError("pixel values must be non-negative")
    padded = pad_pow2(arr).astype(np.float64)
    norm = float(np.sqrt(np.dot(padded, padded)))
    if norm == 0.0:
        raise EncodingError("cannot encode the zero vector")
    return padded / norm, norm


def _gray(i: int) -> int:
    return i ^ (i >> 1)


def uniformly_controlled_ry(angles, controls: list[int], target: int) -> list[GateOp]:
    """RY(angles[p]) on ``target`` for control value ``p`` (controls[0] is p's LSB).

    Gray-code expansion into ``2**k`` RY gates and ``2**k`` CNOTs. The
    angle of step ``i`` follows from the sign pattern the CNOTs impose:
    ``alpha_p = sum_i (-1)**popcount(gray(i) & p) * theta_i``.
    """
    angles = np.asarray(angles, dtype=np.float64)
    k = len(controls)
    if angles.size != 1 << k:
        raise ShapeError(f"{k} controls need {1 << k} angles, got {angles.size}")
    if k == 0:
        return [ry(target, float(angles[0]))]
    size = 1 << k
    signs = np.array([[(-1) ** bin(_gray(i) & p).count("1") for p in range(size)]
                      for i in range(size)], dtype=np.float64)
    thetas = signs @ angles / size
    ops = []
    for i in range(size):
        ops.append(ry(target, float(thetas[i])))
        flip = (i + 1) & -(i + 1) if i + 1 < size else 1 << (k - 1)
        ops.append(cnot(controls[flip.bit_length() - 1], target))
    return ops


def prepare_state_circuit(amplitudes) -> Circuit:
    """Rotation tree mapping ``|0...0>`` to a real unit vector of length ``2**k``.

    The most significant qubit is fixed first; each lower qubit is set by an RY
    multiplexed on the qubits above it. Only the leaf level carries signs.
    """
    amps = np.asarray(amplitudes, dtype=np.float64).ravel()
    size = amps.size
    if size < 2 or size & (size - 1):
        raise ShapeError(f"amplitude count must be a power of two >= 2, got {size}")
    if abs(np.linalg.norm(amps) - 1.0) > 1e-6:
        raise ArgumentError(f"amplitudes must have unit norm, got {np.linalg.norm(amps)}")
    k = size.bit_length() - 1
    ops: list[GateOp] = []
    for level in range(k):
        target = k - 1 - level
        blocks = amps.reshape(1 << level, 2, -1)
        if blocks.shape[2] == 1:
            lo, hi = blocks[:, 0, 0], blocks[:, 1, 0]
        else:
            lo = np.linalg.norm(blocks[:, 0, :], axis=1)
            hi = np.linalg.norm(blocks[:, 1, :], axis=1)
        angles = 2.0 * np.arctan2(hi, lo)
        if np.allclose(angles, 0.0, atol=1e-14):
            continue
        # block index p counts the higher qubits with qubit k-1 most significant,
        # so controls[0] (p's LSB) is the qubit just above the target
        controls = list(range(target + 1, k))
        ops.extend(uniformly_controlled_ry(angles, controls, target))
    return Circuit(k, tuple(ops))


def phi_angle(norm_a: float, norm_b: float) -> float:
    return 2.0 * math.atan2(-norm_b, norm_a)


def build_pair_encoding(A, B) -> PairEncoding:
    a = np.asarray(A).ravel()
    b = np.asarray(B).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"vector lengths differ: {a.size} vs {b.size}")
    amp_a, norm_a = normalize(a)
    amp_b, norm_b = normalize(b)
    vec_a = BlockVector.from_values(a)
    vec_b = BlockVector.from_values(b)
    z = vec_a.norm ** 2 + vec_b.norm ** 2
    # label qubit is the register's MSB: first half of the vector is label=0
    psi = prepare_state_circuit(np.concatenate([amp_a, amp_b]) / math.sqrt(2.0))
    phi = Circuit(1, (ry(0, phi_angle(norm_a, norm_b)),))
    return PairEncoding(vec_a, vec_b, float(z), psi, phi)
