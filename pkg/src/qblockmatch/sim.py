"""Dense state-vector simulator for small circuits.

Conventions used throughout the package:

* qubit 0 is the least significant bit of a basis-state index;
* bitstrings in histograms list the most significant measured qubit first,
  i.e. for ``qubits=[q0, q1, q2]`` the string reads ``b(q2) b(q1) b(q0)``;
* global phase is ignored by every equivalence check.

All kernels act on arrays of shape ``(batch, 2**n)`` so that the trajectory
engine in :mod:`qblockmatch.noise` can evolve many states at once.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ArgumentError,
    CapacityError,
    DecompositionError,
    QubitIndexError,
    ShapeError,
)

MAX_QUBITS = 24


class GateKind(str, enum.Enum):
    H = "H"
    X = "X"
    RY = "RY"
    RZ = "RZ"
    PHASE = "PHASE"
    SX = "SX"
    CNOT = "CNOT"
    CPHASE = "CPHASE"
    CSWAP = "CSWAP"
    CCPHASE = "CCPHASE"


ARITY = {
    GateKind.H: 1,
    GateKind.X: 1,
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.PHASE: 1,
    GateKind.SX: 1,
    GateKind.CNOT: 2,
    GateKind.CPHASE: 2,
    GateKind.CSWAP: 3,
    GateKind.CCPHASE: 3,
}

N_PARAMS = {
    GateKind.RY: 1,
    GateKind.RZ: 1,
    GateKind.PHASE: 1,
    GateKind.CPHASE: 1,
    GateKind.CCPHASE: 1,
}


@dataclass(frozen=True)
class GateOp:
    """One gate application.

    ``targets`` lists every qubit the gate touches, controls first:
    ``CNOT(c, t)``, ``CPHASE(c, t)``, ``CSWAP(c, a, b)``, ``CCPHASE(c1, c2, t)``.
    """

    kind: GateKind
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        try:
            kind = GateKind(self.kind)
        except ValueError:
            raise DecompositionError(f"unsupported gate kind {self.kind!r}") from None
        targets = tuple(int(q) for q in self.targets)
        params = tuple(float(p) for p in self.params)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "params", params)
        if len(targets) != ARITY[kind]:
            raise ArgumentError(f"{kind.value} acts on {ARITY[kind]} qubit(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise QubitIndexError(f"repeated qubit in {kind.value}{targets}")
        if any(q < 0 for q in targets):
            raise QubitIndexError(f"negative qubit index in {kind.value}{targets}")
        if len(params) != N_PARAMS.get(kind, 0):
            raise ArgumentError(f"{kind.value} takes {N_PARAMS.get(kind, 0)} parameter(s)")

    @property
    def arity(self) -> int:
        return len(self.targets)

    def remap(self, mapping: Sequence[int]) -> "GateOp":
        return GateOp(self.kind, tuple(mapping[q] for q in self.targets), self.params)

    def __repr__(self):
        args = ", ".join(str(q) for q in self.targets)
        if self.params:
            args += "; " + ", ".join(f"{p:.6g}" for p in self.params)
        return f"{self.kind.value}({args})"


def h(q):
    return GateOp(GateKind.H, (q,))


def x(q):
    return GateOp(GateKind.X, (q,))


def sx(q):
    return GateOp(GateKind.SX, (q,))


def ry(q, theta):
    return GateOp(GateKind.RY, (q,), (theta,))


def rz(q, theta):
    return GateOp(GateKind.RZ, (q,), (theta,))


def phase(q, theta):
    return GateOp(GateKind.PHASE, (q,), (theta,))


def cnot(control, target):
    return GateOp(GateKind.CNOT, (control, target))


def cphase(control, target, theta):
    return GateOp(GateKind.CPHASE, (control, target), (theta,))


def cswap(control, a, b):
    return GateOp(GateKind.CSWAP, (control, a, b))


def ccphase(c1, c2, target, theta):
    return GateOp(GateKind.CCPHASE, (c1, c2, target), (theta,))


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered list of gates on ``num_qubits`` qubits."""

    num_qubits: int
    ops: tuple[GateOp, ...] = ()

    def __post_init__(self):
        ops = tuple(self.ops)
        object.__setattr__(self, "ops", ops)
        if self.num_qubits < 1:
            raise ArgumentError("a circuit needs at least one qubit")
        for op in ops:
            if not isinstance(op, GateOp):
                raise ArgumentError(f"not a GateOp: {op!r}")
            if max(op.targets) >= self.num_qubits:
                raise QubitIndexError(f"{op!r} out of range for {self.num_qubits} qubits")

    def __len__(self):
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def __add__(self, other: "Circuit") -> "Circuit":
        if other.num_qubits != self.num_qubits:
            raise ShapeError("cannot concatenate circuits of different widths")
        return Circuit(self.num_qubits, self.ops + other.ops)

    def remap(self, mapping: Sequence[int], num_qubits: int) -> "Circuit":
        """Embed the circuit into a wider register, qubit ``i`` -> ``mapping[i]``."""
        return Circuit(num_qubits, tuple(op.remap(mapping) for op in self.ops))

    def inverse(self) -> "Circuit":
        inv = []
        for op in reversed(self.ops):
            if op.kind in (GateKind.H, GateKind.X, GateKind.CNOT, GateKind.CSWAP):
                inv.append(op)
            elif op.kind is GateKind.SX:
                inv.extend([op, op, op])
            else:
                inv.append(GateOp(op.kind, op.targets, tuple(-p for p in op.params)))
        return Circuit(self.num_qubits, tuple(inv))


@dataclass
class StateVector:
    num_qubits: int
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.num_qubits,):
            raise ShapeError(
                f"{self.num_qubits} qubits need {1 << self.num_qubits} amplitudes, "
                f"got shape {self.amplitudes.shape}"
            )

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.num_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class GateReport:
    cnot_count: int
    single_qubit_count: int
    total_qubits: int
    depth: int


# ---------------------------------------------------------------------------
# kernels

_SQ2 = 1.0 / math.sqrt(2.0)
_H = np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=np.complex128)
_SX = 0.5 * np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=np.complex128)


def _ry_matrix(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


@lru_cache(maxsize=256)
def _indices(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


@lru_cache(maxsize=4096)
def _bit(n: int, q: int) -> np.ndarray:
    return (_indices(n) >> q) & 1


@lru_cache(maxsize=4096)
def _permutation(n: int, kind: GateKind, targets: tuple[int, ...]) -> np.ndarray:
    idx = _indices(n)
    if kind is GateKind.X:
        return idx ^ (1 << targets[0])
    if kind is GateKind.CNOT:
        c, t = targets
        return idx ^ (_bit(n, c) << t)
    if kind is GateKind.CSWAP:
        c, a, b = targets
        flip = _bit(n, c) & (_bit(n, a) ^ _bit(n, b))
        return idx ^ (flip * ((1 << a) | (1 << b)))
    raise AssertionError(kind)


def _apply_1q(states: np.ndarray, matrix: np.ndarray, q: int, n: int) -> np.ndarray:
    batch = states.shape[0]
    view = states.reshape(batch, 1 << (n - q - 1), 2, 1 << q)
    out = np.einsum("ij,abjc->abic", matrix, view)
    return out.reshape(batch, 1 << n)


def _diagonal(op: GateOp, n: int) -> np.ndarray:
    kind = op.kind
    theta = op.params[0]
    if kind is GateKind.RZ:
        b = _bit(n, op.targets[0])
        return np.where(b == 1, np.exp(0.5j * theta), np.exp(-0.5j * theta))
    mask = _bit(n, op.targets[0])
    for q in op.targets[1:]:
        mask = mask & _bit(n, q)
    return np.where(mask == 1, np.exp(1j * theta), 1.0 + 0j)


def apply_op_batch(states: np.ndarray, op: GateOp, n: int) -> np.ndarray:
    """Apply ``op`` to every row of a ``(batch, 2**n)`` amplitude array."""
    kind = op.kind
    if kind in (GateKind.X, GateKind.CNOT, GateKind.CSWAP):
        return states[:, _permutation(n, kind, op.targets)]
    if kind in (GateKind.RZ, GateKind.PHASE, GateKind.CPHASE, GateKind.CCPHASE):
        return states * _diagonal(op, n)
    if kind is GateKind.H:
        return _apply_1q(states, _H, op.targets[0], n)
    if kind is GateKind.SX:
        return _apply_1q(states, _SX, op.targets[0], n)
    if kind is GateKind.RY:
        return _apply_1q(states, _ry_matrix(op.params[0]), op.targets[0], n)
    raise DecompositionError(f"no kernel for {kind}")


def apply_pauli_batch(states: np.ndarray, pauli: int, q: int, n: int) -> np.ndarray:
    """Apply I/X/Y/Z (``pauli`` = 0/1/2/3) on qubit ``q`` to every row."""
    if pauli == 0:
        return states
    if pauli == 3:
        return states * (1 - 2 * _bit(n, q))
    flipped = states[:, _indices(n) ^ (1 << q)]
    if pauli == 1:
        return flipped
    # Y|0> = i|1>, Y|1> = -i|0>
    return flipped * np.where(_bit(n, q) == 1, 1j, -1j)


# ---------------------------------------------------------------------------
# public state operations


def new_state(num_qubits: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    if not 1 <= num_qubits <= max_qubits:
        raise CapacityError(f"num_qubits must be in [1, {max_qubits}], got {num_qubits}")
    amps = np.zeros(1 << num_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(num_qubits, amps)


def _check_qubit(q: int, n: int):
    if not 0 <= q < n:
        raise QubitIndexError(f"qubit {q} out of range for {n} qubits")


def apply_gate(state: StateVector, op: GateOp) -> StateVector:
    for q in op.targets:
        _check_qubit(q, state.num_qubits)
    out = apply_op_batch(state.amplitudes[None, :], op, state.num_qubits)
    return StateVector(state.num_qubits, out[0])


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    if circuit.num_qubits != state.num_qubits:
        raise ShapeError(
            f"circuit has {circuit.num_qubits} qubits, state has {state.num_qubits}"
        )
    n = state.num_qubits
    amps = state.amplitudes[None, :]
    for op in circuit.ops:
        amps = apply_op_batch(amps, op, n)
    return StateVector(n, amps[0].copy())


def simulate(circuit: Circuit) -> StateVector:
    """Run ``circuit`` on ``|0...0>``."""
    return apply_circuit(new_state(circuit.num_qubits), circuit)


def outcome_index(n: int, qubits: Sequence[int]) -> np.ndarray:
    """Map every basis index to the integer read out on ``qubits`` (qubits[0] = LSB)."""
    out = np.zeros(1 << n, dtype=np.int64)
    for j, q in enumerate(qubits):
        out |= _bit(n, q) << j
    return out


def marginal_probabilities(state: StateVector, qubits: Sequence[int]) -> np.ndarray:
    """Joint distribution of ``qubits``; entry ``v`` is P(readout == v)."""
    qubits = list(qubits)
    if not qubits:
        raise ArgumentError("no qubits to measure")
    for q in qubits:
        _check_qubit(q, state.num_qubits)
    if len(set(qubits)) != len(qubits):
        raise QubitIndexError("repeated qubit in measurement")
    idx = outcome_index(state.num_qubits, tuple(qubits))
    return np.bincount(idx, weights=state.probabilities(), minlength=1 << len(qubits))


def qubit_probabilities(state: StateVector, qubit: int) -> tuple[float, float]:
    p = marginal_probabilities(state, [qubit])
    total = p.sum()
    return float(p[0] / total), float(p[1] / total)


def bitstring(value: int, width: int) -> str:
    return format(int(value), f"0{width}b")


def counts_to_histogram(counts: np.ndarray, width: int) -> dict[str, int]:
    return {bitstring(v, width): int(c) for v, c in enumerate(counts) if c > 0}


def sample_counts(state: StateVector, qubits: Sequence[int], shots: int, seed: int) -> dict[str, int]:
    """Draw ``shots`` joint samples of ``qubits``; identical seed gives identical counts."""
    if shots < 1:
        raise ArgumentError(f"shots must be >= 1, got {shots}")
    p = marginal_probabilities(state, qubits)
    p = np.clip(p, 0.0, None)
    p /= p.sum()
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p)
    return counts_to_histogram(counts, len(list(qubits)))


# ---------------------------------------------------------------------------
# decomposition and resource counting

_T = math.pi / 4


def _toffoli(c1, c2, t):
    return [
        h(t),
        cnot(c2, t),
        phase(t, -_T),
        cnot(c1, t),
        phase(t, _T),
        cnot(c2, t),
        phase(t, -_T),
        cnot(c1, t),
        phase(c2, _T),
        phase(t, _T),
        h(t),
        cnot(c1, c2),
        phase(c1, _T),
        phase(c2, -_T),
        cnot(c1, c2),
    ]


def _cphase(c, t, theta):
    return [
        phase(c, theta / 2),
        cnot(c, t),
        phase(t, -theta / 2),
        cnot(c, t),
        phase(t, theta / 2),
    ]


def decompose_op(op: GateOp) -> list[GateOp]:
    """Expand one gate into CNOT + single-qubit gates (exact up to global phase)."""
    kind = op.kind
    if op.arity == 1 or kind is GateKind.CNOT:
        return [op]
    if kind is GateKind.CPHASE:
        return _cphase(*op.targets, op.params[0])
    if kind is GateKind.CSWAP:
        c, a, b = op.targets
        return [cnot(b, a), *_toffoli(c, a, b), cnot(b, a)]
    if kind is GateKind.CCPHASE:
        c1, c2, t = op.targets
        theta = op.params[0]
        return [
            *_cphase(c2, t, theta / 2),
            cnot(c1, c2),
            *_cphase(c2, t, -theta / 2),
            cnot(c1, c2),
            *_cphase(c1, t, theta / 2),
        ]
    raise DecompositionError(f"cannot decompose {kind}")


def decompose_to_basis(circuit: Circuit) -> Circuit:
    ops: list[GateOp] = []
    for op in circuit.ops:
        ops.extend(decompose_op(op))
    return Circuit(circuit.num_qubits, tuple(ops))


def circuit_depth(circuit: Circuit) -> int:
    level = [0] * circuit.num_qubits
    for op in circuit.ops:
        layer = max(level[q] for q in op.targets) + 1
        for q in op.targets:
            level[q] = layer
    return max(level, default=0)


def gate_counts(circuit: Circuit) -> GateReport:
    """Resource counts after decomposition to CNOT + single-qubit gates."""
    basis = decompose_to_basis(circuit)
    cx = sum(1 for op in basis.ops if op.kind is GateKind.CNOT)
    return GateReport(
        cnot_count=cx,
        single_qubit_count=len(basis.ops) - cx,
        total_qubits=circuit.num_qubits,
        depth=circuit_depth(basis) if basis.ops else 0,
    )


def unitary(circuit: Circuit) -> np.ndarray:
    """Full ``2**n x 2**n`` matrix of a small circuit (column j = image of |j>)."""
    n = circuit.num_qubits
    if n > 10:
        raise CapacityError("unitary() is meant for circuits of at most 10 qubits")
    states = np.eye(1 << n, dtype=np.complex128)
    for op in circuit.ops:
        states = apply_op_batch(states, op, n)
    return states.T


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|, insensitive to global phase."""
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)))


def random_circuit(num_qubits: int, num_ops: int, rng: np.random.Generator,
                   kinds: Iterable[GateKind] | None = None) -> Circuit:
    """Random circuit over the supported gate set, used by property tests and demos."""
    pool = [k for k in (kinds or GateKind) if ARITY[k] <= num_qubits]
    ops = []
    for _ in range(num_ops):
        kind = pool[rng.integers(len(pool))]
        qubits = rng.choice(num_qubits, size=ARITY[kind], replace=False)
        params = rng.uniform(-math.pi, math.pi, N_PARAMS.get(kind, 0))
        ops.append(GateOp(kind, tuple(int(q) for q in qubits), tuple(params)))
    return Circuit(num_qubits, tuple(ops))
