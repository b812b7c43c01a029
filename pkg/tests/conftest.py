import cmath
import math

import numpy as np
import pytest

from qblockmatch.sim import Circuit, GateKind, cnot, h

# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE = {}


def dense_gate(op, n):
    """Reference matrix of one gate, built basis state by basis state."""
    dim = 1 << n
    U = np.zeros((dim, dim), dtype=complex)
    bit = lambda i, q: (i >> q) & 1
    t = op.targets
    theta = op.params[0] if op.params else 0.0
    for i in range(dim):
        k = op.kind
        if k in (GateKind.H, GateKind.RY, GateKind.SX):
            q = t[0]
            b = bit(i, q)
            j0, j1 = i & ~(1 << q), i | (1 << q)
            if k is GateKind.H:
                col = {j0: 1 / math.sqrt(2), j1: (1 if b == 0 else -1) / math.sqrt(2)}
            elif k is GateKind.RY:
                c, s = math.cos(theta / 2), math.sin(theta / 2)
                col = {j0: c, j1: s} if b == 0 else {j0: -s, j1: c}
            else:
                a, bb = (1 + 1j) / 2, (1 - 1j) / 2
                col = {j0: a, j1: bb} if b == 0 else {j0: bb, j1: a}
            for j, v in col.items():
                U[j, i] += v
        elif k is GateKind.X:
            U[i ^ (1 << t[0]), i] = 1
        elif k is GateKind.RZ:
            U[i, i] = cmath.exp((1j if bit(i, t[0]) else -1j) * theta / 2)
        elif k is GateKind.PHASE:
            U[i, i] = cmath.exp(1j * theta) if bit(i, t[0]) else 1
        elif k is GateKind.CNOT:
            U[i ^ (bit(i, t[0]) << t[1]), i] = 1
        elif k is GateKind.CPHASE:
            U[i, i] = cmath.exp(1j * theta) if bit(i, t[0]) and bit(i, t[1]) else 1
        elif k is GateKind.CCPHASE:
            on = bit(i, t[0]) and bit(i, t[1]) and bit(i, t[2])
            U[i, i] = cmath.exp(1j * theta) if on else 1
        elif k is GateKind.CSWAP:
            j = i
            if bit(i, t[0]) and bit(i, t[1]) != bit(i, t[2]):
                j = i ^ ((1 << t[1]) | (1 << t[2]))
            U[j, i] = 1
    return U


def dense_circuit(circuit):
    U = np.eye(1 << circuit.num_qubits, dtype=complex)
    for op in circuit.ops:
        U = dense_gate(op, circuit.num_qubits) @ U
    return U


def binomial_sigma(p, shots):
    return math.sqrt(max(p * (1 - p), 1e-300) / shots)


@pytest.fixture
def bell():
    return Circuit(2, (h(0), cnot(0, 1)))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        passed, name, detail = ACCEPTANCE[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{status}] {number:>2}. {name}: {detail}")
