"""Dense-matrix ground truth for small systems.

Qubit 1 is the most significant tensor factor (``kron(P_1, P_2, ...)``).
Everything here is built from explicit 2x2 matrices rather than the
symplectic encoding, so it can serve as an independent check on it.
"""

from __future__ import annotations

import numpy as np

from redcard.errors import CapExceededError, PreconditionError

DENSE_CAP = 10
DENSITY_CAP = 8

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
H_GATE = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
S_GATE = np.diag([1, 1j])
SDG_GATE = np.diag([1, -1j])


def string_matrix(label: str, phase: int = 0) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for ch in label:
        out = np.kron(out, PAULI[ch])
    return (1j ** phase) * out


def to_dense(op, cap: int = DENSE_CAP) -> np.ndarray:
    """Matrix of a PauliSum or PauliString."""
    n = op.n_qubits
    if n > cap:
        raise CapExceededError(f"dense conversion capped at {cap} qubits, got {n}")
    if hasattr(op, "items"):
        mat = np.zeros((2 ** n, 2 ** n), dtype=complex)
        for p, c in op.items():
            mat += c * string_matrix(p.label)
        return mat
    return string_matrix(op.label, op.phase)


def expm_i(h: np.ndarray, t: float) -> np.ndarray:
    """``exp(-i t H)`` for Hermitian H by eigendecomposition."""
    if not np.allclose(h, h.conj().T, atol=1e-10):
        raise PreconditionError("expm_i needs a Hermitian matrix")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-1j * t * w)) @ v.conj().T


def unitary_distance(a: np.ndarray, b: np.ndarray) -> float:
    """``min_phi ||a - e^{i phi} b||_F``."""
    if a.shape != b.shape:
        raise PreconditionError(f"shape mismatch {a.shape} vs {b.shape}")
    sq = np.vdot(a, a).real + np.vdot(b, b).real - 2 * abs(np.vdot(a, b))
    return float(np.sqrt(max(sq, 0.0)))


def _embed(gate: np.ndarray, qubits: list[int], n: int) -> np.ndarray:
    """Full ``2^n`` matrix of a gate on ``qubits`` (0-indexed, qubit 0 most significant)."""
    k = len(qubits)
    full = np.zeros((2 ** n, 2 ** n), dtype=complex)
    g = gate.reshape([2] * (2 * k))
    for col in range(2 ** n):
        bits = [(col >> (n - 1 - q)) & 1 for q in range(n)]
        sub_in = tuple(bits[q] for q in qubits)
        for sub_out in np.ndindex(*([2] * k)):
            amp = g[sub_out + sub_in]
            if amp == 0:
                continue
            out_bits = list(bits)
            for q, v in zip(qubits, sub_out):
                out_bits[q] = v
            row = sum(v << (n - 1 - q) for q, v in enumerate(out_bits))
            full[row, col] += amp
    return full


CNOT_GATE = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


def gate_matrix(gate, total: int) -> np.ndarray:
    """Full unitary of one circuit gate on ``total`` qubits."""
    kind = gate.kind
    if kind == "rot":
        chars = ["I"] * total
        for q in range(gate.string.n_qubits):
            chars[q] = gate.string.site(q)
        p = string_matrix("".join(chars))
        return np.cos(gate.angle) * np.eye(2 ** total) + 1j * np.sin(gate.angle) * p
    if kind == "h":
        return _embed(H_GATE, [gate.qubit], total)
    if kind == "s":
        return _embed(S_GATE, [gate.qubit], total)
    if kind == "sdg":
        return _embed(SDG_GATE, [gate.qubit], total)
    if kind == "cx":
        return _embed(CNOT_GATE, [gate.control, gate.target], total)
    if kind == "barrier":
        return np.eye(2 ** total, dtype=complex)
    raise PreconditionError(f"gate {kind!r} has no unitary")


def circuit_unitary(circuit, cap: int = DENSE_CAP) -> np.ndarray:
    """Unitary of a reset-free circuit on its physical qubits (no ancillas)."""
    total = circuit.n_qubits + circuit.n_ancillas
    if total > cap:
        raise CapExceededError(f"circuit has {total} qubits, cap is {cap}")
    if circuit.n_ancillas:
        raise PreconditionError("circuit_unitary needs an ancilla-free circuit")
    u = np.eye(2 ** total, dtype=complex)
    for g in circuit.gates:
        if g.kind == "reset":
            raise PreconditionError("reset is not unitary")
        u = gate_matrix(g, total) @ u
    return u


def simulate_circuit_density(circuit, cap: int = DENSITY_CAP) -> np.ndarray:
    """Run the circuit from ``|0...0>`` and trace out the ancillas."""
    n, a = circuit.n_qubits, circuit.n_ancillas
    total = n + a
    if total > cap:
        raise CapExceededError(f"density simulation capped at {cap} qubits, got {total}")
    dim = 2 ** total
    rho = np.zeros((dim, dim), dtype=complex)
    rho[0, 0] = 1.0
    for g in circuit.gates:
        if g.kind == "reset":
            k0 = _embed(np.array([[1, 0], [0, 0]], dtype=complex), [g.qubit], total)
            k1 = _embed(np.array([[0, 1], [0, 0]], dtype=complex), [g.qubit], total)
            rho = k0 @ rho @ k0.conj().T + k1 @ rho @ k1.conj().T
        else:
            u = gate_matrix(g, total)
            rho = u @ rho @ u.conj().T
    rho = rho.reshape(2 ** n, 2 ** a, 2 ** n, 2 ** a)
    return np.einsum("ajbj->ab", rho)
