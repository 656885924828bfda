"""
From a spin chain to a fixed-depth circuit
==========================================

Walks one transverse-field Ising chain through the whole pipeline:
Lie closure, the k/m split, fragment construction, optimisation,
an exact check against dense evolution, and QASM output.

Run with ``python3 demos/tfim_walkthrough.py``.
"""

import numpy as np

from redcard import (build_evolution_circuit, decompose, export_qasm, run_redcard,
                     SynthesisConfig, tfim)
from redcard.oracle import circuit_unitary, expm_i, to_dense, unitary_distance

# the model: four sites, open boundary
ham = tfim(4, J=1.0, g=0.5)
print("Hamiltonian:", ham)

# closure of the terms under commutation, then the Y-parity split
st = decompose(ham)
print(f"algebra dimension {st.dla.dim}, |k| = {len(st.k_basis)}, |m| = {len(st.m_basis)}")
print("abelian subalgebra h:", [p.label for p in st.h_basis])
print("reduced generators b:", [p.label for p in st.b_basis])

# each k string lands in the first fragment whose generator it anticommutes with
for b, frag in zip(st.b_basis, st.fragments):
    print(f"  {b.label}: {len(frag):2d} strings  {[p.label for p in frag]}")

# fragments are optimised one after another, each against the previous output
result = run_redcard(ham, SynthesisConfig(seed=0))
print(f"\nresidual {result.residual:.2e} after {result.cost_calls} cost evaluations")
print("h coefficients:", {k: round(v, 6) for k, v in result.h_coefficients().items()})

# the circuit has the same gates for every t; only the centre angles scale
hd = to_dense(ham)
for t in (0.1, 1.0, 10.0):
    circ = build_evolution_circuit(result, t=t)
    d = unitary_distance(circuit_unitary(circ), expm_i(hd, t))
    print(f"t = {t:5.1f}: {len(circ)} gates, {circ.cnot_count()} CNOTs, distance {d:.2e}")

print(f"\ndistance bound at t = 10: {10 * result.residual * np.linalg.norm(hd) * 10.0 + 1e-8:.2e}")

print("\nfirst lines of the QASM at t = 1:")
print("\n".join(export_qasm(build_evolution_circuit(result, t=1.0)).splitlines()[:12]))
