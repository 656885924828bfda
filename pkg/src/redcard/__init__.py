"""Fixed-depth Hamiltonian simulation circuits from a reduced Cartan decomposition.

Typical use::

    from redcard import tfim, run_redcard, build_evolution_circuit, export_qasm
    result = run_redcard(tfim(4))
    print(export_qasm(build_evolution_circuit(result, t=1.0)))
"""

from .adjoint import AdjointFrame, Ansatz, conjugate, cost_fr, cost_full, residual
from .algebra import DLA, FrustrationGraph, anticommutation_matrix, frustration_components, generate_dla
from .cartan import (CartanStructure, OrderingReport, build_cartan_subalgebra, check_closure,
                     check_ordering, decompose, fragment_k, fragment_sizes, split_km, y_parity_involution)
from .circuits import (Circuit, Gate, build_compressed_tfxy_circuit, build_evolution_circuit,
                       export_qasm, parse_qasm)
from .errors import *  # noqa: F401,F403
from .models import ModelSpec, build, heisenberg, tfim, tfxy, xy
from .optimize import (ExactEvaluator, SynthesisConfig, SynthesisResult, fit_sinusoid,
                       minimize_fragment, rotosolve_angle, run_redcard, run_standard)
from .pauli import PauliString, PauliSum, commutes, multiply
from .qsim import ShotConfig, ShotEvaluator, estimate_cost, state_prep_circuit

__version__ = "0.1.0"
