"""Shot-noise model of the reduced cost and the mixed-state preparation circuits.

The reduced cost ``<K b K^dagger, H_r>`` is what a device would measure after
preparing ``(I + b) / 2^n``, applying K, and estimating each Pauli term of
``H_r`` from a fixed number of shots. Each term's outcome is a +/-1 variable
whose mean is the exact coefficient ``p_t`` of ``P_t`` in ``K b K^dagger``,
optionally shrunk by a global depolarizing factor ``1 - lambda``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from redcard.adjoint import AdjointFrame, Ansatz, conjugate
from redcard.circuits import Circuit, cx, h, reset, s
from redcard.errors import PreconditionError
from redcard.optimize import SAMPLE_POINTS, rotosolve_from_samples
from redcard.pauli import PauliString, PauliSum


@dataclass
class ShotConfig:
    shots_per_term: int = 800
    seed: int | None = None
    depol: float = 0.0

    def __post_init__(self):
        if self.shots_per_term < 1:
            raise PreconditionError("shots_per_term must be positive")
        if not 0.0 <= self.depol < 1.0:
            raise PreconditionError("depolarizing strength must lie in [0, 1)")


def _sample(means: np.ndarray, coeffs: np.ndarray, cfg: ShotConfig, rng: np.random.Generator) -> float:
    p = (1.0 - cfg.depol) * means
    if np.any(np.abs(p) > 1.0 + 1e-9):
        raise PreconditionError("expectation outside [-1, 1]; operand is not a single Pauli string")
    q = np.clip(0.5 * (1.0 + p), 0.0, 1.0)
    hits = rng.binomial(cfg.shots_per_term, q)
    est = (2.0 * hits - cfg.shots_per_term) / cfg.shots_per_term
    return float(coeffs @ est)


def estimate_cost(ansatz_r: Ansatz, b_r: PauliString, h_r: PauliSum, cfg: ShotConfig,
                  rng: np.random.Generator | None = None) -> float:
    """One noisy estimate of ``<K b_r K^dagger, H_r>``."""
    if not isinstance(b_r, PauliString):
        raise PreconditionError("the shot model prepares (I + b)/2^n for a single string b")
    rng = rng if rng is not None else np.random.default_rng(cfg.seed)
    rotated = conjugate(ansatz_r, PauliSum.from_string(b_r))
    strings = h_r.strings
    means = np.array([rotated.coeff(p) for p in strings])
    coeffs = np.array([h_r.coeff(p) for p in strings])
    return _sample(means, coeffs, cfg, rng)


class ShotEvaluator:
    """Shot-noise cost evaluator with its own seeded generator."""

    name = "shots"

    def __init__(self, cfg: ShotConfig | None = None):
        self.cfg = cfg or ShotConfig()
        self.rng = np.random.default_rng(self.cfg.seed)
        self.calls = 0

    def evaluate(self, ansatz: Ansatz, operand, h_r: PauliSum) -> float:
        self.calls += 1
        return estimate_cost(ansatz, operand, h_r, self.cfg, self.rng)

    def evaluate_vector(self, frame: AdjointFrame, strings, angles, operand, h) -> float:
        self.calls += 1
        means = frame.conjugate(strings, angles, operand)
        nz = h != 0.0
        return _sample(means[nz], h[nz], self.cfg, self.rng)

    def noise_scale(self, h: np.ndarray) -> float:
        """Standard deviation bound ``sqrt(sum c_t^2 / shots)`` of one estimate."""
        return math.sqrt(float(h @ h) / self.cfg.shots_per_term)


def scaled_rotosolve(samples, lam: float, current: float = 0.0, flat_tol: float = 1e-12) -> dict:
    """Compare Rotosolve on clean samples and on samples scaled by ``1 - lam``."""
    f = [float(x) for x in samples]
    t0, _ = rotosolve_from_samples(*f, current=current, flat_tol=flat_tol)
    scaled = [(1.0 - lam) * x for x in f]
    t1, _ = rotosolve_from_samples(*scaled, current=current, flat_tol=flat_tol)
    a, b = f[0] - 0.5 * (f[0] + f[2]), f[1] - 0.5 * (f[0] + f[2])
    skipped = (1.0 - lam) * math.hypot(a, b) < flat_tol <= math.hypot(a, b)
    return {"theta_clean": t0, "theta_scaled": t1, "skipped": skipped,
            "match": skipped or math.isclose(t0, t1, abs_tol=1e-12)}


def depolarizing_scale_invariance_check(ansatz: Ansatz, b_r: PauliString, h_r: PauliSum,
                                        lam: float, index: int = 0,
                                        flat_tol: float = 1e-12) -> dict:
    """Does a uniform depolarizing factor leave the Rotosolve update of one angle alone?

    The optimum is scale invariant; the only way it can differ is when the
    shrunk amplitude falls under ``flat_tol`` and the update is skipped, which
    the report flags.
    """
    if not 0.0 <= lam < 1.0:
        raise PreconditionError("lambda must lie in [0, 1)")
    op = PauliSum.from_string(b_r)
    samples = [sum(c * conjugate(ansatz.with_angle(index, t), op).coeff(p) for p, c in h_r.items())
               for t in SAMPLE_POINTS]
    return scaled_rotosolve(samples, lam, ansatz.angles[index], flat_tol)


def state_prep_circuit(sigma: PauliString, single_ancilla: bool = True) -> Circuit:
    """Circuit preparing ``(I + sigma) / 2^n`` from ``|0...0>``.

    Every qubit except an anchor is fully mixed by entangling it with an
    ancilla that is then discarded (reset, so one ancilla is reused, or kept
    aside with ``single_ancilla=False``). The anchor, still ``|0>``, carries the
    Z-parity of the support once the other support qubits are CNOT-ed onto it,
    and single-qubit basis changes turn the Z string into ``sigma``. Uses
    ``n + w - 2`` CNOTs for a weight-w string.
    """
    sigma = sigma.canonical()
    n = sigma.n_qubits
    sup = sigma.support
    if not sup:
        raise PreconditionError("the identity string has no (I + sigma)/2^n state to prepare")
    anchor = sup[0]
    others = [q for q in range(n) if q != anchor]
    circ = Circuit(n, (1 if others else 0) if single_ancilla else len(others))
    for i, q in enumerate(others):
        anc = n if single_ancilla else n + i
        circ.append(h(q))
        circ.append(cx(q, anc))
        if single_ancilla:
            circ.append(reset(anc))
    for q in sup[1:]:
        circ.append(cx(q, anchor))
    for q in sup:
        c = sigma.site(q)
        if c == "X":
            circ.append(h(q))
        elif c == "Y":
            circ.append(h(q))
            circ.append(s(q))
    return circ
