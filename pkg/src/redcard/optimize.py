"""Rotosolve minimization, the per-fragment driver and the two synthesis pipelines.

``run_redcard`` solves one small problem per k fragment, rotating H into the
commutant of b_1, b_2, ... in turn; ``run_standard`` optimizes every k angle at
once against ``v = sum_j gamma_j h_j``. Both use the same product ansatz and
count cost-function evaluations the same way, so their call counts compare.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Protocol, Sequence

import numpy as np

from redcard.adjoint import AdjointFrame, Ansatz, conjugate, inner, irrational_weights
from redcard.cartan import CartanStructure, decompose
from redcard.errors import PreconditionError
from redcard.pauli import PauliString, PauliSum, commutes

SAMPLE_POINTS = (0.0, math.pi / 4, math.pi / 2)


@dataclass
class SynthesisConfig:
    seed: int = 0
    tol: float = 1e-10
    max_iters: int = 100_000
    flat_tol: float = 1e-12
    backend: str = "exact"
    shots: int = 800
    depol: float = 0.0
    patience: int = 3
    residual_target: float = 0.01
    staging_tol: float = 1e-3
    ansatz: str = "product"
    h_seed: str | None = None
    b_order: list[int] | None = None
    shot_max_iters: int = 200

    def to_dict(self) -> dict:
        return asdict(self)


# -- cost evaluators ------------------------------------------------------------

class CostEvaluator(Protocol):
    """Anything that can score ``<K b K^dagger, H>``; counts its own calls."""

    calls: int

    def evaluate(self, ansatz: Ansatz, operand, h: PauliSum) -> float: ...

    def evaluate_vector(self, frame: AdjointFrame, strings, angles, operand: np.ndarray,
                        h: np.ndarray) -> float: ...

    def noise_scale(self, h: np.ndarray) -> float: ...


class ExactEvaluator:
    """Deterministic classical evaluation through the adjoint action."""

    name = "exact"

    def __init__(self):
        self.calls = 0

    def evaluate(self, ansatz: Ansatz, operand, h: PauliSum) -> float:
        self.calls += 1
        if isinstance(operand, PauliString):
            operand = PauliSum.from_string(operand)
        return inner(conjugate(ansatz, operand), h)

    def evaluate_vector(self, frame, strings, angles, operand, h) -> float:
        self.calls += 1
        return float(frame.conjugate(strings, angles, operand) @ h)

    def noise_scale(self, h) -> float:
        return 0.0


# -- Rotosolve ------------------------------------------------------------------

def fit_sinusoid(f0: float, f45: float, f90: float) -> tuple[float, float, float]:
    """``(a, b, c)`` with ``f(t) = a cos 2t + b sin 2t + c`` through the three samples."""
    c = 0.5 * (f0 + f90)
    return f0 - c, f45 - c, c


def rotosolve_from_samples(f0: float, f45: float, f90: float, current: float = 0.0,
                           flat_tol: float = 1e-12) -> tuple[float, float]:
    """Closed-form minimizer of the fitted sinusoid, in ``[0, pi)``.

    If the amplitude is below ``flat_tol`` the current angle is kept.
    """
    a, b, c = fit_sinusoid(f0, f45, f90)
    amp = math.hypot(a, b)
    if amp < flat_tol:
        return current, a * math.cos(2 * current) + b * math.sin(2 * current) + c
    theta = (0.5 * math.atan2(-b, -a)) % math.pi
    return theta, c - amp


def rotosolve_angle(evaluator, ansatz: Ansatz, index: int, b_r, h_r: PauliSum,
                    flat_tol: float = 1e-12) -> tuple[float, float]:
    """Best value of angle ``index`` with the others held fixed.

    Returns ``(new_angle, predicted_min)``; apply it with ``ansatz.with_angle``.
    """
    if not 0 <= index < len(ansatz):
        raise PreconditionError(f"index {index} out of range for {len(ansatz)} factors")
    samples = [evaluator.evaluate(ansatz.with_angle(index, t), b_r, h_r) for t in SAMPLE_POINTS]
    return rotosolve_from_samples(*samples, current=ansatz.angles[index], flat_tol=flat_tol)


def _generic_sweep(evaluator, frame, strings, angles, operand, h, flat_tol):
    pred = None
    for j in range(len(strings)):
        samples = []
        for t in SAMPLE_POINTS:
            trial = angles.copy()
            trial[j] = t
            samples.append(evaluator.evaluate_vector(frame, strings, trial, operand, h))
        angles[j], pred = rotosolve_from_samples(*samples, current=angles[j], flat_tol=flat_tol)
    return angles, pred


def _exact_sweep(evaluator, frame, strings, angles, operand, h, flat_tol):
    # f = <F_j (R b R^+) F_j^+, L^+ H L>; suffixes cached up front, prefix grown as we go
    m = len(strings)
    suffix = [None] * m
    acc = operand
    for j in range(m - 1, -1, -1):
        suffix[j] = acc
        acc = frame.rotate(strings[j], angles[j], acc)
    left = h
    pred = None
    for j in range(m):
        samples = []
        for t in SAMPLE_POINTS:
            evaluator.calls += 1
            samples.append(float(frame.rotate(strings[j], t, suffix[j]) @ left))
        angles[j], pred = rotosolve_from_samples(*samples, current=angles[j], flat_tol=flat_tol)
        left = frame.rotate(strings[j], -angles[j], left)
    return angles, pred


def closure_frame(seed: Sequence[PauliString], rotations: Sequence[PauliString]) -> AdjointFrame:
    """Smallest frame containing ``seed`` and closed under the given rotations."""
    found = {p.canonical() for p in seed}
    stack = list(found)
    while stack:
        q = stack.pop()
        for p in rotations:
            if not commutes(p, q):
                r = PauliString(p.x_mask ^ q.x_mask, p.z_mask ^ q.z_mask, q.n_qubits)
                if r not in found:
                    found.add(r)
                    stack.append(r)
    return AdjointFrame(sorted(found), rotations)


@dataclass
class FragmentResult:
    strings: list[PauliString]
    angles: np.ndarray
    h_next: PauliSum
    trace: list[dict] = field(default_factory=list)
    iterations: int = 0
    calls: int = 0
    converged: bool = True
    staging_residual: float = 0.0

    def __iter__(self):
        return iter((self.angles, self.h_next, self.trace))


def _staging_mask(frame: AdjointFrame, gens: Sequence[PauliString]) -> np.ndarray:
    return np.array([any(not commutes(p, b) for b in gens) for p in frame.basis], dtype=bool)


def minimize_fragment(evaluator, strings: Sequence[PauliString], operand, h_r: PauliSum,
                      config: SynthesisConfig | None = None, *,
                      initial_angles: Sequence[float] | None = None,
                      rng: np.random.Generator | None = None,
                      previous: Sequence[PauliString] = (),
                      frame: AdjointFrame | None = None,
                      h_basis: Sequence[PauliString] | None = None,
                      h_norm: float | None = None,
                      fragment_index: int = 0) -> FragmentResult:
    """Rotosolve sweeps over one fragment, then ``H_{r+1} = K_c^dagger H_r K_c``.

    ``operand`` is the generator ``b_r`` (a PauliString) or, for the one-shot
    algorithm, the weighted Cartan element ``v`` (a PauliSum). The classical
    update of H always uses the exact adjoint action, whatever the evaluator.
    """
    config = config or SynthesisConfig()
    strings = list(strings)
    operand_sum = PauliSum.from_string(operand) if isinstance(operand, PauliString) else operand
    single = isinstance(operand, PauliString)
    gens = list(previous) + ([operand] if single else [])
    if frame is None:
        frame = closure_frame(list(h_r.strings) + list(operand_sum.strings), strings)
    else:
        for p in strings:
            frame._add_rotation(p)
    h_vec = frame.vector(h_r)
    op_vec = frame.vector(operand_sum)
    norm = h_norm if h_norm is not None else float(np.linalg.norm(h_vec))
    stage_mask = _staging_mask(frame, gens)
    h_mask = None
    if h_basis is not None:
        keep = set(h_basis)
        h_mask = np.array([p not in keep for p in frame.basis], dtype=bool)

    if not strings:
        res = float(np.linalg.norm(h_vec[stage_mask])) / norm if norm else 0.0
        return FragmentResult([], np.zeros(0), h_r, [], 0, 0, True, res)

    if initial_angles is not None:
        angles = np.array(initial_angles, dtype=float)
    else:
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        angles = rng.uniform(0.0, math.pi, len(strings))
    if angles.shape != (len(strings),):
        raise PreconditionError("one initial angle per fragment string")

    exact = getattr(evaluator, "name", "") == "exact"
    noise = evaluator.noise_scale(h_vec)
    flat_tol = config.flat_tol if exact else max(config.flat_tol, 2.0 * noise)
    sweep = _exact_sweep if exact else _generic_sweep
    max_iters = config.max_iters if exact else min(config.max_iters, config.shot_max_iters)

    calls0 = evaluator.calls
    trace: list[dict] = []
    prev = float("inf")
    best = float("inf")
    stale = 0
    converged = False
    it = 0
    for it in range(1, max_iters + 1):
        angles, cost = sweep(evaluator, frame, strings, angles, op_vec, h_vec, flat_tol)
        rotated = frame.conjugate(strings, angles, h_vec, dagger=True)
        entry = {"fragment": fragment_index, "sweep": it, "cost": cost,
                 "staging": float(np.linalg.norm(rotated[stage_mask])) / norm,
                 "calls": evaluator.calls - calls0}
        if h_mask is not None:
            entry["residual"] = float(np.linalg.norm(rotated[h_mask])) / norm
        trace.append(entry)
        if exact:
            if math.isfinite(prev) and prev - cost <= config.tol * max(abs(prev), 1e-300):
                converged = True
                break
            prev = cost
        else:
            if cost < best - noise:
                best, stale = cost, 0
            else:
                stale += 1
                if stale >= config.patience:
                    converged = True
                    break

    rotated = frame.conjugate(strings, angles, h_vec, dagger=True)
    staging = float(np.linalg.norm(rotated[stage_mask])) / norm
    if exact and staging > config.staging_tol:
        converged = False
    return FragmentResult(strings, angles, frame.to_sum(rotated), trace, it,
                          evaluator.calls - calls0, converged, staging)


# -- pipelines ------------------------------------------------------------------

@dataclass
class SynthesisResult:
    method: str
    ansatz: str
    n_qubits: int
    hamiltonian: PauliSum
    h_basis: list[PauliString]
    b_basis: list[PauliString]
    fragment_strings: list[list[PauliString]]
    angles: list[np.ndarray]
    h: PauliSum
    residual: float
    residual_trace: list[dict]
    cost_calls: int
    calls_per_fragment: list[int]
    iterations_per_fragment: list[int]
    fragment_converged: list[bool]
    staging_residuals: list[float]
    converged: bool
    config: dict

    @property
    def iterations(self) -> int:
        return sum(self.iterations_per_fragment)

    def k_total(self) -> Ansatz:
        strings = [p for f in self.fragment_strings for p in f]
        angles = [a for arr in self.angles for a in arr]
        return Ansatz(tuple(strings), tuple(angles))

    def h_coefficients(self) -> dict[str, float]:
        hset = set(self.h_basis)
        return {p.label: c for p, c in self.h.items() if p in hset}

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "ansatz": self.ansatz,
            "n_qubits": self.n_qubits,
            "hamiltonian": self.hamiltonian.to_json(),
            "h_basis": [p.label for p in self.h_basis],
            "b_basis": [p.label for p in self.b_basis],
            "fragments": [[p.label for p in f] for f in self.fragment_strings],
            "angles": [[float(a) for a in arr] for arr in self.angles],
            "h": self.h.to_json(),
            "h_coefficients": self.h_coefficients(),
            "residual": self.residual,
            "residual_trace": self.residual_trace,
            "cost_calls": self.cost_calls,
            "calls_per_fragment": self.calls_per_fragment,
            "iterations_per_fragment": self.iterations_per_fragment,
            "fragment_converged": self.fragment_converged,
            "staging_residuals": self.staging_residuals,
            "converged": self.converged,
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, d: dict) -> SynthesisResult:
        n = d["n_qubits"]
        lab = lambda s: PauliString.from_label(s, n)  # noqa: E731
        return cls(
            method=d["method"], ansatz=d["ansatz"], n_qubits=n,
            hamiltonian=PauliSum.from_json(d["hamiltonian"], n),
            h_basis=[lab(s) for s in d["h_basis"]],
            b_basis=[lab(s) for s in d["b_basis"]],
            fragment_strings=[[lab(s) for s in f] for f in d["fragments"]],
            angles=[np.array(a, dtype=float) for a in d["angles"]],
            h=PauliSum.from_json(d["h"], n),
            residual=d["residual"], residual_trace=d["residual_trace"],
            cost_calls=d["cost_calls"], calls_per_fragment=d["calls_per_fragment"],
            iterations_per_fragment=d["iterations_per_fragment"],
            fragment_converged=d["fragment_converged"],
            staging_residuals=d["staging_residuals"], converged=d["converged"],
            config=d["config"])


def make_evaluator(config: SynthesisConfig):
    if config.backend == "exact":
        return ExactEvaluator()
    if config.backend == "shots":
        from redcard.qsim import ShotConfig, ShotEvaluator

        return ShotEvaluator(ShotConfig(config.shots, config.seed + 1, config.depol))
    raise PreconditionError(f"unknown backend {config.backend!r}")


def _structure_for(hamiltonian: PauliSum, config: SynthesisConfig,
                   structure: CartanStructure | None) -> CartanStructure:
    if structure is not None:
        return structure
    seed = PauliString.from_label(config.h_seed, hamiltonian.n_qubits) if config.h_seed else None
    return decompose(hamiltonian, seed=seed, b_order=config.b_order)


def _fragment_strings(structure: CartanStructure, ansatz: str) -> list[list[PauliString]]:
    if ansatz == "product":
        return [list(f) for f in structure.fragments]
    if ansatz == "compressed":
        from redcard.circuits import check_tfxy_structure, compressed_tfxy_strings

        check_tfxy_structure(structure)
        n = structure.n_qubits
        return [compressed_tfxy_strings(n, r) for r in range(1, len(structure.b_basis) + 1)]
    raise PreconditionError(f"unknown ansatz {ansatz!r}")


def run_redcard(hamiltonian: PauliSum, config: SynthesisConfig | None = None,
                structure: CartanStructure | None = None, evaluator=None) -> SynthesisResult:
    """DLA, Cartan decomposition, fragmentation, then one Rotosolve problem per fragment."""
    config = config or SynthesisConfig()
    structure = _structure_for(hamiltonian, config, structure)
    evaluator = evaluator or make_evaluator(config)
    rng = np.random.default_rng(config.seed)
    blocks = _fragment_strings(structure, config.ansatz)
    frame = AdjointFrame(structure.m_basis, structure.k_basis)
    norm = hamiltonian.norm()
    h_r = hamiltonian
    previous: list[PauliString] = []
    results: list[FragmentResult] = []
    for r, (b_r, strings) in enumerate(zip(structure.b_basis, blocks)):
        fr = minimize_fragment(evaluator, strings, b_r, h_r, config, rng=rng, previous=previous,
                               frame=frame, h_basis=structure.h_basis, h_norm=norm,
                               fragment_index=r)
        results.append(fr)
        h_r = fr.h_next
        previous.append(b_r)
    return _assemble("redcard", config, hamiltonian, structure, results, h_r, evaluator)


def run_standard(hamiltonian: PauliSum, config: SynthesisConfig | None = None,
                 structure: CartanStructure | None = None, evaluator=None) -> SynthesisResult:
    """Single Rotosolve problem over all of k against ``v = sum_j pi^-j h_j``."""
    config = config or SynthesisConfig()
    if config.backend != "exact":
        raise PreconditionError("the one-shot algorithm has no mixed-state cost; use backend='exact'")
    structure = _structure_for(hamiltonian, config, structure)
    evaluator = evaluator or make_evaluator(config)
    rng = np.random.default_rng(config.seed)
    strings = [p for f in _fragment_strings(structure, "product") for p in f]
    gammas = irrational_weights(len(structure.h_basis))
    v = PauliSum(list(zip(structure.h_basis, gammas)), hamiltonian.n_qubits)
    frame = AdjointFrame(structure.m_basis, structure.k_basis)
    fr = minimize_fragment(evaluator, strings, v, hamiltonian, config, rng=rng, frame=frame,
                           h_basis=structure.h_basis, h_norm=hamiltonian.norm())
    if strings:
        hvec = frame.vector(fr.h_next)
        fr.staging_residual = frame.residual(hvec, structure.h_basis)
        fr.converged = fr.converged and fr.staging_residual <= config.staging_tol
    return _assemble("standard", config, hamiltonian, structure, [fr], fr.h_next, evaluator)


def _assemble(method, config, hamiltonian, structure, results, h_final, evaluator) -> SynthesisResult:
    from redcard.adjoint import residual

    res = residual(h_final, structure.h_basis)
    trace = [e for fr in results for e in fr.trace]
    frag_ok = [fr.converged for fr in results]
    return SynthesisResult(
        method=method, ansatz=config.ansatz if method == "redcard" else "product",
        n_qubits=hamiltonian.n_qubits, hamiltonian=hamiltonian,
        h_basis=list(structure.h_basis), b_basis=list(structure.b_basis),
        fragment_strings=[list(fr.strings) for fr in results],
        angles=[np.asarray(fr.angles, dtype=float) for fr in results],
        h=h_final, residual=res, residual_trace=trace, cost_calls=evaluator.calls,
        calls_per_fragment=[fr.calls for fr in results],
        iterations_per_fragment=[fr.iterations for fr in results],
        fragment_converged=frag_ok,
        staging_residuals=[fr.staging_residual for fr in results],
        converged=all(frag_ok) and res <= config.residual_target,
        config=config.to_dict())
