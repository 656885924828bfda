"""Exact adjoint action of product ansaetze on Pauli sums, and the cost functions.

All inner products use the normalized trace ``<A, B> = Tr(AB) / 2^n`` so that
Pauli strings are orthonormal and coefficients combine without ``2^n`` factors.
The ``i`` prefactors of the Lie-algebra picture are absorbed by working with
the Hermitian representatives directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from redcard.errors import DimensionError, MetricError, PreconditionError, StagingError
from redcard.pauli import PauliString, PauliSum, commutes, multiply

STAGING_TOL = 1e-8


@dataclass(frozen=True)
class Ansatz:
    """Ordered product ``K = prod_j exp(i * angle_j * P_j)`` (first factor leftmost).

    With ``dagger=True`` the object stands for ``K^dagger``.
    """

    strings: tuple[PauliString, ...]
    angles: tuple[float, ...]
    dagger: bool = False

    def __post_init__(self):
        if len(self.strings) != len(self.angles):
            raise ValueError("one angle per factor")
        object.__setattr__(self, "strings", tuple(p.canonical() for p in self.strings))
        object.__setattr__(self, "angles", tuple(float(a) for a in self.angles))

    @classmethod
    def from_factors(cls, factors: Iterable[tuple[PauliString, float]]) -> Ansatz:
        factors = list(factors)
        return cls(tuple(p for p, _ in factors), tuple(a for _, a in factors))

    @classmethod
    def identity(cls, strings: Sequence[PauliString]) -> Ansatz:
        return cls(tuple(strings), (0.0,) * len(strings))

    @property
    def factors(self) -> list[tuple[PauliString, float]]:
        return list(zip(self.strings, self.angles))

    def __len__(self):
        return len(self.strings)

    def with_angles(self, angles: Sequence[float]) -> Ansatz:
        return Ansatz(self.strings, tuple(angles), self.dagger)

    def with_angle(self, index: int, angle: float) -> Ansatz:
        angles = list(self.angles)
        angles[index] = angle
        return Ansatz(self.strings, tuple(angles), self.dagger)

    def adjoint(self) -> Ansatz:
        return Ansatz(self.strings, self.angles, not self.dagger)

    def ordered_rotations(self) -> list[tuple[PauliString, float]]:
        """Single-factor conjugations in application order (innermost first)."""
        if self.dagger:
            return [(p, -a) for p, a in self.factors]
        return list(reversed(self.factors))


def _rotate_terms(terms: dict, p: PauliString, angle: float) -> dict:
    """``exp(i a P) A exp(-i a P)`` on a coefficient dict."""
    if angle == 0.0:
        return terms
    c, s = math.cos(2 * angle), math.sin(2 * angle)
    out: dict[PauliString, float] = {}
    for q, coeff in terms.items():
        if commutes(p, q):
            out[q] = out.get(q, 0.0) + coeff
            continue
        out[q] = out.get(q, 0.0) + c * coeff
        r = multiply(p, q)
        # i * P Q is Hermitian; its real sign is i^(phase + 1)
        sign = 1.0 if (r.phase + 1) % 4 == 0 else -1.0
        key = r.canonical()
        out[key] = out.get(key, 0.0) + s * sign * coeff
    return out


def conjugate(ansatz: Ansatz, operand: PauliSum) -> PauliSum:
    """``K A K^dagger`` for the ansatz K (or ``K^dagger A K`` if ``ansatz.dagger``)."""
    if ansatz.strings and ansatz.strings[0].n_qubits != operand.n_qubits:
        raise DimensionError("ansatz and operand act on different qubit counts")
    terms = dict(operand.items())
    for p, a in ansatz.ordered_rotations():
        terms = _rotate_terms(terms, p, a)
    return PauliSum(terms, operand.n_qubits)


def inner(a: PauliSum, b: PauliSum) -> float:
    if a.n_qubits != b.n_qubits:
        raise DimensionError("qubit-count mismatch")
    if len(a) > len(b):
        a, b = b, a
    return sum(c * b.coeff(p) for p, c in a.items())


def staging_violation(h_r: PauliSum, previous: Sequence[PauliString]) -> float:
    """Normalized norm of the part of ``h_r`` anticommuting with any of ``previous``."""
    bad = [c for p, c in h_r.items() if any(not commutes(p, b) for b in previous)]
    return math.sqrt(sum(c * c for c in bad))


def cost_fr(ansatz_r: Ansatz, b_r: PauliString, h_r: PauliSum,
            previous: Sequence[PauliString] = (), staging_tol: float = STAGING_TOL) -> float:
    """Reduced cost ``<K b_r K^dagger, H_r>``.

    ``previous`` are the generators already rotated away; ``h_r`` must commute
    with each of them.
    """
    if previous:
        v = staging_violation(h_r, previous)
        if v > staging_tol * max(h_r.norm(), 1.0):
            raise StagingError(f"H_r has weight {v:.3e} anticommuting with earlier generators")
    return inner(conjugate(ansatz_r, PauliSum.from_string(b_r)), h_r)


def cost_full(ansatz: Ansatz, v: PauliSum, h: PauliSum,
              h_basis: Sequence[PauliString] | None = None) -> float:
    """One-shot cost ``<K v K^dagger, H>`` with ``v`` in the Cartan subalgebra."""
    if h_basis is not None:
        allowed = set(h_basis)
        stray = [p.label for p in v.strings if p not in allowed]
        if stray:
            raise PreconditionError(f"v has components outside h: {stray}")
    return inner(conjugate(ansatz, v), h)


def residual(transformed: PauliSum, h_basis: Iterable[PauliString]) -> float:
    """Fraction of the normalized HS norm lying outside span(h_basis)."""
    total = transformed.norm()
    if total == 0.0:
        raise MetricError("residual of a zero operator is undefined")
    keep = set(h_basis)
    off = math.sqrt(sum(c * c for p, c in transformed.items() if p not in keep))
    return off / total


def irrational_weights(count: int) -> np.ndarray:
    """``gamma_j = pi^-j`` for j = 1..count; pairwise ratios are irrational."""
    return np.pi ** -np.arange(1, count + 1, dtype=float)


class AdjointFrame:
    """Dense coefficient vectors over a fixed set of strings closed under a k set.

    Every rotation ``exp(i a P)`` with P in ``rotations`` maps span(basis) to
    itself; it is stored as a pairing ``Q <-> sign * (i P Q)`` of basis indices
    so that one conjugation costs O(len(basis)) vectorized work.
    """

    def __init__(self, basis: Sequence[PauliString], rotations: Sequence[PauliString]):
        self.basis = list(basis)
        self.index = {p: i for i, p in enumerate(self.basis)}
        self.n_qubits = self.basis[0].n_qubits if self.basis else 0
        self._pairs: dict[PauliString, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        for p in rotations:
            self._add_rotation(p.canonical())

    def _add_rotation(self, p: PauliString) -> None:
        if p in self._pairs:
            return
        qs, rs, signs = [], [], []
        for i, q in enumerate(self.basis):
            if commutes(p, q):
                continue
            r = multiply(p, q)
            key = r.canonical()
            if key not in self.index:
                raise PreconditionError(f"basis is not closed under {p.label}: {key.label} missing")
            qs.append(i)
            rs.append(self.index[key])
            signs.append(1.0 if (r.phase + 1) % 4 == 0 else -1.0)
        self._pairs[p] = (np.array(qs, dtype=np.intp), np.array(rs, dtype=np.intp),
                          np.array(signs))

    def vector(self, op: PauliSum) -> np.ndarray:
        vec = np.zeros(len(self.basis))
        for p, c in op.items():
            if p not in self.index:
                raise PreconditionError(f"{p.label} is outside the frame")
            vec[self.index[p]] = c
        return vec

    def to_sum(self, vec: np.ndarray) -> PauliSum:
        return PauliSum({p: float(c) for p, c in zip(self.basis, vec)}, self.n_qubits)

    def rotate(self, p: PauliString, angle: float, vec: np.ndarray) -> np.ndarray:
        qs, rs, signs = self._pairs[p]
        if qs.size == 0 or angle == 0.0:
            return vec
        c, s = math.cos(2 * angle), math.sin(2 * angle)
        out = vec.copy()
        out[qs] = c * vec[qs]
        out[rs] += s * signs * vec[qs]
        return out

    def conjugate(self, strings: Sequence[PauliString], angles: Sequence[float],
                  vec: np.ndarray, dagger: bool = False) -> np.ndarray:
        """Vector form of :func:`conjugate`."""
        if dagger:
            for p, a in zip(strings, angles):
                vec = self.rotate(p, -a, vec)
        else:
            for p, a in zip(reversed(strings), reversed(list(angles))):
                vec = self.rotate(p, a, vec)
        return vec

    def residual(self, vec: np.ndarray, keep: Iterable[PauliString]) -> float:
        total = float(np.linalg.norm(vec))
        if total == 0.0:
            raise MetricError("residual of a zero operator is undefined")
        mask = np.ones(len(self.basis), dtype=bool)
        for p in keep:
            if p in self.index:
                mask[self.index[p]] = False
        return float(np.linalg.norm(vec[mask])) / total
