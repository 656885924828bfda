"""Cartan decomposition g = k + m, Cartan subalgebra, generator reduction and
k-fragmentation.

The default involution is ``theta(g) = -g^T``: a Pauli string with an odd
number of Y's is antisymmetric and lands in k, an even one lands in m.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from redcard.algebra import DLA, FrustrationGraph, anticommutation_matrix, frustration_components
from redcard.errors import ConsistencyError, InvolutionError, PreconditionError, TheoremViolation
from redcard.pauli import PauliString, PauliSum, commutes, y_parity

Involution = Callable[[PauliString], bool]  # True -> k


def y_parity_involution(p: PauliString) -> bool:
    return y_parity(p) == 1


def _xor(a: PauliString, b: PauliString) -> PauliString:
    return PauliString(a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, a.n_qubits)


def check_closure(k_basis: Sequence[PauliString], m_basis: Sequence[PauliString]) -> list[str]:
    """Violations of [k,k] <= k, [m,m] <= k, [k,m] <= m, as readable strings."""
    kset, mset = set(k_basis), set(m_basis)
    problems = []
    for name, left, right, target in (("[k,k]", k_basis, k_basis, kset),
                                      ("[m,m]", m_basis, m_basis, kset),
                                      ("[k,m]", k_basis, m_basis, mset)):
        for a in left:
            for b in right:
                if not commutes(a, b) and _xor(a, b) not in target:
                    problems.append(f"{name}: [{a.label},{b.label}] ~ {_xor(a, b).label}")
    return problems


def split_km(dla: DLA, hamiltonian: PauliSum,
             involution: Involution = y_parity_involution,
             validate: bool = True) -> tuple[list[PauliString], list[PauliString]]:
    """Partition the DLA basis into (k, m) and check iH lies in m."""
    k_basis = [p for p in dla.basis if involution(p)]
    m_basis = [p for p in dla.basis if not involution(p)]
    kset = set(k_basis)
    bad = [p.label for p in hamiltonian.strings if p in kset]
    if bad:
        raise InvolutionError(f"Hamiltonian terms {bad} fall in k; iH must lie in m")
    if validate:
        problems = _fast_closure_check(k_basis, m_basis, dla.n_qubits)
        if problems:
            raise ConsistencyError("involution is not a Cartan involution: " + problems[0])
    return k_basis, m_basis


def _fast_closure_check(k_basis, m_basis, n) -> list[str]:
    # vectorized: commutator products of anticommuting pairs must land in the right half
    kset, mset = set(k_basis), set(m_basis)
    allb = list(k_basis) + list(m_basis)
    if not allb:
        return []
    anti = anticommutation_matrix(allb)
    nk = len(k_basis)
    for i, j in zip(*np.nonzero(np.triu(anti))):
        c = _xor(allb[i], allb[j])
        same_side = (i < nk) == (j < nk)
        if c not in (kset if same_side else mset):
            return [f"[{allb[i].label},{allb[j].label}] ~ {c.label}"]
    return []


def build_cartan_subalgebra(m_basis: Sequence[PauliString],
                            seed: PauliString | None = None) -> list[PauliString]:
    """Greedy maximal set of mutually commuting strings from ``m_basis``.

    Strings are scanned in canonical order (``seed`` first); each is kept if it
    commutes with everything kept so far. Because a sum of Pauli strings
    commutes with a string only if each term does, a maximal commuting set of
    basis strings spans a maximal Abelian subspace of m.
    """
    if not m_basis:
        raise PreconditionError("m is empty")
    order = sorted(m_basis)
    if seed is not None:
        seed = seed.canonical()
        if seed not in set(order):
            raise PreconditionError(f"seed {seed.label} is not in m")
        order.remove(seed)
        order.insert(0, seed)
    h: list[PauliString] = []
    for p in order:
        if all(commutes(p, q) for q in h):
            h.append(p)
    return h


def _gf2_vector(p: PauliString) -> int:
    return p.x_mask | (p.z_mask << p.n_qubits)


def reduce_generators(h_basis: Sequence[PauliString]) -> list[PauliString]:
    """Independent subset b of ``h_basis`` whose products generate every h element.

    For commuting strings the product is, up to phase, the XOR of the symplectic
    vectors, so this is incremental Gaussian elimination over GF(2) keeping the
    first string that enlarges the span.
    """
    for a, b in itertools.combinations(h_basis, 2):
        if not commutes(a, b):
            raise PreconditionError(f"{a.label} and {b.label} do not commute")
    pivots: dict[int, int] = {}  # leading bit -> reduced row
    kept = []
    for p in h_basis:
        v = _gf2_vector(p)
        while v:
            top = v.bit_length() - 1
            if top not in pivots:
                pivots[top] = v
                kept.append(p)
                break
            v ^= pivots[top]
    return kept


def express_in_generators(p: PauliString, b_basis: Sequence[PauliString]) -> list[int] | None:
    """Indices of ``b_basis`` whose product equals ``p`` up to phase, or None."""
    target = _gf2_vector(p)
    vecs = [_gf2_vector(b) for b in b_basis]
    # track combinations alongside the elimination
    rows: dict[int, tuple[int, int]] = {}
    for i, v in enumerate(vecs):
        combo = 1 << i
        while v:
            top = v.bit_length() - 1
            if top not in rows:
                rows[top] = (v, combo)
                break
            v ^= rows[top][0]
            combo ^= rows[top][1]
    combo = 0
    while target:
        top = target.bit_length() - 1
        if top not in rows:
            return None
        target ^= rows[top][0]
        combo ^= rows[top][1]
    return [i for i in range(len(b_basis)) if combo >> i & 1]


def fragment_k(k_basis: Sequence[PauliString], b_basis: Sequence[PauliString],
               strict: bool = True) -> tuple[list[list[PauliString]], list[PauliString]]:
    """Group k by the first generator each string anticommutes with.

    Returns ``(fragments, residual)`` where ``fragments[r]`` holds the strings
    commuting with ``b_1..b_{r}`` (0-indexed: ``b[:r]``) and anticommuting with
    ``b[r]``, and ``residual`` holds strings commuting with all of b.

    Raises:
        ConsistencyError: ``strict`` and the residual is nonempty.
    """
    fragments: list[list[PauliString]] = [[] for _ in b_basis]
    residual = []
    for k in k_basis:
        for r, b in enumerate(b_basis):
            if not commutes(k, b):
                fragments[r].append(k)
                break
        else:
            residual.append(k)
    if strict and residual:
        raise ConsistencyError(
            f"{len(residual)} k strings commute with every generator (e.g. {residual[0].label})")
    return fragments, residual


def fragment_sizes(k_basis: Sequence[PauliString], b_order: Sequence[PauliString]) -> list[int]:
    """Sizes of the k fragments for the generator order ``b_order``."""
    if not b_order:
        return []
    anti = _anti_to(k_basis, b_order)
    sizes = [0] * len(b_order)
    remaining = np.ones(len(k_basis), dtype=bool)
    for r in range(len(b_order)):
        hit = remaining & anti[:, r]
        sizes[r] = int(hit.sum())
        remaining &= ~anti[:, r]
    return sizes


def _anti_to(strings: Sequence[PauliString], others: Sequence[PauliString]) -> np.ndarray:
    if not strings or not others:
        return np.zeros((len(strings), len(others)), dtype=bool)
    xs = np.array([p.x_mask for p in strings], dtype=np.uint64)[:, None]
    zs = np.array([p.z_mask for p in strings], dtype=np.uint64)[:, None]
    bx = np.array([p.x_mask for p in others], dtype=np.uint64)[None, :]
    bz = np.array([p.z_mask for p in others], dtype=np.uint64)[None, :]
    return ((np.bitwise_count(xs & bz) + np.bitwise_count(zs & bx)) & 1).astype(bool)


def k_set(k_basis: Sequence[PauliString], anti_with: Sequence[PauliString],
          comm_with: Sequence[PauliString]) -> list[PauliString]:
    """Strings of k anticommuting with all of ``anti_with`` and commuting with all of ``comm_with``."""
    return [k for k in k_basis
            if all(not commutes(k, b) for b in anti_with) and all(commutes(k, b) for b in comm_with)]


def symmetric_subspace(basis: Sequence[PauliString], b_basis: Sequence[PauliString],
                       r: int) -> list[PauliString]:
    """Strings commuting with the first ``r - 1`` generators (1-indexed ``r``)."""
    prefix = list(b_basis[: r - 1])
    return [p for p in basis if all(commutes(p, b) for b in prefix)]


def has_associative_structure(b_basis: Sequence[PauliString], dla: DLA) -> bool:
    """True if a product of two or more distinct generators lies in the DLA."""
    n = len(b_basis)
    if n > 20:
        raise PreconditionError("associative-structure scan limited to 20 generators")
    for size in range(2, n + 1):
        for combo in itertools.combinations(b_basis, size):
            prod = combo[0]
            for q in combo[1:]:
                prod = _xor(prod, q)
            if prod in dla:
                return True
    return False


@dataclass
class OrderingReport:
    """Outcome of the fragment-size ordering checks, per frustration component."""

    components: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c["decreasing"] and c["linear_law"] is not False for c in self.components)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "components": self.components}


def check_ordering(k_basis: Sequence[PauliString], b_basis: Sequence[PauliString],
                   dla: DLA, graph: FrustrationGraph | None = None,
                   raise_on_violation: bool = True) -> OrderingReport:
    """Check fragment sizes against the ordering theorem, one component at a time.

    Within a component the nonempty fragment sizes must strictly decrease. When
    the component's generators carry no associative structure the sizes must
    also follow ``|k^r| = |k^1_{2..n}| + (n - r) |k^{12}_{3..n}|`` (n = number
    of generators in the component).
    """
    if graph is None:
        graph = frustration_components(dla)
    label_of = {p: graph.labels[i] for i, p in enumerate(dla.basis)}
    report = OrderingReport()
    for comp in sorted({label_of[b] for b in b_basis}):
        bs = [b for b in b_basis if label_of[b] == comp]
        ks = [k for k in k_basis if label_of[k] == comp]
        sizes = fragment_sizes(ks, bs)
        nonempty = [s for s in sizes if s]
        decreasing = all(a > b for a, b in zip(nonempty, nonempty[1:]))
        first_empty = next((i for i, s in enumerate(sizes) if s == 0), len(sizes))
        empties_last = all(s == 0 for s in sizes[first_empty:])
        entry = {
            "component": comp,
            "generators": [b.label for b in bs],
            "sizes": sizes,
            "decreasing": decreasing,
            "empties_last": empties_last,
            "associative": None,
            "linear_law": None,
        }
        if len(bs) >= 2:
            assoc = has_associative_structure(bs, dla)
            entry["associative"] = assoc
            if not assoc:
                n = len(bs)
                base = len(k_set(ks, bs[:1], bs[1:]))
                slope = len(k_set(ks, bs[:2], bs[2:]))
                predicted = [base + (n - r) * slope for r in range(1, n + 1)]
                entry["linear_law"] = predicted == sizes
                entry["slope"] = -slope
        report.components.append(entry)
        if raise_on_violation and (not decreasing or entry["linear_law"] is False):
            raise TheoremViolation(f"fragment sizes {sizes} violate the ordering theorem")
    return report


@dataclass
class CartanStructure:
    """k/m split, Cartan subalgebra h, reduced generators b and the k fragments."""

    dla: DLA
    k_basis: list[PauliString]
    m_basis: list[PauliString]
    h_basis: list[PauliString]
    b_basis: list[PauliString]
    fragments: list[list[PauliString]]
    graph: FrustrationGraph

    @property
    def n_qubits(self) -> int:
        return self.dla.n_qubits

    @property
    def fragment_sizes(self) -> list[int]:
        return [len(f) for f in self.fragments]

    def k_symmetric(self, r: int) -> list[PauliString]:
        return symmetric_subspace(self.k_basis, self.b_basis, r)

    def m_symmetric(self, r: int) -> list[PauliString]:
        return symmetric_subspace(self.m_basis, self.b_basis, r)

    def ordering_report(self) -> OrderingReport:
        return check_ordering(self.k_basis, self.b_basis, self.dla, self.graph,
                              raise_on_violation=False)

    def to_dict(self) -> dict:
        return {
            "k_dim": len(self.k_basis),
            "m_dim": len(self.m_basis),
            "h": [p.label for p in self.h_basis],
            "b": [p.label for p in self.b_basis],
            "fragments": [[p.label for p in f] for f in self.fragments],
            "fragment_sizes": self.fragment_sizes,
        }


def decompose(hamiltonian: PauliSum, dla: DLA | None = None, *,
              seed: PauliString | None = None,
              b_order: Sequence[int] | None = None,
              involution: Involution = y_parity_involution,
              max_dim: int | None = None) -> CartanStructure:
    """DLA -> (k, m) -> h -> b -> fragments, with all structural checks.

    h is seeded with ``seed`` or, by default, the Hamiltonian's first term in
    canonical order.
    ``b_order`` optionally permutes the reduced generators before fragmenting.
    """
    from redcard.algebra import DEFAULT_MAX_DIM, generate_dla

    if dla is None:
        dla = generate_dla(hamiltonian, max_dim or DEFAULT_MAX_DIM)
    k_basis, m_basis = split_km(dla, hamiltonian, involution)
    if seed is None and len(hamiltonian):
        seed = hamiltonian.strings[0]
    h_basis = build_cartan_subalgebra(m_basis, seed)
    b_basis = reduce_generators(h_basis)
    if b_order is not None:
        if sorted(b_order) != list(range(len(b_basis))):
            raise PreconditionError(f"b_order must permute range({len(b_basis)})")
        b_basis = [b_basis[i] for i in b_order]
    fragments, _ = fragment_k(k_basis, b_basis)
    graph = frustration_components(dla)
    return CartanStructure(dla, k_basis, m_basis, h_basis, b_basis, fragments, graph)
