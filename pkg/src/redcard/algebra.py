"""Dynamical Lie algebra by commutator closure, and its frustration graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from redcard.errors import CapacityError, PreconditionError, WitnessError
from redcard.pauli import PauliString, PauliSum, commutes

DEFAULT_MAX_DIM = 2 ** 16


def anticommutation_matrix(strings: list[PauliString]) -> np.ndarray:
    """Boolean matrix ``A[i, j] = strings[i]`` anticommutes with ``strings[j]``."""
    if not strings:
        return np.zeros((0, 0), dtype=bool)
    xs = np.array([p.x_mask for p in strings], dtype=np.uint64)
    zs = np.array([p.z_mask for p in strings], dtype=np.uint64)
    sym = np.bitwise_count(xs[:, None] & zs[None, :]) + np.bitwise_count(zs[:, None] & xs[None, :])
    return (sym & 1).astype(bool)


@dataclass(frozen=True)
class DLA:
    """Pauli-string basis of a dynamical Lie algebra.

    ``basis`` is sorted canonically; ``generator_indices[i]`` is the basis index
    of the i-th Hamiltonian term (in the Hamiltonian's canonical term order).
    """

    basis: tuple[PauliString, ...]
    generator_indices: tuple[int, ...]
    n_qubits: int
    index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "index", {p: i for i, p in enumerate(self.basis)})

    @property
    def dim(self) -> int:
        return len(self.basis)

    def __contains__(self, p: PauliString) -> bool:
        return p.canonical() in self.index

    def generators(self) -> list[PauliString]:
        return [self.basis[i] for i in self.generator_indices]

    def is_closed(self) -> bool:
        anti = anticommutation_matrix(list(self.basis))
        for i, j in zip(*np.nonzero(np.triu(anti))):
            a, b = self.basis[i], self.basis[j]
            if PauliString(a.x_mask ^ b.x_mask, a.z_mask ^ b.z_mask, self.n_qubits) not in self.index:
                return False
        return True


def generate_dla(hamiltonian: PauliSum, max_dim: int = DEFAULT_MAX_DIM) -> DLA:
    """Close the Hamiltonian's Pauli strings under commutation.

    Breadth-first: each newly found string is commuted against the whole
    current basis once, so the total work is O(dim^2) pair tests.

    Raises:
        CapacityError: the basis grows beyond ``max_dim``.
    """
    gens = [p for p in hamiltonian.strings if not p.is_identity]
    if not gens:
        raise PreconditionError("Hamiltonian has no non-identity terms")
    if max_dim < len(gens):
        raise PreconditionError(f"max_dim={max_dim} is below the number of terms {len(gens)}")
    n = hamiltonian.n_qubits
    if n > 63:
        raise PreconditionError("closure is limited to 63 qubits")

    seen: set[tuple[int, int]] = set()
    xs: list[int] = []
    zs: list[int] = []
    for p in gens:
        key = (p.x_mask, p.z_mask)
        if key not in seen:
            seen.add(key)
            xs.append(p.x_mask)
            zs.append(p.z_mask)

    # Pairs among the seed set are covered because every seed is in the frontier.
    frontier = deque(range(len(xs)))
    X = np.array(xs, dtype=np.uint64)
    Z = np.array(zs, dtype=np.uint64)
    size = len(xs)
    while frontier:
        i = frontier.popleft()
        xi, zi = np.uint64(xs[i]), np.uint64(zs[i])
        Xv, Zv = X[:size], Z[:size]
        anti = (np.bitwise_count(xi & Zv) + np.bitwise_count(zi & Xv)) & 1
        idx = np.nonzero(anti)[0]
        if idx.size == 0:
            continue
        for nx, nz in zip((Xv[idx] ^ xi).tolist(), (Zv[idx] ^ zi).tolist()):
            if (nx, nz) in seen:
                continue
            seen.add((nx, nz))
            if len(seen) > max_dim:
                raise CapacityError(
                    f"DLA dimension exceeds max_dim={max_dim} at n={n}", partial_size=len(seen))
            xs.append(nx)
            zs.append(nz)
            frontier.append(len(xs) - 1)
            if len(xs) > X.size:
                X = np.resize(X, 2 * X.size)
                Z = np.resize(Z, 2 * Z.size)
            X[len(xs) - 1] = nx
            Z[len(xs) - 1] = nz
        size = len(xs)

    basis = sorted(PauliString(x, z, n) for x, z in zip(xs, zs))
    lookup = {p: i for i, p in enumerate(basis)}
    return DLA(tuple(basis), tuple(lookup[p] for p in gens), n)


@dataclass(frozen=True)
class FrustrationGraph:
    """Anticommutation graph on a DLA basis with connected-component labels."""

    adjacency: np.ndarray
    labels: tuple[int, ...]

    @property
    def n_components(self) -> int:
        return len(set(self.labels))

    def component(self, c: int) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == c]

    def neighbors(self, i: int) -> list[int]:
        return np.nonzero(self.adjacency[i])[0].tolist()


def _find(parent: list[int], i: int) -> int:
    while parent[i] != i:
        parent[i] = parent[parent[i]]
        i = parent[i]
    return i


def frustration_components(dla: DLA) -> FrustrationGraph:
    adj = anticommutation_matrix(list(dla.basis))
    parent = list(range(dla.dim))
    for i, j in zip(*np.nonzero(np.triu(adj))):
        ri, rj = _find(parent, int(i)), _find(parent, int(j))
        if ri != rj:
            parent[max(ri, rj)] = min(ri, rj)
    roots = [_find(parent, i) for i in range(dla.dim)]
    relabel: dict[int, int] = {}
    labels = tuple(relabel.setdefault(r, len(relabel)) for r in roots)
    return FrustrationGraph(adj, labels)


def distance2_witness(dla: DLA, b1: PauliString, b2: PauliString,
                      graph: FrustrationGraph | None = None) -> PauliString:
    """A basis string anticommuting with both ``b1`` and ``b2``.

    Two commuting strings in the same frustration component are always at
    distance two, so a witness exists whenever the preconditions hold.
    """
    try:
        i, j = dla.index[b1.canonical()], dla.index[b2.canonical()]
    except KeyError as exc:
        raise PreconditionError(f"{exc.args[0]} is not in the DLA basis") from None
    if not commutes(b1, b2):
        raise PreconditionError(f"{b1.label} and {b2.label} do not commute")
    if graph is None:
        graph = frustration_components(dla)
    if graph.labels[i] != graph.labels[j]:
        raise WitnessError(f"{b1.label} and {b2.label} lie in different components")
    both = np.nonzero(graph.adjacency[i] & graph.adjacency[j])[0]
    if both.size == 0:
        raise WitnessError(f"no common neighbour of {b1.label} and {b2.label}")
    return dla.basis[int(both[0])]
