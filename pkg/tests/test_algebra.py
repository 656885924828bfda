import itertools

import numpy as np
import pytest

from redcard.algebra import (anticommutation_matrix, distance2_witness, frustration_components,
                             generate_dla)
from redcard.errors import CapacityError, PreconditionError, WitnessError
from redcard.models import heisenberg, tfim, tfxy, xy
from redcard.oracle import string_matrix
from redcard.pauli import PauliString, PauliSum, commutes

P = PauliString.from_label


def dense_lie_closure_dim(h: PauliSum) -> int:
    """Dimension of the real Lie algebra generated by i*terms, by brute force on matrices."""
    gens = [1j * string_matrix(p.label) for p in h.strings]
    basis: list[np.ndarray] = []

    def add(m):
        vec = np.concatenate([m.real.ravel(), m.imag.ravel()])
        if not basis:
            if np.linalg.norm(vec) > 1e-9:
                basis.append(vec)
                return True
            return False
        mat = np.array(basis)
        resid = vec - mat.T @ np.linalg.lstsq(mat.T, vec, rcond=None)[0]
        if np.linalg.norm(resid) > 1e-9:
            basis.append(vec)
            return True
        return False

    elems = []
    for g in gens:
        if add(g):
            elems.append(g)
    frontier = list(elems)
    while frontier:
        new = []
        for a in frontier:
            for b in list(elems):
                c = a @ b - b @ a
                if add(c):
                    new.append(c)
                    elems.append(c)
        frontier = new
    return len(basis)


@pytest.mark.parametrize("ham", [tfim(2), tfim(3), xy(3), tfxy(3), heisenberg(3)],
                         ids=["tfim2", "tfim3", "xy3", "tfxy3", "heis3"])
def test_dim_matches_dense_closure(ham):
    assert generate_dla(ham).dim == dense_lie_closure_dim(ham)


def test_tfim_two_sites_basis():
    dla = generate_dla(tfim(2))
    assert {p.label for p in dla.basis} == {"XX", "YX", "XY", "YY", "ZI", "IZ"}
    assert dla.generators() == tfim(2).strings


@pytest.mark.parametrize("l", range(2, 7))
def test_tfim_dim_law(l):
    assert generate_dla(tfim(l)).dim == l * (2 * l - 1)


def test_single_generator_is_abelian():
    assert generate_dla(PauliSum({"ZI": 1.0})).dim == 1


@pytest.mark.parametrize("ham", [tfim(4), xy(4), heisenberg(3)], ids=["tfim4", "xy4", "heis3"])
def test_closure_and_idempotence(ham):
    dla = generate_dla(ham)
    assert dla.is_closed()
    assert all(p in dla for p in ham.strings)
    again = generate_dla(PauliSum({p: 1.0 for p in dla.basis}, ham.n_qubits))
    assert again.basis == dla.basis


def test_capacity_error_reports_partial_size():
    with pytest.raises(CapacityError) as info:
        generate_dla(heisenberg(4), max_dim=40)
    assert info.value.partial_size > 40


def test_anticommutation_matrix_matches_pairwise():
    strings = list(generate_dla(tfim(3)).basis)
    anti = anticommutation_matrix(strings)
    for i, j in itertools.product(range(len(strings)), repeat=2):
        assert anti[i, j] == (not commutes(strings[i], strings[j]))


def test_components():
    assert frustration_components(generate_dla(tfim(2))).n_components == 1
    assert frustration_components(generate_dla(PauliSum({"ZI": 1.0, "IZ": 1.0}))).n_components == 2
    assert frustration_components(generate_dla(xy(4))).n_components == 2


def test_witness_examples():
    dla = generate_dla(tfim(2))
    w = distance2_witness(dla, P("ZI"), P("IZ"))
    assert w.label in {"XX", "XY", "YX", "YY"}
    w = distance2_witness(dla, P("ZI"), P("ZI"))
    assert not commutes(w, P("ZI"))


def test_witness_errors():
    dla = generate_dla(PauliSum({"ZI": 1.0, "IZ": 1.0}))
    with pytest.raises(WitnessError):
        distance2_witness(dla, P("ZI"), P("IZ"))
    with pytest.raises(PreconditionError):
        distance2_witness(generate_dla(tfim(2)), P("ZI"), P("XX"))


@pytest.mark.parametrize("ham", [tfim(4), tfxy(4), xy(5), heisenberg(3)],
                         ids=["tfim4", "tfxy4", "xy5", "heis3"])
def test_every_commuting_pair_in_a_component_has_a_witness(ham):
    dla = generate_dla(ham)
    graph = frustration_components(dla)
    for i, j in itertools.combinations(range(dla.dim), 2):
        a, b = dla.basis[i], dla.basis[j]
        if graph.labels[i] == graph.labels[j] and commutes(a, b):
            w = distance2_witness(dla, a, b, graph)
            assert w in dla and not commutes(w, a) and not commutes(w, b)
