import itertools

import numpy as np
import pytest

from redcard.algebra import generate_dla
from redcard.cartan import (build_cartan_subalgebra, check_closure, check_ordering, decompose,
                            express_in_generators, fragment_k, fragment_sizes,
                            has_associative_structure, k_set, reduce_generators, split_km)
from redcard.errors import (ConsistencyError, InvolutionError, PreconditionError,
                            TheoremViolation)
from redcard.models import heisenberg, tfim, tfxy, xy
from redcard.oracle import string_matrix
from redcard.pauli import PauliString, PauliSum, commutes, multiply

P = PauliString.from_label


def labels(strings):
    return [p.label for p in strings]


def test_tfim_two_site_split():
    dla = generate_dla(tfim(2))
    k, m = split_km(dla, tfim(2))
    assert set(labels(k)) == {"XY", "YX"}
    assert set(labels(m)) == {"ZI", "IZ", "XX", "YY"}


def test_abelian_split():
    h = PauliSum({"Z": 1.0})
    k, m = split_km(generate_dla(h), h)
    assert k == [] and labels(m) == ["Z"]


def test_hamiltonian_in_k_is_rejected():
    h = PauliSum({"XY": 1.0})
    with pytest.raises(InvolutionError):
        split_km(generate_dla(h), h)


def test_bad_involution_detected():
    h = tfim(3)
    dla = generate_dla(h)
    with pytest.raises(ConsistencyError):
        split_km(dla, h, involution=lambda p: p.label.startswith("Y"))


def test_heisenberg_closure_against_dense():
    h = heisenberg(3)
    k, m = split_km(generate_dla(h), h)
    assert check_closure(k, m) == []
    kspan = {p for p in k}
    mspan = {p for p in m}
    # dense cross-check of one representative commutator per pair class
    for a, b in itertools.islice(itertools.product(m, m), 0, None, 7):
        ca = string_matrix(a.label) @ string_matrix(b.label) - string_matrix(b.label) @ string_matrix(a.label)
        if np.allclose(ca, 0):
            continue
        r = multiply(a, b).canonical()
        assert r in kspan
        assert abs(np.trace(string_matrix(r.label) @ ca)) > 0
    assert kspan.isdisjoint(mspan)


def test_tfim_cartan_subalgebra_is_z():
    st = decompose(tfim(4), seed=P("ZIII"))
    assert labels(st.h_basis) == ["ZIII", "IZII", "IIZI", "IIIZ"]
    assert labels(decompose(tfim(4)).h_basis) == labels(st.h_basis)


def test_trivial_cartan_subalgebra():
    assert labels(build_cartan_subalgebra([P("Z")])) == ["Z"]


def test_seed_must_lie_in_m():
    with pytest.raises(PreconditionError):
        build_cartan_subalgebra([P("ZI"), P("IZ")], seed=P("XX"))


@pytest.mark.parametrize("ham", [heisenberg(3), xy(4), tfxy(4)], ids=["heis3", "xy4", "tfxy4"])
def test_cartan_subalgebra_is_maximal(ham):
    st = decompose(ham)
    h = st.h_basis
    assert all(commutes(a, b) for a, b in itertools.combinations(h, 2))
    for p in st.m_basis:
        if p not in h:
            assert any(not commutes(p, q) for q in h)


def test_reduce_generators_example():
    assert labels(reduce_generators([P("ZI"), P("IZ"), P("ZZ")])) == ["ZI", "IZ"]
    assert labels(reduce_generators([P("ZII"), P("IZI"), P("IIZ")])) == ["ZII", "IZI", "IIZ"]


def test_reduce_generators_rejects_noncommuting():
    with pytest.raises(PreconditionError):
        reduce_generators([P("X"), P("Z")])


def test_random_commuting_set_reproduced_by_generators():
    rng = np.random.default_rng(7)
    n = 5
    base = [P("".join(rng.choice(list("IZ"), n))) for _ in range(8)]
    base = [p for p in base if not p.is_identity]
    # conjugate the Z set by a random Clifford-like relabeling of sites to X/Y on some qubits
    swap = rng.integers(0, 2, n)
    h = [P("".join(("X" if swap[q] and c == "Z" else c) for q, c in enumerate(p.label))) for p in base]
    h = list(dict.fromkeys(h))
    b = reduce_generators(h)
    assert len(b) <= n
    for p in h:
        idx = express_in_generators(p, b)
        assert idx is not None
        prod = PauliString.identity(n)
        for i in idx:
            prod = multiply(prod, b[i])
        assert prod.canonical() == p


@pytest.mark.parametrize("l,sizes", [(2, [2, 0]), (4, [6, 4, 2, 0])])
def test_tfim_fragment_sizes(l, sizes):
    assert decompose(tfim(l)).fragment_sizes == sizes


def test_empty_k_gives_empty_fragments():
    frags, resid = fragment_k([], [P("ZI"), P("IZ")])
    assert frags == [[], []] and resid == []


def test_fragment_residual_strict():
    with pytest.raises(ConsistencyError):
        fragment_k([P("XX")], [P("ZZ")])
    frags, resid = fragment_k([P("XX")], [P("ZZ")], strict=False)
    assert resid == [P("XX")]


@pytest.mark.parametrize("ham", [tfim(4), tfxy(5), xy(5), heisenberg(4)],
                         ids=["tfim4", "tfxy5", "xy5", "heis4"])
def test_fragments_follow_the_definition(ham):
    st = decompose(ham)
    seen = set()
    for r, frag in enumerate(st.fragments):
        for k in frag:
            assert not commutes(k, st.b_basis[r])
            assert all(commutes(k, b) for b in st.b_basis[:r])
            assert k not in seen
            seen.add(k)
    assert seen == set(st.k_basis)
    assert fragment_sizes(st.k_basis, st.b_basis) == st.fragment_sizes


@pytest.mark.parametrize("ham", [tfim(4), tfxy(4), xy(5), heisenberg(3)],
                         ids=["tfim4", "tfxy4", "xy5", "heis3"])
def test_symmetric_subspaces_are_cartan_decompositions(ham):
    st = decompose(ham)
    for r in range(1, len(st.b_basis) + 1):
        assert check_closure(st.k_symmetric(r), st.m_symmetric(r)) == []


def test_ordering_report_tfim():
    rep = decompose(tfim(4)).ordering_report()
    (comp,) = rep.components
    assert comp["sizes"] == [6, 4, 2, 0] and comp["linear_law"] and comp["slope"] == -2
    assert rep.ok


def test_single_fragment_trivially_ordered():
    st = decompose(tfim(2))
    assert st.ordering_report().ok


def test_ordering_violation_raises():
    st = decompose(tfim(3))
    dla = st.dla
    # a truncated k basis is not a full Cartan k, so sizes can grow
    ks = [P("XYI"), P("YXI"), P("XZY")]
    bs = [P("IIZ"), P("ZII")]
    with pytest.raises(TheoremViolation):
        check_ordering(ks, bs, dla)
    rep = check_ordering(ks, bs, dla, raise_on_violation=False)
    assert rep.components[0]["sizes"] == [1, 2] and not rep.ok


@pytest.mark.parametrize("ham", [tfim(5), tfxy(5), xy(5), heisenberg(4)],
                         ids=["tfim5", "tfxy5", "xy5", "heis4"])
def test_component_counting_lemmas(ham):
    st = decompose(ham)
    lab = {p: st.graph.labels[i] for i, p in enumerate(st.dla.basis)}
    mset = set(st.m_basis)
    for comp in {lab[b] for b in st.b_basis}:
        bs = [b for b in st.b_basis if lab[b] == comp]
        ks = [k for k in st.k_basis if lab[k] == comp]
        singles = {len(k_set(ks, [b], [])) for b in bs}
        assert len(singles) == 1
        for b1, b2 in itertools.permutations(bs, 2):
            assert len(k_set(ks, [b1], [b2])) == len(k_set(ks, [b2], [b1]))
        for trio in itertools.combinations(bs, 3):
            prod = multiply(multiply(trio[0], trio[1]), trio[2]).canonical()
            if prod not in mset:
                assert k_set(ks, list(trio), []) == []
    nonempty = sum(1 for s in st.fragment_sizes if s)
    assert nonempty <= st.n_qubits


def test_associative_structure():
    assert not has_associative_structure(decompose(tfim(4)).b_basis, generate_dla(tfim(4)))
    st = decompose(heisenberg(4))
    assert has_associative_structure(st.b_basis, st.dla)


def test_to_dict_shape():
    d = decompose(tfim(3)).to_dict()
    assert d["k_dim"] == 6 and d["m_dim"] == 9 and d["fragment_sizes"] == [4, 2, 0]


def test_b_order_validation():
    with pytest.raises(PreconditionError):
        decompose(tfim(3), b_order=[0, 0, 1])
    st = decompose(tfim(3), b_order=[2, 1, 0])
    assert labels(st.b_basis) == ["IIZ", "IZI", "ZII"]
