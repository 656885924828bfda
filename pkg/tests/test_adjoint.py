import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from redcard.adjoint import (AdjointFrame, Ansatz, conjugate, cost_fr, cost_full, inner,
                             irrational_weights, residual)
from redcard.cartan import decompose
from redcard.errors import MetricError, PreconditionError, StagingError
from redcard.models import tfim, tfxy
from redcard.oracle import expm_i, string_matrix, to_dense
from redcard.pauli import PauliString, PauliSum

P = PauliString.from_label


def dense_ansatz(ansatz: Ansatz, n: int) -> np.ndarray:
    u = np.eye(2 ** n, dtype=complex)
    for p, a in ansatz.factors:
        # exp(i a P) = exp(-i (-a) P)
        u = u @ expm_i(string_matrix(p.label), -a)
    return u.conj().T if ansatz.dagger else u


def random_sum(rng, n, terms=6):
    labels = ["".join(rng.choice(list("IXYZ"), n)) for _ in range(terms)]
    return PauliSum([(lab, rng.normal()) for lab in labels], n)


def random_ansatz(rng, n, m=5):
    strings = [P("".join(rng.choice(list("IXYZ"), n))) for _ in range(m)]
    return Ansatz(tuple(strings), tuple(rng.uniform(0, math.pi, m)))


def test_quarter_turn():
    out = conjugate(Ansatz((P("X"),), (math.pi / 4,)), PauliSum({"Z": 1.0}))
    assert out.isclose(PauliSum({"Y": 1.0}))


def test_zero_angles_are_identity():
    op = PauliSum({"XZ": 0.4, "YY": -1.0})
    assert conjugate(Ansatz.identity([P("XY"), P("ZI")]), op) == op


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("dagger", [False, True])
def test_conjugate_matches_dense(seed, dagger):
    rng = np.random.default_rng(seed)
    n = 3
    a = random_ansatz(rng, n)
    if dagger:
        a = a.adjoint()
    op = random_sum(rng, n)
    u = dense_ansatz(a, n)
    np.testing.assert_allclose(to_dense(conjugate(a, op)), u @ to_dense(op) @ u.conj().T, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2 ** 31 - 1))
def test_conjugation_is_an_isometry(seed):
    rng = np.random.default_rng(seed)
    a, x, y = random_ansatz(rng, 3), random_sum(rng, 3), random_sum(rng, 3)
    assert conjugate(a, x).norm() == pytest.approx(x.norm(), abs=1e-10)
    assert inner(conjugate(a, x), conjugate(a, y)) == pytest.approx(inner(x, y), abs=1e-10)


def test_inner_examples_and_dense():
    assert inner(PauliSum({"Z": 1.0}), PauliSum({"Z": 1.0})) == 1.0
    assert inner(PauliSum({"Z": 1.0}), PauliSum({"X": 1.0})) == 0.0
    rng = np.random.default_rng(3)
    a, b = random_sum(rng, 3), random_sum(rng, 3)
    want = np.trace(to_dense(a) @ to_dense(b)).real / 8
    assert inner(a, b) == pytest.approx(want, abs=1e-12)


def test_k_conjugation_keeps_m_in_m():
    st_ = decompose(tfxy(4))
    rng = np.random.default_rng(0)
    a = Ansatz(tuple(st_.k_basis), tuple(rng.uniform(0, 3, len(st_.k_basis))))
    out = conjugate(a, tfxy(4))
    assert set(out.strings) <= set(st_.m_basis)


def test_cost_fr_identity_reads_coefficient():
    h = tfim(3)
    assert cost_fr(Ansatz.identity([P("XYI")]), P("IZI"), h) == 0.5


def test_cost_fr_matches_dense():
    rng = np.random.default_rng(11)
    n = 3
    a = random_ansatz(rng, n)
    h = random_sum(rng, n)
    b = P("ZIX")
    u = dense_ansatz(a, n)
    want = np.trace(u @ string_matrix(b.label) @ u.conj().T @ to_dense(h)).real / 2 ** n
    assert cost_fr(a, b, h) == pytest.approx(want, abs=1e-12)


def test_cost_fr_single_angle_is_pi_periodic_sinusoid():
    h = tfim(2)
    frag = decompose(h).fragments[0]
    base = Ansatz(tuple(frag), (0.3, 1.1))
    f = lambda t: cost_fr(base.with_angle(0, t), P("ZI"), h)  # noqa: E731
    c = 0.5 * (f(0) + f(math.pi / 2))
    a, b = f(0) - c, f(math.pi / 4) - c
    for t in np.linspace(0, 2 * math.pi, 17):
        assert f(t) == pytest.approx(a * math.cos(2 * t) + b * math.sin(2 * t) + c, abs=1e-10)
        assert f(t + math.pi) == pytest.approx(f(t), abs=1e-12)


def test_cost_fr_staging_guard():
    with pytest.raises(StagingError):
        cost_fr(Ansatz.identity([]), P("IZ"), PauliSum({"XX": 1.0}), previous=[P("ZI")])


def test_cost_full_examples():
    st_ = decompose(tfim(3))
    h = tfim(3)
    gam = irrational_weights(len(st_.h_basis))
    v = PauliSum(list(zip(st_.h_basis, gam)), 3)
    ident = Ansatz.identity(st_.k_basis)
    assert cost_full(ident, v, h, st_.h_basis) == pytest.approx(sum(g * h.coeff(p) for p, g in zip(st_.h_basis, gam)))
    rng = np.random.default_rng(2)
    a = Ansatz(tuple(st_.k_basis), tuple(rng.uniform(0, 3, len(st_.k_basis))))
    b = st_.b_basis[0]
    assert cost_full(a, PauliSum.from_string(b), h) == pytest.approx(cost_fr(a, b, h))
    with pytest.raises(PreconditionError):
        cost_full(a, PauliSum({"XXI": 1.0}), h, st_.h_basis)


def test_irrational_weights():
    g = irrational_weights(3)
    np.testing.assert_allclose(g, [1 / math.pi, 1 / math.pi ** 2, 1 / math.pi ** 3])


def test_residual_examples():
    hb = [P("ZI"), P("IZ")]
    assert residual(PauliSum({"ZI": 0.3, "IZ": 1.0}), hb) == 0.0
    assert residual(PauliSum({"ZI": 1.0, "XX": 1.0}), hb) == pytest.approx(1 / math.sqrt(2))
    with pytest.raises(MetricError):
        residual(PauliSum({}, 2), hb)


def test_frame_matches_sparse_conjugation():
    st_ = decompose(tfim(4))
    frame = AdjointFrame(st_.m_basis, st_.k_basis)
    rng = np.random.default_rng(5)
    strings = list(st_.k_basis)
    angles = rng.uniform(0, math.pi, len(strings))
    a = Ansatz(tuple(strings), tuple(angles))
    h = tfim(4)
    for dag in (False, True):
        vec = frame.conjugate(strings, angles, frame.vector(h), dagger=dag)
        want = conjugate(a.adjoint() if dag else a, h)
        assert frame.to_sum(vec).isclose(want, atol=1e-12)
    assert frame.residual(frame.vector(h), st_.h_basis) == pytest.approx(residual(h, st_.h_basis))


def test_frame_rejects_unclosed_basis():
    with pytest.raises(PreconditionError):
        AdjointFrame([P("ZI")], [P("XI")])
