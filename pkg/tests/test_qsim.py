import itertools
import math

import numpy as np
import pytest

from redcard.adjoint import Ansatz, cost_fr
from redcard.cartan import decompose
from redcard.errors import PreconditionError
from redcard.models import tfim
from redcard.oracle import simulate_circuit_density, string_matrix
from redcard.pauli import PauliString, PauliSum
from redcard.qsim import (ShotConfig, ShotEvaluator, depolarizing_scale_invariance_check,
                          estimate_cost, scaled_rotosolve, state_prep_circuit)

P = PauliString.from_label


def tfim_instance(l, seed=0):
    h = tfim(l)
    st = decompose(h)
    rng = np.random.default_rng(seed)
    frag = st.fragments[0]
    return Ansatz(tuple(frag), tuple(rng.uniform(0, math.pi, len(frag)))), st.b_basis[0], h


def test_certain_outcome_is_exact():
    est = estimate_cost(Ansatz.identity([]), P("Z"), PauliSum({"Z": 0.7}), ShotConfig(13, seed=1))
    assert est == 0.7


def test_shot_config_validation():
    with pytest.raises(PreconditionError):
        ShotConfig(0)
    with pytest.raises(PreconditionError):
        ShotConfig(10, depol=1.5)


def test_operand_must_be_a_string():
    with pytest.raises(PreconditionError):
        estimate_cost(Ansatz.identity([]), PauliSum({"Z": 1.0}), PauliSum({"Z": 1.0}), ShotConfig())


def test_mean_of_repetitions_tracks_exact_cost():
    a, b, h = tfim_instance(4)
    exact = cost_fr(a, b, h)
    rng = np.random.default_rng(5)
    cfg = ShotConfig(800)
    xs = np.array([estimate_cost(a, b, h, cfg, rng) for _ in range(200)])
    assert abs(xs.mean() - exact) <= 3 * xs.std(ddof=1) / math.sqrt(len(xs))


def test_large_shot_limit():
    a, b, h = tfim_instance(3, seed=2)
    est = estimate_cost(a, b, h, ShotConfig(10 ** 8, seed=0))
    assert est == pytest.approx(cost_fr(a, b, h), abs=2e-3)


def test_depolarizing_shrinks_expectation():
    a, b, h = tfim_instance(3, seed=1)
    rng = np.random.default_rng(0)
    cfg = ShotConfig(10 ** 7, depol=0.3)
    est = np.mean([estimate_cost(a, b, h, cfg, rng) for _ in range(5)])
    assert est == pytest.approx(0.7 * cost_fr(a, b, h), abs=2e-3)


def test_evaluator_counts_and_noise_scale():
    ev = ShotEvaluator(ShotConfig(400, seed=3))
    a, b, h = tfim_instance(3)
    ev.evaluate(a, b, h)
    ev.evaluate(a, b, h)
    assert ev.calls == 2
    hv = np.array([c for _, c in h.items()])
    assert ev.noise_scale(hv) == pytest.approx(math.sqrt(np.sum(hv ** 2) / 400))


def test_scale_invariance_examples():
    f = [math.cos(0), math.cos(math.pi / 2), math.cos(math.pi)]
    rep = scaled_rotosolve(f, 0.5)
    assert rep["theta_clean"] == pytest.approx(math.pi / 2) and rep["match"] and not rep["skipped"]
    tiny = [1e-12 * x for x in f]
    rep = scaled_rotosolve(tiny, 0.9, current=0.2, flat_tol=1e-12)
    assert rep["skipped"] and rep["theta_scaled"] == 0.2


def test_scale_invariance_on_tfim():
    a, b, h = tfim_instance(3, seed=4)
    rep = depolarizing_scale_invariance_check(a, b, h, 0.3, index=1)
    assert rep["match"] and rep["theta_clean"] == pytest.approx(rep["theta_scaled"], abs=1e-12)
    with pytest.raises(PreconditionError):
        depolarizing_scale_invariance_check(a, b, h, 1.0)


# -- state preparation --------------------------------------------------------

def expected_state(label):
    n = len(label)
    return (np.eye(2 ** n) + string_matrix(label)) / 2 ** n


@pytest.mark.parametrize("label,cnots", [("ZI", 1), ("ZZ", 2)])
def test_state_prep_counts(label, cnots):
    assert state_prep_circuit(P(label)).cnot_count() == cnots


def test_state_prep_x_y():
    c = state_prep_circuit(P("XIY"))
    np.testing.assert_allclose(simulate_circuit_density(c), expected_state("XIY"), atol=1e-12)


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("single", [True, False])
def test_state_prep_exhaustive(n, single):
    for chars in itertools.product("IXYZ", repeat=n):
        label = "".join(chars)
        if set(label) == {"I"}:
            continue
        p = P(label)
        c = state_prep_circuit(p, single_ancilla=single)
        assert c.cnot_count() == n + p.weight - 2
        np.testing.assert_allclose(simulate_circuit_density(c), expected_state(label), atol=1e-12)


def test_state_prep_four_qubits_dense():
    rng = np.random.default_rng(0)
    for _ in range(10):
        label = "".join(rng.choice(list("IXYZ"), 4))
        if set(label) == {"I"}:
            continue
        c = state_prep_circuit(P(label))
        np.testing.assert_allclose(simulate_circuit_density(c), expected_state(label), atol=1e-12)


def test_state_prep_rejects_identity():
    with pytest.raises(PreconditionError):
        state_prep_circuit(PauliString.identity(3))
