import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stabgraph import _kernels
from stabgraph.clifford import (
    CNOT,
    H,
    P,
    Circuit,
    GateOp,
    PauliString,
    StabilizerTableau,
    amplitudes,
    apply_circuit,
    apply_gate,
    basis_state,
    canonicalize,
    conjugate,
    full_gate_set,
    ket,
    one_qubit_state,
    product_state,
    same_ray,
    tableau_from_key,
)
from stabgraph.errors import InvalidArgument, InvariantViolation
from stabgraph.groups import gate_unitary

ONE = ("0", "1", "+", "-", "i", "-i")


def paulis(n):
    return st.tuples(st.integers(0, 3), st.text("IXYZ", min_size=n, max_size=n)).map(
        lambda t: PauliString.from_label(["", "-", "i", "-i"][t[0]] + t[1])
    )


def gates(n):
    return st.sampled_from(full_gate_set(n))


def words(n, max_size=12):
    return st.lists(gates(n), max_size=max_size)


def random_state(n, word):
    return apply_circuit(basis_state(n), word)[-1]


@given(paulis(3), paulis(3))
def test_pauli_product_matches_matrices(a, b):
    assert np.allclose((a * b).matrix(), a.matrix() @ b.matrix())


@given(paulis(3), paulis(3))
def test_commutation_matches_matrices(a, b):
    ma, mb = a.matrix(), b.matrix()
    assert a.commutes(b) == np.allclose(ma @ mb, mb @ ma)


@given(paulis(3), gates(3))
def test_conjugation_matches_unitary(p, g):
    u = gate_unitary(g, 3).to_complex()
    assert np.allclose(conjugate(p, g).matrix(), u @ p.matrix() @ u.conj().T)


@given(words(3))
def test_state_vector_tracks_unitary(word):
    t = basis_state(3)
    vec = ket("000")
    for g in word:
        t = apply_gate(t, g)
        vec = gate_unitary(g, 3).to_complex() @ vec
    assert same_ray(amplitudes(t), vec)


@given(words(3))
def test_amplitudes_are_stabilized(word):
    t = random_state(3, word)
    vec = amplitudes(t)
    assert np.isclose(np.linalg.norm(vec), 1.0)
    for p in t.generators:
        assert np.allclose(p.matrix() @ vec, vec)


@given(words(3), st.lists(st.tuples(st.integers(0, 2), st.integers(0, 2)), max_size=6))
def test_canonical_key_ignores_generator_choice(word, ops):
    t = random_state(3, word)
    gens = list(t.generators)
    for i, j in ops:
        if i != j:
            gens[i] = gens[i] * gens[j]
    assert canonicalize(StabilizerTableau(3, gens)) == canonicalize(t)
    assert canonicalize(tableau_from_key(canonicalize(t))) == canonicalize(t)


@settings(max_examples=50)
@given(st.integers(2, 5).flatmap(lambda n: st.tuples(st.just(n), words(n, 20))))
def test_kernel_agrees_with_reference(case):
    n, word = case
    t = random_state(n, word)
    key = np.array([canonicalize(t).bits], dtype=np.uint64)
    kinds, q1s, q2s = _kernels.gate_arrays(full_gate_set(n))
    got = _kernels.apply_many(key, n, kinds, q1s, q2s)[0]
    want = [canonicalize(apply_gate(t, g)).bits for g in full_gate_set(n)]
    assert got.tolist() == want


def test_gate_group_laws_on_vectors():
    for g, power in ((H(1), 2), (P(1), 4), (CNOT(1, 2), 2), (CNOT(2, 1), 2)):
        u = gate_unitary(g, 2).to_complex()
        assert np.allclose(np.linalg.matrix_power(u, power), np.eye(4))
    p2 = gate_unitary(P(1), 2).to_complex()
    assert not np.allclose(p2 @ p2, np.eye(4))


def test_cnot_identity_on_unitaries():
    # CX21 = H1 H2 CX12 H2 H1 as operators
    u = {g: gate_unitary(g, 2).to_complex() for g in (H(1), H(2), CNOT(1, 2), CNOT(2, 1))}
    rhs = u[H(1)] @ u[H(2)] @ u[CNOT(1, 2)] @ u[H(2)] @ u[H(1)]
    assert np.allclose(u[CNOT(2, 1)], rhs)


def test_gate_labels_round_trip():
    for g in full_gate_set(3):
        assert GateOp.parse(g.label) == g
    assert CNOT(1, 2).label == "CX12"
    for bad in ("X1", "CX11", "H0", "CX1", ""):
        with pytest.raises(InvalidArgument):
            GateOp.parse(bad)
    with pytest.raises(InvalidArgument):
        H(4).check(3)


@given(words(3))
def test_circuit_inverse_returns_to_start(word):
    c = Circuit(word)
    t = basis_state(3)
    back = apply_circuit(apply_circuit(t, c)[-1], c.inverse())[-1]
    assert canonicalize(back) == canonicalize(t)


def test_one_qubit_states():
    s = 1 / np.sqrt(2)
    want = {
        "0": [1, 0],
        "1": [0, 1],
        "+": [s, s],
        "-": [s, -s],
        "i": [s, 1j * s],
        "-i": [s, -1j * s],
    }
    for lab, vec in want.items():
        assert same_ray(amplitudes(one_qubit_state(lab)), np.array(vec))
    with pytest.raises(InvalidArgument):
        one_qubit_state("2")


def test_product_state_and_ghz():
    assert same_ray(amplitudes(product_state(["1", "0"])), ket("10"))
    ghz = apply_circuit(basis_state(2), Circuit(["H1", "CX12"]))[-1]
    assert same_ray(amplitudes(ghz), ket("00") + ket("11"))


def test_invalid_tableau_rejected():
    with pytest.raises(InvariantViolation):
        StabilizerTableau.from_labels(["XI", "ZI"]).validate()
    with pytest.raises(InvariantViolation):
        StabilizerTableau.from_labels(["ZI", "ZI"]).validate()
