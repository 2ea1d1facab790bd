import numpy as np
import pytest

from stabgraph import entropy as ent
from stabgraph import graphs as gr
from stabgraph import lifts
from stabgraph.clifford import amplitudes, ket, one_qubit_state, product_state, same_ray
from stabgraph.errors import InvalidArgument

_S = 1 / np.sqrt(2)
_ONE = {
    "0": np.array([1, 0]),
    "1": np.array([0, 1]),
    "+": np.array([_S, _S]),
    "-": np.array([_S, -_S]),
    "i": np.array([_S, 1j * _S]),
    "-i": np.array([_S, -1j * _S]),
}


def k(*labels):
    v = np.array([1.0 + 0j])
    for lab in labels:
        v = np.kron(v, _ONE[lab])
    return v


def lifted(attach, post):
    return amplitudes(lifts.apply_lift(lifts.base_state(), lifts.LiftSpec.of(attach, post)))


# published lifted kets of |i1>; the CX32 with |-i> row repeats the |-> row in print, the
# value below is the one the remaining rows and the circuit definition imply
PUBLISHED = [
    ("+", ["CX31"], k("i", "1", "0") + 1j * k("-i", "1", "1")),
    ("-", ["CX31"], k("i", "1", "0") - 1j * k("-i", "1", "1")),
    ("i", ["CX31"], k("i", "1", "0") - k("-i", "1", "1")),
    ("-i", ["CX31"], k("i", "1", "0") + k("-i", "1", "1")),
    ("0", ["CX13"], ket("010") + 1j * ket("111")),
    ("1", ["CX13"], ket("011") + 1j * ket("110")),
    ("i", ["CX13"], k("0", "1", "i") - k("1", "1", "-i")),
    ("-i", ["CX13"], k("0", "1", "-i") + k("1", "1", "i")),
    ("0", ["CX13", "P3"], ket("010") - ket("111")),
    ("1", ["CX13", "P3"], ket("011") + ket("110")),
    ("i", ["CX13", "P3"], k("0", "1", "-") - k("1", "1", "+")),
    ("-i", ["CX13", "P3"], k("0", "1", "+") + k("1", "1", "-")),
    ("+", ["CX32"], k("i", "1", "0") + k("i", "0", "1")),
    ("-", ["CX32"], k("i", "1", "0") - k("i", "0", "1")),
    ("i", ["CX32"], k("i", "1", "0") + 1j * k("i", "0", "1")),
    ("-i", ["CX32"], k("i", "1", "0") - 1j * k("i", "0", "1")),
    ("+", ["CX31", "CX32"], k("i", "1", "0") + 1j * k("-i", "0", "1")),
    ("-", ["CX31", "CX32"], k("i", "1", "0") - 1j * k("-i", "0", "1")),
    ("i", ["CX31", "CX32"], k("i", "1", "0") - k("-i", "0", "1")),
    ("-i", ["CX31", "CX32"], k("i", "1", "0") + k("-i", "0", "1")),
]


@pytest.mark.parametrize("attach,post,want", PUBLISHED)
def test_lifted_kets(attach, post, want):
    assert same_ray(lifted(attach, post), want)


def test_expanded_lifted_kets():
    assert same_ray(lifted("+", ["CX31"]), ket("010") + 1j * ket("011") + 1j * ket("110") + ket("111"))
    assert same_ray(lifted("0", ["CX13"]), ket("010") + 1j * ket("111"))


def test_cx32_lifts_entangle_the_new_qubit():
    for attach in ("+", "-", "i", "-i"):
        for post in (["CX32"], ["CX31", "CX32"]):
            t = lifts.apply_lift(lifts.base_state(), lifts.LiftSpec.of(attach, post))
            assert ent.entropy_vector(t).serialize() in {"011", "101", "111"}


def test_tensor_matches_kron():
    a, b = product_state(["i", "1"]), one_qubit_state("-")
    assert same_ray(amplitudes(lifts.tensor(a, b)), np.kron(amplitudes(a), amplitudes(b)))


def test_lift_spec_names():
    assert lifts.LiftSpec.of("+", ["CX31"]).name == "CX31(psi x |+>)"
    assert lifts.LiftSpec.of("0", ["CX13", "P3"]).name == "P3CX13(psi x |0>)"
    assert len(lifts.covering_starts()) == 26


def test_covering(restricted):
    reports = lifts.verify_covering(restricted(3))
    assert [r.size for r in reports] == [36] * 6 + [144] * 3 + [288]
    assert all(r.ok for r in reports)
    assert len({r.component_id for r in reports}) == 10
    with pytest.raises(InvalidArgument):
        lifts.verify_covering(restricted(2))


def test_replay_matches_state_simulation(restricted, states):
    from stabgraph.clifford import apply_circuit
    from stabgraph.hampath import circuit_C

    g = restricted(2)
    start = product_state(["i", "1"])
    want = [states(2).index(t) for t in apply_circuit(start, circuit_C())]
    assert lifts.replay(g, states(2).index(start), circuit_C()) == want


def test_cycle_lift_of_g288_into_g1152(restricted):
    from stabgraph.hampath import rotation_extension_cycle

    g3, g4 = restricted(3), restricted(4)
    comp = [c for c in gr.connected_components(g3) if c.size == 288][0]
    cyc = rotation_extension_cycle(g3, comp, seed=0)
    verts, gates = list(cyc.witness), list(cyc.gate_sequence)
    spec = lifts.LiftSpec.of("0", ["CX14"])
    rep = lifts.lift_cycle(g3, verts, gates, g4, spec)
    assert rep.component_size == 1152 and rep.simple_cycle and rep.coverage == 0.25
    cands = lifts.cycle_lift_candidates(g3, verts, gates, g4, [spec], 1152)
    cover = lifts.find_cycle_cover(cands, 1152, 4)
    assert cover is not None
    union = set().union(*(c.vertices for c in cover))
    assert len(union) == 1152 and len({c.component_id for c in cover}) == 1


def test_find_cycle_cover_on_toy_candidates():
    spec = lifts.LiftSpec.of("0")
    mk = lambda vs: lifts.CycleLift(spec, 0, min(vs), frozenset(vs), 0)
    cands = [mk({0, 1}), mk({1, 2}), mk({2, 3}), mk({0, 3})]
    cover = lifts.find_cycle_cover(cands, 4, 2)
    assert cover and set().union(*(c.vertices for c in cover)) == {0, 1, 2, 3}
    assert lifts.find_cycle_cover(cands[:2], 4, 2) is None
