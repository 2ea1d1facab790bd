"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines at the end of the run.

Run alone with ``pytest tests/test_acceptance.py -v``; set STABGRAPH_CACHE to reuse
enumerated states between runs.
"""

import time

import numpy as np
import pytest

from stabgraph import _kernels
from stabgraph import entropy as ent
from stabgraph import graphs as gr
from stabgraph import hampath as hp
from stabgraph import lifts
from stabgraph.cli import expected_tables
from stabgraph.clifford import (
    CNOT,
    H,
    P,
    Circuit,
    amplitudes,
    apply_circuit,
    basis_state,
    one_qubit_state,
    product_state,
)
from stabgraph.enumeration import cache_read, cache_write, enumerate_states
from stabgraph.groups import orbit_and_stabilizer, subgroup_order

TABLES = expected_tables()
SEED = 20240617
ORACLE_SAMPLES = 10_000
PROPERTY_SAMPLES = 2_000


def _sample(states, k, seed=SEED):
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(len(states), size=min(k, len(states)), replace=False))


def _step(states, idx, gates):
    """Ordinals of each gate applied to each sampled vertex, shape (len(idx), len(gates))."""
    kinds, q1s, q2s = _kernels.gate_arrays(tuple(gates))
    raw = _kernels.apply_many(states.keys[idx], states.n, kinds, q1s, q2s)
    return states.lookup(raw.reshape(-1)).reshape(raw.shape)


def _walk(states, idx, word):
    """Apply a gate word (leftmost first) to sampled vertices."""
    cur = np.asarray(idx)
    for g in word:
        cur = _step(states, cur, [g])[:, 0]
    return cur


def _census_rows(states):
    return {v.serialize(): c for v, c in ent.entropy_census(states).items()}


def test_criterion_01_state_counts(states, record_property):
    expected = {1: 6, 2: 60, 3: 1080, 4: 36720, 5: 2423520}
    for n in range(1, 5):
        t0 = time.perf_counter()
        s = enumerate_states(n)
        dt = time.perf_counter() - t0
        assert len(s) == expected[n]
        assert dt < 30.0, f"n={n} took {dt:.1f}s"
    t0 = time.perf_counter()
    s5 = states(5)
    dt = time.perf_counter() - t0
    assert len(s5) == expected[5]
    assert dt < 900.0
    record_property("detail", "6, 60, 1080, 36720, 2423520")


def test_criterion_02_entropy_oracle(states, record_property):
    mismatches = 0
    checked = 0
    for n, idx in ((3, None), (4, ORACLE_SAMPLES), (5, ORACLE_SAMPLES)):
        s = states(n)
        rows = np.arange(len(s)) if idx is None else _sample(s, idx, SEED + n)
        table = ent.entropy_table(s)
        masks = ent.coordinates(n)
        for i in rows.tolist():
            amps = amplitudes(s.tableau(i))
            for j, mk in enumerate(masks):
                checked += 1
                if abs(ent.spectral_entropy(amps, n, mk.qubits) - table[i, j]) > 1e-9:
                    mismatches += 1
    record_property("detail", f"{checked} comparisons, {mismatches} mismatches")
    assert mismatches == 0


def test_criterion_03_three_qubit_census(states, record_property):
    expected = {r["vector"]: r["count"] for r in TABLES["3q-entropy"]["rows"]}
    got = _census_rows(states(3))
    record_property("detail", " ".join(f"{k}:{v}" for k, v in sorted(got.items())))
    assert got == expected
    assert sorted(got.values()) == [144, 144, 144, 216, 432]


def test_criterion_04_four_qubit_census(states, record_property):
    tab = TABLES["4q-entropy"]
    expected = {r["vector"]: r["count"] for r in tab["rows"]}
    census = ent.entropy_census(states(4))
    got = {v.serialize(): c for v, c in census.items()}
    assert len(got) == 18
    assert got == expected
    bad = {v: c for v, c in census.items() if not ent.check_holographic(v).holographic}
    assert [v.serialize() for v in bad] == ["1111111"]
    assert sum(bad.values()) == 2592
    kinds = set().union(*(ent.check_holographic(v).violated_kinds for v in bad))
    assert kinds == {"mmi"}
    record_property("detail", "18 vectors; 2592 non-holographic states at 1111111, MMI violated")


def test_criterion_05_five_qubit_census(states, record_property):
    tab = TABLES["5q-entropy"]
    census = ent.entropy_census(states(5))
    got = {v.serialize(): ent.check_holographic(v).holographic for v in census}
    expected = {r["vector"]: r["holographic"] for r in tab["rows"]}
    bad = sum(not h for h in got.values())
    rep = tab["reported_non_holographic_vectors"]
    flagged = "discrepancy flagged" if bad != rep["summary_statement"] or bad != rep["table_rows"] else "agrees"
    record_property(
        "detail",
        f"{len(got)} vectors; {bad} non-holographic computed vs published {rep['summary_statement']} (summary) "
        f"and {rep['table_rows']} (table); {flagged}",
    )
    assert len(got) == 93
    assert got == expected
    # determinism: a second pass from a fresh table gives the same count
    again = sum(not ent.check_holographic(v).holographic for v in ent.entropy_census(states(5)))
    assert again == bad


def test_criterion_06_component_census(restricted, record_property):
    counts = TABLES["subgraph-counts"]["counts"]
    seen_sizes = set()
    for n in range(2, 6):
        got = gr.size_census(gr.connected_components(restricted(n)))
        assert got == {int(k): v for k, v in counts[str(n)].items()}, f"n={n}"
        seen_sizes |= set(got)
    assert seen_sizes <= {24, 36, 144, 288, 1152}
    record_property("detail", "n=5: " + str(gr.size_census(gr.connected_components(restricted(5)))))


def test_criterion_07_entropy_signatures(restricted, record_property):
    want = {"011", "101", "111"}
    g144s = [c for c in gr.connected_components(restricted(3)) if c.size == 144]
    assert len(g144s) == 3
    for c in g144s:
        assert {v.serialize() for v in c.vectors} == want
    comps4 = gr.connected_components(restricted(4))
    ar1152 = {c.arity for c in comps4 if c.size == 1152}
    ar144 = {c.arity for c in comps4 if c.size == 144}
    record_property("detail", f"n=4 g1152 arities {sorted(ar1152)}, g144 arities {sorted(ar144)}")
    assert {2, 4} <= ar1152
    assert {3, 4} <= ar144


def test_criterion_08_circuit_c(restricted, states, record_property):
    g2 = restricted(2)
    s2 = states(2)
    c = hp.circuit_C()
    assert len(c) == 35
    g24, g36 = gr.connected_components(g2)
    assert (g24.size, g36.size) == (24, 36)

    for labels in (["i", "1"], ["-i", "1"]):
        rep = hp.verify_hamiltonian_traversal(g2, s2.index(product_state(labels)), c)
        assert rep.found, f"C from {labels}: {rep.detail}"
    ct = hp.transpose(c)
    for labels in (["1", "i"], ["1", "-i"]):
        rep = hp.verify_hamiltonian_traversal(g2, s2.index(product_state(labels)), ct)
        assert rep.found, f"C^T from {labels}: {rep.detail}"
    # C^-1 walks the same path backwards from C's endpoint
    fwd = hp.verify_hamiltonian_traversal(g2, s2.index(product_state(["i", "1"])), c)
    back = hp.verify_hamiltonian_traversal(g2, fwd.witness[-1], c.inverse())
    assert back.found and back.witness == fwd.witness[::-1]

    starts = hp.hamiltonian_path_starts(g2, g36)
    assert len(starts) == 30
    assert not hp.hamiltonian_search(g2, g24).found
    cyc36 = hp.hamiltonian_search(g2, g36, cycle=True)
    assert cyc36.exhausted and not cyc36.found

    ghz = s2.index(apply_circuit(basis_state(2), Circuit(["H1", "CX12"]))[-1])
    assert ghz in hp.cut_vertices(g2, g24)

    g3 = restricted(3)
    found = []
    for comp in gr.connected_components(g3):
        if comp.size in (144, 288):
            rep = hp.rotation_extension_cycle(g3, comp, seed=0)
            assert rep.found and hp.verify_path(hp.LocalGraph.from_component(g3, comp), rep.witness, cycle=True)
            found.append(comp.size)
    assert sorted(found) == [144, 144, 144, 288]
    record_property("detail", "C, C^T, C^-1 traverse g36; 30 path starts; GHZ cut vertex; n=3 cycles found")


def test_criterion_09_eulerian(restricted, record_property):
    out = []
    for n, size, length in ((3, 288, 576), (4, 1152, 2304)):
        g = restricted(n)
        comps = [c for c in gr.connected_components(g) if c.size == size]
        assert comps
        for comp in comps:
            assert int(g.trivial_loops()[comp.vertices].sum()) == 0
            degs = {len(a) for a in g.adjacency(comp.vertices.tolist()).values()}
            assert degs == {4}
            rep = hp.eulerian_cycle(g, comp)
            assert rep.found and len(rep.witness) - 1 == length
            assert hp.verify_eulerian(g.undirected_edges(comp.vertices), rep)
        out.append(f"g{size}: {length}")
    record_property("detail", ", ".join(out))


def _cycle_of(g, comp):
    rep = hp.rotation_extension_cycle(g, comp, seed=0)
    assert rep.found
    return list(rep.witness), list(rep.gate_sequence)


def test_criterion_10_lift_covering(restricted, record_property):
    g3, g4 = restricted(3), restricted(4)
    reports = lifts.verify_covering(g3)
    assert sum(len(r.starts) for r in reports) == 26
    assert all(r.ok for r in reports), [r.to_dict() for r in reports if not r.ok]

    # four lifted copies of a g288 cycle cover one g1152
    comp288 = next(c for c in gr.connected_components(g3) if c.size == 288)
    verts, gates = _cycle_of(g3, comp288)
    cands = lifts.cycle_lift_candidates(g3, verts, gates, g4, lifts.cnot_lift_specs(3, True), 1152)
    four = lifts.find_cycle_cover(cands, 1152, 4)
    assert four is not None

    # two lifted copies of a g144 cycle covering one g288, at three and at four qubits
    double = None
    for comp in (c for c in gr.connected_components(g3) if c.size == 144):
        verts, gates = _cycle_of(g3, comp)
        for dst, specs in ((g3, lifts.cnot_lift_specs(3, False)), (g4, lifts.cnot_lift_specs(3, True))):
            cands = lifts.cycle_lift_candidates(g3, verts, gates, dst, specs, 288)
            double = double or lifts.find_cycle_cover(cands, 288, 2)
    record_property(
        "detail",
        f"26-start covering ok; g1152 four-cycle cover found; g144->g288 double cover "
        f"{'found' if double else 'not found (see decision ledger)'}",
    )
    assert double is not None, "no pair of lifted g144 cycles covers a g288"


def test_criterion_11_distances(full, states, record_property):
    want = TABLES["distances"]["max_geodesic"]
    got = {}
    for n in range(1, 5):
        t0 = time.perf_counter()
        g = full(n)
        rep = gr.max_geodesic_from(g, states(n).index(basis_state(n)))
        dt = time.perf_counter() - t0
        assert not rep.unreachable
        got[n] = rep.distance
        if n == 4:
            assert dt < 600.0
    record_property("detail", str(got))
    assert got == {int(k): v for k, v in want.items()}


def test_criterion_12_group_facts(restricted, record_property):
    for gens, rows in TABLES["one-qubit-orbits"]["groups"].items():
        for lab, row in rows.items():
            r = orbit_and_stabilizer(one_qubit_state(lab), gens.split(","))
            assert (r.group_order, r.stabilizer, r.orbit) == (row["group"], row["stabilizer"], row["orbit"])
    order = subgroup_order(["H1", "H2", "CX12", "CX21"])
    sizes = set()
    for n in range(2, 6):
        sizes |= {c.size for c in gr.connected_components(restricted(n))}
    assert all(order.projective % s == 0 for s in sizes)
    assert order.projective in sizes
    record_property("detail", f"order {order.projective} (with phases {order.phase_inclusive}); sizes {sorted(sizes)}")


def test_criterion_13_property_suites(states, cache_dir, tmp_path, record_property):
    for n in range(1, 6):
        s = states(n)
        idx = np.arange(len(s)) if n <= 3 else _sample(s, PROPERTY_SAMPLES, SEED + 13 * n)
        for q in range(1, n + 1):
            assert np.array_equal(_walk(s, idx, [H(q)] * 2), idx)
            assert np.array_equal(_walk(s, idx, [P(q)] * 4), idx)
        for a in range(1, n + 1):
            for b in range(1, n + 1):
                if a != b:
                    assert np.array_equal(_walk(s, idx, [CNOT(a, b)] * 2), idx)
        if n >= 2:
            # CX21 = H1 H2 CX12 H2 H1, rightmost acting first
            lhs = _walk(s, idx, [CNOT(2, 1)])
            rhs = _walk(s, idx, [H(1), H(2), CNOT(1, 2), H(2), H(1)])
            assert np.array_equal(lhs, rhs)

            table = ent.entropy_table(s)
            masks = ent.coordinates(n)
            for i in idx[: min(len(idx), 300)].tolist():
                t = s.tableau(i)
                for bits in range(1, (1 << n) - 1):
                    mk = ent.SubsystemMask(n, bits)
                    assert ent.subsystem_entropy(t, mk) == ent.subsystem_entropy(t, mk.complement())
            for a in range(1, n + 1):
                for b in range(1, n + 1):
                    if a == b:
                        continue
                    moved = _walk(s, idx, [CNOT(a, b)])
                    for j, mk in enumerate(masks):
                        if (a in mk.qubits) == (b in mk.qubits):
                            assert np.array_equal(table[moved, j], table[idx, j])
        path = tmp_path / f"rt{n}.stbs"
        cache_write(s, path)
        assert cache_read(n, path) == s
    record_property("detail", "exhaustive at n<=3, seeded samples at n=4,5")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
