"""Lifting k-qubit states and circuits to n qubits, and the lifted path coverings."""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .clifford import (
    CNOT,
    Circuit,
    StabilizerTableau,
    apply_circuit,
    one_qubit_state,
    product_state,
)
from .errors import InvalidArgument, InvalidTraversal
from .graphs import ComponentSummary, ReachabilityGraph, component_of, connected_components
from .hampath import circuit_C

ONE_QUBIT_LABELS = ("0", "1", "+", "-", "i", "-i")


def tensor(t1: StabilizerTableau, t2: StabilizerTableau) -> StabilizerTableau:
    """Tensor product; the qubits of ``t1`` come first."""
    gens = [p.padded(right=t2.n) for p in t1.generators]
    gens += [p.padded(left=t1.n) for p in t2.generators]
    return StabilizerTableau(t1.n + t2.n, gens)


@dataclass(frozen=True)
class LiftSpec:
    """Attach ``attach`` after the existing qubits, then run ``post_circuit`` (leftmost first)."""

    attach: StabilizerTableau | None
    post_circuit: Circuit = Circuit()
    name: str = ""

    @classmethod
    def of(cls, attach: str | None, post: Sequence[str] = ()) -> "LiftSpec":
        """``LiftSpec.of("+", ["CX31"])`` is CNOT_{3,1}(psi tensor |+>)."""
        t = None if attach is None else one_qubit_state(attach)
        c = Circuit(post)
        ops = "".join(reversed([g.label for g in c]))
        name = f"{ops}(psi x |{attach}>)" if attach is not None else f"{ops}(psi)"
        return cls(t, c, name)

    @property
    def extra_qubits(self) -> int:
        return 0 if self.attach is None else self.attach.n


def apply_lift(t: StabilizerTableau, spec: LiftSpec) -> StabilizerTableau:
    lifted = t if spec.attach is None else tensor(t, spec.attach)
    spec.post_circuit.check(lifted.n)
    out = apply_circuit(lifted, spec.post_circuit)[-1]
    out.validate()
    return out


def replay(g: ReachabilityGraph, start: int, c: Circuit) -> list[int]:
    """Vertex trajectory of ``c`` from ``start`` following the graph's edge table."""
    cols = {gate: k for k, gate in enumerate(g.gate_set.gates)}
    try:
        ks = [cols[gate] for gate in c]
    except KeyError as exc:
        raise InvalidTraversal(f"gate {exc.args[0]} is outside the gate set") from None
    traj = [int(start)]
    v = int(start)
    for k in ks:
        v = int(g.targets[v, k])
        traj.append(v)
    return traj


def component_index(g: ReachabilityGraph) -> np.ndarray:
    """Position of each vertex's component in the sorted component list."""
    out = np.empty(g.num_vertices, dtype=np.int64)
    for i, comp in enumerate(connected_components(g)):
        out[comp.vertices] = i
    return out


@dataclass
class CoveringReport:
    component_id: int
    size: int
    starts: list[str]
    covered: int
    overlaps: list[int] = field(default_factory=list)
    escapes: list[str] = field(default_factory=list)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.covered == self.size and not self.overlaps and not self.escapes and not self.failures

    def to_dict(self) -> dict:
        return {
            "component_id": self.component_id,
            "covered": f"{self.covered}-of-{self.size}",
            "overlaps": self.overlaps,
            "starts": self.starts,
        }


# The 26 lifted starting states: |i1> lifted by (attachment, circuit) per group.
COVERING_TABLE: tuple[tuple[str, tuple[str, ...], tuple[str, ...]], ...] = (
    ("g36-0", ("0",), ()),
    ("g36-1", ("1",), ()),
    ("g36-+", ("+",), ()),
    ("g36--", ("-",), ()),
    ("g36-i", ("i",), ()),
    ("g36--i", ("-i",), ()),
    ("g144-1", ("+", "-", "i", "-i"), ("CX31",)),
    ("g144-2", ("0", "1", "i", "-i"), ("CX13",)),
    ("g144-3", ("0", "1", "i", "-i"), ("CX13", "P3")),
    ("g288", ("+", "-", "i", "-i"), ("CX32",)),
    ("g288", ("+", "-", "i", "-i"), ("CX31", "CX32")),
)


def covering_starts() -> list[tuple[str, LiftSpec]]:
    out = []
    for group, attaches, post in COVERING_TABLE:
        for a in attaches:
            out.append((group, LiftSpec.of(a, post)))
    return out


def base_state() -> StabilizerTableau:
    """|i1>, the start of circuit C on the two-qubit g36."""
    return product_state(["i", "1"])


def _cover(g: ReachabilityGraph, comp_idx: np.ndarray, comp_id: int, starts, c: Circuit) -> CoveringReport:
    comps = connected_components(g)
    comp = comps[comp_id]
    counts: dict[int, int] = {}
    rep = CoveringReport(comp_id, comp.size, [name for name, _ in starts], 0)
    for name, v in starts:
        traj = replay(g, v, c)
        if len(set(traj)) != len(traj):
            rep.failures.append(f"{name}: path revisits a vertex")
        for u in traj:
            if comp_idx[u] != comp_id:
                rep.escapes.append(name)
                break
            counts[u] = counts.get(u, 0) + 1
    rep.covered = len(counts)
    rep.overlaps = sorted(u for u, k in counts.items() if k > 1)
    return rep


def verify_covering(g: ReachabilityGraph, c: Circuit | None = None) -> list[CoveringReport]:
    """Replay C from each of the 26 lifted starts and audit the per-component coverings (n = 3)."""
    if g.n != 3:
        raise InvalidArgument("the covering table is defined at three qubits")
    c = circuit_C() if c is None else c
    comp_idx = component_index(g)
    psi = base_state()
    groups: dict[str, list[tuple[str, int]]] = {}
    for group, spec in covering_starts():
        v = g.states.index(apply_lift(psi, spec))
        groups.setdefault(group, []).append((spec.name, v))
    reports = []
    for group, starts in groups.items():
        ids = {int(comp_idx[v]) for _, v in starts}
        cid = min(ids)
        rep = _cover(g, comp_idx, cid, starts, c)
        if len(ids) > 1:
            rep.failures.append(f"{group}: starts lie on components {sorted(ids)}")
        reports.append(rep)
    return reports


def covering_json(reports: Iterable[CoveringReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], sort_keys=True)


@dataclass(frozen=True)
class CycleLift:
    """A cycle replay: start ``rotation`` steps into the source cycle, lift, then replay."""

    spec: LiftSpec
    rotation: int
    start: int
    vertices: frozenset[int]
    component_id: int


def rotate(c: Circuit, k: int) -> Circuit:
    gates = list(c)
    return Circuit(gates[k:] + gates[:k])


@dataclass(frozen=True)
class CycleLiftReport:
    trajectory: tuple[int, ...]
    closed: bool
    distinct: int
    component_id: int
    component_size: int

    @property
    def simple_cycle(self) -> bool:
        return self.closed and self.distinct == len(self.trajectory) - 1

    @property
    def coverage(self) -> float:
        return self.distinct / self.component_size


def lift_cycle(
    src: ReachabilityGraph,
    cycle_vertices: Sequence[int],
    cycle_gates: Sequence[str],
    dst: ReachabilityGraph,
    spec: LiftSpec,
    rotation: int = 0,
) -> CycleLiftReport:
    """Lift the cycle's vertex at ``rotation`` by ``spec`` and replay the cycle's gates from there."""
    seq = rotate(Circuit(cycle_gates), rotation)
    start_state = apply_lift(src.states.tableau(cycle_vertices[rotation]), spec)
    v0 = dst.states.index(start_state)
    traj = replay(dst, v0, seq)
    comp = component_of(dst, v0)
    comp_id = connected_components(dst).index(comp)
    members = set(comp.vertices.tolist())
    if any(v not in members for v in traj):
        raise InvalidTraversal("cycle replay left its component")
    return CycleLiftReport(tuple(traj), traj[-1] == traj[0], len(set(traj[:-1])), comp_id, comp.size)


def cycle_lift_candidates(
    src: ReachabilityGraph,
    cycle_vertices: Sequence[int],
    cycle_gates: Sequence[str],
    dst: ReachabilityGraph,
    specs: Iterable[LiftSpec],
    target_size: int,
) -> list[CycleLift]:
    """All (spec, rotation) replays that close into simple cycles inside ``target_size`` components."""
    comp_idx = component_index(dst)
    comps = connected_components(dst)
    cols = {gate: k for k, gate in enumerate(dst.gate_set.gates)}
    gate_cols = np.array([cols[gate] for gate in Circuit(cycle_gates)], dtype=np.int64)
    m = len(cycle_vertices)
    out = []
    for spec in specs:
        starts = np.array(
            [dst.states.index(apply_lift(src.states.tableau(v), spec)) for v in cycle_vertices], dtype=np.int64
        )
        # trajectories for every rotation at once: row r replays gates r, r+1, ... from starts[r]
        traj = np.empty((m, m + 1), dtype=np.int64)
        traj[:, 0] = starts
        for step in range(m):
            ks = gate_cols[(np.arange(m) + step) % m]
            traj[:, step + 1] = dst.targets[traj[:, step], ks]
        for r in range(m):
            row = traj[r]
            cid = int(comp_idx[row[0]])
            if comps[cid].size != target_size or row[-1] != row[0]:
                continue
            verts = frozenset(row[:-1].tolist())
            if len(verts) == m:
                out.append(CycleLift(spec, r, int(row[0]), verts, cid))
    return out


def find_cycle_cover(candidates: Sequence[CycleLift], size: int, parts: int) -> list[CycleLift] | None:
    """Pick ``parts`` vertex-disjoint candidate cycles covering one component of ``size`` vertices."""
    by_comp: dict[int, dict[frozenset[int], CycleLift]] = {}
    for cand in candidates:
        by_comp.setdefault(cand.component_id, {}).setdefault(cand.vertices, cand)
    for cid in sorted(by_comp):
        pool = list(by_comp[cid].values())
        everything = frozenset().union(*(c.vertices for c in pool))
        if len(everything) != size:
            continue

        def search(chosen: list[CycleLift], used: frozenset[int]) -> list[CycleLift] | None:
            if len(used) == size:
                return chosen if len(chosen) == parts else None
            if len(chosen) == parts:
                return None
            # branch on the smallest uncovered vertex so each cover is tried once
            missing = min(everything - used)
            for cand in pool:
                if missing in cand.vertices and not cand.vertices & used:
                    res = search(chosen + [cand], used | cand.vertices)
                    if res:
                        return res
            return None

        found = search([], frozenset())
        if found:
            return found
    return None


def cnot_lift_specs(n_src: int, attach: bool) -> list[LiftSpec]:
    """Single-CNOT lifts touching the newest qubit, with or without a one-qubit attachment."""
    n = n_src + (1 if attach else 0)
    new = n
    specs = []
    pairs = [(q, new) for q in range(1, new)] + [(new, q) for q in range(1, new)]
    labels = ONE_QUBIT_LABELS if attach else (None,)
    for a, (c, t) in itertools.product(labels, pairs):
        specs.append(LiftSpec.of(a, [CNOT(c, t).label]))
    return specs


def embedding_preserved(small: ReachabilityGraph, big: ReachabilityGraph, attach: StabilizerTableau) -> bool:
    """Tensoring ``attach`` maps every edge of ``small`` onto the same-labelled edge of ``big``."""
    if small.gate_set.gates != big.gate_set.gates:
        raise InvalidArgument("gate sets differ")
    image = np.array(
        [big.states.index(tensor(small.states.tableau(v), attach)) for v in range(small.num_vertices)],
        dtype=np.int64,
    )
    return bool(np.array_equal(big.targets[image], image[small.targets]))
