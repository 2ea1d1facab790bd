"""Reachability graphs over stabilizer states and their connected components."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components as _scipy_components

from . import _kernels
from .clifford import CNOT, H, GateOp, StabilizerTableau, full_gate_set
from .enumeration import StateSet
from .entropy import EntropyVector, decode_vector, entropy_table, vector_codes
from .errors import ConsistencyError, InvalidArgument

KEEP_TRIVIAL = "keep-trivial"
SUPPRESS_TRIVIAL = "suppress-trivial"

RESTRICTED_LABELS = ("H1", "H2", "CX12", "CX21")


@dataclass(frozen=True)
class GateSet:
    gates: tuple[GateOp, ...]

    def __init__(self, gates: Iterable[GateOp | str]) -> None:
        gs = tuple(g if isinstance(g, GateOp) else GateOp.parse(g) for g in gates)
        if not gs:
            raise InvalidArgument("a gate set needs at least one gate")
        if len(set(gs)) != len(gs):
            raise InvalidArgument("duplicate gates in gate set")
        object.__setattr__(self, "gates", gs)

    @classmethod
    def parse(cls, spec: str, n: int) -> "GateSet":
        """``"full"`` or a comma list such as ``"H1,H2,CX12,CX21"``."""
        if spec.strip().lower() == "full":
            return cls(full_gate_set(n))
        gs = cls(s for s in spec.split(",") if s.strip())
        gs.check(n)
        return gs

    @classmethod
    def restricted(cls) -> "GateSet":
        """{H_1, H_2, CNOT_{1,2}, CNOT_{2,1}}."""
        return cls([H(1), H(2), CNOT(1, 2), CNOT(2, 1)])

    @classmethod
    def full(cls, n: int) -> "GateSet":
        return cls(full_gate_set(n))

    def check(self, n: int) -> None:
        for g in self.gates:
            g.check(n)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[GateOp]:
        return iter(self.gates)

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.gates]

    def index(self, g: GateOp) -> int:
        return self.gates.index(g)


@dataclass(eq=False)
class ReachabilityGraph:
    """Gate-labelled multigraph; ``targets[v, k]`` is the ordinal of gate k applied to v.

    H and CNOT edges are undirected (each is its own inverse); P edges are directed.
    """

    states: StateSet
    gate_set: GateSet
    targets: np.ndarray
    loop_policy: str = SUPPRESS_TRIVIAL
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.states.n

    @property
    def num_vertices(self) -> int:
        return len(self.states)

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(src, dst, gate index) for every edge slot, honoring the loop policy."""
        nv, ng = self.targets.shape
        src = np.repeat(np.arange(nv, dtype=np.int64), ng)
        dst = self.targets.reshape(-1).astype(np.int64)
        gate = np.tile(np.arange(ng, dtype=np.int64), nv)
        if self.loop_policy == SUPPRESS_TRIVIAL:
            keep = src != dst
            src, dst, gate = src[keep], dst[keep], gate[keep]
        return src, dst, gate

    def edges(self) -> Iterator[tuple[int, int, str]]:
        labels = self.gate_set.labels
        src, dst, gate = self.edge_arrays()
        for s, d, g in zip(src.tolist(), dst.tolist(), gate.tolist()):
            yield s, d, labels[g]

    @property
    def num_edge_slots(self) -> int:
        return int(self.edge_arrays()[0].size)

    def trivial_loops(self) -> np.ndarray:
        """Per-vertex count of gates acting as the identity."""
        return (self.targets == np.arange(self.num_vertices)[:, None]).sum(axis=1)

    def undirected_edges(self, vertices: np.ndarray | None = None) -> list[tuple[int, int, str]]:
        """Each H/CNOT edge once (paired with its reverse slot), each P edge as is.

        Trivial loops are dropped.  ``vertices`` restricts to edges with both ends inside.
        """
        labels = self.gate_set.labels
        member = None
        if vertices is not None:
            member = np.zeros(self.num_vertices, dtype=bool)
            member[vertices] = True
        out = []
        for k, g in enumerate(self.gate_set):
            col = self.targets[:, k]
            src = np.arange(self.num_vertices)
            keep = col != src
            if g.kind != "P":
                keep &= src < col
            if member is not None:
                keep &= member[src] & member[col]
            out.extend((int(s), int(d), labels[k]) for s, d in zip(src[keep], col[keep]))
        out.sort()
        return out

    def adjacency(self, vertices: Sequence[int]) -> dict[int, list[tuple[int, str]]]:
        """Neighbors of each vertex in gate-set order; loops and duplicate neighbors dropped."""
        labels = self.gate_set.labels
        adj: dict[int, list[tuple[int, str]]] = {}
        for v in vertices:
            seen = set()
            lst = []
            for k, w in enumerate(self.targets[v].tolist()):
                if w != v and w not in seen:
                    seen.add(w)
                    lst.append((w, labels[k]))
            adj[int(v)] = lst
        return adj

    def component_labels(self) -> tuple[int, np.ndarray]:
        if "labels" not in self._cache:
            nv = self.num_vertices
            src, dst, _ = self.edge_arrays()
            mat = coo_matrix((np.ones(src.size, dtype=np.int8), (src, dst)), shape=(nv, nv)).tocsr()
            self._cache["labels"] = _scipy_components(mat, directed=True, connection="weak")
        return self._cache["labels"]


def build_graph(states: StateSet, gate_set: GateSet, loop_policy: str = SUPPRESS_TRIVIAL) -> ReachabilityGraph:
    if loop_policy not in (KEEP_TRIVIAL, SUPPRESS_TRIVIAL):
        raise InvalidArgument(f"unknown loop policy {loop_policy!r}")
    gate_set.check(states.n)
    kinds, q1s, q2s = _kernels.gate_arrays(gate_set.gates)
    raw = _kernels.apply_many(states.keys, states.n, kinds, q1s, q2s)
    targets = states.lookup(raw.reshape(-1)).reshape(raw.shape)
    return ReachabilityGraph(states, gate_set, targets, loop_policy)


@dataclass(frozen=True)
class ComponentSummary:
    size: int
    entropy_signature: tuple[tuple[EntropyVector, int], ...]
    representative: int
    vertices: np.ndarray = field(compare=False, repr=False)

    @property
    def arity(self) -> int:
        """Number of distinct entropy vectors on the component."""
        return len(self.entropy_signature)

    @property
    def name(self) -> str:
        return f"g{self.size}({self.arity})"

    @property
    def vectors(self) -> set[EntropyVector]:
        return {v for v, _ in self.entropy_signature}

    def sort_key(self):
        return (self.size, tuple((v.entries, c) for v, c in self.entropy_signature), self.representative)


def connected_components(g: ReachabilityGraph) -> list[ComponentSummary]:
    """Weakly connected components with their entropy signatures, sorted."""
    if "components" in g._cache:
        return g._cache["components"]
    ncomp, labels = g.component_labels()
    n = g.n
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(ncomp + 1))
    if n >= 2:
        codes = vector_codes(entropy_table(g.states), n)
        pairs = np.stack([labels, codes], axis=1)
        uniq, counts = np.unique(pairs, axis=0, return_counts=True)
        sig_bounds = np.searchsorted(uniq[:, 0], np.arange(ncomp + 1))
    out = []
    for c in range(ncomp):
        verts = order[bounds[c] : bounds[c + 1]]
        if n >= 2:
            rows = range(sig_bounds[c], sig_bounds[c + 1])
            sig = tuple((decode_vector(uniq[i, 1], n), int(counts[i])) for i in rows)
        else:
            sig = ()
        out.append(ComponentSummary(int(verts.size), sig, int(verts.min()), verts))
    out.sort(key=ComponentSummary.sort_key)
    g._cache["components"] = out
    return out


def component_of(g: ReachabilityGraph, vertex: int) -> ComponentSummary:
    _, labels = g.component_labels()
    lab = labels[vertex]
    for comp in connected_components(g):
        if labels[comp.representative] == lab:
            return comp
    raise ConsistencyError("vertex without a component")


def size_census(components: Iterable[ComponentSummary]) -> dict[int, int]:
    return dict(sorted(Counter(c.size for c in components).items()))


def entropy_signature(component: ComponentSummary) -> tuple[tuple[EntropyVector, int], ...]:
    return component.entropy_signature


def bfs_distances(g: ReachabilityGraph, source: int) -> np.ndarray:
    """Gate-count distance from ``source``; each slot is one forward step, -1 if unreachable."""
    dist = np.full(g.num_vertices, -1, dtype=np.int64)
    dist[source] = 0
    frontier = np.array([source], dtype=np.int64)
    d = 0
    while frontier.size:
        d += 1
        nxt = np.unique(g.targets[frontier].reshape(-1))
        nxt = nxt[dist[nxt] < 0]
        dist[nxt] = d
        frontier = nxt
    return dist


@dataclass(frozen=True)
class GeodesicReport:
    distance: int
    farthest: tuple[int, ...]
    unreachable: tuple[int, ...]


def max_geodesic_from(g: ReachabilityGraph, v0: int) -> GeodesicReport:
    """Eccentricity of ``v0``: P is walked forward only, H and CNOT both ways."""
    dist = bfs_distances(g, v0)
    unreachable = tuple(np.flatnonzero(dist < 0).tolist())
    far = int(dist.max())
    return GeodesicReport(far, tuple(np.flatnonzero(dist == far).tolist()), unreachable)


def to_dot(g: ReachabilityGraph, vertices: Sequence[int] | None = None) -> str:
    """DOT text; vertex ids are ordinals, P edges directed, other edges undirected."""
    verts = np.arange(g.num_vertices) if vertices is None else np.asarray(sorted(vertices))
    vecs = entropy_table(g.states) if g.n >= 2 else None
    lines = ["digraph reachability {"]
    for v in verts.tolist():
        attr = ""
        if vecs is not None:
            attr = f' [entropy="{"".join(str(int(e)) for e in vecs[v])}"]'
        lines.append(f"  {v}{attr};")
    for s, d, lab in g.undirected_edges(verts):
        direction = "forward" if lab.startswith("P") else "none"
        lines.append(f'  {s} -> {d} [gate="{lab}", dir={direction}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def components_json(g: ReachabilityGraph) -> str:
    payload = {
        "components": [
            {
                "entropy_signature": [[v.serialize(), c] for v, c in comp.entropy_signature],
                "size": comp.size,
                "vertex_ordinals": comp.vertices.tolist(),
            }
            for comp in connected_components(g)
        ],
        "gate_set": g.gate_set.labels,
        "n": g.n,
    }
    return json.dumps(payload, sort_keys=True)


def vertex_of(states: StateSet, t: StabilizerTableau) -> int:
    return states.index(t)
