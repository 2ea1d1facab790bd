"""Cut vertices, Hamiltonian paths and cycles, Eulerian cycles, and the 35-gate circuit C."""

from __future__ import annotations

import json
import sys
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .clifford import Circuit, apply_circuit
from .errors import InvalidArgument, InvalidTraversal, ResourceLimit
from .graphs import ComponentSummary, ReachabilityGraph, component_of

HAMILTONIAN_PATH = "hamiltonian-path"
HAMILTONIAN_CYCLE = "hamiltonian-cycle"
EULERIAN_CYCLE = "eulerian-cycle"

EXHAUSTIVE_LIMIT = 288
LARGE_COMPONENT_BUDGET = 10**8

_C_LABELS = (
    "H2 H1 H2 CX12 H2 H1 H2 CX12 H2 CX12 H2 CX12 "
    "H1 H2 H1 CX12 H1 CX12 H2 CX12 H2 H1 H2 CX12 "
    "H1 CX12 H2 CX12 H2 H1 H2 CX21 H2 H1 H2"
).split()


def circuit_C() -> Circuit:
    """The 35-gate circuit tracing a Hamiltonian path on g36 from |i,1>."""
    return Circuit(_C_LABELS)


def transpose(c: Circuit) -> Circuit:
    """Swap the roles of qubits 1 and 2."""
    return c.relabel({1: 2, 2: 1})


@dataclass(frozen=True)
class PathReport:
    kind: str
    found: bool
    witness: tuple[int, ...] = ()
    exhausted: bool = True
    start: int | None = None
    gate_sequence: tuple[str, ...] = ()
    expansions: int = 0
    distinct: int = 0
    detail: str = ""
    offending: tuple[int, ...] = ()
    component_id: int | None = None

    def to_json(self) -> str:
        return json.dumps(
            {
                "component_id": self.component_id,
                "gate_sequence": list(self.gate_sequence),
                "kind": self.kind,
                "start": self.start,
                "vertex_sequence": list(self.witness),
            },
            sort_keys=True,
        )


@dataclass
class LocalGraph:
    """A component relabelled 0..m-1 as a simple undirected graph (loops and duplicate neighbors removed)."""

    vertices: np.ndarray
    nbrs: list[list[int]]
    labels: list[list[str]]
    component_id: int | None = None
    _index: dict[int, int] = field(default_factory=dict, repr=False)

    @classmethod
    def from_component(cls, g: ReachabilityGraph, comp: ComponentSummary, component_id: int | None = None):
        verts = np.sort(comp.vertices)
        index = {int(v): i for i, v in enumerate(verts.tolist())}
        nbrs: list[list[int]] = []
        labels: list[list[str]] = []
        for v, adj in g.adjacency(verts.tolist()).items():
            nbrs.append([index[w] for w, _ in adj])
            labels.append([lab for _, lab in adj])
        return cls(verts, nbrs, labels, component_id, index)

    @classmethod
    def from_edges(cls, m: int, edges: Sequence[tuple[int, int]]) -> "LocalGraph":
        """Unlabelled helper graph on 0..m-1, mainly for tests."""
        nbrs: list[list[int]] = [[] for _ in range(m)]
        for a, b in edges:
            if a != b and b not in nbrs[a]:
                nbrs[a].append(b)
                nbrs[b].append(a)
        labels = [["e"] * len(x) for x in nbrs]
        return cls(np.arange(m), nbrs, labels, None, {i: i for i in range(m)})

    def __len__(self) -> int:
        return len(self.nbrs)

    def local(self, v: int) -> int:
        try:
            return self._index[int(v)]
        except KeyError:
            raise InvalidArgument(f"vertex {v} is not in this component") from None

    def glob(self, i: int) -> int:
        return int(self.vertices[i])

    def label(self, a: int, b: int) -> str:
        return self.labels[a][self.nbrs[a].index(b)]


def _local(g: ReachabilityGraph | LocalGraph, comp: ComponentSummary | None, component_id=None) -> LocalGraph:
    if isinstance(g, LocalGraph):
        return g
    if comp is None:
        raise InvalidArgument("a component is required")
    return LocalGraph.from_component(g, comp, component_id)


def verify_hamiltonian_traversal(g: ReachabilityGraph, start: int, c: Circuit) -> PathReport:
    """Replay ``c`` from ``start`` and report whether it visits its component exactly once per vertex."""
    allowed = set(g.gate_set.gates)
    bad = [gate.label for gate in c if gate not in allowed]
    comp = component_of(g, start)
    if bad:
        return PathReport(
            HAMILTONIAN_PATH, False, exhausted=True, start=start,
            detail=f"invalid-traversal: gates {sorted(set(bad))} are outside the gate set",
        )
    traj = [g.states.index(t) for t in apply_circuit(g.states.tableau(start), c)]
    members = set(comp.vertices.tolist())
    if any(v not in members for v in traj):
        raise InvalidTraversal("trajectory left the component using in-set gates")
    distinct = len(set(traj))
    simple = distinct == len(traj)
    found = simple and distinct == comp.size
    detail = "" if found else ("revisits a vertex" if not simple else f"covers {distinct} of {comp.size}")
    return PathReport(
        HAMILTONIAN_PATH, found, tuple(traj), True, start, tuple(c.labels), 0, distinct, detail
    )


def verify_path(lg: LocalGraph, witness: Sequence[int], cycle: bool = False) -> bool:
    """Independent check of a Hamiltonian witness given in global ordinals."""
    try:
        loc = [lg.local(v) for v in witness]
    except InvalidArgument:
        return False
    if len(loc) != len(lg) or len(set(loc)) != len(lg) or (cycle and len(loc) < 3):
        return False
    adj = [set(x) for x in lg.nbrs]
    steps = list(zip(loc, loc[1:]))
    if cycle:
        steps.append((loc[-1], loc[0]))
    return all(b in adj[a] for a, b in steps)


def cut_vertices(g: ReachabilityGraph | LocalGraph, comp: ComponentSummary | None = None) -> set[int]:
    """Articulation points by iterative DFS low-link; returned as global ordinals."""
    lg = _local(g, comp)
    m = len(lg)
    disc = [-1] * m
    low = [0] * m
    out: set[int] = set()
    timer = 0
    for root in range(m):
        if disc[root] >= 0:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        stack = [(root, -1, iter(lg.nbrs[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for w in it:
                if disc[w] < 0:
                    disc[w] = low[w] = timer
                    timer += 1
                    stack.append((w, v, iter(lg.nbrs[w])))
                    advanced = True
                    break
                if w != parent:
                    low[v] = min(low[v], disc[w])
            if advanced:
                continue
            stack.pop()
            if parent >= 0:
                low[parent] = min(low[parent], low[v])
                if parent == root:
                    root_children += 1
                elif low[v] >= disc[parent]:
                    out.add(parent)
        if root_children > 1:
            out.add(root)
    return {lg.glob(i) for i in out}


class _Budget(Exception):
    pass


class _Search:
    """Backtracking over simple paths with the degree, saturation and sub-cycle pruning rules.

    Rules applied after every extension to ``v``:
      * an unvisited vertex with no usable neighbor kills the branch;
      * an unvisited vertex with exactly one usable neighbor is forced to be an
        endpoint, and a path has only one free endpoint (a cycle has none besides
        a neighbor of the start);
      * the unvisited vertices must stay connected to ``v`` (no stranded pieces,
        which is where proper sub-cycles would otherwise be forced).
    """

    def __init__(self, lg: LocalGraph, cycle: bool, budget: int | None, order: str = "gate"):
        if order not in ("gate", "fewest-free"):
            raise InvalidArgument(f"unknown expansion order {order!r}")
        self.order = order
        self.lg = lg
        self.cycle = cycle
        self.budget = budget
        self.expansions = 0
        m = len(lg)
        self.visited = [False] * m
        self.free = [len(x) for x in lg.nbrs]
        self.adjsets = [set(x) for x in lg.nbrs]
        self.path: list[int] = []
        self.start = -1

    def _visit(self, v: int) -> None:
        self.visited[v] = True
        self.path.append(v)
        for w in self.lg.nbrs[v]:
            self.free[w] -= 1

    def _unvisit(self, v: int) -> None:
        self.visited[v] = False
        self.path.pop()
        for w in self.lg.nbrs[v]:
            self.free[w] += 1

    def _feasible(self, v: int) -> bool:
        m = len(self.lg)
        remaining = m - len(self.path)
        if remaining == 0:
            return not self.cycle or self.start in self.adjsets[v]
        if self.cycle and self.free[self.start] == 0:
            return False
        start_adj = self.adjsets[self.start] if self.cycle else ()
        endpoints = 0
        max_endpoints = 0 if self.cycle else 1
        for u in range(m):
            if self.visited[u]:
                continue
            usable = self.free[u] + (u in self.adjsets[v]) + (u in start_adj)
            if usable == 0:
                return False
            if usable == 1 and remaining > 1:
                endpoints += 1
                if endpoints > max_endpoints:
                    return False
        # the unvisited vertices must all be reachable from v through unvisited vertices
        seen = 0
        stack = [w for w in self.lg.nbrs[v] if not self.visited[w]]
        mark = set(stack)
        while stack:
            u = stack.pop()
            seen += 1
            for w in self.lg.nbrs[u]:
                if not self.visited[w] and w not in mark:
                    mark.add(w)
                    stack.append(w)
        return seen == remaining

    def run(self, start: int) -> bool:
        self.start = start
        self._visit(start)
        ok = False
        try:
            ok = self._feasible(start) and self._extend(start)
            return ok
        finally:
            if not ok and self.path == [start]:
                self._unvisit(start)

    def _extend(self, v: int) -> bool:
        m = len(self.lg)
        if len(self.path) == m:
            return not self.cycle or self.start in self.adjsets[v]
        cand = [w for w in self.lg.nbrs[v] if not self.visited[w]]
        if self.order == "fewest-free":
            cand.sort(key=lambda w: self.free[w])
        for w in cand:
            self.expansions += 1
            if self.budget is not None and self.expansions > self.budget:
                raise _Budget
            self._visit(w)
            if self._feasible(w) and self._extend(w):
                return True
            self._unvisit(w)
        return False


def _report(kind, lg: LocalGraph, path: list[int] | None, exhausted, start, expansions) -> PathReport:
    if path is None:
        return PathReport(kind, False, (), exhausted, start, (), expansions, component_id=lg.component_id)
    seq = list(path) + ([path[0]] if kind == HAMILTONIAN_CYCLE else [])
    gates = tuple(lg.label(a, b) for a, b in zip(seq, seq[1:]))
    wit = tuple(lg.glob(i) for i in path)
    rep = PathReport(kind, True, wit, True, start, gates, expansions, len(wit), component_id=lg.component_id)
    if not verify_path(lg, wit, cycle=kind == HAMILTONIAN_CYCLE):
        raise AssertionError("search produced an invalid witness")
    return rep


def _default_budget(m: int) -> int | None:
    return None if m <= EXHAUSTIVE_LIMIT else LARGE_COMPONENT_BUDGET


def hamiltonian_search(
    g: ReachabilityGraph | LocalGraph,
    comp: ComponentSummary | None = None,
    start: int | None = None,
    *,
    cycle: bool = False,
    budget: int | None | str = "default",
    component_id: int | None = None,
    order: str = "gate",
) -> PathReport:
    """Backtracking Hamiltonian path (or cycle) search.

    ``start`` is a global ordinal; without it every start is tried in ordinal
    order (a cycle search needs only the lowest vertex).  ``budget`` caps node
    expansions; ``None`` means unlimited.
    """
    lg = _local(g, comp, component_id)
    if budget == "default":
        budget = _default_budget(len(lg))
    if budget is not None and budget <= 0:
        raise InvalidArgument("budget must be positive")
    kind = HAMILTONIAN_CYCLE if cycle else HAMILTONIAN_PATH
    if cycle and len(lg) < 3:
        # a simple cycle needs three distinct vertices
        return PathReport(kind, False, (), True, start, (), 0, component_id=lg.component_id)
    if start is not None:
        starts = [lg.local(start)]
    elif cycle:
        starts = [0]
    else:
        starts = list(range(len(lg)))
    search = _Search(lg, cycle, budget, order)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * len(lg) + 1000))
    try:
        for s in starts:
            try:
                ok = search.run(s)
            except _Budget:
                return PathReport(kind, False, (), False, start, (), search.expansions, component_id=lg.component_id)
            if ok:
                return _report(kind, lg, search.path, True, lg.glob(s), search.expansions)
    finally:
        sys.setrecursionlimit(limit)
    return _report(kind, lg, None, True, start, search.expansions)


def hamiltonian_path_starts(
    g: ReachabilityGraph | LocalGraph, comp: ComponentSummary | None = None, budget: int | None = None
) -> list[int]:
    """Every vertex from which a Hamiltonian path exists (exhaustive per start)."""
    lg = _local(g, comp)
    out = []
    for i in range(len(lg)):
        rep = hamiltonian_search(lg, start=lg.glob(i), budget=budget)
        if not rep.exhausted:
            raise ResourceLimit(f"budget hit at start {lg.glob(i)}")
        if rep.found:
            out.append(lg.glob(i))
    return out


def eulerian_cycle(g: ReachabilityGraph, comp: ComponentSummary, component_id: int | None = None) -> PathReport:
    """Hierholzer's algorithm on the undirected, loop-free edges of a component."""
    edges = g.undirected_edges(comp.vertices)
    if any(lab.startswith("P") for _, _, lab in edges):
        raise InvalidArgument("Eulerian cycles are defined here for undirected (P-free) gate sets")
    deg: dict[int, int] = defaultdict(int)
    inc: dict[int, list[int]] = defaultdict(list)
    for k, (a, b, _) in enumerate(edges):
        deg[a] += 1
        deg[b] += 1
        inc[a].append(k)
        inc[b].append(k)
    odd = tuple(sorted(v for v in comp.vertices.tolist() if deg[v] % 2))
    if odd:
        return PathReport(EULERIAN_CYCLE, False, (), True, detail="odd-degree vertices", offending=odd,
                          component_id=component_id)
    if not edges:
        return PathReport(EULERIAN_CYCLE, False, (), True, detail="no edges", component_id=component_id)
    used = [False] * len(edges)
    ptr: dict[int, int] = defaultdict(int)
    start = int(comp.vertices.min())
    stack = [(start, None)]
    verts: list[int] = []
    labs: list[str] = []
    while stack:
        v, via = stack[-1]
        lst = inc[v]
        while ptr[v] < len(lst) and used[lst[ptr[v]]]:
            ptr[v] += 1
        if ptr[v] == len(lst):
            stack.pop()
            verts.append(v)
            if via is not None:
                labs.append(edges[via][2])
            continue
        k = lst[ptr[v]]
        used[k] = True
        a, b, _ = edges[k]
        stack.append((b if a == v else a, k))
    verts.reverse()
    labs.reverse()
    if not all(used) or verts[0] != verts[-1]:
        return PathReport(EULERIAN_CYCLE, False, (), True, detail="component not connected by its edges",
                          component_id=component_id)
    rep = PathReport(EULERIAN_CYCLE, True, tuple(verts), True, start, tuple(labs), 0, len(set(verts)),
                     component_id=component_id)
    if not verify_eulerian(edges, rep):
        raise AssertionError("Hierholzer produced an invalid circuit")
    return rep


def verify_eulerian(edges: Sequence[tuple[int, int, str]], rep: PathReport) -> bool:
    """Closed walk using each labelled undirected edge exactly once."""
    w, labs = rep.witness, rep.gate_sequence
    if len(w) != len(edges) + 1 or len(labs) != len(edges) or w[0] != w[-1]:
        return False
    pool: dict[tuple[int, int, str], int] = defaultdict(int)
    for a, b, lab in edges:
        pool[(min(a, b), max(a, b), lab)] += 1
    for a, b, lab in zip(w, w[1:], labs):
        key = (min(a, b), max(a, b), lab)
        if pool[key] == 0:
            return False
        pool[key] -= 1
    return True


def rotation_extension_cycle(
    g: ReachabilityGraph | LocalGraph,
    comp: ComponentSummary | None = None,
    *,
    seed: int = 0,
    max_steps: int = 10**6,
    component_id: int | None = None,
) -> PathReport:
    """Seeded Posa rotation-extension search for a Hamiltonian cycle.

    Finds witnesses on components where plain backtracking stalls.  A miss is
    inconclusive (``exhausted=False``); a hit is checked by ``verify_path``.
    """
    lg = _local(g, comp, component_id)
    m = len(lg)
    rng = np.random.default_rng(seed)
    adj = [set(x) for x in lg.nbrs]
    path = [0]
    pos = {0: 0}
    for step in range(1, max_steps + 1):
        end = path[-1]
        if len(path) == m and path[0] in adj[end]:
            return _report(HAMILTONIAN_CYCLE, lg, path, True, lg.glob(path[0]), step)
        fresh = [w for w in lg.nbrs[end] if w not in pos]
        if fresh:
            w = fresh[rng.integers(len(fresh))]
            pos[w] = len(path)
            path.append(w)
            continue
        pivots = [pos[w] for w in lg.nbrs[end] if pos[w] < len(path) - 2]
        if not pivots:
            # the path is stuck at a leaf-like end; restart from the other side
            path.reverse()
            pos = {v: i for i, v in enumerate(path)}
            continue
        i = pivots[rng.integers(len(pivots))]
        path[i + 1 :] = path[i + 1 :][::-1]
        for k in range(i + 1, len(path)):
            pos[path[k]] = k
    return PathReport(HAMILTONIAN_CYCLE, False, (), False, None, (), max_steps, component_id=lg.component_id)
