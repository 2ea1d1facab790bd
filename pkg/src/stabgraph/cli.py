"""Command-line entry point: ``stabgraph <command> [options]``.

Exit codes: 0 success, 2 verified mismatch, 64 usage error, 70 internal failure.
"""

from __future__ import annotations

import argparse
import difflib
import hashlib
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import entropy as ent
from . import graphs as gr
from . import hampath as hp
from . import lifts
from .clifford import amplitudes, basis_state, one_qubit_state
from .enumeration import MAX_ENUM_QUBITS, cache_path, default_cache_dir, expected_count, load_states
from .errors import InvalidArgument, StabgraphError
from .groups import orbit_and_stabilizer

EXIT_OK = 0
EXIT_MISMATCH = 2
EXIT_USAGE = 64
EXIT_INTERNAL = 70

VERIFY_TARGETS = (
    "3q-entropy",
    "4q-entropy",
    "5q-entropy",
    "subgraph-counts",
    "one-qubit-orbits",
    "lift-covering",
    "distances",
    "eulerian",
    "entropy-oracle",
)

log = logging.getLogger("stabgraph")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


@dataclass
class RunManifest:
    command: str
    parameters: dict
    inputs: list[str] = field(default_factory=list)
    outputs: list[str] = field(default_factory=list)
    wall_time: float = 0.0
    digest: str = ""

    def finish(self, text: str, started: float) -> None:
        self.wall_time = round(time.perf_counter() - started, 3)
        self.digest = hashlib.sha256(text.encode()).hexdigest()


def expected_tables() -> dict:
    with resources.files("stabgraph").joinpath("data/expected_tables.json").open() as fh:
        return json.load(fh)["tables"]


def _cache_dir(args) -> Path:
    env = os.environ.get("STABGRAPH_CACHE")
    if env:
        return Path(env)
    return Path(args.cache) if args.cache else default_cache_dir()


def _states(args, n: int, manifest: RunManifest):
    if not 1 <= n <= MAX_ENUM_QUBITS:
        raise UsageError(f"-n must be between 1 and {MAX_ENUM_QUBITS}")
    d = _cache_dir(args)
    manifest.inputs.append(str(cache_path(n, d)))
    return load_states(n, d)


def _gates(args, n: int) -> gr.GateSet:
    spec = args.gates or "H1,H2,CX12,CX21"
    try:
        return gr.GateSet.parse(spec, n)
    except InvalidArgument as exc:
        raise UsageError(str(exc)) from None


def _need_n(args, lo: int = 1, hi: int = MAX_ENUM_QUBITS) -> int:
    if args.n is None:
        raise UsageError("this command needs -n")
    if not lo <= args.n <= hi:
        raise UsageError(f"-n must be between {lo} and {hi}")
    return args.n


# ---- commands ------------------------------------------------------------


def cmd_enumerate(args, m: RunManifest) -> tuple[int, str]:
    n = _need_n(args)
    s = _states(args, n, m)
    m.outputs.append(str(cache_path(n, _cache_dir(args))))
    code = EXIT_OK if len(s) == expected_count(n) else EXIT_MISMATCH
    return code, f"{len(s)}\n"


def cmd_census(args, m: RunManifest) -> tuple[int, str]:
    n = _need_n(args, 2)
    census = ent.entropy_census(_states(args, n, m))
    if args.format == "json":
        rows = [
            {"count": c, "entropy_vector": v.serialize(), "holographic": ent.check_holographic(v).holographic}
            for v, c in sorted(census.items())
        ]
        return EXIT_OK, json.dumps({"coordinates": ent.coordinate_names(n), "n": n, "rows": rows}, sort_keys=True) + "\n"
    return EXIT_OK, ent.census_csv(census)


def _components_csv(g: gr.ReachabilityGraph) -> str:
    lines = ["size,arity,representative,entropy_signature"]
    for c in gr.connected_components(g):
        sig = ";".join(f"{v.serialize()}:{k}" for v, k in c.entropy_signature)
        lines.append(f"{c.size},{c.arity},{c.representative},{sig}")
    return "\n".join(lines) + "\n"


def cmd_components(args, m: RunManifest) -> tuple[int, str]:
    n = _need_n(args, 2)
    g = gr.build_graph(_states(args, n, m), _gates(args, n))
    if args.format == "json":
        return EXIT_OK, gr.components_json(g) + "\n"
    if args.format == "dot":
        return EXIT_OK, gr.to_dot(g)
    census = gr.size_census(gr.connected_components(g))
    head = "# " + " ".join(f"g{k}x{v}" for k, v in census.items()) + "\n"
    return EXIT_OK, head + _components_csv(g)


def cmd_distances(args, m: RunManifest) -> tuple[int, str]:
    n = _need_n(args, 1, 4)
    s = _states(args, n, m)
    g = gr.build_graph(s, _gates(args, n) if args.gates else gr.GateSet.full(n))
    rep = gr.max_geodesic_from(g, s.index(basis_state(n)))
    out = f"max_geodesic {rep.distance}\nfarthest {len(rep.farthest)}\nunreachable {len(rep.unreachable)}\n"
    return (EXIT_OK if not rep.unreachable else EXIT_INTERNAL), out


def _select_component(g: gr.ReachabilityGraph, selector: str) -> tuple[int, gr.ComponentSummary]:
    comps = gr.connected_components(g)
    if selector.isdigit():
        idx = int(selector)
        if idx >= len(comps):
            raise UsageError(f"component index {idx} out of range ({len(comps)} components)")
        return idx, comps[idx]
    if selector.startswith("g") and selector[1:].isdigit():
        size = int(selector[1:])
        for i, c in enumerate(comps):
            if c.size == size:
                return i, c
        raise UsageError(f"no component of size {size}")
    raise UsageError("component selector must be an index or gSIZE, e.g. g36")


def cmd_hampath(args, m: RunManifest) -> tuple[int, str]:
    n = _need_n(args, 2)
    g = gr.build_graph(_states(args, n, m), _gates(args, n))
    cid, comp = _select_component(g, args.component)
    budget = args.budget if args.budget is not None else "default"
    if args.kind == "eulerian":
        rep = hp.eulerian_cycle(g, comp, component_id=cid)
    elif args.kind == "cycle":
        rep = hp.rotation_extension_cycle(g, comp, seed=args.seed, component_id=cid)
        if not rep.found:
            rep = hp.hamiltonian_search(g, comp, cycle=True, budget=budget, component_id=cid)
    else:
        rep = hp.hamiltonian_search(g, comp, start=args.start, budget=budget, component_id=cid)
    status = "found" if rep.found else ("none" if rep.exhausted else "inconclusive")
    payload = json.loads(rep.to_json())
    payload["status"] = status
    return EXIT_OK, json.dumps(payload, sort_keys=True) + "\n"


def cmd_export(args, m: RunManifest) -> tuple[int, str]:
    n = _need_n(args, 1)
    g = gr.build_graph(_states(args, n, m), _gates(args, n) if args.gates else gr.GateSet.full(n))
    if args.format == "json":
        text = gr.components_json(g) + "\n"
    elif args.format == "csv":
        text = "src,dst,gate\n" + "".join(f"{s},{d},{lab}\n" for s, d, lab in g.undirected_edges())
    else:
        text = gr.to_dot(g)
    if args.output:
        Path(args.output).write_text(text)
        m.outputs.append(args.output)
        return EXIT_OK, ""
    return EXIT_OK, text


# ---- verify targets ------------------------------------------------------


def _entropy_lines(args, m, n: int) -> list[str]:
    census = ent.entropy_census(_states(args, n, m))
    return [
        f"{v.serialize()} {c} {'yes' if ent.check_holographic(v).holographic else 'no'}"
        for v, c in sorted(census.items())
    ]


def _v_entropy3(args, m):
    exp = [f"{r['vector']} {r['count']} {'yes' if r['holographic'] else 'no'}" for r in expected_tables()["3q-entropy"]["rows"]]
    return sorted(exp), _entropy_lines(args, m, 3), ""


def _v_entropy4(args, m):
    tab = expected_tables()["4q-entropy"]
    exp = [f"{r['vector']} {r['count']} {'yes' if r['holographic'] else 'no'}" for r in tab["rows"]]
    got = _entropy_lines(args, m, 4)
    bad = [ent.EntropyVector(4, tuple(int(c) for c in line.split()[0])) for line in got if line.endswith("no")]
    kinds = sorted({k for v in bad for k in ent.check_holographic(v).violated_kinds})
    exp.append(f"violated {tab['non_holographic']['violated']}")
    got.append(f"violated {','.join(kinds)}")
    return sorted(exp), sorted(got), ""


def _v_entropy5(args, m):
    tab = expected_tables()["5q-entropy"]
    exp = sorted(f"{r['vector']} {'yes' if r['holographic'] else 'no'}" for r in tab["rows"])
    census = ent.entropy_census(_states(args, 5, m))
    got = sorted(f"{v.serialize()} {'yes' if ent.check_holographic(v).holographic else 'no'}" for v in census)
    bad = sum(line.endswith("no") for line in got)
    rep = tab["reported_non_holographic_vectors"]
    note = (
        f"distinct vectors: {len(got)}\n"
        f"non-holographic vectors computed: {bad} "
        f"(published table marks {rep['table_rows']}, published summary states {rep['summary_statement']}"
        f"{'; discrepancy flagged' if rep['table_rows'] != rep['summary_statement'] else ''})\n"
    )
    return exp, got, note


def _v_subgraphs(args, m):
    counts = expected_tables()["subgraph-counts"]["counts"]
    ns = [args.n] if args.n else [2, 3, 4]
    exp, got = [], []
    for n in ns:
        if str(n) not in counts:
            raise UsageError(f"no published subgraph counts for n={n}")
        exp += [f"n={n} g{k} {v}" for k, v in sorted(counts[str(n)].items(), key=lambda kv: int(kv[0]))]
        g = gr.build_graph(_states(args, n, m), gr.GateSet.restricted())
        got += [f"n={n} g{k} {v}" for k, v in gr.size_census(gr.connected_components(g)).items()]
    return exp, got, ""


def _v_orbits(args, m):
    groups = expected_tables()["one-qubit-orbits"]["groups"]
    exp, got = [], []
    for gens, rows in groups.items():
        for lab, row in rows.items():
            exp.append(f"<{gens}> |{lab}> group {row['group']} stabilizer {row['stabilizer']} orbit {row['orbit']}")
            r = orbit_and_stabilizer(one_qubit_state(lab), gens.split(","))
            got.append(f"<{gens}> |{lab}> group {r.group_order} stabilizer {r.stabilizer} orbit {r.orbit}")
    return exp, got, ""


def _v_covering(args, m):
    tab = expected_tables()["lift-covering"]["components"]
    g = gr.build_graph(_states(args, 3, m), gr.GateSet.restricted())
    reports = lifts.verify_covering(g)
    exp = [f"{name} {size}-of-{size} overlaps 0" for name, size in tab.items()]
    names = list(dict.fromkeys(group for group, _ in lifts.covering_starts()))
    got = []
    for name, rep in zip(names, reports):
        extra = "" if not (rep.escapes or rep.failures) else " " + "; ".join(rep.escapes + rep.failures)
        got.append(f"{name} {rep.covered}-of-{rep.size} overlaps {len(rep.overlaps)}{extra}")
    return sorted(exp), sorted(got), lifts.covering_json(reports) + "\n"


def _v_distances(args, m):
    tab = expected_tables()["distances"]["max_geodesic"]
    ns = [args.n] if args.n else [1, 2, 3, 4]
    exp, got = [], []
    for n in ns:
        if str(n) not in tab:
            raise UsageError(f"no published distance for n={n}")
        exp.append(f"n={n} max_geodesic {tab[str(n)]}")
        s = _states(args, n, m)
        rep = gr.max_geodesic_from(gr.build_graph(s, gr.GateSet.full(n)), s.index(basis_state(n)))
        got.append(f"n={n} max_geodesic {rep.distance}")
    return exp, got, ""


def _v_eulerian(args, m):
    tab = expected_tables()["eulerian"]["lengths"]
    exp, got = [], []
    for key, length in tab.items():
        n, size = (int(x) for x in key.split(":"))
        exp.append(f"n={n} g{size} eulerian {length} degrees 4")
        g = gr.build_graph(_states(args, n, m), gr.GateSet.restricted())
        comp = next(c for c in gr.connected_components(g) if c.size == size)
        rep = hp.eulerian_cycle(g, comp)
        degs = sorted({len(a) for a in g.adjacency(comp.vertices.tolist()).values()})
        loops = int(g.trivial_loops()[comp.vertices].sum())
        deg_text = ",".join(map(str, degs)) + ("" if loops == 0 else f" loops {loops}")
        got.append(f"n={n} g{size} eulerian {len(rep.witness) - 1 if rep.found else 'none'} degrees {deg_text}")
    return exp, got, ""


def _v_entropy_oracle(args, m):
    """Rank-based against spectral entropies on seeded samples."""
    n = args.n or 4
    s = _states(args, n, m)
    rng = np.random.default_rng(args.seed)
    idx = rng.choice(len(s), size=min(200, len(s)), replace=False)
    table = ent.entropy_table(s)
    masks = ent.coordinates(n)
    bad = 0
    for i in idx:
        amps = amplitudes(s.tableau(int(i)))
        for j, mk in enumerate(masks):
            if abs(ent.spectral_entropy(amps, n, mk.qubits) - table[i, j]) > 1e-9:
                bad += 1
    return [f"n={n} mismatches 0"], [f"n={n} mismatches {bad}"], f"sampled {len(idx)} states, seed {args.seed}\n"


_VERIFIERS: dict[str, Callable] = {
    "3q-entropy": _v_entropy3,
    "4q-entropy": _v_entropy4,
    "5q-entropy": _v_entropy5,
    "subgraph-counts": _v_subgraphs,
    "one-qubit-orbits": _v_orbits,
    "lift-covering": _v_covering,
    "distances": _v_distances,
    "eulerian": _v_eulerian,
    "entropy-oracle": _v_entropy_oracle,
}


def cmd_verify(args, m: RunManifest) -> tuple[int, str]:
    expected, computed, note = _VERIFIERS[args.target](args, m)
    if expected == computed:
        return EXIT_OK, note + f"PASS {args.target}\n"
    diff = "".join(
        difflib.unified_diff(
            [x + "\n" for x in expected], [x + "\n" for x in computed], "expected", "computed"
        )
    )
    return EXIT_MISMATCH, note + diff + f"FAIL {args.target}\n"


# ---- wiring --------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("-n", type=int, help="qubit count")
    common.add_argument("--gates", help="comma list such as H1,H2,CX12,CX21, or 'full'")
    common.add_argument("--cache", help="state cache directory (STABGRAPH_CACHE overrides)")
    common.add_argument("--seed", type=int, default=0, help="seed for sampled checks and randomized searches")
    common.add_argument("--manifest", help="write a JSON run manifest to this path")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="stabgraph", description="Stabilizer-state reachability graphs and entropy tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("enumerate", parents=[common], help="enumerate and cache all n-qubit stabilizer states")
    sp = sub.add_parser("census", parents=[common], help="entropy-vector census")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp = sub.add_parser("components", parents=[common], help="connected components of a restricted graph")
    sp.add_argument("--format", choices=("csv", "json", "dot"), default="csv")
    sub.add_parser("distances", parents=[common], help="maximum circuit distance from |0...0>")
    sp = sub.add_parser("hampath", parents=[common], help="Hamiltonian or Eulerian search on one component")
    sp.add_argument("--component", required=True, help="component index or gSIZE (first of that size)")
    sp.add_argument("--kind", choices=("path", "cycle", "eulerian"), default="path")
    sp.add_argument("--start", type=int, help="start vertex ordinal for path searches")
    sp.add_argument("--budget", type=int, help="node-expansion limit for backtracking")
    sp = sub.add_parser("verify", parents=[common], help="recompute a published table and compare")
    sp.add_argument("target", choices=VERIFY_TARGETS)
    sp = sub.add_parser("export", parents=[common], help="export a reachability graph")
    sp.add_argument("--format", choices=("dot", "json", "csv"), default="dot")
    sp.add_argument("--output", help="output file (default stdout)")
    return p


_COMMANDS = {
    "enumerate": cmd_enumerate,
    "census": cmd_census,
    "components": cmd_components,
    "distances": cmd_distances,
    "hampath": cmd_hampath,
    "verify": cmd_verify,
    "export": cmd_export,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"stabgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    params = {k: v for k, v in vars(args).items() if k not in ("command", "manifest", "verbose")}
    manifest = RunManifest(args.command, params)
    started = time.perf_counter()
    try:
        code, text = _COMMANDS[args.command](args, manifest)
    except UsageError as exc:
        print(f"stabgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidArgument as exc:
        print(f"stabgraph: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StabgraphError, AssertionError) as exc:
        print(f"stabgraph: internal consistency failure: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    sys.stdout.write(text)
    manifest.finish(text, started)
    if args.manifest:
        Path(args.manifest).write_text(json.dumps(asdict(manifest), sort_keys=True, indent=1) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
