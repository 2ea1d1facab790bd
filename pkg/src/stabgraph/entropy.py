"""Subsystem entropies, entropy vectors and holographic-cone tests."""

from __future__ import annotations

import csv
import io
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from . import _kernels
from .clifford import StabilizerTableau, _popcount
from .enumeration import StateSet
from .errors import InvalidArgument

MAX_VECTOR_QUBITS = 5


@dataclass(frozen=True, order=True)
class SubsystemMask:
    """A nonempty proper subset of the qubits {1..n}."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        full = (1 << self.n) - 1
        if self.bits <= 0 or self.bits >= full or self.bits & ~full:
            raise InvalidArgument(f"mask {self.bits:#b} is not a nonempty proper subset of {self.n} qubits")

    @classmethod
    def of(cls, n: int, qubits: Iterable[int]) -> "SubsystemMask":
        bits = 0
        for q in qubits:
            if not 1 <= q <= n:
                raise InvalidArgument(f"qubit {q} out of range")
            bits |= 1 << (n - q)
        return cls(n, bits)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(1, self.n + 1) if self.bits >> (self.n - q) & 1)

    @property
    def size(self) -> int:
        return _popcount(self.bits)

    def complement(self) -> "SubsystemMask":
        return SubsystemMask(self.n, ((1 << self.n) - 1) ^ self.bits)

    @property
    def name(self) -> str:
        letters = party_names(self.n)
        return "".join(letters[q - 1] for q in self.qubits)


def party_names(n: int) -> list[str]:
    """A, B, C, ... for qubits 1..n-1 and O for the purifier (last qubit)."""
    return [chr(ord("A") + i) for i in range(n - 1)] + ["O"]


@lru_cache(maxsize=None)
def coordinates(n: int) -> tuple[SubsystemMask, ...]:
    """Subsystems indexed by the entropy-vector coordinates.

    Singletons in qubit order, then pairs in lexicographic order, skipping any
    subset whose complement is already listed.  n=4 gives A,B,C,O,AB,AC,AO.
    """
    if not 2 <= n <= MAX_VECTOR_QUBITS:
        raise InvalidArgument(f"entropy vectors are defined for 2 <= n <= {MAX_VECTOR_QUBITS}")
    length = 2 ** (n - 1) - 1
    chosen: list[SubsystemMask] = []
    seen: set[int] = set()
    for size in (1, 2):
        for qs in itertools.combinations(range(1, n + 1), size):
            if size >= n:
                continue
            m = SubsystemMask.of(n, qs)
            if m.bits in seen:
                continue
            chosen.append(m)
            seen.add(m.bits)
            seen.add(m.complement().bits)
            if len(chosen) == length:
                return tuple(chosen)
    raise AssertionError("coordinate construction fell short")


def coordinate_names(n: int) -> list[str]:
    return [m.name for m in coordinates(n)]


@dataclass(frozen=True, order=True)
class EntropyVector:
    n: int
    entries: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "entries", tuple(int(e) for e in self.entries))
        if len(self.entries) != 2 ** (self.n - 1) - 1:
            raise InvalidArgument(f"entropy vector for n={self.n} needs {2 ** (self.n - 1) - 1} entries")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def serialize(self) -> str:
        return "".join(str(e) for e in self.entries)

    def __str__(self) -> str:
        return "(" + ",".join(str(e) for e in self.entries) + ")"

    def subsystem(self, bits: int) -> int:
        """Entropy of any qubit subset, recovered through S_I = S_complement."""
        full = (1 << self.n) - 1
        if bits == 0 or bits == full:
            return 0
        idx = _coordinate_index(self.n)
        if bits in idx:
            return self.entries[idx[bits]]
        return self.entries[idx[full ^ bits]]


@lru_cache(maxsize=None)
def _coordinate_index(n: int) -> dict[int, int]:
    return {m.bits: i for i, m in enumerate(coordinates(n))}


def _rank_gf2(rows: Iterable[int]) -> int:
    basis: list[int] = []
    for v in rows:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


def subsystem_entropy(t: StabilizerTableau, mask: SubsystemMask) -> int:
    """S_I = rank of the check matrix restricted to I, minus |I|."""
    if mask.n != t.n:
        raise InvalidArgument("mask and tableau disagree on the qubit count")
    m, n = mask.bits, t.n
    rows = [((g.x & m) << n) | (g.z & m) for g in t.generators]
    return _rank_gf2(rows) - mask.size


def entropy_vector(t: StabilizerTableau) -> EntropyVector:
    return EntropyVector(t.n, tuple(subsystem_entropy(t, m) for m in coordinates(t.n)))


def spectral_entropy(amps: np.ndarray, n: int, qubits: Iterable[int]) -> float:
    """Von Neumann entropy in bits of the reduced state on ``qubits`` (oracle path)."""
    keep = sorted(qubits)
    rest = [q for q in range(1, n + 1) if q not in keep]
    psi = np.asarray(amps).reshape((2,) * n)
    psi = np.transpose(psi, [q - 1 for q in keep + rest]).reshape(2 ** len(keep), -1)
    rho = psi @ psi.conj().T
    ev = np.linalg.eigvalsh(rho)
    ev = ev[ev > 1e-12]
    return float(-(ev * np.log2(ev)).sum())


def entropy_table(states: StateSet) -> np.ndarray:
    """Entropy vectors of every state as an (N, L) int8 array, memoized on the set."""
    cached = states._entropy_cache.get("vectors")
    if cached is None:
        masks = np.array([m.bits for m in coordinates(states.n)], dtype=np.int64)
        cached = _kernels.entropies(states.keys, states.n, masks)
        states._entropy_cache["vectors"] = cached
    return cached


def vector_codes(table: np.ndarray, n: int) -> np.ndarray:
    """Integer code per row, monotone in lexicographic vector order."""
    base = n // 2 + 1
    codes = np.zeros(table.shape[0], dtype=np.int64)
    for j in range(table.shape[1]):
        codes = codes * base + table[:, j]
    return codes


def decode_vector(code: int, n: int) -> EntropyVector:
    base = n // 2 + 1
    length = 2 ** (n - 1) - 1
    entries = []
    for _ in range(length):
        code, d = divmod(int(code), base)
        entries.append(d)
    return EntropyVector(n, tuple(reversed(entries)))


def entropy_census(states: StateSet) -> dict[EntropyVector, int]:
    """Number of states carrying each entropy vector, in vector order."""
    codes = vector_codes(entropy_table(states), states.n)
    uniq, counts = np.unique(codes, return_counts=True)
    return {decode_vector(c, states.n): int(k) for c, k in zip(uniq, counts)}


@dataclass(frozen=True)
class ConeVerdict:
    holographic: bool
    violations: tuple[tuple[str, tuple[tuple[int, ...], ...]], ...]

    @property
    def violated_kinds(self) -> set[str]:
        return {kind for kind, _ in self.violations}


def _mask_qubits(n: int, bits: int) -> tuple[int, ...]:
    return tuple(q for q in range(1, n + 1) if bits >> (n - q) & 1)


@lru_cache(maxsize=None)
def _inequality_instances(n: int):
    """Disjoint nonempty party subsets: unordered pairs and unordered triples."""
    pairs, triples = set(), set()
    for labels in itertools.product(range(4), repeat=n):
        parts = [0, 0, 0, 0]
        for q, lab in enumerate(labels, start=1):
            parts[lab] |= 1 << (n - q)
        i, j, k = parts[1], parts[2], parts[3]
        if i and j and not k:
            pairs.add(tuple(sorted((i, j))))
        if i and j and k:
            triples.add(tuple(sorted((i, j, k))))
    return sorted(pairs), sorted(triples)


def check_holographic(v: EntropyVector) -> ConeVerdict:
    """Subadditivity, Araki-Lieb and monogamy of mutual information over all parties."""
    n = v.n
    if not 2 <= n <= MAX_VECTOR_QUBITS:
        raise InvalidArgument("cone test implemented for 2 <= n <= 5")
    S = v.subsystem
    pairs, triples = _inequality_instances(n)
    out = []
    for i, j in pairs:
        sij = S(i | j)
        if S(i) + S(j) < sij:
            out.append(("subadditivity", (_mask_qubits(n, i), _mask_qubits(n, j))))
        for a, b in ((i, j), (j, i)):
            if sij + S(a) < S(b):
                out.append(("araki-lieb", (_mask_qubits(n, a), _mask_qubits(n, b))))
    for i, j, k in triples:
        lhs = S(i | j) + S(i | k) + S(j | k)
        rhs = S(i | j | k) + S(i) + S(j) + S(k)
        if lhs < rhs:
            out.append(("mmi", (_mask_qubits(n, i), _mask_qubits(n, j), _mask_qubits(n, k))))
    return ConeVerdict(not out, tuple(out))


def census_csv(census: dict[EntropyVector, int]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["entropy_vector", "count", "holographic"])
    for vec, count in sorted(census.items()):
        w.writerow([vec.serialize(), count, "yes" if check_holographic(vec).holographic else "no"])
    return buf.getvalue()
