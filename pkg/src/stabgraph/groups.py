"""Exact closure of gate-generated unitary groups and orbit-stabilizer bookkeeping.

Matrices are stored exactly as ``(1/sqrt2)**m * M`` with ``M`` a Gaussian-integer
matrix (separate integer arrays for real and imaginary parts), so equality
tests never touch floating point.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .clifford import GateOp, StabilizerTableau, apply_gate, canonicalize
from .errors import ConsistencyError, InvalidArgument, ResourceLimit

CLOSURE_CAP = 10**6
MAX_SPAN = 3


@dataclass(frozen=True, eq=False)
class ExactUnitary:
    """``(1/sqrt2)**m * (re + i*im)`` with integer ``re``, ``im``."""

    m: int
    re: np.ndarray
    im: np.ndarray

    @property
    def dim(self) -> int:
        return self.re.shape[0]

    def __matmul__(self, other: "ExactUnitary") -> "ExactUnitary":
        a, b, c, d = self.re, self.im, other.re, other.im
        return ExactUnitary(self.m + other.m, a @ c - b @ d, a @ d + b @ c).reduced()

    def reduced(self) -> "ExactUnitary":
        """Pull factors of 2 into the denominator exponent; the result is unique per matrix."""
        m, re, im = self.m, self.re, self.im
        while m >= 2 and not (np.any(re & 1) or np.any(im & 1)):
            m, re, im = m - 2, re >> 1, im >> 1
        return ExactUnitary(m, re, im)

    def key(self) -> bytes:
        return bytes([self.m]) + self.re.tobytes() + self.im.tobytes()

    def projective(self) -> "ProjectiveUnitary":
        return ProjectiveUnitary.of(self)

    def to_complex(self) -> np.ndarray:
        return (self.re + 1j * self.im) / np.sqrt(2.0) ** self.m

    @classmethod
    def identity(cls, dim: int) -> "ExactUnitary":
        return cls(0, np.eye(dim, dtype=np.int64), np.zeros((dim, dim), dtype=np.int64))


@dataclass(frozen=True, eq=False)
class ProjectiveUnitary:
    """Representative of a unitary modulo global phase.

    The Gaussian-integer matrix is divided by (1+i) while possible and then
    multiplied by a unit so its first nonzero entry in column-major order has
    positive real part and non-negative imaginary part.
    """

    re: np.ndarray
    im: np.ndarray

    @classmethod
    def of(cls, u: ExactUnitary) -> "ProjectiveUnitary":
        re, im = u.re.copy(), u.im.copy()
        # a+bi is divisible by 1+i iff a+b is even; (a+bi)/(1+i) = ((a+b) + (b-a)i)/2
        while not np.any((re + im) & 1):
            re, im = (re + im) >> 1, (im - re) >> 1
        flat_re, flat_im = re.T.reshape(-1), im.T.reshape(-1)
        j = int(np.flatnonzero((flat_re != 0) | (flat_im != 0))[0])
        a, b = int(flat_re[j]), int(flat_im[j])
        # rotate by i until the leading entry sits in the half-open first quadrant
        for _ in range(4):
            if a > 0 and b >= 0:
                break
            re, im = -im, re
            a, b = -b, a
        return cls(re, im)

    @property
    def dim(self) -> int:
        return self.re.shape[0]

    def key(self) -> bytes:
        return self.re.tobytes() + self.im.tobytes()


def _embed(local: np.ndarray, qubits: Sequence[int], k: int) -> np.ndarray:
    """Integer matrix of a gate on ``qubits`` (1-based, qubit 1 most significant) inside k qubits."""
    dim = 1 << k
    nq = len(qubits)
    out = np.zeros((dim, dim), dtype=np.int64)
    for col in range(dim):
        sub = 0
        for q in qubits:
            sub = (sub << 1) | ((col >> (k - q)) & 1)
        for row_sub in range(1 << nq):
            amp = local[row_sub, sub]
            if amp == 0:
                continue
            row = col
            for pos, q in enumerate(qubits):
                bit = (row_sub >> (nq - 1 - pos)) & 1
                row = (row & ~(1 << (k - q))) | (bit << (k - q))
            out[row, col] += amp
    return out


_H = np.array([[1, 1], [1, -1]], dtype=np.int64)
_CX = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=np.int64)


def gate_unitary(g: GateOp, k: int) -> ExactUnitary:
    g.check(k)
    zero = np.zeros((1 << k, 1 << k), dtype=np.int64)
    if g.kind == "H":
        return ExactUnitary(1, _embed(_H, [g.q1], k), zero)
    if g.kind == "P":
        re = _embed(np.diag([1, 0]).astype(np.int64), [g.q1], k)
        im = _embed(np.diag([0, 1]).astype(np.int64), [g.q1], k)
        return ExactUnitary(0, re, im)
    return ExactUnitary(0, _embed(_CX, [g.q1, g.q2], k), zero)


def _span(generators: Sequence[GateOp], k: int | None) -> int:
    need = max(max(g.qubits) for g in generators)
    k = need if k is None else k
    if k < need:
        raise InvalidArgument(f"generators touch qubit {need}, span is {k}")
    if k > MAX_SPAN:
        raise InvalidArgument(f"exact closure supports spans up to {MAX_SPAN} qubits")
    return k


@dataclass(frozen=True)
class GroupOrder:
    projective: int
    phase_inclusive: int

    @property
    def scalars(self) -> int:
        """Number of scalar multiples of the identity in the phase-inclusive group."""
        return self.phase_inclusive // self.projective


def _closure(gens: list, key, cap: int) -> int:
    ident = ExactUnitary.identity(gens[0].dim)
    seen = {key(ident)}
    queue = deque([ident])
    while queue:
        u = queue.popleft()
        for g in gens:
            w = g @ u
            kw = key(w)
            if kw not in seen:
                seen.add(kw)
                if len(seen) > cap:
                    raise ResourceLimit(f"group closure exceeded {cap} elements")
                queue.append(w)
    return len(seen)


def subgroup_order(
    generators: Iterable[GateOp | str], k: int | None = None, cap: int = CLOSURE_CAP
) -> GroupOrder:
    """Order of the group generated by ``generators``, modulo global phase and with phases.

    ``generators`` may be GateOps or labels such as ``"CX12"``.
    """
    gens = [g if isinstance(g, GateOp) else GateOp.parse(g) for g in generators]
    if not gens:
        return GroupOrder(1, 1)
    k = _span(gens, k)
    mats = [gate_unitary(g, k) for g in gens]
    proj = _closure(mats, lambda u: ProjectiveUnitary.of(u).key(), cap)
    full = _closure(mats, lambda u: u.key(), cap)
    if full % proj:
        raise ConsistencyError("projective order does not divide the phase-inclusive order")
    return GroupOrder(proj, full)


@dataclass(frozen=True)
class OrbitStabilizer:
    orbit: int
    stabilizer: int
    group_order: int
    projective_order: int

    @property
    def projective_stabilizer(self) -> int:
        return self.projective_order // self.orbit


def orbit_size(t: StabilizerTableau, generators: Sequence[GateOp]) -> int:
    """Size of the state orbit by breadth-first search over canonical keys."""
    seen = {canonicalize(t).bits}
    queue = deque([t])
    while queue:
        s = queue.popleft()
        for g in generators:
            u = apply_gate(s, g)
            kb = canonicalize(u).bits
            if kb not in seen:
                seen.add(kb)
                queue.append(u)
    return len(seen)


def orbit_and_stabilizer(t: StabilizerTableau, generators: Iterable[GateOp | str]) -> OrbitStabilizer:
    """Orbit size, stabilizer size and group order, using the phase-inclusive group order.

    Divisibility (Lagrange) is asserted for both the phase-inclusive and the
    projective order.
    """
    gens = [g if isinstance(g, GateOp) else GateOp.parse(g) for g in generators]
    if not gens:
        raise InvalidArgument("need at least one generator")
    order = subgroup_order(gens, k=t.n if t.n <= MAX_SPAN else None)
    orb = orbit_size(t, gens)
    if order.phase_inclusive % orb or order.projective % orb:
        raise ConsistencyError(f"orbit {orb} does not divide group order {order}")
    return OrbitStabilizer(orb, order.phase_inclusive // orb, order.phase_inclusive, order.projective)
