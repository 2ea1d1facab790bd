"""Stabilizer tableaux, Clifford generators and canonical keys.

Bit conventions used everywhere in the package:

* Qubits are numbered 1..n, qubit 1 being the leftmost ket slot.  In an
  n-qubit bit mask qubit ``q`` lives at bit ``n - q`` so that the mask of a
  computational basis state ``|a_1 ... a_n>`` is the usual binary number and
  amplitude index.
* A Pauli string is ``i**phase * sigma(x_1, z_1) (x) ... (x) sigma(x_n, z_n)``
  with ``sigma(1, 0) = X``, ``sigma(0, 1) = Z`` and ``sigma(1, 1) = Y``.
* A check-matrix row is the 2n-bit integer ``(x << n) | z``; its most
  significant bit is the x column of qubit 1, so ordering rows by integer
  value orders them by pivot with x columns before z columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import InvalidArgument, InvariantViolation, ResourceLimit

MAX_AMPLITUDE_QUBITS = 12

_PHASE_LABELS = {0: "+", 1: "+i", 2: "-", 3: "-i"}


def _popcount(v: int) -> int:
    return bin(v).count("1")


def _mul_phase(x1: int, z1: int, x2: int, z2: int) -> int:
    """Power of i picked up when multiplying sigma(x1,z1) by sigma(x2,z2), mod 4."""
    y1 = x1 & z1
    xo = x1 & ~z1
    zo = z1 & ~x1
    plus = _popcount(y1 & z2 & ~x2) + _popcount(xo & x2 & z2) + _popcount(zo & x2 & ~z2)
    minus = _popcount(y1 & x2 & ~z2) + _popcount(xo & z2 & ~x2) + _popcount(zo & x2 & z2)
    return (plus - minus) % 4


@dataclass(frozen=True)
class PauliString:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidArgument("a Pauli string needs at least one qubit")
        full = (1 << self.n) - 1
        if self.x & ~full or self.z & ~full:
            raise InvalidArgument("bit mask wider than the qubit count")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label: str) -> "PauliString":
        """Parse labels such as ``"+XZ"``, ``"-iYI"`` or ``"ZZ"``."""
        m = re.fullmatch(r"([+-]?)(i?)([IXYZ]+)", label.strip())
        if m is None:
            raise InvalidArgument(f"bad Pauli label {label!r}")
        sign, imag, body = m.groups()
        phase = (2 if sign == "-" else 0) + (1 if imag else 0)
        n = len(body)
        x = z = 0
        for q, ch in enumerate(body, start=1):
            bit = 1 << (n - q)
            if ch in "XY":
                x |= bit
            if ch in "ZY":
                z |= bit
        return cls(n, x, z, phase)

    @property
    def label(self) -> str:
        chars = []
        for q in range(1, self.n + 1):
            bit = 1 << (self.n - q)
            chars.append("IZXY"[(2 if self.x & bit else 0) + (1 if self.z & bit else 0)])
        return _PHASE_LABELS[self.phase] + "".join(chars)

    @property
    def x_bits(self) -> tuple[int, ...]:
        return tuple((self.x >> (self.n - q)) & 1 for q in range(1, self.n + 1))

    @property
    def z_bits(self) -> tuple[int, ...]:
        return tuple((self.z >> (self.n - q)) & 1 for q in range(1, self.n + 1))

    @property
    def row(self) -> int:
        return (self.x << self.n) | self.z

    def commutes(self, other: "PauliString") -> bool:
        return (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2 == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if other.n != self.n:
            raise InvalidArgument("qubit counts differ")
        ph = self.phase + other.phase + _mul_phase(self.x, self.z, other.x, other.z)
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, ph)

    def padded(self, left: int = 0, right: int = 0) -> "PauliString":
        """Tensor identities on ``left`` qubits before and ``right`` qubits after."""
        n = self.n + left + right
        return PauliString(n, self.x << right, self.z << right, self.phase)

    def apply_to(self, vec: np.ndarray) -> np.ndarray:
        """Act with this operator on a state vector of length 2**n."""
        idx = np.arange(1 << self.n)
        zpar = np.zeros(idx.shape, dtype=np.int64)
        masked = idx & self.z
        while np.any(masked):
            zpar ^= masked & 1
            masked = masked >> 1
        # sigma(x,z) = i^{x.z} X^x Z^z ; (X^x Z^z)|b> = (-1)^{z.b} |b ^ x>
        k = (self.phase + _popcount(self.x & self.z)) % 4
        out = np.empty_like(vec)
        out[idx ^ self.x] = vec * np.where(zpar == 1, -1.0, 1.0)
        return out * (1j ** k)

    def matrix(self) -> np.ndarray:
        dim = 1 << self.n
        return np.column_stack([self.apply_to(np.eye(dim, dtype=complex)[:, j]) for j in range(dim)])


@dataclass(frozen=True)
class GateOp:
    """One Clifford generator; qubit indices are 1-based."""

    kind: str
    q1: int
    q2: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("H", "P", "CNOT"):
            raise InvalidArgument(f"unknown gate kind {self.kind!r}")
        if self.q1 < 1:
            raise InvalidArgument("qubit indices are 1-based")
        if self.kind == "CNOT":
            if self.q2 is None or self.q2 < 1 or self.q2 == self.q1:
                raise InvalidArgument("CNOT needs two distinct qubits")
        elif self.q2 is not None:
            raise InvalidArgument(f"{self.kind} acts on a single qubit")

    @property
    def label(self) -> str:
        if self.kind == "CNOT":
            if self.q1 < 10 and self.q2 < 10:
                return f"CX{self.q1}{self.q2}"
            return f"CX{self.q1}_{self.q2}"
        return f"{self.kind}{self.q1}"

    @classmethod
    def parse(cls, label: str) -> "GateOp":
        s = label.strip().upper().replace("CNOT", "CX")
        m = re.fullmatch(r"([HP])(\d+)", s)
        if m:
            return cls(m.group(1), int(m.group(2)))
        m = re.fullmatch(r"CX(\d+)[_,](\d+)", s) or re.fullmatch(r"CX(\d)(\d)", s)
        if m:
            return cls("CNOT", int(m.group(1)), int(m.group(2)))
        raise InvalidArgument(f"bad gate label {label!r}")

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.q1,) if self.q2 is None else (self.q1, self.q2)

    def check(self, n: int) -> None:
        if max(self.qubits) > n:
            raise InvalidArgument(f"gate {self.label} out of range for {n} qubits")

    def inverse(self) -> tuple["GateOp", ...]:
        if self.kind == "P":
            return (self, self, self)
        return (self,)

    def __str__(self) -> str:
        return self.label


def H(q: int) -> GateOp:
    return GateOp("H", q)


def P(q: int) -> GateOp:
    return GateOp("P", q)


def CNOT(c: int, t: int) -> GateOp:
    return GateOp("CNOT", c, t)


def full_gate_set(n: int) -> tuple[GateOp, ...]:
    """H_1..H_n, P_1..P_n, then CNOT_{i,j} for i != j in lexicographic order."""
    gates = [H(q) for q in range(1, n + 1)] + [P(q) for q in range(1, n + 1)]
    gates += [CNOT(i, j) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    return tuple(gates)


@dataclass(frozen=True)
class Circuit:
    """Ordered gates; the leftmost gate acts first."""

    gates: tuple[GateOp, ...] = ()

    def __init__(self, gates: Iterable[GateOp | str] = ()) -> None:
        object.__setattr__(
            self, "gates", tuple(g if isinstance(g, GateOp) else GateOp.parse(g) for g in gates)
        )

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[GateOp]:
        return iter(self.gates)

    def __getitem__(self, i):
        return self.gates[i]

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(self.gates + tuple(other.gates))

    def check(self, n: int) -> None:
        for g in self.gates:
            g.check(n)

    def inverse(self) -> "Circuit":
        out: list[GateOp] = []
        for g in reversed(self.gates):
            out.extend(g.inverse())
        return Circuit(out)

    def relabel(self, mapping: dict[int, int]) -> "Circuit":
        """Rename qubits; qubits missing from ``mapping`` are kept."""
        out = []
        for g in self.gates:
            q1 = mapping.get(g.q1, g.q1)
            q2 = None if g.q2 is None else mapping.get(g.q2, g.q2)
            out.append(GateOp(g.kind, q1, q2))
        return Circuit(out)

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.gates]


def conjugate(p: PauliString, g: GateOp) -> PauliString:
    """Return U p U^dagger for the generator U = g."""
    n = p.n
    x, z, flip = p.x, p.z, 0
    if g.kind == "H":
        a = 1 << (n - g.q1)
        xa, za = x & a, z & a
        flip = 1 if (xa and za) else 0
        x = (x & ~a) | za
        z = (z & ~a) | xa
    elif g.kind == "P":
        a = 1 << (n - g.q1)
        xa, za = x & a, z & a
        flip = 1 if (xa and za) else 0
        z ^= xa
    else:
        c = 1 << (n - g.q1)
        t = 1 << (n - g.q2)
        xc, zc, xt, zt = bool(x & c), bool(z & c), bool(x & t), bool(z & t)
        flip = 1 if (xc and zt and not (xt ^ zc)) else 0
        if xc:
            x ^= t
        if zt:
            z ^= c
    return PauliString(n, x, z, p.phase + 2 * flip)


@dataclass(frozen=True)
class CanonicalKey:
    """Canonical fingerprint of a stabilizer group.

    ``bits`` packs the signed reduced row-echelon check matrix: row ``r``
    (rows sorted by decreasing pivot) occupies bits ``[2n*r, 2n*(r+1))`` and
    the sign of row ``r`` is bit ``2n*n + r``.
    """

    n: int
    bits: int

    @staticmethod
    def width(n: int) -> int:
        return 2 * n * n + n

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.width(self.n) + 7) // 8, "little")

    def __lt__(self, other: "CanonicalKey") -> bool:
        return (self.n, self.bits) < (other.n, other.bits)


@dataclass(frozen=True)
class StabilizerTableau:
    n: int
    generators: tuple[PauliString, ...]

    def __init__(self, n: int, generators: Iterable[PauliString]) -> None:
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "generators", tuple(generators))

    @classmethod
    def from_labels(cls, labels: Sequence[str]) -> "StabilizerTableau":
        gens = [PauliString.from_label(s) for s in labels]
        if not gens:
            raise InvalidArgument("need at least one generator")
        t = cls(gens[0].n, gens)
        t.validate()
        return t

    @property
    def labels(self) -> list[str]:
        return [g.label for g in self.generators]

    def validate(self) -> None:
        n, gens = self.n, self.generators
        if n < 1 or len(gens) != n:
            raise InvariantViolation(f"expected {n} generators, got {len(gens)}")
        for g in gens:
            if g.n != n:
                raise InvariantViolation("generator width differs from qubit count")
            if g.phase % 2:
                raise InvariantViolation(f"generator {g.label} has an imaginary phase")
        for i in range(n):
            for j in range(i + 1, n):
                if not gens[i].commutes(gens[j]):
                    raise InvariantViolation(f"{gens[i].label} and {gens[j].label} anticommute")
        rows, signs = _rref([g.row for g in gens], [g.phase // 2 for g in gens], n)
        if rows[-1] == 0:
            raise InvariantViolation("generators are not independent")
        # commuting, independent, Hermitian generators can never produce -I

    def __repr__(self) -> str:
        return f"StabilizerTableau({', '.join(self.labels)})"


def _rowmul(v1: int, s1: int, v2: int, s2: int, n: int) -> tuple[int, int]:
    """Multiply two commuting Hermitian rows; returns the product row and sign bit."""
    full = (1 << n) - 1
    x1, z1 = v1 >> n, v1 & full
    x2, z2 = v2 >> n, v2 & full
    ph = (2 * s1 + 2 * s2 + _mul_phase(x1, z1, x2, z2)) % 4
    if ph % 2:
        raise InvariantViolation("row product picked up an imaginary phase")
    return v1 ^ v2, ph // 2


def _rref(rows: list[int], signs: list[int], n: int) -> tuple[list[int], list[int]]:
    """Signed reduced row-echelon form over GF(2); columns x_1..x_n, z_1..z_n."""
    rows, signs = list(rows), list(signs)
    rank = 0
    for col in range(2 * n - 1, -1, -1):
        bit = 1 << col
        piv = next((i for i in range(rank, len(rows)) if rows[i] & bit), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        signs[rank], signs[piv] = signs[piv], signs[rank]
        for i in range(len(rows)):
            if i != rank and rows[i] & bit:
                rows[i], signs[i] = _rowmul(rows[i], signs[i], rows[rank], signs[rank], n)
        rank += 1
        if rank == len(rows):
            break
    return rows, signs


def basis_state(n: int) -> StabilizerTableau:
    """|0...0>, stabilized by +Z on every qubit."""
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    return StabilizerTableau(n, [PauliString(n, 0, 1 << (n - q)) for q in range(1, n + 1)])


def apply_gate(t: StabilizerTableau, g: GateOp) -> StabilizerTableau:
    g.check(t.n)
    return StabilizerTableau(t.n, [conjugate(p, g) for p in t.generators])


def apply_circuit(t: StabilizerTableau, c: Circuit | Iterable[GateOp]) -> list[StabilizerTableau]:
    """Trajectory of ``t`` under ``c``; element 0 is ``t`` itself."""
    c = c if isinstance(c, Circuit) else Circuit(c)
    c.check(t.n)
    traj = [t]
    for g in c:
        traj.append(apply_gate(traj[-1], g))
    return traj


def canonicalize(t: StabilizerTableau) -> CanonicalKey:
    t.validate()
    n = t.n
    rows, signs = _rref([g.row for g in t.generators], [g.phase // 2 for g in t.generators], n)
    bits = 0
    for r, v in enumerate(rows):
        bits |= v << (2 * n * r)
    for r, s in enumerate(signs):
        bits |= s << (2 * n * n + r)
    return CanonicalKey(n, bits)


def tableau_from_key(key: CanonicalKey | int, n: int | None = None) -> StabilizerTableau:
    """Rebuild the reduced generator list encoded in a key."""
    if isinstance(key, CanonicalKey):
        n, bits = key.n, key.bits
    else:
        if n is None:
            raise InvalidArgument("n is required when passing a raw integer key")
        bits = int(key)
    w = 2 * n
    full = (1 << n) - 1
    gens = []
    for r in range(n):
        v = (bits >> (w * r)) & ((1 << w) - 1)
        s = (bits >> (w * n + r)) & 1
        gens.append(PauliString(n, v >> n, v & full, 2 * s))
    return StabilizerTableau(n, gens)


def amplitudes(t: StabilizerTableau) -> np.ndarray:
    """Dense state vector; global phase fixed so the first nonzero entry is real positive."""
    n = t.n
    if n > MAX_AMPLITUDE_QUBITS:
        raise ResourceLimit(f"amplitude expansion capped at {MAX_AMPLITUDE_QUBITS} qubits")
    rng = np.random.default_rng(12345)
    vec = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    for g in t.generators:
        vec = 0.5 * (vec + g.apply_to(vec))
    norm = np.linalg.norm(vec)
    if norm < 1e-9:
        raise InvariantViolation("projection onto the stabilized subspace vanished")
    vec = vec / norm
    first = vec[np.flatnonzero(np.abs(vec) > 1e-9)[0]]
    vec = vec * (abs(first) / first)
    vec.real[np.abs(vec.real) < 1e-15] = 0.0
    vec.imag[np.abs(vec.imag) < 1e-15] = 0.0
    return vec


def same_ray(a: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> bool:
    """True when two vectors are equal up to normalization and global phase."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < tol or nb < tol:
        return False
    return abs(abs(np.vdot(a, b)) / (na * nb) - 1.0) < tol


ONE_QUBIT_PREP: dict[str, tuple[GateOp, ...]] = {
    "0": (),
    "1": (H(1), P(1), P(1), H(1)),
    "+": (H(1),),
    "-": (H(1), P(1), P(1)),
    "i": (H(1), P(1)),
    "-i": (H(1), P(1), P(1), P(1)),
}


def one_qubit_state(label: str) -> StabilizerTableau:
    """One of the six single-qubit stabilizer states: 0, 1, +, -, i, -i."""
    try:
        prep = ONE_QUBIT_PREP[label]
    except KeyError:
        raise InvalidArgument(f"unknown one-qubit state {label!r}") from None
    return apply_circuit(basis_state(1), prep)[-1]


def product_state(labels: Sequence[str]) -> StabilizerTableau:
    """Tensor product of single-qubit stabilizer states, qubit 1 first.

    ``product_state(["i", "1", "+"])`` is |i1+>.
    """
    if not labels:
        raise InvalidArgument("need at least one qubit")
    n = len(labels)
    gens = []
    for q, lab in enumerate(labels, start=1):
        p = one_qubit_state(lab).generators[0]
        gens.append(p.padded(left=q - 1, right=n - q))
    return StabilizerTableau(n, gens)


def ket(bits: str) -> np.ndarray:
    """Computational basis vector for a bit string such as ``"010"``."""
    v = np.zeros(1 << len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v
