"""Complete enumeration of n-qubit stabilizer states and the binary state cache."""

from __future__ import annotations

import logging
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernels
from .clifford import (
    CanonicalKey,
    StabilizerTableau,
    basis_state,
    canonicalize,
    full_gate_set,
    tableau_from_key,
)
from .errors import CacheFormatError, ConsistencyError, CorruptCacheError, InvalidArgument

log = logging.getLogger(__name__)

MAX_ENUM_QUBITS = 5
CACHE_MAGIC = b"STBS"
CACHE_VERSION = 1
_HEADER = struct.Struct("<4sBBQ")


def expected_count(n: int) -> int:
    """|S_n| = 2^n * prod_{k=0}^{n-1} (2^{n-k} + 1)."""
    if n < 1:
        raise InvalidArgument("n must be at least 1")
    total = 2**n
    for k in range(n):
        total *= 2 ** (n - k) + 1
    return total


def record_width(n: int) -> int:
    """Bytes per cache record."""
    return (CanonicalKey.width(n) + 7) // 8


@dataclass(eq=False)
class StateSet:
    """All n-qubit stabilizer states as sorted packed keys; ordinal = position."""

    n: int
    keys: np.ndarray
    _entropy_cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        self.keys = np.ascontiguousarray(self.keys, dtype=np.uint64)

    def __len__(self) -> int:
        return int(self.keys.shape[0])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, StateSet) and self.n == other.n and np.array_equal(self.keys, other.keys)

    def key(self, i: int) -> CanonicalKey:
        return CanonicalKey(self.n, int(self.keys[i]))

    def tableau(self, i: int) -> StabilizerTableau:
        return tableau_from_key(int(self.keys[i]), self.n)

    def index(self, key: CanonicalKey | StabilizerTableau | int) -> int:
        """Ordinal of a state; raises KeyError if it is not a member."""
        if isinstance(key, StabilizerTableau):
            key = canonicalize(key)
        bits = key.bits if isinstance(key, CanonicalKey) else int(key)
        pos = int(np.searchsorted(self.keys, np.uint64(bits)))
        if pos >= len(self) or int(self.keys[pos]) != bits:
            raise KeyError(bits)
        return pos

    def lookup(self, keys: np.ndarray) -> np.ndarray:
        """Vectorized ordinals for packed keys that are known to be members."""
        pos = np.searchsorted(self.keys, keys)
        if np.any(pos >= len(self)) or not np.array_equal(self.keys[np.minimum(pos, len(self) - 1)], keys):
            raise ConsistencyError("key outside the state set")
        return pos.astype(np.int64)


def enumerate_states(n: int) -> StateSet:
    """Breadth-first closure of |0...0> under every Clifford generator."""
    if not 1 <= n <= MAX_ENUM_QUBITS:
        raise InvalidArgument(f"enumeration supports 1 <= n <= {MAX_ENUM_QUBITS}, got {n}")
    kinds, q1s, q2s = _kernels.gate_arrays(full_gate_set(n))
    start = np.array([canonicalize(basis_state(n)).bits], dtype=np.uint64)
    seen = start
    frontier = start
    depth = 0
    while frontier.size:
        nbrs = np.unique(_kernels.apply_many(frontier, n, kinds, q1s, q2s))
        fresh = nbrs[~_isin_sorted(nbrs, seen)]
        seen = np.union1d(seen, fresh)
        frontier = fresh
        depth += 1
        log.debug("n=%d depth=%d frontier=%d total=%d", n, depth, frontier.size, seen.size)
    if seen.size != expected_count(n):
        raise ConsistencyError(f"found {seen.size} states for n={n}, expected {expected_count(n)}")
    return StateSet(n, seen)


def _isin_sorted(values: np.ndarray, sorted_ref: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(sorted_ref, values)
    pos = np.minimum(pos, sorted_ref.size - 1)
    return sorted_ref[pos] == values


def cache_write(s: StateSet, path: str | os.PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    w = record_width(s.n)
    raw = s.keys.astype("<u8").view(np.uint8).reshape(-1, 8)[:, :w]
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_HEADER.pack(CACHE_MAGIC, CACHE_VERSION, s.n, len(s)))
        fh.write(np.ascontiguousarray(raw).tobytes())
    os.replace(tmp, path)
    return path


def cache_read(n: int, path: str | os.PathLike) -> StateSet:
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise CorruptCacheError("cache file shorter than its header")
    magic, version, n_file, count = _HEADER.unpack_from(data)
    if magic != CACHE_MAGIC:
        raise CacheFormatError(f"bad magic {magic!r}")
    if version != CACHE_VERSION:
        raise CacheFormatError(f"unsupported cache version {version}")
    if n_file != n:
        raise CacheFormatError(f"cache holds n={n_file}, requested n={n}")
    w = record_width(n)
    body = data[_HEADER.size :]
    if len(body) != count * w:
        raise CorruptCacheError(f"expected {count} records of {w} bytes, found {len(body)} bytes")
    if count != expected_count(n):
        raise CorruptCacheError(f"cache declares {count} states, n={n} has {expected_count(n)}")
    raw = np.zeros((count, 8), dtype=np.uint8)
    raw[:, :w] = np.frombuffer(body, dtype=np.uint8).reshape(count, w)
    keys = raw.view("<u8").reshape(count).astype(np.uint64)
    if count > 1 and not np.all(keys[1:] > keys[:-1]):
        raise CorruptCacheError("records are not strictly sorted")
    return StateSet(n, keys)


def default_cache_dir() -> Path:
    env = os.environ.get("STABGRAPH_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "stabgraph"


def cache_path(n: int, cache_dir: str | os.PathLike | None = None) -> Path:
    return Path(cache_dir or default_cache_dir()) / f"states_n{n}.stbs"


def load_states(n: int, cache_dir: str | os.PathLike | None = None) -> StateSet:
    """Read the cached set for n, enumerating and writing it on a miss."""
    path = cache_path(n, cache_dir)
    if path.exists():
        try:
            return cache_read(n, path)
        except (CacheFormatError, CorruptCacheError) as exc:
            log.warning("discarding unusable cache %s: %s", path, exc)
    s = enumerate_states(n)
    cache_write(s, path)
    return s
