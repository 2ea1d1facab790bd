"""Compiled bulk operations on packed canonical keys (n <= 5, keys fit in uint64).

These mirror the pure-Python reference in ``clifford.py`` bit for bit; the
test-suite cross-checks the two paths.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .clifford import GateOp

KIND_CODE = {"H": 0, "P": 1, "CNOT": 2}
MAX_PACKED_QUBITS = 5


@njit(cache=True, inline="always")
def _popcount(v):
    c = 0
    while v:
        v &= v - 1
        c += 1
    return c


@njit(cache=True, inline="always")
def _mul_phase(x1, z1, x2, z2):
    y1 = x1 & z1
    xo = x1 & ~z1
    zo = z1 & ~x1
    plus = _popcount(y1 & z2 & ~x2) + _popcount(xo & x2 & z2) + _popcount(zo & x2 & ~z2)
    minus = _popcount(y1 & x2 & ~z2) + _popcount(xo & z2 & ~x2) + _popcount(zo & x2 & z2)
    return (plus - minus) % 4


@njit(cache=True)
def _decode(key, n, x, z, r):
    w = 2 * n
    full = (1 << n) - 1
    rowmask = (1 << w) - 1
    for i in range(n):
        v = (key >> (w * i)) & rowmask
        x[i] = v >> n
        z[i] = v & full
        r[i] = (key >> (w * n + i)) & 1


@njit(cache=True)
def _apply(x, z, r, n, kind, q1, q2):
    if kind == 0:
        a = 1 << (n - q1)
        for i in range(n):
            xa = x[i] & a
            za = z[i] & a
            if xa and za:
                r[i] ^= 1
            x[i] = (x[i] & ~a) | za
            z[i] = (z[i] & ~a) | xa
    elif kind == 1:
        a = 1 << (n - q1)
        for i in range(n):
            xa = x[i] & a
            if xa and (z[i] & a):
                r[i] ^= 1
            z[i] ^= xa
    else:
        c = 1 << (n - q1)
        t = 1 << (n - q2)
        for i in range(n):
            xc = (x[i] & c) != 0
            zc = (z[i] & c) != 0
            xt = (x[i] & t) != 0
            zt = (z[i] & t) != 0
            if xc and zt and xt == zc:
                r[i] ^= 1
            if xc:
                x[i] ^= t
            if zt:
                z[i] ^= c


@njit(cache=True)
def _canon(x, z, r, n):
    """Signed RREF in place, then pack into a key."""
    rank = 0
    for col in range(2 * n - 1, -1, -1):
        if rank == n:
            break
        piv = -1
        for i in range(rank, n):
            v = (x[i] << n) | z[i]
            if (v >> col) & 1:
                piv = i
                break
        if piv < 0:
            continue
        if piv != rank:
            x[rank], x[piv] = x[piv], x[rank]
            z[rank], z[piv] = z[piv], z[rank]
            r[rank], r[piv] = r[piv], r[rank]
        for i in range(n):
            if i == rank:
                continue
            v = (x[i] << n) | z[i]
            if (v >> col) & 1:
                ph = (2 * r[i] + 2 * r[rank] + _mul_phase(x[i], z[i], x[rank], z[rank])) % 4
                x[i] ^= x[rank]
                z[i] ^= z[rank]
                r[i] = ph // 2
        rank += 1
    w = 2 * n
    key = np.uint64(0)
    for i in range(n):
        key |= np.uint64((x[i] << n) | z[i]) << np.uint64(w * i)
        key |= np.uint64(r[i]) << np.uint64(w * n + i)
    return key


@njit(cache=True)
def apply_many(keys, n, kinds, q1s, q2s):
    """Canonical key of g(state) for every key and every gate; shape (N, G)."""
    m = keys.shape[0]
    ng = kinds.shape[0]
    out = np.empty((m, ng), dtype=np.uint64)
    x0 = np.empty(n, dtype=np.int64)
    z0 = np.empty(n, dtype=np.int64)
    r0 = np.empty(n, dtype=np.int64)
    x = np.empty(n, dtype=np.int64)
    z = np.empty(n, dtype=np.int64)
    r = np.empty(n, dtype=np.int64)
    for k in range(m):
        _decode(np.int64(keys[k]), n, x0, z0, r0)
        for g in range(ng):
            x[:] = x0
            z[:] = z0
            r[:] = r0
            _apply(x, z, r, n, kinds[g], q1s[g], q2s[g])
            out[k, g] = _canon(x, z, r, n)
    return out


@njit(cache=True)
def canon_rows(xs, zs, rs, n):
    """Canonical keys for raw (unreduced) generator rows; arrays of shape (N, n)."""
    m = xs.shape[0]
    out = np.empty(m, dtype=np.uint64)
    x = np.empty(n, dtype=np.int64)
    z = np.empty(n, dtype=np.int64)
    r = np.empty(n, dtype=np.int64)
    for k in range(m):
        x[:] = xs[k]
        z[:] = zs[k]
        r[:] = rs[k]
        out[k] = _canon(x, z, r, n)
    return out


@njit(cache=True)
def _gf2_rank(rows, cnt):
    rank = 0
    for i in range(cnt):
        v = rows[i]
        for j in range(rank):
            b = rows[j]
            if (v ^ b) < v:
                v ^= b
        if v:
            # keep basis sorted by decreasing leading bit
            pos = rank
            while pos > 0 and rows[pos - 1] < v:
                rows[pos] = rows[pos - 1]
                pos -= 1
            rows[pos] = v
            rank += 1
    return rank


@njit(cache=True)
def entropies(keys, n, masks):
    """S_I in bits for every key and every qubit mask I; shape (N, M), int8."""
    m = keys.shape[0]
    nm = masks.shape[0]
    out = np.empty((m, nm), dtype=np.int8)
    x = np.empty(n, dtype=np.int64)
    z = np.empty(n, dtype=np.int64)
    r = np.empty(n, dtype=np.int64)
    rows = np.empty(n, dtype=np.int64)
    for k in range(m):
        _decode(np.int64(keys[k]), n, x, z, r)
        for j in range(nm):
            mk = masks[j]
            for i in range(n):
                rows[i] = ((x[i] & mk) << n) | (z[i] & mk)
            out[k, j] = _gf2_rank(rows, n) - _popcount(mk)
    return out


def gate_arrays(gates: "list[GateOp] | tuple[GateOp, ...]") -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kinds = np.array([KIND_CODE[g.kind] for g in gates], dtype=np.int64)
    q1s = np.array([g.q1 for g in gates], dtype=np.int64)
    q2s = np.array([g.q2 or 0 for g in gates], dtype=np.int64)
    return kinds, q1s, q2s
