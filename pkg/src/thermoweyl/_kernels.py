"""Hot loops of the Fock-space oracle.

Each kernel has a numba version and a vectorised numpy version with identical
output.  The numba path is used unless ``THERMOWEYL_NUMBA=0`` is set in the
environment (or numba cannot be imported).

Basis states are bit strings s in [0, 2^m); bit a set means mode a occupied.
Jordan-Wigner order: c_a picks up (-1)^(number of occupied modes below a).
"""

from __future__ import annotations

import os

import numpy as np

try:
    import numba as nb
except ImportError:  # pragma: no cover - numba is a declared dependency
    nb = None


def numba_requested() -> bool:
    return os.environ.get("THERMOWEYL_NUMBA", "1").strip().lower() not in ("0", "false", "no", "off")


USE_NUMBA = nb is not None and numba_requested()


# ---------------------------------------------------------------------------
# numpy implementations


def _popcount_below_np(states, a):
    return np.bitwise_count(states & ((1 << a) - 1)).astype(np.int64)


def bilinear_coo_numpy(kernel, m):
    """COO triplets of sum_{a,b} kernel[a, b] c_a^dag c_b on 2^m states."""
    dim = 1 << m
    states = np.arange(dim, dtype=np.int64)
    rows, cols, vals = [], [], []
    for a in range(m):
        for b in range(m):
            k = kernel[a, b]
            if k == 0:
                continue
            has_b = (states >> b) & 1 == 1
            src = states[has_b]
            if a == b:
                rows.append(src)
                cols.append(src)
                vals.append(np.full(src.size, k, dtype=np.complex128))
                continue
            mid = src ^ (1 << b)
            free = (mid >> a) & 1 == 0
            src, mid = src[free], mid[free]
            dst = mid | (1 << a)
            parity = _popcount_below_np(src, b) + _popcount_below_np(mid, a)
            sign = 1.0 - 2.0 * (parity & 1)
            rows.append(dst)
            cols.append(src)
            vals.append(k * sign)
    if not rows:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty, np.zeros(0, dtype=np.complex128)
    return (np.concatenate(rows), np.concatenate(cols),
            np.concatenate(vals).astype(np.complex128))


def mode_coo_numpy(a, m, create):
    """COO triplets of c_a (``create=False``) or c_a^dag on 2^m states."""
    dim = 1 << m
    states = np.arange(dim, dtype=np.int64)
    occupied = (states >> a) & 1 == 1
    src = states[~occupied] if create else states[occupied]
    dst = src ^ (1 << a)
    sign = 1.0 - 2.0 * (_popcount_below_np(src, a) & 1)
    return dst, src, sign.astype(np.complex128)


def occupations_numpy(m):
    states = np.arange(1 << m, dtype=np.int64)
    return ((states[:, None] >> np.arange(m)[None, :]) & 1).astype(np.float64)


# ---------------------------------------------------------------------------
# numba implementations

if nb is not None:

    @nb.njit(cache=True)
    def _popcount_below(s, a):
        s = s & ((1 << a) - 1)
        count = 0
        while s:
            s &= s - 1
            count += 1
        return count

    @nb.njit(cache=True)
    def _bilinear_coo_jit(kernel, m):
        dim = 1 << m
        nnz = 0
        for a in range(m):
            for b in range(m):
                if kernel[a, b] != 0:
                    nnz += dim // 2 if a == b else dim // 4
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz, dtype=np.complex128)
        n = 0
        for s in range(dim):
            for b in range(m):
                if (s >> b) & 1 == 0:
                    continue
                mid = s ^ (1 << b)
                pb = _popcount_below(s, b)
                for a in range(m):
                    k = kernel[a, b]
                    if k == 0:
                        continue
                    if a == b:
                        rows[n] = s
                        cols[n] = s
                        vals[n] = k
                        n += 1
                        continue
                    if (mid >> a) & 1 == 1:
                        continue
                    parity = pb + _popcount_below(mid, a)
                    rows[n] = mid | (1 << a)
                    cols[n] = s
                    vals[n] = -k if parity & 1 else k
                    n += 1
        return rows[:n], cols[:n], vals[:n]

    @nb.njit(cache=True)
    def _mode_coo_jit(a, m, create):
        dim = 1 << m
        rows = np.empty(dim // 2, dtype=np.int64)
        cols = np.empty(dim // 2, dtype=np.int64)
        vals = np.empty(dim // 2, dtype=np.complex128)
        n = 0
        for s in range(dim):
            occ = (s >> a) & 1
            if (create and occ == 0) or (not create and occ == 1):
                rows[n] = s ^ (1 << a)
                cols[n] = s
                vals[n] = -1.0 if _popcount_below(s, a) & 1 else 1.0
                n += 1
        return rows[:n], cols[:n], vals[:n]

    @nb.njit(cache=True)
    def _occupations_jit(m):
        dim = 1 << m
        out = np.empty((dim, m), dtype=np.float64)
        for s in range(dim):
            for a in range(m):
                out[s, a] = (s >> a) & 1
        return out


def bilinear_coo(kernel, m, use_numba=None):
    kernel = np.ascontiguousarray(kernel, dtype=np.complex128)
    if USE_NUMBA if use_numba is None else (use_numba and nb is not None):
        return _bilinear_coo_jit(kernel, m)
    return bilinear_coo_numpy(kernel, m)


def mode_coo(a, m, create, use_numba=None):
    if USE_NUMBA if use_numba is None else (use_numba and nb is not None):
        return _mode_coo_jit(a, m, create)
    return mode_coo_numpy(a, m, create)


def occupations(m, use_numba=None):
    if USE_NUMBA if use_numba is None else (use_numba and nb is not None):
        return _occupations_jit(m)
    return occupations_numpy(m)
