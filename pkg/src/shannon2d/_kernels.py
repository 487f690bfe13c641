"""Hot numeric loops, compiled with numba when available.

Set ``SHANNON2D_BACKEND=numpy`` to force the pure-numpy path; both paths
compute the same quantities and are cross-checked in the test suite.

Integer kernels (tile hits, box overlaps) work on coordinates already scaled
to a common dyadic grid, so their decisions are exact.
"""
from __future__ import annotations

import math
import os
from types import SimpleNamespace

import numpy as np

try:
    import numba
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAVE_NUMBA = False

__all__ = [
    "BACKEND",
    "HAVE_NUMBA",
    "backend",
    "get",
    "band_space",
    "mode_sum",
    "tile_hits",
    "box_overlaps",
    "calderon_rows",
]

_REQUESTED = os.environ.get("SHANNON2D_BACKEND", "numba").strip().lower()
if _REQUESTED not in ("numba", "numpy"):
    raise ImportError(f"SHANNON2D_BACKEND must be 'numba' or 'numpy', got {_REQUESTED!r}")
BACKEND = "numba" if (_REQUESTED == "numba" and HAVE_NUMBA) else "numpy"

_SINC_CUT = 1e-8
_CHUNK = 2048


# --------------------------------------------------------------------------
# numpy path
# --------------------------------------------------------------------------

def _np_sinc(z):
    z = np.asarray(z, dtype=np.float64)
    small = np.abs(z) < _SINC_CUT
    safe = np.where(small, 1.0, z)
    return np.where(small, 1.0 - z * z / 6.0, np.sin(safe) / safe)


def _np_band_space(m, x):
    half = np.ldexp(1.0, -int(m) - 1)
    x = np.asarray(x, dtype=np.float64)
    return 2.0 * half * np.cos(3.0 * np.pi * half * x) * _np_sinc(np.pi * half * x)


def _np_mode_sum(x, bands, phases):
    x = np.asarray(x, dtype=np.float64)
    out = np.zeros(x.shape, dtype=np.complex128)
    for j in range(bands.shape[0]):
        out += phases[j] * _np_band_space(bands[j], x)
    return out


def _np_tile_hits(points, lo, hi):
    n = points.shape[0]
    counts = np.zeros(n, dtype=np.int64)
    first = np.full(n, -1, dtype=np.int64)
    second = np.full(n, -1, dtype=np.int64)
    for start in range(0, n, _CHUNK):
        p = points[start:start + _CHUNK, None, :]
        inside = np.all((lo[None, :, :] < p) & (p <= hi[None, :, :]), axis=2)
        c = inside.sum(axis=1)
        counts[start:start + _CHUNK] = c
        run = np.cumsum(inside, axis=1)
        has1 = c >= 1
        has2 = c >= 2
        f = np.argmax(inside & (run == 1), axis=1)
        s = np.argmax(inside & (run == 2), axis=1)
        first[start:start + _CHUNK] = np.where(has1, f, -1)
        second[start:start + _CHUNK] = np.where(has2, s, -1)
    return counts, first, second


def _np_box_overlaps(lo, hi, owner):
    t = lo.shape[0]
    pairs = []
    for start in range(0, t, 256):
        a_lo = lo[start:start + 256, None, :]
        a_hi = hi[start:start + 256, None, :]
        over = np.all(np.maximum(a_lo, lo[None]) < np.minimum(a_hi, hi[None]), axis=2)
        rows = np.arange(start, min(start + 256, t))[:, None]
        cols = np.arange(t)[None, :]
        over &= cols > rows
        over &= owner[rows] != owner[cols]
        i, j = np.nonzero(over)
        if i.size:
            pairs.append(np.stack([i + start, j], axis=1))
    if not pairs:
        return np.zeros((0, 2), dtype=np.int64)
    return np.concatenate(pairs).astype(np.int64)


def _np_calderon_rows(u, s, plo, phi, pamp, blo, bhi):
    """Row ``i`` is ``sum_u |c(u, s_i)|^2`` with
    ``c = sum_p amp_p int_{I_p(s)} exp(2 pi i u xi) d xi``."""
    out = np.zeros(s.shape[0], dtype=np.float64)
    for i in range(s.shape[0]):
        si = s[i]
        c = np.zeros(u.shape[0], dtype=np.complex128)
        for p in range(plo.shape[0]):
            for sgn in (1.0, -1.0):
                if sgn > 0:
                    blo_s, bhi_s = blo[p] / si, bhi[p] / si
                else:
                    blo_s, bhi_s = -bhi[p] / si, -blo[p] / si
                a = max(plo[p], blo_s)
                b = min(phi[p], bhi_s)
                if b <= a:
                    continue
                width = b - a
                c += pamp[p] * np.exp(1j * np.pi * u * (a + b)) * width * _np_sinc(np.pi * u * width)
        out[i] = np.sum(c.real * c.real + c.imag * c.imag)
    return out


NUMPY = SimpleNamespace(
    name="numpy",
    band_space=_np_band_space,
    mode_sum=_np_mode_sum,
    tile_hits=_np_tile_hits,
    box_overlaps=_np_box_overlaps,
    calderon_rows=_np_calderon_rows,
)


# --------------------------------------------------------------------------
# numba path
# --------------------------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _nb_sinc(z):
        if abs(z) < _SINC_CUT:
            return 1.0 - z * z / 6.0
        return np.sin(z) / z

    @njit(cache=True)
    def _nb_band_space_scalar(m, x):
        half = math.ldexp(1.0, -m - 1)
        return 2.0 * half * np.cos(3.0 * np.pi * half * x) * _nb_sinc(np.pi * half * x)

    @njit(cache=True)
    def _nb_band_space_arr(m, x):
        out = np.empty(x.shape[0], dtype=np.float64)
        for i in range(x.shape[0]):
            out[i] = _nb_band_space_scalar(m, x[i])
        return out

    def _nb_band_space(m, x):
        arr = np.asarray(x, dtype=np.float64)
        flat = np.ascontiguousarray(arr.reshape(-1))
        out = _nb_band_space_arr(int(m), flat).reshape(arr.shape)
        return out if arr.ndim else float(out)

    @njit(cache=True)
    def _nb_mode_sum_flat(x, bands, phases):
        out = np.zeros(x.shape[0], dtype=np.complex128)
        for i in range(x.shape[0]):
            acc = 0j
            for j in range(bands.shape[0]):
                acc += phases[j] * _nb_band_space_scalar(bands[j], x[i])
            out[i] = acc
        return out

    def _nb_mode_sum(x, bands, phases):
        arr = np.asarray(x, dtype=np.float64)
        flat = np.ascontiguousarray(arr.reshape(-1))
        return _nb_mode_sum_flat(flat, bands, phases).reshape(arr.shape)

    @njit(cache=True)
    def _nb_tile_hits(points, lo, hi):
        n = points.shape[0]
        t = lo.shape[0]
        counts = np.zeros(n, dtype=np.int64)
        first = np.full(n, -1, dtype=np.int64)
        second = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            for b in range(t):
                inside = True
                for d in range(4):
                    v = points[i, d]
                    if not (lo[b, d] < v and v <= hi[b, d]):
                        inside = False
                        break
                if inside:
                    if counts[i] == 0:
                        first[i] = b
                    elif counts[i] == 1:
                        second[i] = b
                    counts[i] += 1
        return counts, first, second

    @njit(cache=True)
    def _nb_overlap(lo, hi, i, j):
        for d in range(lo.shape[1]):
            a = lo[i, d] if lo[i, d] > lo[j, d] else lo[j, d]
            b = hi[i, d] if hi[i, d] < hi[j, d] else hi[j, d]
            if not a < b:
                return False
        return True

    @njit(cache=True)
    def _nb_box_overlaps(lo, hi, owner):
        t = lo.shape[0]
        count = 0
        for i in range(t):
            for j in range(i + 1, t):
                if owner[i] != owner[j] and _nb_overlap(lo, hi, i, j):
                    count += 1
        out = np.empty((count, 2), dtype=np.int64)
        c = 0
        for i in range(t):
            for j in range(i + 1, t):
                if owner[i] != owner[j] and _nb_overlap(lo, hi, i, j):
                    out[c, 0] = i
                    out[c, 1] = j
                    c += 1
        return out

    @njit(cache=True)
    def _nb_calderon_rows(u, s, plo, phi, pamp, blo, bhi):
        nu = u.shape[0]
        out = np.zeros(s.shape[0], dtype=np.float64)
        c = np.empty(nu, dtype=np.complex128)
        for i in range(s.shape[0]):
            si = s[i]
            for q in range(nu):
                c[q] = 0j
            for p in range(plo.shape[0]):
                for sgn in range(2):
                    if sgn == 0:
                        blo_s = blo[p] / si
                        bhi_s = bhi[p] / si
                    else:
                        blo_s = -bhi[p] / si
                        bhi_s = -blo[p] / si
                    a = plo[p] if plo[p] > blo_s else blo_s
                    b = phi[p] if phi[p] < bhi_s else bhi_s
                    if b <= a:
                        continue
                    width = b - a
                    mid = a + b
                    for q in range(nu):
                        c[q] += pamp[p] * np.exp(1j * np.pi * u[q] * mid) * width * _nb_sinc(np.pi * u[q] * width)
            acc = 0.0
            for q in range(nu):
                acc += c[q].real * c[q].real + c[q].imag * c[q].imag
            out[i] = acc
        return out

    NUMBA = SimpleNamespace(
        name="numba",
        band_space=_nb_band_space,
        mode_sum=_nb_mode_sum,
        tile_hits=_nb_tile_hits,
        box_overlaps=_nb_box_overlaps,
        calderon_rows=_nb_calderon_rows,
    )
else:  # pragma: no cover
    NUMBA = None


def get(name: str) -> SimpleNamespace:
    """Kernel namespace for ``'numba'`` or ``'numpy'``."""
    if name == "numba":
        if NUMBA is None:
            raise RuntimeError("numba is not installed")
        return NUMBA
    if name == "numpy":
        return NUMPY
    raise ValueError(f"unknown backend {name!r}")


def backend() -> SimpleNamespace:
    return get(BACKEND)


def band_space(m, x):
    return backend().band_space(m, x)


def mode_sum(x, bands, phases):
    return backend().mode_sum(x, bands, phases)


def tile_hits(points, lo, hi):
    return backend().tile_hits(points, lo, hi)


def box_overlaps(lo, hi, owner):
    return backend().box_overlaps(lo, hi, owner)


def calderon_rows(u, s, plo, phi, pamp, blo, bhi):
    return backend().calderon_rows(u, s, plo, phi, pamp, blo, bhi)
