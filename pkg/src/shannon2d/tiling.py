"""Phase-space tilings: the 1D Shannon tiling and the 4D hyperboloid-type one.

A 4D tile is indexed by ``(k, m)`` and by the band ``r = D(n, l)`` of the
``(x2, xi2)`` cell ``(n, n+1] x (l, l+1]`` it lives over:

    x1 in (2^k m, 2^k (m+1)],   |xi1| in 2^{-k} (2^{-r-1}, 2^{-r}],
    x2 in (n, n+1],             xi2 in (l, l+1].

All membership decisions are exact dyadic comparisons.  The brute-force hit
counter runs on float64 copies of the coordinates only after checking that
every coordinate converts exactly.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from . import _kernels
from .dyadic import (
    EMPTY,
    Dyadic,
    DyadicInterval,
    as_dyadic,
    cell_locate,
    exponent_locate,
    interval_intersect,
    pow2,
    unit_cell,
)
from .frames import ZeroFrequency
from .generator import GeneratorSpec
from .pairing import TableMiss

__all__ = [
    "SymmetricBandSet",
    "TileIndex",
    "Tile",
    "Window4D",
    "TilingReport",
    "TooManyTiles",
    "locate_1d",
    "locate_4d",
    "tile_membership",
    "enumerate_tiles",
    "covering_check",
    "disjointness_and_measure",
    "export_slice",
    "write_slice_csv",
    "SLICE_COLUMNS",
    "SAMPLE_RESOLUTION",
    "MAX_TILES",
]

SAMPLE_RESOLUTION = 30
MAX_TILES = 200_000
SLICE_COLUMNS = ("k", "m", "x1_lo", "x1_hi", "xi1_lo", "xi1_hi", "r")


class TooManyTiles(ValueError):
    pass


@dataclass(frozen=True)
class SymmetricBandSet:
    """``I_r = 2^{-r} I`` in the convention ``+-(2^{-r-1}, 2^{-r}]``.

    ``r`` may be any integer so that ``scaled`` is closed; the sets of the
    tiling use ``r >= 1``.
    """

    r: int

    def pieces(self) -> tuple[DyadicInterval, DyadicInterval]:
        pos = DyadicInterval(pow2(-self.r - 1), pow2(-self.r))
        return (pos.negate(), pos)

    def length(self) -> Dyadic:
        return pow2(-self.r)

    def contains(self, xi) -> bool:
        xi = as_dyadic(xi)
        return not xi.is_zero() and exponent_locate(abs(xi)) == -self.r

    def scaled(self, k: int) -> "SymmetricBandSet":
        """``2^{-k} I_r = I_{r+k}``."""
        return SymmetricBandSet(self.r + k)


@dataclass(frozen=True, order=True)
class TileIndex:
    k: int
    m: int

    def __iter__(self):
        return iter((self.k, self.m))


def locate_1d(x, xi) -> TileIndex:
    """Shannon tile ``(k, m)``: ``|xi|`` in ``(2^{-k-1}, 2^{-k}]``, ``x`` in ``(2^k m, 2^k (m+1)]``."""
    x, xi = as_dyadic(x), as_dyadic(xi)
    if xi.is_zero():
        raise ZeroFrequency("xi = 0 lies in no tile")
    k = -exponent_locate(abs(xi))
    return TileIndex(k, cell_locate(x, k))


def locate_4d(spec: GeneratorSpec, x1, x2, xi1, xi2) -> TileIndex:
    """The unique 4D tile holding the point."""
    x1, x2, xi1, xi2 = (as_dyadic(v) for v in (x1, x2, xi1, xi2))
    if xi1.is_zero():
        raise ZeroFrequency("xi1 = 0 lies in no tile")
    r = spec.pairing.pair(unit_cell(x2), unit_cell(xi2))
    k = -r - exponent_locate(abs(xi1))
    return TileIndex(k, cell_locate(x1, k))


def tile_membership(spec: GeneratorSpec, idx, point: Sequence, M: Optional[int] = None) -> bool:
    """Direct evaluation of the tile indicator at ``point = (x1, x2, xi1, xi2)``.

    Only the ``(n, l)`` term picked by the cells of ``x2`` and ``xi2`` can be
    nonzero; the rest is inequality tests.  ``M`` drops tiles with ``r > M``.
    """
    k, m = idx
    x1, x2, xi1, xi2 = (as_dyadic(v) for v in point)
    try:
        r = spec.pairing.pair(unit_cell(x2), unit_cell(xi2))
    except TableMiss:
        return False
    if M is not None and r > M:
        return False
    a = abs(xi1)
    if not (pow2(-r - k - 1) < a and a <= pow2(-r - k)):
        return False
    return pow2(k) * m < x1 and x1 <= pow2(k) * (m + 1)


@dataclass(frozen=True)
class Tile:
    """A 4D tile with its cell ``(n, l)`` and band ``r``."""

    k: int
    m: int
    r: int
    n: int
    l: int

    @property
    def index(self) -> TileIndex:
        return TileIndex(self.k, self.m)

    def x1(self) -> DyadicInterval:
        return DyadicInterval(pow2(self.k) * self.m, pow2(self.k) * (self.m + 1))

    def x2(self) -> DyadicInterval:
        return DyadicInterval(self.n, self.n + 1)

    def xi2(self) -> DyadicInterval:
        return DyadicInterval(self.l, self.l + 1)

    def xi1(self) -> tuple[DyadicInterval, DyadicInterval]:
        return SymmetricBandSet(self.r + self.k).pieces()

    def boxes(self) -> list[tuple[DyadicInterval, ...]]:
        """The two axis-parallel boxes ``(x1, x2, xi1, xi2)``, one per sign of ``xi1``."""
        return [(self.x1(), self.x2(), p, self.xi2()) for p in self.xi1()]

    def hit_box(self) -> tuple[DyadicInterval, ...]:
        """The box tested against ``(x1, x2, |xi1|, xi2)``.

        Membership follows ``|xi1|`` in ``(a, b]``, so the negative part is
        ``[-b, -a)``; folding ``xi1`` keeps that exact.
        """
        return (self.x1(), self.x2(), self.xi1()[1], self.xi2())

    def contains(self, point) -> bool:
        return _in_box(self.hit_box(), _fold(point))

    def intersect_measure(self, other: "Tile", window: Optional["Window4D"] = None) -> Dyadic:
        """Exact 4D measure of ``self & other`` (optionally ``& window``)."""
        total = Dyadic(0)
        for a in self.boxes():
            for b in other.boxes():
                box = [interval_intersect(p, q) for p, q in zip(a, b)]
                if window is not None:
                    box = [interval_intersect(p, q) for p, q in zip(box, window.axes())]
                total = total + _box_measure(box)
        return total

    def measure_in(self, window: "Window4D") -> Dyadic:
        total = Dyadic(0)
        for box in self.boxes():
            total = total + _box_measure([interval_intersect(p, q) for p, q in zip(box, window.axes())])
        return total

    def to_json(self) -> dict:
        return {"k": self.k, "m": self.m, "r": self.r, "n": self.n, "l": self.l}


def _fold(point) -> tuple:
    x1, x2, xi1, xi2 = (as_dyadic(v) for v in point)
    return (x1, x2, abs(xi1), xi2)


def _in_box(box, point) -> bool:
    return all(iv.contains(v) for iv, v in zip(box, point))


def _box_measure(box) -> Dyadic:
    out = Dyadic(1)
    for iv in box:
        if not iv:
            return Dyadic(0)
        out = out * iv.length()
    return out


def _parse_iv(v):
    if isinstance(v, (DyadicInterval, type(EMPTY))):
        return v
    lo, hi = v
    return DyadicInterval.make(lo, hi)


@dataclass(frozen=True)
class Window4D:
    """Bounded window ``x1 x x2 x xi1 x xi2`` of half-open dyadic intervals.

    A ``xi1`` interval that contains 0 is handled by splitting it at 0; the
    single point ``xi1 = 0`` belongs to no tile.
    """

    x1: object
    x2: object
    xi1: object
    xi2: object

    def __post_init__(self):
        for name in ("x1", "x2", "xi1", "xi2"):
            object.__setattr__(self, name, _parse_iv(getattr(self, name)))

    @classmethod
    def unit(cls) -> "Window4D":
        """``x1, x2, xi2`` in ``(-1, 1]`` and ``xi1`` in ``(1/64, 1/2]``."""
        return cls((-1, 1), (-1, 1), (Dyadic(1, -6), Dyadic(1, -1)), (-1, 1))

    def axes(self) -> tuple:
        return (self.x1, self.x2, self.xi1, self.xi2)

    def is_empty(self) -> bool:
        return not all(self.axes())

    def measure(self) -> Dyadic:
        return _box_measure(self.axes())

    def xi1_abs_range(self) -> Optional[tuple[Dyadic, Dyadic]]:
        """``(inf |xi1|, sup |xi1|)`` over the window, or ``None`` if empty."""
        iv = self.xi1
        if not iv:
            return None
        if iv.lo.sign() >= 0:
            return iv.lo, iv.hi
        if iv.hi.sign() <= 0:
            return -iv.hi, -iv.lo
        return Dyadic(0), max(-iv.lo, iv.hi)

    def only_zero_frequency(self) -> bool:
        """True when no point of the window has ``xi1 != 0``."""
        return not self.xi1

    def to_json(self) -> dict:
        return {name: iv.to_json() for name, iv in zip(("x1", "x2", "xi1", "xi2"), self.axes())}


def _cells(iv) -> range:
    """Unit cells ``n`` with ``(n, n+1]`` meeting ``iv``."""
    if not iv:
        return range(0)
    return range(unit_cell(iv.lo) + 1 if iv.lo.is_integer() else unit_cell(iv.lo),
                  unit_cell(iv.hi) + 1)


def _x1_cells(iv: DyadicInterval, k: int) -> range:
    lo = iv.lo.scale2(-k)
    return range(lo.floor(), cell_locate(iv.hi, k) + 1)


def _abs_bands(window: Window4D, M: int) -> list[int]:
    """Absolute bands ``j <= M`` (``|xi1|`` in ``(2^{-j-1}, 2^{-j}]``) meeting the window."""
    rng = window.xi1_abs_range()
    if rng is None:
        return []
    lo, hi = rng
    j_min = -exponent_locate(hi)
    j_max = M if lo.is_zero() else min(M, -exponent_locate(lo))
    out = []
    for j in range(j_min, j_max + 1):
        band = SymmetricBandSet(j)
        if any(interval_intersect(p, window.xi1) for p in band.pieces()):
            out.append(j)
    return out


def enumerate_tiles(spec: GeneratorSpec, window: Window4D, M: Optional[int] = None,
                    max_tiles: int = MAX_TILES) -> list[Tile]:
    """Tiles with ``r <= M`` and absolute band ``j = r + k <= M`` meeting the window.

    Driven by the table of ``D``: each value ``r`` gives its cell ``(n, l)``,
    so a table that repeats a cell yields two tiles over it.
    """
    M = spec.M if M is None else M
    if window.is_empty():
        return []
    limit = M if spec.pairing.size is None else min(M, spec.pairing.size)
    bands = _abs_bands(window, M)
    tiles: list[Tile] = []
    for r, n, l in spec.pairing.enumerate(limit):
        if not (interval_intersect(DyadicInterval(n, n + 1), window.x2)
                and interval_intersect(DyadicInterval(l, l + 1), window.xi2)):
            continue
        for j in bands:
            k = j - r
            cells = _x1_cells(window.x1, k)
            if len(tiles) + len(cells) > max_tiles:
                raise TooManyTiles(f"more than {max_tiles} tiles meet the window")
            for m in cells:
                tile = Tile(k, m, r, n, l)
                if interval_intersect(tile.x1(), window.x1):
                    tiles.append(tile)
    return tiles


def _tail_measure(spec: GeneratorSpec, window: Window4D, M: int) -> Dyadic:
    """Window measure not reached by tiles with ``r <= M`` and ``j <= M``."""
    if window.is_empty():
        return Dyadic(0)
    wx1 = window.x1.length()
    near0 = DyadicInterval(-pow2(-M - 1), pow2(-M - 1))
    low = interval_intersect(window.xi1, near0).length()
    full = window.xi1.length()
    limit = M if spec.pairing.size is None else min(M, spec.pairing.size)
    tail = Dyadic(0)
    for n in _cells(window.x2):
        cx = interval_intersect(DyadicInterval(n, n + 1), window.x2).length()
        for l in _cells(window.xi2):
            cl = interval_intersect(DyadicInterval(l, l + 1), window.xi2).length()
            try:
                r = spec.pairing.pair(n, l)
            except TableMiss:
                r = None
            reached = r is not None and r <= limit
            tail = tail + wx1 * cx * cl * (low if reached else full)
    return tail


@dataclass
class TilingReport:
    check: str
    passed: bool
    params: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"check": self.check, "pass": self.passed, **self.params}


def _exact_float_array(values: list[list[Dyadic]]) -> Optional[np.ndarray]:
    """Float64 array of the values, or ``None`` if any of them would round."""
    out = np.empty((len(values), len(values[0]) if values else 0), dtype=np.float64)
    for i, row in enumerate(values):
        for d, v in enumerate(row):
            if v.mant.bit_length() > 53 or not -1000 < v.exp < 1000:
                return None
            out[i, d] = float(v)
    return out


def _tile_boxes(tiles: list[Tile]):
    boxes = [t.hit_box() for t in tiles]
    return [[iv.lo for iv in b] for b in boxes], [[iv.hi for iv in b] for b in boxes]


def _draw(rng: np.random.Generator, iv: DyadicInterval, n: int, res: int) -> list[Dyadic]:
    """``n`` uniform points of the ``2^{-res}`` grid inside ``(lo, hi]``."""
    lo = iv.lo.scale2(res).floor()
    hi = iv.hi.scale2(res).floor()
    ints = rng.integers(lo + 1, hi + 1, size=n, endpoint=False) if hi - lo < 2 ** 62 else None
    if ints is None:  # pragma: no cover - windows wider than 2^32 at 2^-30 resolution
        raise ValueError("window too wide for the sampling grid")
    return [Dyadic(int(v), -res) for v in ints]


def covering_check(spec: GeneratorSpec, window: Window4D, samples: int, seed: int,
                   M: Optional[int] = None, resolution: int = SAMPLE_RESOLUTION,
                   max_report: int = 10) -> TilingReport:
    """Every sampled point lies in exactly one enumerated tile, the located one.

    Points are drawn on the ``2^{-resolution}`` grid of the window; those
    with ``xi1 = 0`` are skipped and counted.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    M = spec.M if M is None else M
    for iv in window.axes():
        if iv and (iv.lo.scale2(resolution).ceil() != iv.lo.scale2(resolution).floor()
                   or iv.hi.scale2(resolution).ceil() != iv.hi.scale2(resolution).floor()):
            raise ValueError(f"window endpoint of {iv} is finer than 2^-{resolution}")
    if window.is_empty():
        return TilingReport("covering", True, {"samples": 0, "skipped_zero": 0, "violations": []})
    rng = np.random.default_rng(seed)
    cols = [_draw(rng, iv, samples, resolution) for iv in window.axes()]
    points = list(zip(*cols))
    tiles = enumerate_tiles(spec, window, M)
    key = {(t.k, t.m, t.r): i for i, t in enumerate(tiles)}

    skipped = 0
    beyond = 0
    violations: list[dict] = []
    checked_pts: list[tuple] = []
    expected: list[int] = []

    def flag(kind, pt, **extra):
        violations.append({"kind": kind, "point": [str(v) for v in pt], **extra})

    for pt in points:
        x1, x2, xi1, xi2 = pt
        if xi1.is_zero():
            skipped += 1
            continue
        try:
            idx = locate_4d(spec, *pt)
        except TableMiss:
            flag("uncovered", pt)
            continue
        if not tile_membership(spec, idx, pt):
            flag("membership", pt, tile=[idx.k, idx.m])
            continue
        r = spec.pairing.pair(unit_cell(x2), unit_cell(xi2))
        if r > M or idx.k + r > M:
            beyond += 1
            continue
        tid = key.get((idx.k, idx.m, r))
        if tid is None:
            flag("not-enumerated", pt, tile=[idx.k, idx.m])
            continue
        checked_pts.append(pt)
        expected.append(tid)

    multi = 0
    if checked_pts:
        lo, hi = _tile_boxes(tiles)
        folded = [_fold(p) for p in checked_pts]
        arr_p = _exact_float_array([list(p) for p in folded])
        arr_lo = _exact_float_array(lo)
        arr_hi = _exact_float_array(hi)
        if arr_p is not None and arr_lo is not None and arr_hi is not None:
            counts, first, second = _kernels.tile_hits(arr_p, arr_lo, arr_hi)
            counts, first, second = counts.tolist(), first.tolist(), second.tolist()
        else:
            counts, first, second = _exact_hits(folded, tiles)
        for i, pt in enumerate(checked_pts):
            if counts[i] == 1 and first[i] == expected[i]:
                continue
            if counts[i] >= 2:
                multi += 1
                a, b = tiles[first[i]], tiles[second[i]]
                flag("doubly-covered", pt, tiles=[a.to_json(), b.to_json()], hits=int(counts[i]))
            elif counts[i] == 0:
                flag("uncovered", pt)
            else:
                flag("wrong-tile", pt, tile=tiles[first[i]].to_json())
    params = {
        "samples": samples,
        "seed": seed,
        "M": M,
        "resolution": resolution,
        "skipped_zero": skipped,
        "beyond_cutoff": beyond,
        "checked": len(checked_pts),
        "tiles": len(tiles),
        "doubly_covered": multi,
        "n_violations": len(violations),
        "violations": violations[:max_report],
        "window": window.to_json(),
        "backend": _kernels.BACKEND,
    }
    return TilingReport("covering", not violations, params)


def _exact_hits(points, tiles):
    """Pure-Python fallback of the hit counter for coordinates floats cannot hold."""
    boxes = [t.hit_box() for t in tiles]
    counts, first, second = [], [], []
    for pt in points:
        hits = [b for b, box in enumerate(boxes) if _in_box(box, pt)]
        counts.append(len(hits))
        first.append(hits[0] if hits else -1)
        second.append(hits[1] if len(hits) > 1 else -1)
    return counts, first, second


def disjointness_and_measure(spec: GeneratorSpec, window: Window4D,
                             M: Optional[int] = None) -> TilingReport:
    """Pairwise overlaps and exact measure balance of the tiles meeting ``window``.

    Passes iff no two tiles overlap in positive measure and
    ``sum(|tile & window|) + tail == |window|`` exactly, where ``tail`` is
    the part of the window over cells with ``r > M`` plus ``|xi1| <= 2^{-M-1}``.
    """
    M = spec.M if M is None else M
    tiles = enumerate_tiles(spec, window, M)
    measures = [t.measure_in(window) for t in tiles]
    total = Dyadic(0)
    for v in measures:
        total = total + v
    tail = _tail_measure(spec, window, M)
    wm = window.measure()

    overlaps = []
    overlap_measure = Dyadic(0)
    if tiles:
        # tiles are symmetric in xi1, so overlaps show up in the folded boxes
        lo, hi = _tile_boxes(tiles)
        owner = np.arange(len(tiles), dtype=np.int64)
        arr_lo, arr_hi = _exact_float_array(lo), _exact_float_array(hi)
        if arr_lo is not None and arr_hi is not None:
            pairs = {(int(owner[i]), int(owner[j])) for i, j in _kernels.box_overlaps(arr_lo, arr_hi, owner)}
        else:
            pairs = {(a, b) for a in range(len(tiles)) for b in range(a + 1, len(tiles))
                     if tiles[a].intersect_measure(tiles[b]) != 0}
        for a, b in sorted(pairs):
            mu = tiles[a].intersect_measure(tiles[b], window)
            if mu != 0:
                overlaps.append({"tiles": [tiles[a].to_json(), tiles[b].to_json()], "measure": str(mu)})
                overlap_measure = overlap_measure + mu
    balanced = total + tail == wm
    params = {
        "M": M,
        "tiles": len(tiles),
        "overlap_pairs": len(overlaps),
        "overlap_measure": str(overlap_measure),
        "overlaps": overlaps[:10],
        "sum_measure": str(total),
        "tail": str(tail),
        "window_measure": str(wm),
        "balance": str(wm - total - tail),
        "window": window.to_json(),
    }
    return TilingReport("disjointness", bool(balanced and overlap_measure == 0), params)


def export_slice(spec: GeneratorSpec, x2, xi2, x1_window, xi1_window,
                 M: Optional[int] = None) -> list[dict]:
    """Rows of the ``(x1, xi1)`` slice through fixed ``(x2, xi2)``.

    One row per sign part of each tile meeting the slice window.  The slice
    is the 1D Shannon tiling shifted in scale by ``r = D(n, l)``.
    """
    M = spec.M if M is None else M
    x2, xi2 = as_dyadic(x2), as_dyadic(xi2)
    x1_window, xi1_window = _parse_iv(x1_window), _parse_iv(xi1_window)
    n, l = unit_cell(x2), unit_cell(xi2)
    window = Window4D(x1_window, DyadicInterval(n, n + 1), xi1_window, DyadicInterval(l, l + 1))
    rows = []
    for t in enumerate_tiles(spec, window, M):
        if (t.n, t.l) != (n, l):
            continue
        x1 = interval_intersect(t.x1(), x1_window)
        for p in t.xi1():
            cut = interval_intersect(p, xi1_window)
            if not (x1 and cut):
                continue
            rows.append({"k": t.k, "m": t.m, "x1_lo": t.x1().lo, "x1_hi": t.x1().hi,
                         "xi1_lo": p.lo, "xi1_hi": p.hi, "r": t.r})
    rows.sort(key=lambda row: (row["k"], row["m"], row["xi1_lo"].to_fraction()))
    return rows


def write_slice_csv(rows: list[dict], stream=None) -> str:
    """CSV text with header; dyadic endpoints are written as exact floats."""
    buf = stream if stream is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SLICE_COLUMNS)
    for row in rows:
        w.writerow([row["k"], row["m"], *(repr(float(row[c])) for c in SLICE_COLUMNS[2:6]), row["r"]])
    return buf.getvalue() if stream is None else ""


def iter_points(window: Window4D, samples: int, seed: int,
                resolution: int = SAMPLE_RESOLUTION) -> Iterator[tuple]:
    """The sample points :func:`covering_check` would draw."""
    rng = np.random.default_rng(seed)
    cols = [_draw(rng, iv, samples, resolution) for iv in window.axes()]
    return iter(zip(*cols))
