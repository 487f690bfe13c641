from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from shannon2d.dyadic import Dyadic, DyadicInterval, parse_dyadic
from shannon2d.frames import ZeroFrequency
from shannon2d.generator import GeneratorSpec
from shannon2d.pairing import SPIRAL, PairingSpec
from shannon2d.tiling import (
    SymmetricBandSet,
    Tile,
    TileIndex,
    TooManyTiles,
    Window4D,
    covering_check,
    disjointness_and_measure,
    enumerate_tiles,
    export_slice,
    iter_points,
    locate_1d,
    locate_4d,
    tile_membership,
    write_slice_csv,
)

D = parse_dyadic


def frac_cell(x, step):
    """Unique n with x in (n*step, (n+1)*step], by Fraction search."""
    n = -(-x // step) - 1
    assert n * step < x <= (n + 1) * step
    return int(n)


def locate_oracle(spec, x1, x2, xi1, xi2):
    """Brute-force scan over k using Fraction inequalities only."""
    x1, x2, xi1, xi2 = (v.to_fraction() for v in (x1, x2, xi1, xi2))
    r = spec.pairing.pair(frac_cell(x2, 1), frac_cell(xi2, 1))
    hits = [k for k in range(-600, 600)
            if F(2) ** (-k) * F(2) ** (-r - 1) < abs(xi1) <= F(2) ** (-k) * F(2) ** (-r)]
    assert len(hits) == 1
    k = hits[0]
    return TileIndex(k, frac_cell(x1, F(2) ** k))


@pytest.mark.parametrize("x,xi,out", [("1/2", "3/4", (0, 0)), ("3", "3/8", (1, 1)), ("0", "1", (0, -1))])
def test_locate_1d_examples(x, xi, out):
    assert tuple(locate_1d(D(x), D(xi))) == out


def test_locate_1d_zero():
    with pytest.raises(ZeroFrequency):
        locate_1d(D("1"), Dyadic(0))


@pytest.mark.parametrize("pt,out", [
    (("1/2", "1/2", "3/8", "1/2"), (0, 0)),
    (("3", "1/2", "3/16", "1/2"), (1, 1)),
    # r = 2 and |xi1| in (1/16, 1/8] give k = 1, confirmed by the brute-force oracle
    (("1/2", "3/2", "3/32", "1/2"), (1, 0)),
])
def test_locate_4d_examples(spiral_spec, pt, out):
    pt = tuple(D(v) for v in pt)
    assert tuple(locate_4d(spiral_spec, *pt)) == out
    assert tuple(locate_oracle(spiral_spec, *pt)) == out
    assert tile_membership(spiral_spec, TileIndex(*out), pt)


def test_locate_4d_zero(spiral_spec):
    with pytest.raises(ZeroFrequency):
        locate_4d(spiral_spec, D("1/2"), D("1/2"), Dyadic(0), D("1/2"))


def test_membership_examples(spiral_spec):
    assert not tile_membership(spiral_spec, TileIndex(0, 0), (D("3/2"), D("1/2"), D("3/8"), D("1/2")))
    assert not tile_membership(spiral_spec, TileIndex(0, 0), (D("1/2"), D("1/2"), Dyadic(0), D("1/2")))
    # r = 1 is beyond a band cutoff of 0 only if M < 1; M = 1 keeps it
    assert tile_membership(spiral_spec, TileIndex(0, 0), (D("1/2"), D("1/2"), D("3/8"), D("1/2")), M=1)
    # (1, 0) carries r = 2, dropped by M = 1
    assert not tile_membership(spiral_spec, TileIndex(1, 0), (D("1/2"), D("3/2"), D("3/32"), D("1/2")), M=1)


coord = st.builds(lambda n, e: Dyadic(n, e), st.integers(-2 ** 20, 2 ** 20), st.integers(-12, 2))
small = st.builds(lambda n, e: Dyadic(n, e), st.integers(-2 ** 8, 2 ** 8), st.integers(-8, -2))
nonzero = coord.filter(lambda d: not d.is_zero())


@settings(max_examples=300, deadline=None)
@given(coord, st.integers(-6, 6).map(lambda v: Dyadic(2 * v + 1, -1)), nonzero,
       st.integers(-6, 6).map(lambda v: Dyadic(2 * v + 1, -1)))
def test_locate_matches_oracle(x1, x2, xi1, xi2):
    spec = GeneratorSpec()
    idx = locate_4d(spec, x1, x2, xi1, xi2)
    assert idx == locate_oracle(spec, x1, x2, xi1, xi2)
    assert tile_membership(spec, idx, (x1, x2, xi1, xi2), M=10 ** 6)
    for dk, dm in [(0, 1), (0, -1), (1, 0), (-1, 0)]:
        assert not tile_membership(spec, TileIndex(idx.k + dk, idx.m + dm), (x1, x2, xi1, xi2), M=10 ** 6)


@settings(max_examples=200, deadline=None)
@given(coord, small, nonzero, small, st.integers(-20, 20))
def test_scaling_covariance(x1, x2, xi1, xi2, j):
    spec = GeneratorSpec()
    k, m = locate_4d(spec, x1, x2, xi1, xi2)
    assert tuple(locate_4d(spec, x1.scale2(j), x2, xi1.scale2(-j), xi2)) == (k + j, m)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.integers(-60, 60))
def test_band_set_identities(r, k):
    s = SymmetricBandSet(r)
    assert s.length() == Dyadic(1, -r)
    assert sum((p.length() for p in s.pieces()), Dyadic(0)) == Dyadic(1, -r)
    scaled = tuple(p.scale2(-k) for p in s.pieces())
    assert scaled == SymmetricBandSet(r + k).pieces() == s.scaled(k).pieces()
    other = SymmetricBandSet(r + 1)
    for p in s.pieces():
        for q in other.pieces():
            assert not p.intersect(q)


def test_covering_unit(spiral_spec):
    rep = covering_check(spiral_spec, Window4D.unit(), 100_000, seed=7)
    assert rep.passed, rep.params["violations"]
    assert rep.params["checked"] == 100_000 and rep.params["skipped_zero"] == 0


def test_covering_straddling_zero(spiral_spec):
    w = Window4D((-1, 1), (-1, 1), (Dyadic(-1, -20), Dyadic(1, -20)), (-1, 1))
    rep = covering_check(spiral_spec, w, 5000, seed=3, resolution=21)
    assert rep.passed
    assert rep.params["skipped_zero"] > 0
    assert rep.params["skipped_zero"] + rep.params["checked"] + rep.params["beyond_cutoff"] == 5000


def test_covering_zero_only_window(spiral_spec):
    w = Window4D((-1, 1), (-1, 1), (0, 0), (-1, 1))
    assert w.only_zero_frequency()
    rep = covering_check(spiral_spec, w, 10, seed=0)
    assert rep.passed and rep.params["samples"] == 0


def _duplicate_table():
    cells = [SPIRAL.unpair(m) for m in range(1, 200)]
    cells[4] = cells[0]  # (0,0) now carries both 1 and 5
    return GeneratorSpec(PairingSpec.from_table(cells))


def test_covering_detects_duplicate_table():
    spec = _duplicate_table()
    rep = covering_check(spec, Window4D.unit(), 5000, seed=1)
    assert not rep.passed
    assert rep.params["doubly_covered"] > 0
    assert any(v["kind"] == "doubly-covered" for v in rep.params["violations"])
    assert not disjointness_and_measure(spec, Window4D.unit(), 20).passed


def test_disjointness_cube(spiral_spec):
    w = Window4D((0, 1), (0, 1), (0, Dyadic(1, -1)), (0, 1))
    rep = disjointness_and_measure(spiral_spec, w, 20)
    p = rep.params
    assert rep.passed and p["overlap_pairs"] == 0
    assert D(p["sum_measure"]) == Dyadic(1, -1) - Dyadic(1, -21)
    assert D(p["tail"]) == Dyadic(1, -21)


def test_disjointness_small_cutoff(spiral_spec):
    rep = disjointness_and_measure(spiral_spec, Window4D.unit(), 1)
    assert rep.passed
    assert D(rep.params["tail"]) > D(rep.params["sum_measure"])


@settings(max_examples=25, deadline=None)
@given(st.integers(-3, 2), st.integers(-3, 2), st.integers(1, 3), st.integers(-2, 1), st.integers(1, 12))
def test_measure_additivity(a, b, w, c, M):
    win = Window4D((Dyadic(a, -1), Dyadic(a + w, -1)), (b, b + w), (Dyadic(c, -3), Dyadic(c + 1, -3)),
                   (Dyadic(a, -2), Dyadic(a + w, -2)))
    rep = disjointness_and_measure(GeneratorSpec(), win, M)
    assert rep.passed
    p = rep.params
    assert D(p["sum_measure"]) + D(p["tail"]) == win.measure()


def test_adjacent_tiles_disjoint():
    a = Tile(0, 0, 1, 0, 0)
    b = Tile(0, 1, 1, 0, 0)
    assert a.x1().hi == b.x1().lo
    assert a.intersect_measure(b) == Dyadic(0)
    assert a.intersect_measure(a) == a.measure_in(Window4D((0, 1), (0, 1), (-1, 1), (0, 1)))


def test_enumeration_limit(spiral_spec):
    with pytest.raises(TooManyTiles):
        enumerate_tiles(spiral_spec, Window4D.unit(), 20, max_tiles=10)


def test_export_slice_r1(spiral_spec):
    rows = export_slice(spiral_spec, D("1/2"), D("1/2"), (-4, 4), (Dyadic(-1, -1), Dyadic(1, -1)), M=8)
    assert rows and all(r["r"] == 1 for r in rows)
    for r in rows:
        k = r["k"]
        lo, hi = (r["xi1_lo"], r["xi1_hi"]) if r["xi1_lo"].sign() > 0 else (-r["xi1_hi"], -r["xi1_lo"])
        assert (lo, hi) == (Dyadic(1, -k - 2), Dyadic(1, -k - 1))
        assert r["x1_hi"] - r["x1_lo"] == Dyadic(1, k)


def test_export_slice_r2(spiral_spec):
    rows = export_slice(spiral_spec, D("3/2"), D("1/2"), (-4, 4), (Dyadic(-1, -1), Dyadic(1, -1)), M=8)
    assert rows and all(r["r"] == 2 for r in rows)
    for r in rows:
        hi = abs(r["xi1_hi"]) if r["xi1_lo"].sign() > 0 else abs(r["xi1_lo"])
        assert hi == Dyadic(1, -r["k"] - 2)


def test_export_slice_empty(spiral_spec):
    assert export_slice(spiral_spec, D("1/2"), D("1/2"), (1, 1), (-1, 1)) == []
    text = write_slice_csv([])
    assert text.strip() == "k,m,x1_lo,x1_hi,xi1_lo,xi1_hi,r"


def test_sample_points_deterministic():
    a = list(iter_points(Window4D.unit(), 50, seed=5))
    assert a == list(iter_points(Window4D.unit(), 50, seed=5))
    assert all(Window4D.unit().xi1.contains(p[2]) for p in a)


def test_covering_with_table(table_pairing):
    spec = GeneratorSpec(table_pairing)
    assert covering_check(spec, Window4D.unit(), 5000, seed=2).passed
    assert disjointness_and_measure(spec, Window4D.unit(), 20).passed
