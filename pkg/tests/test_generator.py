import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shannon2d.dyadic import Dyadic, parse_dyadic, pow2
from shannon2d.generator import (
    BandIndicator,
    GeneratorSpec,
    LatticeMode,
    band_of,
    band_space,
    mode_tail,
    psiD_hat,
    psiD_hat_norm_sq,
    psiD_space,
    psiD_space_grid,
    shannon_hat,
    shannon_wavelet_fourier,
)
from shannon2d.pairing import SPIRAL

D = parse_dyadic


def band_oracle(s: Fraction):
    """Scan the bands one by one with rational comparisons."""
    a = abs(s)
    for m in range(1, 400):
        if Fraction(1, 2 ** (m + 1)) < a <= Fraction(1, 2 ** m):
            return m
    return None


@pytest.mark.parametrize("s,m", [("3/8", 1), ("-1/16", 4), ("3/4", None), ("0", None), ("1/2", 1)])
def test_band_of_examples(s, m):
    assert band_of(D(s)) == m


@pytest.mark.parametrize("s,y,v", [("3/8", "1/2", 1), ("3/8", "3/2", 0), ("3/16", "3/2", 1)])
def test_psiD_hat_examples(spiral_spec, s, y, v):
    assert psiD_hat(spiral_spec, D(s), D(y)) == v


def test_psiD_hat_phase(spiral_spec):
    # s in band 4 -> mode (0, 1): exp(2 pi i y) at y = 1/4 is i exactly
    assert psiD_hat(spiral_spec, D("3/64"), D("1/4")) == 1j


def test_psiD_space_examples(spiral_spec):
    v, tail = psiD_space(spiral_spec, 0.0, D("1/2"), L=0)
    assert v == 0.5
    oracle = math.fsum(2.0 ** -SPIRAL.pair(0, l) for l in range(-2000, 2001) if l != 0)
    assert abs(tail - oracle) <= 2.0 ** -900
    v1, _ = psiD_space(spiral_spec, 0.0, D("1/2"), L=1)
    assert v1 == 0.5 - 1 / 16 - 1 / 256
    assert v1.imag == 0


@pytest.mark.parametrize("M,val", [(1, Fraction(1, 2)), (10, Fraction(1023, 1024))])
def test_norm_sq_examples(spiral_spec, M, val):
    got, limit = psiD_hat_norm_sq(spiral_spec, M)
    assert got.to_fraction() == val and limit == 1


def test_norm_sq_all_M(any_spec):
    for M in range(1, 31):
        assert psiD_hat_norm_sq(any_spec, M)[0] == Dyadic(1) - pow2(-M)


@pytest.mark.parametrize("xi,v", [("3/4", 1), ("1/2", 0), ("-1", 1), ("-1/2", 0), ("1", 1), ("-3/4", 1), ("0", 0)])
def test_shannon_hat_examples(xi, v):
    assert shannon_hat(D(xi)) == v


def test_shannon_wavelet_fourier():
    assert shannon_wavelet_fourier(0, 1, D("3/4")) == -1j
    assert shannon_wavelet_fourier(2, 0, D("3/16")) == 2.0
    assert shannon_wavelet_fourier(0, 0, D("1/4")) == 0


@given(st.integers(min_value=1, max_value=1 << 60), st.integers(min_value=-120, max_value=10), st.booleans())
def test_band_of_matches_oracle(mant, exp, neg):
    s = Dyadic(-mant if neg else mant, exp)
    assert band_of(s) == band_oracle(s.to_fraction())


@given(st.integers(min_value=1, max_value=1 << 40), st.integers(min_value=-60, max_value=-2),
       st.integers(min_value=-(1 << 20), max_value=1 << 20))
def test_single_term(mant, exp, ymant):
    s = Dyadic(mant, exp)
    m = band_of(s)
    y = Dyadic(ymant, -10)
    vals = [psiD_hat(GeneratorSpec(), s, y + n) for n in range(-40, 41)]
    nonzero = [v for v in vals if v != 0]
    if m is None:
        assert not nonzero
    else:
        assert len(nonzero) <= 1
    assert all(abs(abs(v) - 1) < 1e-15 for v in nonzero)
    contains = [j for j in range(1, 70) if BandIndicator(j).contains(s)]
    assert contains == ([] if m is None else [m])


def test_band_space_matches_quadrature():
    # g_m(x) = int_{|s| in band} exp(2 pi i s x) ds, by a fine midpoint rule
    for m in (1, 3):
        lo, hi = 2.0 ** (-m - 1), 2.0 ** -m
        n = 20000
        s = lo + (np.arange(n) + 0.5) * (hi - lo) / n
        for x in (0.0, 0.7, 13.0, -5.25):
            quad = 2 * np.sum(np.cos(2 * np.pi * s * x)) * (hi - lo) / n
            assert abs(band_space(m, x) - quad) < 1e-7
    assert band_space(2, 0.0) == 0.25
    assert band_space(5, 1e-12) == pytest.approx(2.0 ** -5, rel=1e-15)


def test_space_fourier_consistency(spiral_spec):
    """Quadrature of the inverse transform of psi^D(., y) against the closed form."""
    y = D("1/4")
    x1 = 1.5
    M = 12
    total = 0j
    for m in range(1, M + 1):
        lo, hi = 2.0 ** (-m - 1), 2.0 ** -m
        n = 4000
        s = lo + (np.arange(n) + 0.5) * (hi - lo) / n
        val = psiD_hat(spiral_spec, Dyadic(3, -m - 2), y)
        total += val * 2 * np.sum(np.cos(2 * np.pi * s * x1)) * (hi - lo) / n
    ref, tail = psiD_space(spiral_spec, x1, y, L=40)
    omitted = math.fsum(2.0 ** -m for m in range(M + 1, 200))
    assert abs(total - ref) <= tail + omitted + 1e-6


def test_space_error_within_tail(spiral_spec):
    y = D("3/8")
    ref, _ = psiD_space(spiral_spec, 0.3, y, L=200)
    for L in (0, 1, 2, 4, 8):
        v, tail = psiD_space(spiral_spec, 0.3, y, L=L)
        assert abs(v - ref) <= tail
    tails = [mode_tail(SPIRAL, 0, L) for L in range(6)]
    assert all(b <= a for a, b in zip(tails, tails[1:]))


def test_space_grid_matches_pointwise(spiral_spec):
    xs = np.linspace(-3, 3, 13)
    vals, tail = psiD_space_grid(spiral_spec, xs, D("1/2"), L=3)
    for x, v in zip(xs, vals):
        p, t = psiD_space(spiral_spec, float(x), D("1/2"), L=3)
        assert abs(v - p) < 1e-15 and t == tail


def test_lattice_mode():
    e = LatticeMode(1, 2)
    assert e(D("3/2")) == 1 and e(D("5/4")) == -1 and e(D("1/2")) == 0
    assert e(D("9/8")) == pytest.approx(cmath.exp(2j * math.pi * 2 * 9 / 8))


def test_spec_validation():
    with pytest.raises(ValueError):
        GeneratorSpec(M=0)
    with pytest.raises(ValueError):
        GeneratorSpec(L=-1)
