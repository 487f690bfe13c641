import math

import pytest
from hypothesis import given, settings, strategies as st

from shannon2d.dyadic import Dyadic, parse_dyadic
from shannon2d.testfn import (
    ModeExpansion,
    OverlapError,
    StepProfile,
    TensorSum2D,
    dilate,
    inner_product,
    mode_coefficient,
    norm_sq,
)

D = parse_dyadic
Q, H = D("1/4"), D("1/2")


def band(lo, hi, amp=1.0):
    return StepProfile.of((D(lo), D(hi), amp))


def test_norm_sq_examples():
    f = TensorSum2D.single(band("1/4", "1/2"))
    assert norm_sq(f) == 0.25
    g = f + TensorSum2D.single(band("1/4", "1/2"), (0, 1))
    assert norm_sq(g) == 0.5
    assert norm_sq(TensorSum2D.zero()) == 0


def test_inner_product_examples():
    f = TensorSum2D.single(band("1/4", "1/2"))
    assert inner_product(f, f) == 0.25
    assert inner_product(f, TensorSum2D.single(band("1/4", "1/2"), (0, 1))) == 0
    assert inner_product(TensorSum2D.single(band("0", "1/4")), f) == 0


def test_mode_coefficient_examples():
    e00 = ModeExpansion.single(0, 0)
    assert mode_coefficient(e00, 0, 0) == 1
    assert mode_coefficient(e00, 3, -2) == 0
    f2 = ModeExpansion({(1, 1): 2.0, (0, 0): 1j})
    assert mode_coefficient(f2, 1, 1) == 2


def test_overlap_rejected():
    with pytest.raises(OverlapError):
        StepProfile.of((0, H), (Q, 1))
    StepProfile.of((0, Q), (Q, H))


def test_overlapping_terms_refined():
    f = TensorSum2D.single(band("0", "1/2")) + TensorSum2D.single(band("1/4", "1"), amp=1j)
    # (0,1/4]: 1, (1/4,1/2]: 1+i, (1/2,1]: i
    assert norm_sq(f) == pytest.approx(0.25 + 2 * 0.25 + 0.5, abs=0)


def test_json_roundtrip():
    f = TensorSum2D(((1 + 2j, StepProfile.of((-H, -Q, 0.5j), (Q, H)), (2, -1)),))
    g = TensorSum2D.from_json(f.to_json())
    assert g.to_json() == f.to_json()
    assert set(f.to_json()["terms"][0]) == {"amp", "mode", "profile"}
    m = ModeExpansion({(0, 1): 1 - 1j})
    assert ModeExpansion.from_json(m.to_json()) == m
    p = StepProfile.of((Q, H, 2.0))
    assert StepProfile.from_json(p.to_json()) == p


def test_dilate_preserves_norm():
    f = TensorSum2D.single(StepProfile.of((D("3/16"), D("5/8"), 1 + 1j)), (1, 0))
    for j in (-3, 1, 2):
        assert norm_sq(dilate(f, j)) == pytest.approx(norm_sq(f), rel=1e-15)


pts = st.integers(min_value=-16, max_value=16)
amps = st.complex_numbers(max_magnitude=4, allow_nan=False, allow_infinity=False)
modes = st.tuples(st.integers(-1, 1), st.integers(-1, 1))


@st.composite
def tensors(draw):
    terms = []
    for _ in range(draw(st.integers(0, 4))):
        a, b = sorted(draw(st.lists(pts, min_size=2, max_size=2, unique=True)))
        terms.append((draw(amps), StepProfile.of((Dyadic(a, -3), Dyadic(b, -3))), draw(modes)))
    return TensorSum2D(tuple(terms))


@settings(max_examples=60, deadline=None)
@given(tensors(), tensors())
def test_parallelogram(f, g):
    lhs = norm_sq(f + g) + norm_sq(f - g)
    rhs = 2 * norm_sq(f) + 2 * norm_sq(g)
    assert abs(lhs - rhs) <= 1e-12 * (1 + rhs)


@settings(max_examples=60, deadline=None)
@given(tensors(), tensors(), tensors(), amps)
def test_sesquilinear(f, g, h, c):
    ff = inner_product(f, f)
    assert ff.imag == 0 and ff.real >= 0 and abs(ff.real - norm_sq(f)) <= 1e-12 * (1 + ff.real)
    assert abs(inner_product(f, g) - inner_product(g, f).conjugate()) <= 1e-12 * (1 + abs(inner_product(f, g)))
    lhs = inner_product(f * c + g, h)
    rhs = c * inner_product(f, h) + inner_product(g, h)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))
