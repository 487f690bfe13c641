"""Trigonometric evaluation at exact dyadic arguments.

Phases are reduced modulo a full turn in exact arithmetic before any float
is formed, and quarter turns come back as exact 0/+-1 values.
"""
from __future__ import annotations

import cmath
import math

from .dyadic import Dyadic

_QUARTER = (1 + 0j, 1j, -1 + 0j, -1j)
SERIES_CUTOFF = 1e-8


def expi_turns(t: Dyadic) -> complex:
    """``exp(2 pi i t)``."""
    r = t.frac()
    q = r.scale2(2)
    if q.is_integer():
        return _QUARTER[q.floor()]
    return cmath.exp(2j * math.pi * float(r))


def sinpi(t: Dyadic) -> float:
    """``sin(pi t)`` with ``t`` reduced modulo 2 exactly."""
    r = t.scale2(-1).frac().scale2(1)
    h = r.scale2(1)
    if h.is_integer():
        return (0.0, 1.0, 0.0, -1.0)[h.floor()]
    return math.sin(math.pi * float(r))


def exp_integral(lo: Dyadic, hi: Dyadic, freq: Dyadic) -> complex:
    """``int_lo^hi exp(2 pi i freq xi) d xi`` in the stable midpoint form.

    ``(e^{i th2} - e^{i th1}) / (i w)`` is rewritten as
    ``e^{i (th1+th2)/2} * sin(pi freq L) / (pi freq)`` with ``L = hi - lo``;
    a two-term series replaces the ratio when ``|pi freq L|`` is tiny.
    """
    length = hi - lo
    if freq.is_zero():
        return complex(float(length))
    phase = expi_turns(freq * (lo + hi).scale2(-1))
    x = math.pi * float(freq * length)
    if abs(x) < SERIES_CUTOFF:
        ratio = float(length) * (1.0 - x * x / 6.0)
    else:
        ratio = sinpi(freq * length) / (math.pi * float(freq))
    return phase * ratio
