"""The Shannon wavelet and the two-dimensional generating function psi^D.

On the Fourier side in the first variable,

    psi^D(s^, y) = sum_{k,l} f_{D(k,l)}(s) e_{k,l}(y),

with ``f_m`` the indicator of ``|s|`` in ``(2^{-m-1}, 2^{-m}]`` and
``e_{k,l}(y) = 1_{(k,k+1]}(y) exp(2 pi i l y)``.  Because the band sets are
disjoint, at most one term is nonzero at any ``s``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

import numpy as np

from . import _kernels
from ._trig import expi_turns
from .dyadic import (
    Dyadic,
    DyadicInterval,
    as_dyadic,
    exponent_locate,
    pow2,
    unit_cell,
)
from .pairing import SPIRAL, PairingSpec

__all__ = [
    "DEFAULT_M",
    "DEFAULT_L",
    "BandIndicator",
    "LatticeMode",
    "GeneratorSpec",
    "band_of",
    "psiD_hat",
    "psiD_space",
    "psiD_space_grid",
    "psiD_hat_norm_sq",
    "band_space",
    "shannon_hat",
    "shannon_wavelet_fourier",
    "mode_tail",
]

DEFAULT_M = 24
DEFAULT_L = 16
# values D > this are folded into a 2^-limit remainder for unbounded schemes
_TAIL_LIMIT = 1100


@dataclass(frozen=True)
class BandIndicator:
    """``f_m``: indicator of ``|s|`` in ``(2^{-m-1}, 2^{-m}]``."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"band index must be >= 1, got {self.m}")

    @property
    def positive(self) -> DyadicInterval:
        return DyadicInterval(pow2(-self.m - 1), pow2(-self.m))

    @property
    def negative(self) -> DyadicInterval:
        return self.positive.negate()

    def pieces(self) -> tuple[DyadicInterval, DyadicInterval]:
        return (self.negative, self.positive)

    def length(self) -> Dyadic:
        return pow2(-self.m)

    def contains(self, s: Dyadic) -> bool:
        return band_of(s) == self.m

    def scaled(self, k: int) -> tuple[DyadicInterval, DyadicInterval]:
        """Pieces of ``{xi : 2^k xi in band}``."""
        return tuple(p.scale2(-k) for p in self.pieces())


@dataclass(frozen=True)
class LatticeMode:
    """``e_{k,l}(y) = 1_{(k,k+1]}(y) exp(2 pi i l y)``."""

    k: int
    l: int

    @property
    def cell(self) -> DyadicInterval:
        return DyadicInterval(self.k, self.k + 1)

    def __call__(self, y) -> complex:
        y = as_dyadic(y)
        if unit_cell(y) != self.k:
            return 0j
        return expi_turns(y * self.l)


@dataclass(frozen=True)
class GeneratorSpec:
    """psi^D with band cutoff ``M`` (keep ``m <= M``) and mode cutoff ``L``."""

    pairing: PairingSpec = field(default_factory=lambda: SPIRAL)
    M: int = DEFAULT_M
    L: int = DEFAULT_L

    def __post_init__(self):
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if self.L < 0:
            raise ValueError(f"L must be >= 0, got {self.L}")

    def band_of_mode(self, k: int, l: int) -> int:
        return self.pairing.pair(k, l)


def band_of(s) -> Optional[int]:
    """Band ``m >= 1`` with ``|s|`` in ``(2^{-m-1}, 2^{-m}]``, or ``None``."""
    s = as_dyadic(s)
    if s.is_zero():
        return None
    m = -exponent_locate(abs(s))
    return m if m >= 1 else None


def psiD_hat(spec: GeneratorSpec, s, y) -> complex:
    """Exact value of ``psi^D(s^, y)``; at most one term of the sum survives."""
    m = band_of(s)
    if m is None:
        return 0j
    k, l = spec.pairing.unpair(m)
    y = as_dyadic(y)
    if unit_cell(y) != k:
        return 0j
    return expi_turns(y * l)


def band_space(m: int, x):
    """Inverse transform of ``f_m``:
    ``g_m(x) = (sin(2 pi 2^{-m} x) - sin(2 pi 2^{-m-1} x)) / (pi x)``."""
    return _kernels.band_space(m, x)


@lru_cache(maxsize=4096)
def mode_tail(pairing: PairingSpec, k0: int, L: int) -> float:
    """Upper bound on ``sum_{|l| > L} 2^{-D(k0, l)}`` (exact up to a ``2^-limit`` remainder)."""
    limit = pairing.size if pairing.size is not None else _TAIL_LIMIT
    tail = Dyadic(0)
    for m, k, l in pairing.enumerate(limit):
        if k == k0 and abs(l) > L:
            tail = tail + pow2(-m)
    return float(tail + pow2(-limit))


def _space_terms(spec: GeneratorSpec, k0: int, L: int):
    out = []
    for l in range(-L, L + 1):
        if spec.pairing.known(k0, l):
            out.append((l, spec.pairing.pair(k0, l)))
    return out


def psiD_space(spec: GeneratorSpec, x1: float, y, L: Optional[int] = None) -> tuple[complex, float]:
    """``psi^D(x1, y)`` summed over modes ``|l| <= L`` of the cell holding ``y``.

    Returns ``(value, tail_bound)``.  Each omitted mode contributes at most
    ``|g_m| <= g_m(0) = 2^{-m}``, which is what ``tail_bound`` adds up.
    """
    L = spec.L if L is None else L
    y = as_dyadic(y)
    k0 = unit_cell(y)
    value = 0j
    for l, m in _space_terms(spec, k0, L):
        value += expi_turns(y * l) * float(band_space(m, float(x1)))
    return value, mode_tail(spec.pairing, k0, L)


def psiD_space_grid(spec: GeneratorSpec, x1: np.ndarray, y, L: Optional[int] = None):
    """Vectorised :func:`psiD_space` over an array of ``x1`` at fixed ``y``."""
    L = spec.L if L is None else L
    y = as_dyadic(y)
    k0 = unit_cell(y)
    terms = _space_terms(spec, k0, L)
    bands = np.array([m for _, m in terms], dtype=np.int64)
    phases = np.array([expi_turns(y * l) for l, _ in terms], dtype=np.complex128)
    vals = _kernels.mode_sum(np.asarray(x1, dtype=np.float64), bands, phases)
    return vals, mode_tail(spec.pairing, k0, L)


def psiD_hat_norm_sq(spec: GeneratorSpec, M: Optional[int] = None) -> tuple[Dyadic, int]:
    """Squared norm of the band-truncated generator, exactly, and its limit 1.

    Band ``m`` has symmetric measure ``2^{-m}`` and its mode has unit
    modulus on a unit cell, so the truncated value is ``1 - 2^{-M}``.
    """
    M = spec.M if M is None else M
    total = Dyadic(0)
    for m in range(1, M + 1):
        k, _ = spec.pairing.unpair(m)
        cell = LatticeMode(k, 0).cell
        for piece in BandIndicator(m).pieces():
            total = total + piece.length() * cell.length()
    return total, 1


_SHANNON_POS = DyadicInterval(Dyadic(1, -1), Dyadic(1))


def shannon_hat(xi) -> int:
    """Indicator of ``[-1, -1/2) U (1/2, 1]``."""
    xi = as_dyadic(xi)
    if _SHANNON_POS.contains(xi):
        return 1
    return int(Dyadic(-1) <= xi and xi < Dyadic(-1, -1))


def shannon_wavelet_fourier(k: int, m: int, xi) -> complex:
    """``2^{k/2} 1_S(2^k xi) exp(2 pi i m 2^k xi)`` for the Shannon support ``S``."""
    xi = as_dyadic(xi)
    scaled = xi.scale2(k)
    if not shannon_hat(scaled):
        return 0j
    return math.pow(2.0, k / 2) * expi_turns(scaled * m)
