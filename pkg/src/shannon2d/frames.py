"""Analysis coefficients and reproducing-identity checks for the psi^D systems.

Orthonormal system:  psi_{k,m}(x1, x2) = 2^{-k/2} psi^D(2^{-k} x1 - m, x2), whose
transform in ``x1`` is ``2^{k/2} exp(-2 pi i 2^k m xi) psi^D(2^k xi^, x2)``.

Continuous system:   d_f^{-1} s^{-1/2} psi^D((x1 - u) / s, x2), ``u`` real, ``s > 0``,
with parameter measure ``du ds / s^2``.

Everything that can be exact is computed on dyadic intervals; floats enter
through complex amplitudes, ``pi`` and ``ln 2`` only.
"""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from . import _kernels
from ._trig import exp_integral
from .dyadic import (
    Dyadic,
    DyadicError,
    DyadicInterval,
    as_dyadic,
    exponent_locate,
    interval_intersect,
    pow2,
)
from .generator import BandIndicator, GeneratorSpec, band_of
from .pairing import TableMiss
from .testfn import ModeExpansion, StepProfile, TensorSum2D, norm_sq, refine

__all__ = [
    "LN2",
    "Constants",
    "CONSTANTS",
    "BandedProfile",
    "VerificationReport",
    "SingularAtZero",
    "ZeroFrequency",
    "NotBandLimited",
    "BadGrid",
    "scale_pieces",
    "active_scales",
    "scale_energy",
    "coeff_discrete",
    "lattice_energy",
    "gram_entry",
    "parseval_check",
    "continuous_profile",
    "continuous_isometry_check",
    "admissibility_integrals",
    "discrete_isometry_check",
    "sample_value",
    "sampling_identity_check",
    "UGrid",
    "SGrid",
    "calderon_lhs",
    "calderon_quadrature",
    "GRID_PRESETS",
]

LN2 = math.log(2.0)
EXACT_SLACK = 1e-12


class SingularAtZero(DyadicError):
    pass


class ZeroFrequency(DyadicError):
    pass


class NotBandLimited(ValueError):
    pass


class BadGrid(ValueError):
    pass


@dataclass(frozen=True)
class Constants:
    """``c_f = (2 ln 2)^{1/2}`` and ``d_f = (ln 2)^{1/2}``."""

    c_f: float = math.sqrt(2.0 * LN2)
    d_f: float = math.sqrt(LN2)


CONSTANTS = Constants()


def _fsum_c(values: Iterable[complex]) -> complex:
    vals = list(values)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def _enc(z):
    if isinstance(z, complex):
        return [z.real, z.imag]
    return z


@dataclass
class VerificationReport:
    """Outcome of one identity check.  ``passed`` iff ``defect <= bound + slack``."""

    check: str
    lhs: object
    rhs: object
    defect: float
    bound: float
    slack: float = EXACT_SLACK
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return bool(self.defect <= self.bound + self.slack)

    def to_json(self) -> dict:
        return {
            "check": self.check,
            "lhs": _enc(self.lhs),
            "rhs": _enc(self.rhs),
            "defect": self.defect,
            "bound": self.bound,
            "slack": self.slack,
            "pass": self.passed,
            "params": self.params,
        }


def _report(check, lhs, rhs, bound=0.0, slack=EXACT_SLACK, **params) -> VerificationReport:
    return VerificationReport(check, lhs, rhs, float(abs(lhs - rhs)), float(bound), slack, params)


# --------------------------------------------------------------------------
# discrete system
# --------------------------------------------------------------------------

def _mode_band(spec: GeneratorSpec, mode) -> Optional[int]:
    """Band of ``mode`` if it survives truncation ``j <= M``, else ``None``."""
    try:
        j = spec.pairing.pair(*mode)
    except TableMiss:
        return None
    return j if j <= spec.M else None


def scale_pieces(spec: GeneratorSpec, f: TensorSum2D, k: int) -> list:
    """Pieces of ``f`` seen by scale ``k``: ``[(mode, interval, amp), ...]``.

    A term on mode ``(r, l)`` is seen on ``{xi : 2^k xi in band D(r, l)}``.
    """
    out = []
    for mode, pieces in sorted(f.weighted_pieces().items()):
        j = _mode_band(spec, mode)
        if j is None:
            continue
        for band in BandIndicator(j).scaled(k):
            for iv, amp in pieces:
                cut = interval_intersect(iv, band)
                if cut:
                    out.append((mode, cut, amp))
    return out


def _abs_range(iv: DyadicInterval):
    if iv.lo.sign() >= 0:
        return iv.lo, iv.hi
    if iv.hi.sign() <= 0:
        return -iv.hi, -iv.lo
    return Dyadic(0), max(-iv.lo, iv.hi)


def active_scales(spec: GeneratorSpec, f: TensorSum2D) -> Optional[list]:
    """Scales ``k`` at which ``f`` has a nonzero piece, or ``None`` if infinitely many."""
    ks = set()
    for mode, pieces in f.weighted_pieces().items():
        j = _mode_band(spec, mode)
        if j is None:
            continue
        for iv, _ in pieces:
            a, b = _abs_range(iv)
            if a.is_zero():
                return None
            for e in range(exponent_locate(a), exponent_locate(b) + 1):
                ks.add(-j - e)
    return sorted(k for k in ks if scale_pieces(spec, f, k))


def scale_energy(spec: GeneratorSpec, f: TensorSum2D, k: int) -> float:
    """``int |f^|^2`` over the part of ``f`` seen at scale ``k``."""
    by_mode = defaultdict(list)
    for mode, iv, amp in scale_pieces(spec, f, k):
        by_mode[mode].append((iv, amp))
    return math.fsum(abs(s) ** 2 * float(iv.length())
                     for mode in sorted(by_mode) for iv, (s,) in refine(by_mode[mode]))


def _kept_energy(spec: GeneratorSpec, f: TensorSum2D) -> tuple[float, float]:
    """Energy on modes kept by the truncation and on modes dropped by it."""
    kept, dropped = [], []
    for mode, pieces in f.weighted_pieces().items():
        e = math.fsum(abs(s) ** 2 * float(iv.length()) for iv, (s,) in refine(pieces))
        (kept if _mode_band(spec, mode) is not None else dropped).append(e)
    return math.fsum(kept), math.fsum(dropped)


def coeff_discrete(spec: GeneratorSpec, f: TensorSum2D, k: int, m: int) -> complex:
    """``<f, psi_{k,m}>`` in closed form (band-truncated generator)."""
    freq = Dyadic(m, k)
    vals = [amp * exp_integral(iv.lo, iv.hi, freq) for _, iv, amp in scale_pieces(spec, f, k)]
    return math.pow(2.0, k / 2) * _fsum_c(vals)


def lattice_energy(spec: GeneratorSpec, f: TensorSum2D, k: int) -> float:
    """``sum_{m in Z} |<f, psi_{k,m}>|^2`` evaluated as a lattice sum in closed form.

    In ``eta = 2^k xi`` the scale-``k`` part of ``f`` is a step function with
    jumps ``w_q`` at ``x_q``, and for ``m != 0`` the coefficient is
    ``2^{-k/2} sum_q w_q e^{2 pi i m x_q} / (2 pi i m)``.  Summing over
    ``m != 0`` with ``sum_{m != 0} e^{2 pi i m t} / m^2 = 2 pi^2 B2({t})``
    gives ``2^{-k}/2 * sum_{q,q'} w_q conj(w_q') B2({x_q - x_q'})``; the
    constant of ``B2`` drops out because the jumps sum to zero.
    """
    pieces = scale_pieces(spec, f, k)
    if not pieces:
        return 0.0
    jumps: dict = defaultdict(complex)
    c0 = []
    for _, iv, amp in pieces:
        jumps[iv.hi.scale2(k)] += amp
        jumps[iv.lo.scale2(k)] -= amp
        c0.append(amp * float(iv.length()))
    pts = [(x, w) for x, w in jumps.items() if w != 0]
    terms = []
    for i, (xq, wq) in enumerate(pts):
        for xr, wr in pts[i:]:
            t = (xq - xr).frac()
            b2 = float(t * t - t)
            z = (wq * wr.conjugate()).real * b2
            terms.append(z if xr is xq else 2.0 * z)
    zero = abs(_fsum_c(c0)) ** 2 * math.pow(2.0, k)
    return zero + math.pow(2.0, -k) * 0.5 * math.fsum(terms)


def _inv_sq_tail(a: int) -> float:
    """Upper bound on ``sum_{m >= a} 1/m^2`` for ``a >= 1``."""
    return 1.0 / a + 1.0 / (a * a)


def _coeff_decay(pieces) -> float:
    """``V`` with ``|c_{k,m}| <= 2^{-k/2} V / (2 pi |m|)``: total jump size."""
    return 2.0 * math.fsum(abs(amp) for _, _, amp in pieces)


def gram_entry(spec: GeneratorSpec, a, b) -> tuple[complex, float]:
    """``<psi_{k,m}, psi_{k',m'}>`` over bands ``j <= M`` and a bound on the omitted bands.

    Bands are matched through their modes; for a bijection only ``j = j'``
    pairs survive, and for ``k != k'`` their scaled supports are disjoint, so
    the value is exactly zero.
    """
    (k, m), (kp, mp) = a, b
    by_mode = defaultdict(list)
    for j in range(1, spec.M + 1):
        by_mode[spec.pairing.unpair(j)].append(j)
    freq = Dyadic(mp, kp) - Dyadic(m, k)
    scale = math.pow(2.0, (k + kp) / 2)
    vals = []
    for mode in sorted(by_mode):
        bands = by_mode[mode]
        for j in bands:
            for jp in bands:
                for p in BandIndicator(j).scaled(k):
                    for q in BandIndicator(jp).scaled(kp):
                        cut = interval_intersect(p, q)
                        if cut:
                            vals.append(exp_integral(cut.lo, cut.hi, freq))
    value = scale * _fsum_c(vals) if vals else 0j
    return value, 2.0 * math.ldexp(1.0, -spec.M)


def parseval_check(spec: GeneratorSpec, f: TensorSum2D, k_range: Sequence[int],
                   m_range: Optional[Sequence[int]] = None,
                   slack: float = EXACT_SLACK) -> VerificationReport:
    """Compare ``sum_{k,m} |<f, psi_{k,m}>|^2`` with ``||f||^2``.

    ``m_range=None`` sums every ``m`` through :func:`lattice_energy`;
    otherwise the window is summed term by term and a ``1/m^2`` tail bound
    is added to ``bound``.  Scales outside ``k_range`` and modes dropped by
    the band cutoff enter ``bound`` through their exact energies.
    """
    rhs = norm_sq(f)
    ks = list(k_range)
    kset = set(ks)
    parts = []
    mtail = []
    for k in ks:
        if m_range is None:
            parts.append(lattice_energy(spec, f, k))
            continue
        ms = list(m_range)
        parts.extend(abs(coeff_discrete(spec, f, k, m)) ** 2 for m in ms)
        pieces = scale_pieces(spec, f, k)
        if not pieces:
            continue
        V = _coeff_decay(pieces)
        mset = set(ms)
        tail = 0.0
        for side in (1, -1):
            top = max([side * mm for mm in mset if side * mm >= 1], default=0)
            tail += _inv_sq_tail(top + 1)
            tail += math.fsum(1.0 / (n * n) for n in range(1, top + 1) if side * n not in mset)
        extra0 = abs(coeff_discrete(spec, f, k, 0)) ** 2 if 0 not in mset else 0.0
        mtail.append(math.pow(2.0, -k) * (V / (2.0 * math.pi)) ** 2 * tail + extra0)
    lhs = math.fsum(parts)
    kept, dropped = _kept_energy(spec, f)
    act = active_scales(spec, f)
    if act is None:
        outside = max(0.0, kept - math.fsum(scale_energy(spec, f, k) for k in ks))
    else:
        outside = math.fsum(scale_energy(spec, f, k) for k in act if k not in kset)
    bound = outside + dropped + math.fsum(mtail)
    return _report("parseval", lhs, rhs, bound, slack,
                   k_range=[min(ks), max(ks)] if ks else None,
                   m_range=None if m_range is None else [min(m_range), max(m_range)],
                   M=spec.M, outside_scales=outside, dropped_modes=dropped)


# --------------------------------------------------------------------------
# continuous system
# --------------------------------------------------------------------------

def _log2_units(iv: DyadicInterval) -> float:
    """``int_iv ds/s`` in units of ``ln 2``; exact when ``hi/lo`` is a power of two."""
    lo, hi = iv.lo, iv.hi
    if lo.sign() <= 0:
        raise SingularAtZero(f"log measure undefined on {iv}")
    ratio = hi.to_fraction() / lo.to_fraction()
    if ratio.numerator & (ratio.numerator - 1) == 0 and ratio.denominator == 1:
        return float(ratio.numerator.bit_length() - 1)
    return (math.log(hi.mant / lo.mant) + (hi.exp - lo.exp) * LN2) / LN2


@dataclass(frozen=True)
class BandedProfile:
    """``F(s) = sum_m entries[m] f_m(s)`` on one half-axis ``s > 0``."""

    entries: Mapping
    sign: int = 1

    def pieces(self) -> list:
        return [(BandIndicator(m).positive, complex(c)) for m, c in sorted(self.entries.items())]

    def log_inner(self, other: "BandedProfile") -> complex:
        """``int_0^inf F conj(G) ds/s`` in units of ``ln 2``."""
        vals = [a * b.conjugate() * _log2_units(iv) for iv, (a, b) in refine(self.pieces(), other.pieces())]
        return _fsum_c(vals)


def continuous_profile(spec: GeneratorSpec, f2: ModeExpansion, sign: int = 1) -> BandedProfile:
    """``int conj(psi^D(+-s^, y)) f2(y) dy = sum_{k,l} f_{D(k,l)}(s) <f2, e_{k,l}>``."""
    return BandedProfile({spec.pairing.pair(k, l): c for (k, l), c in sorted(f2.coeffs.items())}, sign)


def continuous_isometry_check(spec: GeneratorSpec, f2: ModeExpansion, g2: ModeExpansion,
                              slack: float = EXACT_SLACK) -> VerificationReport:
    """``d_f^{-2} <F_f, F_g>_{L^2(ds/s)}`` against ``<f2, g2>`` on both half-axes."""
    rhs = f2.inner(g2)
    ratio = LN2 / CONSTANTS.d_f ** 2
    sides = {}
    for sign in (1, -1):
        units = continuous_profile(spec, f2, sign).log_inner(continuous_profile(spec, g2, sign))
        sides[sign] = ratio * units
    defect = max(abs(sides[1] - rhs), abs(sides[-1] - rhs))
    rel_slack = slack * (1.0 + abs(rhs))
    return VerificationReport("continuous-isometry", sides[1], rhs, float(defect), 0.0, rel_slack,
                              {"lhs_minus": _enc(sides[-1]), "modes": len(f2.coeffs) + len(g2.coeffs)})


def admissibility_integrals(profile: StepProfile) -> tuple[float, float]:
    """``(int_0^inf |P(s)|^2 ds/s, int_0^inf |P(-s)|^2 ds/s)``."""
    plus, minus = [], []
    for iv, amp in profile.pieces:
        if iv.lo.sign() >= 0:
            if iv.lo.is_zero():
                raise SingularAtZero(f"piece {iv} touches 0")
            plus.append(abs(amp) ** 2 * _log2_units(iv) * LN2)
        elif iv.hi.sign() <= 0:
            if iv.hi.is_zero():
                raise SingularAtZero(f"piece {iv} touches 0")
            minus.append(abs(amp) ** 2 * _log2_units(iv.negate()) * LN2)
        else:
            raise SingularAtZero(f"piece {iv} contains 0")
    return math.fsum(plus), math.fsum(minus)


def discrete_isometry_check(spec: GeneratorSpec, f2: ModeExpansion, g2: ModeExpansion, xi,
                            slack: float = EXACT_SLACK) -> VerificationReport:
    """``sum_k conj-psi^D pairing at 2^k xi`` against ``<f2, g2>``.

    Scans scales ``k`` directly with :func:`band_of` and checks that each
    active mode is hit by exactly one scale, the one predicted by
    ``k = -D(r, l) - exponent_locate(|xi|)``.
    """
    xi = as_dyadic(xi)
    if xi.is_zero():
        raise ZeroFrequency("discrete isometry needs xi != 0")
    e = exponent_locate(abs(xi))
    modes = sorted(set(f2.coeffs) | set(g2.coeffs))
    predicted = {mode: -spec.pairing.pair(*mode) - e for mode in modes}
    rhs = f2.inner(g2)
    if not modes:
        return _report("discrete-isometry", 0j, rhs, 0.0, slack, xi=str(xi), hits={})
    k_lo = min(predicted.values()) - 2
    k_hi = max(predicted.values()) + 2
    hits = defaultdict(list)
    vals = []
    for k in range(k_lo, k_hi + 1):
        j = band_of(xi.scale2(k))
        if j is None:
            continue
        try:
            mode = spec.pairing.unpair(j)
        except TableMiss:
            continue
        if mode in predicted:
            hits[mode].append(k)
            vals.append(f2.coefficient(*mode) * g2.coefficient(*mode).conjugate())
    lhs = _fsum_c(vals)
    unique = all(hits.get(mode) == [predicted[mode]] for mode in modes)
    rep = _report("discrete-isometry", lhs, rhs, 0.0, slack, xi=str(xi), unique_hits=unique,
                  hits={f"{mk[0]},{mk[1]}": v for mk, v in sorted(hits.items())})
    if not unique:
        rep.defect = max(rep.defect, 1.0)
    return rep


# --------------------------------------------------------------------------
# band-limited sampling
# --------------------------------------------------------------------------

def sample_value(profile: StepProfile, x) -> complex:
    """``f(x) = int P(xi) exp(2 pi i x xi) d xi`` at a dyadic point ``x``."""
    x = as_dyadic(x)
    return _fsum_c([amp * exp_integral(iv.lo, iv.hi, x) for iv, amp in profile.pieces])


def sampling_identity_check(fprofile: StepProfile, gprofile: StepProfile, k: int, T: int,
                            slack: float = EXACT_SLACK) -> VerificationReport:
    """``int f^ conj(g^)`` against ``2^k sum_{|m| <= T} f(2^k m) conj(g(2^k m))``."""
    edge = pow2(-k - 1)
    for prof in (fprofile, gprofile):
        for iv, _ in prof.pieces:
            if iv.lo < -edge or iv.hi > edge:
                raise NotBandLimited(f"piece {iv} leaves [-2^{-k-1}, 2^{-k-1}]")
    lhs = _fsum_c(a * b.conjugate() * float(iv.length())
                  for iv, (a, b) in refine(list(fprofile.pieces), list(gprofile.pieces)))
    vals = []
    for m in range(-T, T + 1):
        x = Dyadic(m, k)
        vals.append(sample_value(fprofile, x) * sample_value(gprofile, x).conjugate())
    rhs = math.pow(2.0, k) * _fsum_c(vals)
    af = math.fsum(abs(a) for _, a in fprofile.pieces)
    ag = math.fsum(abs(a) for _, a in gprofile.pieces)
    tail = math.pi ** 2 / 6 if T == 0 else 1.0 / T
    bound = 2.0 * af * ag / (math.pi ** 2 * math.pow(2.0, k)) * tail
    return _report("sampling", lhs, rhs, bound, slack, k=k, T=T)


# --------------------------------------------------------------------------
# Calderon quadrature
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class UGrid:
    """``n`` uniform midpoint nodes of spacing ``du`` centred on ``center``."""

    n: int
    du: Optional[float] = None
    center: float = 0.0

    def nodes(self, du: float) -> np.ndarray:
        return self.center + (np.arange(self.n) - (self.n - 1) / 2.0) * du


@dataclass(frozen=True)
class SGrid:
    """``n`` log-uniform midpoint nodes on ``[s_min, s_max]``; weight ``ds/s^2 = h/s``.

    With a power-of-two ratio ``s_max/s_min`` and ``n`` a multiple of the
    octave count, cell edges sit on powers of two, where the integrand has
    its kinks for dyadic profiles; the midpoint rule is then smooth-rate on
    every cell.
    """

    n: int
    s_min: float = 2.0 ** -20
    s_max: float = 2.0 ** 4

    def __post_init__(self):
        if not (self.s_min > 0):
            raise BadGrid(f"s_min must be > 0, got {self.s_min}")
        if not (self.s_max > self.s_min) or self.n < 1:
            raise BadGrid("need s_max > s_min and n >= 1")

    @property
    def h(self) -> float:
        return math.log(self.s_max / self.s_min) / self.n

    def nodes(self) -> np.ndarray:
        return self.s_min * np.exp((np.arange(self.n) + 0.5) * self.h)


GRID_PRESETS = {
    "coarse": (4, 4),
    "default": (512, 384),
    "fine": (2048, 1536),
}


def _flatten(spec: GeneratorSpec, f: TensorSum2D):
    plo, phi, amp, blo, bhi = [], [], [], [], []
    for mode, pieces in sorted(f.weighted_pieces().items()):
        j = _mode_band(spec, mode)
        if j is None:
            continue
        for iv, a in pieces:
            plo.append(float(iv.lo))
            phi.append(float(iv.hi))
            amp.append(a)
            blo.append(math.ldexp(1.0, -j - 1))
            bhi.append(math.ldexp(1.0, -j))
    return (np.array(plo, dtype=np.float64), np.array(phi, dtype=np.float64),
            np.array(amp, dtype=np.complex128), np.array(blo, dtype=np.float64),
            np.array(bhi, dtype=np.float64))


def default_du(f: TensorSum2D) -> float:
    """Half the Nyquist spacing for ``|<f, psi_{u,s}>|^2`` as a function of ``u``.

    That function has spectrum inside ``[-W, W]`` with ``W`` the diameter of
    the Fourier support of ``f``, so midpoint sums with ``du < 1/W`` lose
    nothing to aliasing and only the window truncation remains.
    """
    lo, hi = None, None
    for _, prof, _ in f.terms:
        b = prof.support_bounds()
        if b is None:
            continue
        lo = b[0] if lo is None or b[0] < lo else lo
        hi = b[1] if hi is None or b[1] > hi else hi
    if lo is None:
        return 1.0
    return 0.5 / float(hi - lo)


def calderon_lhs(spec: GeneratorSpec, f: TensorSum2D, ugrid: UGrid, sgrid: SGrid) -> float:
    """``d_f^{-2} sum |<f, psi_{u,s}>|^2 du ds/s^2`` over the grid."""
    plo, phi, amp, blo, bhi = _flatten(spec, f)
    if plo.size == 0:
        return 0.0
    du = ugrid.du if ugrid.du is not None else default_du(f)
    u = ugrid.nodes(du)
    s = sgrid.nodes()
    rows = _kernels.calderon_rows(u, s, plo, phi, amp, blo, bhi)
    # |<f, psi_{u,s}>|^2 = s |c|^2 and ds/s^2 = h/s, so each row carries weight h du
    return math.fsum(rows.tolist()) * du * sgrid.h / CONSTANTS.d_f ** 2


def calderon_quadrature(spec: GeneratorSpec, f: TensorSum2D, ugrid: UGrid, sgrid: SGrid,
                        tol: float = 1e-3, levels: int = 3) -> VerificationReport:
    """Midpoint quadrature of the continuous reproducing identity.

    ``bound`` is the tolerance ``tol``.  ``params['trace']`` holds the same
    quantity on ``levels`` coarser grids (node counts halved each time, same
    spacing in ``u`` and same ``s`` range) ending at the requested grid.
    """
    rhs = norm_sq(f)
    du = ugrid.du if ugrid.du is not None else default_du(f)
    trace = []
    for lev in range(levels, -1, -1):
        nu = max(1, ugrid.n >> lev)
        ns = max(1, sgrid.n >> lev)
        if lev and (nu == ugrid.n and ns == sgrid.n):
            continue
        val = calderon_lhs(spec, f, UGrid(nu, du, ugrid.center), SGrid(ns, sgrid.s_min, sgrid.s_max))
        trace.append({"n_u": nu, "n_s": ns, "lhs": val, "defect": abs(val - rhs)})
    lhs = trace[-1]["lhs"]
    return _report("calderon", lhs, rhs, tol, 0.0, n_u=ugrid.n, n_s=sgrid.n, du=du,
                   s_min=sgrid.s_min, s_max=sgrid.s_max, trace=trace, backend=_kernels.BACKEND)
