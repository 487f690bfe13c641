"""Closed-form test functions on R^2.

A :class:`TensorSum2D` is a finite sum ``sum_t amp_t * P_t(xi) * e_{k_t,l_t}(x2)``
where each ``P_t`` is a step function of the Fourier variable ``xi`` of the
first coordinate.  Every inner product between such functions, and between
them and the psi^D systems, reduces to lengths of dyadic intervals times
complex amplitudes.
"""
from __future__ import annotations

import json
import math
from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .dyadic import Dyadic, DyadicInterval, as_dyadic

__all__ = [
    "OverlapError",
    "StepProfile",
    "ModeExpansion",
    "TensorSum2D",
    "norm_sq",
    "inner_product",
    "mode_coefficient",
    "refine",
    "dilate",
]


class OverlapError(ValueError):
    pass


def _amp(x) -> complex:
    if isinstance(x, (list, tuple)):
        return complex(float(x[0]), float(x[1]))
    return complex(x)


def _amp_json(z: complex) -> list:
    return [z.real, z.imag]


@dataclass(frozen=True)
class StepProfile:
    """Step function of ``xi``: ``amp`` on each disjoint half-open piece, 0 elsewhere."""

    pieces: tuple

    def __post_init__(self):
        pieces = tuple((iv, complex(a)) for iv, a in self.pieces)
        object.__setattr__(self, "pieces", pieces)
        ordered = sorted(pieces, key=lambda p: p[0].lo.to_fraction())
        for (a, _), (b, _) in zip(ordered, ordered[1:]):
            if b.lo < a.hi:
                raise OverlapError(f"profile pieces {a} and {b} overlap")

    @classmethod
    def indicator(cls, lo, hi, amp: complex = 1.0) -> "StepProfile":
        return cls(((DyadicInterval(lo, hi), amp),))

    @classmethod
    def of(cls, *items) -> "StepProfile":
        """``StepProfile.of((lo, hi), (lo, hi, amp), ...)``."""
        pieces = []
        for it in items:
            amp = it[2] if len(it) > 2 else 1.0
            pieces.append((DyadicInterval(it[0], it[1]), amp))
        return cls(tuple(pieces))

    def __call__(self, xi) -> complex:
        xi = as_dyadic(xi)
        for iv, a in self.pieces:
            if iv.contains(xi):
                return a
        return 0j

    def norm_sq(self) -> float:
        return math.fsum(abs(a) ** 2 * float(iv.length()) for iv, a in self.pieces)

    def scaled(self, j: int, amp: complex = 1.0) -> "StepProfile":
        """Support multiplied by ``2^j``, amplitudes multiplied by ``amp``."""
        return StepProfile(tuple((iv.scale2(j), a * amp) for iv, a in self.pieces))

    def support_bounds(self) -> Optional[tuple[Dyadic, Dyadic]]:
        if not self.pieces:
            return None
        return min(iv.lo for iv, _ in self.pieces), max(iv.hi for iv, _ in self.pieces)

    def to_json(self) -> list:
        return [{"lo": iv.lo.to_json(), "hi": iv.hi.to_json(), "amp": _amp_json(a)} for iv, a in self.pieces]

    @classmethod
    def from_json(cls, rows) -> "StepProfile":
        return cls(tuple((DyadicInterval(Dyadic.from_json(r["lo"]), Dyadic.from_json(r["hi"])),
                          _amp(r.get("amp", 1.0))) for r in rows))


@dataclass(frozen=True)
class ModeExpansion:
    """``f2 = sum c_{k,l} e_{k,l}`` with finitely many nonzero coefficients."""

    coeffs: Mapping

    def __post_init__(self):
        clean = {(int(k), int(l)): complex(c) for (k, l), c in dict(self.coeffs).items() if c != 0}
        object.__setattr__(self, "coeffs", clean)

    @classmethod
    def single(cls, k: int, l: int, c: complex = 1.0) -> "ModeExpansion":
        return cls({(k, l): c})

    def __hash__(self) -> int:
        return hash(tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0])))

    def coefficient(self, k: int, l: int) -> complex:
        return self.coeffs.get((k, l), 0j)

    def norm_sq(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.coeffs.values())

    def inner(self, other: "ModeExpansion") -> complex:
        keys = sorted(set(self.coeffs) & set(other.coeffs))
        re = math.fsum((self.coeffs[key] * other.coeffs[key].conjugate()).real for key in keys)
        im = math.fsum((self.coeffs[key] * other.coeffs[key].conjugate()).imag for key in keys)
        return complex(re, im)

    def __add__(self, other: "ModeExpansion") -> "ModeExpansion":
        out = dict(self.coeffs)
        for key, c in other.coeffs.items():
            out[key] = out.get(key, 0j) + c
        return ModeExpansion(out)

    def __mul__(self, c: complex) -> "ModeExpansion":
        return ModeExpansion({key: v * c for key, v in self.coeffs.items()})

    __rmul__ = __mul__

    def to_json(self) -> list:
        return [{"k": k, "l": l, "c": _amp_json(c)} for (k, l), c in sorted(self.coeffs.items())]

    @classmethod
    def from_json(cls, rows) -> "ModeExpansion":
        return cls({(int(r["k"]), int(r["l"])): _amp(r["c"]) for r in rows})


@dataclass(frozen=True)
class TensorSum2D:
    """``f(x1, x2)`` given Fourier-side in ``x1`` as a sum of step-profile x mode terms."""

    terms: tuple = ()

    def __post_init__(self):
        terms = tuple((complex(a), p, (int(mode[0]), int(mode[1]))) for a, p, mode in self.terms)
        object.__setattr__(self, "terms", terms)

    @classmethod
    def single(cls, profile: StepProfile, mode=(0, 0), amp: complex = 1.0) -> "TensorSum2D":
        return cls(((amp, profile, mode),))

    @classmethod
    def zero(cls) -> "TensorSum2D":
        return cls(())

    def __add__(self, other: "TensorSum2D") -> "TensorSum2D":
        return TensorSum2D(self.terms + other.terms)

    def __mul__(self, c: complex) -> "TensorSum2D":
        return TensorSum2D(tuple((a * c, p, m) for a, p, m in self.terms))

    __rmul__ = __mul__

    def __neg__(self) -> "TensorSum2D":
        return self * -1

    def __sub__(self, other: "TensorSum2D") -> "TensorSum2D":
        return self + (-other)

    def modes(self) -> list:
        return sorted({m for _, _, m in self.terms})

    def weighted_pieces(self) -> dict:
        """``mode -> [(interval, amp * piece_amp), ...]``."""
        out: dict = defaultdict(list)
        for a, prof, mode in self.terms:
            for iv, pa in prof.pieces:
                out[mode].append((iv, a * pa))
        return out

    def hat(self, xi, x2) -> complex:
        """Fourier-side value ``f(xi^, x2)``."""
        from .generator import LatticeMode

        return sum((a * prof(xi) * LatticeMode(*mode)(x2) for a, prof, mode in self.terms), 0j)

    def to_json(self) -> dict:
        return {"terms": [{"amp": _amp_json(a), "mode": {"k": m[0], "l": m[1]}, "profile": p.to_json()}
                          for a, p, m in self.terms]}

    @classmethod
    def from_json(cls, obj) -> "TensorSum2D":
        if isinstance(obj, str):
            obj = json.loads(obj)
        terms = []
        for t in obj["terms"]:
            mode = t["mode"]
            terms.append((_amp(t.get("amp", 1.0)), StepProfile.from_json(t["profile"]),
                          (int(mode["k"]), int(mode["l"]))))
        return cls(tuple(terms))


def refine(*groups: Sequence) -> list:
    """Common refinement of several lists of ``(interval, amp)``.

    Returns ``[(elementary_interval, [sum_amp_group0, sum_amp_group1, ...]), ...]``
    over the elementary intervals between consecutive breakpoints where at
    least one group is nonzero.
    """
    points = set()
    for g in groups:
        for iv, _ in g:
            points.add(iv.lo)
            points.add(iv.hi)
    bps = sorted(points, key=lambda d: d.to_fraction())
    out = []
    for a, b in zip(bps, bps[1:]):
        sums = []
        hit = False
        for g in groups:
            s = 0j
            for iv, amp in g:
                if iv.lo <= a and b <= iv.hi:
                    s += amp
                    hit = True
            sums.append(s)
        if hit:
            out.append((DyadicInterval(a, b), sums))
    return out


def norm_sq(f: TensorSum2D) -> float:
    """Exact ``||f||^2``: modes are orthonormal, profiles integrate piecewise."""
    parts = []
    for mode, pieces in f.weighted_pieces().items():
        for iv, (s,) in refine(pieces):
            parts.append(abs(s) ** 2 * float(iv.length()))
    return math.fsum(parts)


def inner_product(f: TensorSum2D, g: TensorSum2D) -> complex:
    """Exact ``<f, g>`` by mode matching and piecewise integration."""
    fp = f.weighted_pieces()
    gp = g.weighted_pieces()
    re, im = [], []
    for mode in sorted(set(fp) & set(gp)):
        for iv, (a, b) in refine(fp[mode], gp[mode]):
            z = a * b.conjugate() * float(iv.length())
            re.append(z.real)
            im.append(z.imag)
    return complex(math.fsum(re), math.fsum(im))


def mode_coefficient(f2: ModeExpansion, k: int, l: int) -> complex:
    return f2.coefficient(k, l)


def dilate(f: TensorSum2D, j: int) -> TensorSum2D:
    """``2^{-j/2} f(x1 / 2^j, x2)``: Fourier support shrinks by ``2^j``."""
    amp = math.pow(2.0, j / 2)
    return TensorSum2D(tuple((a * amp, p.scaled(-j), m) for a, p, m in f.terms))
