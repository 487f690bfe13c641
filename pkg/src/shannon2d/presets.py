"""Built-in test functions so verification suites run without authoring input."""
from __future__ import annotations

import itertools
import math
from typing import Optional

import numpy as np

from .dyadic import Dyadic
from .generator import BandIndicator, GeneratorSpec
from .testfn import ModeExpansion, StepProfile, TensorSum2D

__all__ = [
    "E00",
    "BAND_E00",
    "band_e00",
    "psiD00",
    "shannon_profile",
    "normalized_shannon_profile",
    "quarter_band",
    "sinc_band",
    "parseval_family",
    "mode_pool",
    "random_expansion",
    "isometry_pairs",
    "tensor_preset",
    "mode_preset",
    "TENSOR_PRESETS",
    "MODE_PRESETS",
    "PROFILE_PRESETS",
]

_Q = Dyadic(1, -2)
_H = Dyadic(1, -1)

E00 = ModeExpansion.single(0, 0)


def band_e00() -> TensorSum2D:
    """``chi_(1/4, 1/2](xi) e_{0,0}(x2)``, squared norm ``1/4``."""
    return TensorSum2D.single(StepProfile.indicator(_Q, _H), (0, 0))


BAND_E00 = band_e00()


def psiD00(spec: GeneratorSpec) -> TensorSum2D:
    """The band-truncated generator itself, ``sum_{j <= M} f_j e_{D^{-1}(j)}``."""
    terms = []
    for j in range(1, spec.M + 1):
        mode = spec.pairing.unpair(j)
        terms.append((1.0, StepProfile(tuple((p, 1.0) for p in BandIndicator(j).pieces())), mode))
    return TensorSum2D(tuple(terms))


def shannon_profile() -> StepProfile:
    """``+-(1/2, 1]``: the Shannon support in the half-open convention."""
    return StepProfile.of((-1, -_H), (_H, 1))


def normalized_shannon_profile() -> StepProfile:
    a = 1.0 / math.sqrt(math.log(2.0))
    return StepProfile.of((-1, -_H, a), (_H, 1, a))


def quarter_band() -> StepProfile:
    """``chi_(-1/4, 1/4]``, band-limited for sampling step 1."""
    return StepProfile.indicator(-_Q, _Q)


def sinc_band() -> StepProfile:
    """``chi_(-1/2, 1/2]``: the samples are ``sinc`` at the integers."""
    return StepProfile.indicator(-_H, _H)


def _family_profiles() -> list[tuple[str, StepProfile]]:
    d = Dyadic
    return [
        ("q-h", StepProfile.of((d(1, -2), d(1, -1)))),
        ("5/8-3/4", StepProfile.of((d(5, -3), d(3, -2)))),
        ("neg-1/2-1/8", StepProfile.of((d(-1, -1), d(-1, -3), 2.0))),
        ("3/16-1", StepProfile.of((d(3, -4), d(1)))),
        ("two-piece", StepProfile.of((d(-3, -2), d(-1, -2), 1j), (d(1, -3), d(3, -3), 0.5 - 0.25j))),
        ("wide-odd", StepProfile.of((d(-5, -1), d(-1, -4), 0.75), (d(1, -5), d(7, -2), -1.5j))),
    ]


_FAMILY_MODES = [(0, 0), (1, 0), (-1, 1), (0, -1)]


def parseval_family(spec: Optional[GeneratorSpec] = None) -> list[tuple[str, TensorSum2D]]:
    """Band/mode combinations: every profile on every mode, plus mixed sums.

    All profiles stay away from ``xi = 0`` so each function has finitely
    many active scales.
    """
    out = []
    profiles = _family_profiles()
    for (pname, prof), mode in itertools.product(profiles, _FAMILY_MODES):
        out.append((f"{pname}@{mode[0]},{mode[1]}", TensorSum2D.single(prof, mode)))
    mixes = [
        ("mix-a", [(1.0, 0, (0, 0)), (1j, 1, (1, 0))]),
        ("mix-b", [(0.5, 2, (0, 0)), (-0.5, 3, (0, 0)), (2.0, 4, (-1, 1))]),
        ("mix-c", [(1.0, 5, (0, -1)), (0.25 + 1j, 0, (1, 0)), (-1.0, 1, (0, 0))]),
        ("mix-d", [(1.0, 0, (0, 0)), (1.0, 0, (0, 0))]),
    ]
    for name, parts in mixes:
        out.append((name, TensorSum2D(tuple((a, profiles[i][1], mode) for a, i, mode in parts))))
    return out


def mode_pool(spec: GeneratorSpec, size: int = 64) -> list[tuple[int, int]]:
    """The modes carrying ``D = 1 .. size`` (gaps of a table skipped)."""
    return [(k, l) for _, k, l in spec.pairing.enumerate(size)]


def random_expansion(rng: np.random.Generator, spec: GeneratorSpec, max_modes: int = 32,
                     pool: int = 64) -> ModeExpansion:
    """A random mode expansion with 1 .. ``max_modes`` modes drawn from ``mode_pool``."""
    modes = mode_pool(spec, pool)
    n = int(rng.integers(1, min(max_modes, len(modes)) + 1))
    pick = rng.choice(len(modes), size=n, replace=False)
    re = rng.standard_normal(n)
    im = rng.standard_normal(n)
    return ModeExpansion({modes[int(i)]: complex(a, b) for i, a, b in zip(pick, re, im)})


def isometry_pairs(spec: GeneratorSpec, count: int = 20, seed: int = 0) -> list:
    """Fixed pairs (including the trivial ones) padded with random pairs."""
    rng = np.random.default_rng(seed)
    pairs = [
        (E00, E00),
        (E00, ModeExpansion.single(1, 1)),
        (ModeExpansion({(0, 0): 1.0, (1, 0): 1j}), ModeExpansion({(1, 0): 2.0})),
    ]
    pool = set(mode_pool(spec, 64))
    pairs = [(f, g) for f, g in pairs if set(f.coeffs) | set(g.coeffs) <= pool]
    while len(pairs) < count:
        pairs.append((random_expansion(rng, spec, 8), random_expansion(rng, spec, 8)))
    return pairs[:count]


def tensor_preset(name: str, spec: GeneratorSpec) -> TensorSum2D:
    if name in ("band-e00", "band_e00"):
        return band_e00()
    if name == "psiD00":
        return psiD00(spec)
    fam = dict(parseval_family(spec))
    if name in fam:
        return fam[name]
    raise KeyError(f"unknown preset {name!r}")


def mode_preset(name: str) -> ModeExpansion:
    if name not in MODE_PRESETS:
        raise KeyError(f"unknown preset {name!r}")
    return MODE_PRESETS[name]


TENSOR_PRESETS = ("band-e00", "psiD00", "family")
MODE_PRESETS = {
    "e00": E00,
    "e11": ModeExpansion.single(1, 1),
    "e00+ie10": ModeExpansion({(0, 0): 1.0, (1, 0): 1j}),
}
PROFILE_PRESETS = {
    "shannon": shannon_profile,
    "shannon-normalized": normalized_shannon_profile,
    "quarter": quarter_band,
    "sinc": sinc_band,
}
