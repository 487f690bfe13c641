"""Exact verification of two-dimensional Shannon-type wavelet systems.

The generator ``psi^D`` spreads the dyadic frequency bands of the Shannon
wavelet over the lattice modes of a second variable through a pairing
``D: Z^2 -> N``.  This package builds it, its orthonormal and continuous
systems, and checks their reproducing identities and the associated
phase-space tiling, exactly where dyadic arithmetic allows.
"""
from . import dyadic, frames, generator, pairing, presets, testfn, tiling
from .dyadic import (
    Dyadic,
    DyadicInterval,
    EMPTY,
    cell_locate,
    exponent_locate,
    interval_intersect,
    parse_dyadic,
    unit_cell,
)
from .frames import (
    CONSTANTS,
    VerificationReport,
    admissibility_integrals,
    calderon_quadrature,
    coeff_discrete,
    continuous_isometry_check,
    discrete_isometry_check,
    gram_entry,
    parseval_check,
    sampling_identity_check,
)
from .generator import GeneratorSpec, band_of, psiD_hat, psiD_hat_norm_sq, psiD_space, shannon_hat
from .pairing import SPIRAL, PairingSpec, verify_bijection
from .testfn import ModeExpansion, StepProfile, TensorSum2D, inner_product, norm_sq
from .tiling import Window4D, covering_check, disjointness_and_measure, export_slice, locate_1d, locate_4d

__version__ = "0.1.0"

__all__ = [
    "CONSTANTS",
    "Dyadic",
    "DyadicInterval",
    "EMPTY",
    "GeneratorSpec",
    "ModeExpansion",
    "PairingSpec",
    "SPIRAL",
    "StepProfile",
    "TensorSum2D",
    "VerificationReport",
    "Window4D",
    "admissibility_integrals",
    "band_of",
    "calderon_quadrature",
    "cell_locate",
    "coeff_discrete",
    "continuous_isometry_check",
    "covering_check",
    "discrete_isometry_check",
    "disjointness_and_measure",
    "exponent_locate",
    "export_slice",
    "gram_entry",
    "inner_product",
    "interval_intersect",
    "locate_1d",
    "locate_4d",
    "norm_sq",
    "parse_dyadic",
    "parseval_check",
    "psiD_hat",
    "psiD_hat_norm_sq",
    "psiD_space",
    "sampling_identity_check",
    "shannon_hat",
    "unit_cell",
    "verify_bijection",
]
