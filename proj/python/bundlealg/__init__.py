"""Flat PU_n bundle section algebras over an annulus.

Build flat bundles from unitary holonomy matrices, construct and evaluate
concomitant matrix sections, compute sup-norms, and decide restricted
flat-bundle equivalence together with the induced completely isometric
isomorphism of section algebras.
"""

from ._core import (
    Bundle,
    NumericalError,
    Section,
    ValidationError,
    add,
    boundary_dominates,
    bundle_from_json,
    check_commuting,
    classify,
    classify_tuple,
    concomitant_residual,
    family_c,
    family_d,
    make_bundle,
    multiply,
    pu_equivalent,
    random_section,
    scalar_section,
    scale,
    section_from_json,
    sup_norm,
)

__all__ = [
    "Bundle",
    "NumericalError",
    "Section",
    "ValidationError",
    "add",
    "boundary_dominates",
    "bundle_from_json",
    "check_commuting",
    "classify",
    "classify_tuple",
    "concomitant_residual",
    "family_c",
    "family_d",
    "make_bundle",
    "multiply",
    "pu_equivalent",
    "random_section",
    "scalar_section",
    "scale",
    "section_from_json",
    "sup_norm",
]
