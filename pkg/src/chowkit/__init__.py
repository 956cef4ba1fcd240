"""Exact intersection theory on presented Chow rings, with a checking harness."""

from chowkit.ring import GeneratorSpec, Polynomial, Ring, evaluate, grade_component, series_inverse
from chowkit.quotient import Presentation, RewriteRule, check_confluence, integrate, normal_form
from chowkit.chern import KClass, combine, dual, lambda2, line, segre, sym2, trivial, twist_line
from chowkit.builders import PairingTable, projective_bundle, projective_space, surface_from_pairing
from chowkit.degeneracy import SymmetricMapSpec, porteous_sym, symmetric_porteous, zero_locus_class
from chowkit.surfaces import (HodgeDiamond, SurfaceInvariants, blow_down_points,
                              etale_double_cover_quotient, etale_double_genus, hodge_diamond,
                              noether_chi, plane_curve_genus, prym_dim)

__version__ = "0.1.0"

__all__ = [
    "GeneratorSpec", "Polynomial", "Ring", "evaluate", "grade_component", "series_inverse",
    "Presentation", "RewriteRule", "check_confluence", "integrate", "normal_form",
    "KClass", "combine", "dual", "lambda2", "line", "segre", "sym2", "trivial", "twist_line",
    "PairingTable", "projective_bundle", "projective_space", "surface_from_pairing",
    "SymmetricMapSpec", "porteous_sym", "symmetric_porteous", "zero_locus_class",
    "HodgeDiamond", "SurfaceInvariants", "blow_down_points", "etale_double_cover_quotient",
    "etale_double_genus", "hodge_diamond", "noether_chi", "plane_curve_genus", "prym_dim",
]
