"""Divided-power envelopes, De Rham and crystalline cohomology with exact arithmetic."""
from __future__ import annotations

__version__ = "0.1.0"

from .scalars import ScalarRing, Scalar
from .poly import Polynomial, IdealPresentation, parse_polynomial
from .linalg import BoundedCochainComplex, Matrix, ModuleInvariants, smith_normal_form
from .pd_free import PdElement, pd_gamma, pd_mul, rational_realization, norm_from_sym
from .envelope import (RegularQuotientPresentation, EnvelopeAlgebra, build_envelope,
                       envelope_graded_piece, square_zero_truncation, regularity_probe)
from .derham import DeRhamForm, d_dR, wedge, derham_cohomology, hodge_stage
from .crystalline import LiftSpec, default_lift, crystalline_via_lift, mod_p_comparison
from .cech import build_cech, totalize_weight, cech_compare
