"""Exact arithmetic kernel: rationals, rational matrices, polynomials, Groebner bases."""

from .groebner import (
    DEFAULT_PAIR_BUDGET,
    GroebnerBasis,
    IdealSummary,
    QuotientAlgebra,
    ShapeBasis,
    buchberger,
    charpoly,
    find_shape_basis,
    hilbert_dimension,
    normal_form,
    point_multiplicity,
    quotient_dimension,
    root_multiplicity,
    shape_basis,
    standard_monomials,
)
from .multipoly import MultiPoly, PolyRing, ideal_from_json, ideal_to_json, parse_poly
from .rational import (
    Rat,
    RatMatrix,
    RatUniPoly,
    discriminant,
    format_rat,
    lagrange_interpolate,
    parse_rat,
    rat_matrix_ops,
    rat_resultant,
    sylvester_matrix,
)
