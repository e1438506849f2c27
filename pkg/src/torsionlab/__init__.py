"""torsionlab: exact-arithmetic experiments on torsion equidistribution.

The package instantiates uniformized abelian varieties from their torus
rank, good-reduction dimension, and monomial lattice generators, enumerates
representatives of torsion points exactly, and measures how their
valuations fill out the skeleton torus, alongside finite-field checks of
the good-reduction counting bounds.
"""

from .equidist import (Character, ConvergenceRow, PiecewiseLinearBeta,
                       SeminormPullback, canonical_integral, convergence_report,
                       empirical_mean, weyl_sum)
from .errors import ConfigError, InvariantViolation
from .goodred import (Diagonal, EllipticCurve, FiniteField, GraphOfMultiplication,
                      HorizontalFiber, VerticalFiber, curve_points, m_torsion,
                      subvariety_torsion_count, supersingular_p_torsion_check,
                      vanishing_fraction)
from .lattice import (Lattice, SkeletonPoint, diaphony, dual_lattice, haar_integral,
                      reduce_mod_lattice, star_discrepancy_1d)
from .scalars import (CycElement, FieldElement, cyclotomic_poly, format_element,
                      parse_element, series_valuation)
from .tropical import (CornerArrangement, LaurentPoly, TropPoly, corner_hit_count,
                       gauss_seminorm, parse_laurent_poly, point_seminorm,
                       trop_eval, tropicalize)
from .uniformization import (RaynaudData, TorsionPoint, torsion_coordinates,
                             torsion_points, valuation)

__version__ = "0.1.0"

__all__ = [
    "Character", "ConvergenceRow", "ConfigError", "CornerArrangement",
    "CycElement", "Diagonal", "EllipticCurve", "FieldElement", "FiniteField",
    "GraphOfMultiplication", "HorizontalFiber", "InvariantViolation",
    "Lattice", "LaurentPoly", "PiecewiseLinearBeta", "RaynaudData",
    "SeminormPullback", "SkeletonPoint", "TorsionPoint", "TropPoly",
    "VerticalFiber", "canonical_integral", "convergence_report",
    "corner_hit_count", "curve_points", "cyclotomic_poly", "diaphony",
    "dual_lattice", "empirical_mean", "format_element", "gauss_seminorm",
    "haar_integral", "m_torsion", "parse_element", "parse_laurent_poly",
    "point_seminorm", "reduce_mod_lattice", "series_valuation",
    "star_discrepancy_1d", "subvariety_torsion_count",
    "supersingular_p_torsion_check", "torsion_coordinates", "torsion_points",
    "trop_eval", "tropicalize", "valuation", "vanishing_fraction", "weyl_sum",
]
