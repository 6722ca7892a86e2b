"""Exact symbolic-numeric toolkit for Lie-algebraic Hamiltonian families.

Layers, bottom up: exact polynomial/rational-function arithmetic
(``poly``), differential operators and generator families
(``operators``), finite monomial modules and the algebraic spectrum
(``spaces``), metric/gauge/potential extraction (``geometry``), the
concrete Hamiltonian catalog (``families``), domains and the
hermiticity/normalizability classifier (``domains``, ``classify``), and
a config-driven CLI (``cli``).
"""

from .poly import MultiPoly, RatFun, Rational, rat, rat_str
from .operators import (DiffOp, LadderTriple, PlaneGenerators, make_sl2,
                        make_gen2d, number_op, quadratic_combination,
                        express_in_span)
from .spaces import (MonomialSpace, SpectralMatrix, SpectralPattern,
                     space_1d, space_fmn, space_rect, fmn_dim_formula,
                     is_invariant, matrix_of, char_poly, eigenvalues,
                     rational_eigenvalues, eigenpolynomial, eigenpolynomials,
                     NotInvariantError, NotAnEigenvalueError,
                     RootFindingFailure)
from .geometry import (InverseMetric, GaugeField, PotentialV, extract_metric,
                       det_metric, gauge_field, closure_check, potential,
                       schrodinger_potential, gauge_factor_check,
                       NotSecondOrderError, SingularMetricError)
from .families import (FamilyInstance, Exponents, Prefactor, PowerTerm,
                       VARIANTS, DET_POWER, InvalidParams, DegenerateParams,
                       build_hex, build_h2, assemble_plane_hamiltonian,
                       coefficient_functions, expected_det, exponents_of,
                       prefactor_of, random_instance, resolved_qm)
from .domains import (DomainSpec, BoundaryCurve, UnmatchedBoundaryError,
                      InvalidDomainError, first_quadrant, region_beyond,
                      half_plane, between)
from .classify import (BoundaryCheck, DirectionCheck, NormReport,
                       QuadratureTrend, Verdict, hermiticity_check,
                       normalizability, quadrature_crosscheck, classify,
                       spectral_pattern_of, HERMITICITY_THRESHOLD,
                       INTEGRABILITY_THRESHOLD)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
