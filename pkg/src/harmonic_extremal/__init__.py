"""Harmonic maps of the disc conformal at the origin: extremal constant of
convex domains and the quadratic family of exceptional domains."""

__version__ = "0.1.0"

from .quadratic_family import FamilyParams, SchurCohnVerdict, schur_cohn, eval_F, boundary_curve
from .convex_domain import ConvexDomain, Polygon, Disc, Ellipse, SampledSmooth, from_family
from .disc_harmonics import BoundaryFunction, MomentVector, moments, weighted_moment, poisson_eval
from .extremal_solver import DualPoint, SolveReport, solve, dual_objective, dual_gradient, classify_exceptional
