"""Homogeneous hypersurfaces of the solvable Lie group Sol_0^4.

Submodules: ``solgroup`` (group law, frame, isometries), ``ambient``
(connection, curvature, geodesics), ``hypersurface`` (normals, shape
operator, Gauss-Codazzi), ``catalog`` (the families M1..M4),
``reconstruct`` (rebuilding hypersurfaces from constant angle functions),
``acceptance`` (verification suites) and ``cli``.
"""
from .catalog import FamilyId, expected_invariants, family_patch, implicit_residual
from .errors import DegeneratePatchError, DomainError, NoMatchError, NotInScopeError
from .hypersurface import HypersurfacePatch, shape_spectrum
from .reconstruct import CaseLabel, MatchResult, canonicalize
from .report import RunConfig, VerificationReport
from .solgroup import Isometry, Point, TangentVector, compose, inverse

__version__ = "0.1.0"
