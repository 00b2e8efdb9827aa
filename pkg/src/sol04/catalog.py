"""The four families of homogeneous hypersurfaces M1(r)..M4(r).

Each family comes with its parametrization (with analytic Jacobian), unit
normal, implicit equation, base point and the subgroup whose orbit it is:

====  ==========================================  =====================
M1    (x^2 + y^2) e^{-2t} = sinh^2 r,  r > 0        H1 = {(0,0,z,t)} x SO(2)
M2    y e^{-t} = sinh r,  r >= 0                    H2 = {(x,0,z,t)}
M3    2 z e^{2t} = sinh 2r,  r >= 0                 H3 = {(x,y,0,t)}
M4    t = r                                        H4 = {(x,y,z,0)}
====  ==========================================  =====================

Principal curvatures are reported for the normals listed in
:func:`family_patch`.  For M4 (normal E4) the shape operator is
diag(1, 1, -2): the multiplicity-two curvature is +1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import ambient
from .hypersurface import (HypersurfacePatch, angle_functions, normal_coeffs,
                           shape_spectrum, transform_patch)
from .report import ANCHORS, VerificationReport
from .solgroup import (Isometry, Point, TangentVector, apply_isometry,
                       isometry_differential)

FAMILIES = ("M1", "M2", "M3", "M4")


def sech(x):
    return 1.0 / np.cosh(x)


@dataclass(frozen=True)
class FamilyId:
    """A family tag with its parameter; r may be omitted for M4 (then r = 0)."""

    tag: str
    r: Optional[float] = None

    def __post_init__(self):
        tag = str(self.tag).upper()
        if tag not in FAMILIES:
            raise ValueError(f"unknown family {self.tag!r}")
        if self.r is None and tag != "M4":
            raise ValueError(f"{tag} needs a parameter r")
        r = 0.0 if self.r is None else float(self.r)
        if not math.isfinite(r):
            raise ValueError("r must be finite")
        if tag == "M1" and not r > 0:
            raise ValueError("M1 requires r > 0")
        if tag in ("M2", "M3") and r < 0:
            raise ValueError(f"{tag} requires r >= 0")
        object.__setattr__(self, "tag", tag)
        object.__setattr__(self, "r", r)

    def __str__(self):
        return f"{self.tag}(r={self.r:g})"


def _fid(f, r=None) -> FamilyId:
    if isinstance(f, FamilyId):
        return f
    return FamilyId(f, r)


def _tag(f) -> str:
    tag = f.tag if isinstance(f, FamilyId) else str(f).upper()
    if tag not in FAMILIES:
        raise ValueError(f"unknown family {f!r}")
    return tag


@dataclass(frozen=True)
class ExpectedInvariants:
    """Closed-form invariants of a family.

    ``kappas`` and ``ricci`` are listed in the order of the orthonormal frame
    W1, W2, W3 of the family; ``w_axes[i]`` is the parameter axis along which
    W_{i+1} points, so e.g. the Ricci eigenvalue 0 of M1 belongs to axis 0.
    ``sectionals`` maps W-index pairs (1-based) to K(W_i ^ W_j).
    """

    kappas: tuple
    ricci: Optional[tuple]
    sectionals: dict
    constant_K: Optional[float]
    minimal: bool
    implicit: str
    w_axes: tuple

    @property
    def H(self) -> float:
        return float(sum(self.kappas))


# ---------------------------------------------------------------------------
# parametrizations
# ---------------------------------------------------------------------------

def _m1(r):
    th, sh, lsech = math.tanh(r), math.sinh(r), math.log(sech(r))

    def imm(q):
        x1, x2, x3 = q
        e = math.exp(x3)
        return np.array([e * math.cos(x1) * th, e * math.sin(x1) * th, x2, x3 + lsech])

    def jac(q):
        x1, x2, x3 = q
        e = math.exp(x3)
        c, s = math.cos(x1), math.sin(x1)
        return np.array([[-e * s * th, 0, e * c * th],
                         [e * c * th, 0, e * s * th],
                         [0, 1, 0],
                         [0, 0, 1.0]])

    def normal(q):
        c, s = math.cos(q[0]), math.sin(q[0])
        return np.array([-c * sech(r), -s * sech(r), 0.0, th])

    def implicit(p):
        return (p[0] ** 2 + p[1] ** 2) * math.exp(-2 * p[3]) - sh ** 2

    def locate(p):
        return np.array([math.atan2(p[1], p[0]), p[2], p[3] - lsech])

    return imm, jac, normal, implicit, locate, (-1.5, -1.0, -1.0), (1.5, 1.0, 1.0)


def _m2(r):
    th, sh, lsech = math.tanh(r), math.sinh(r), math.log(sech(r))

    def imm(q):
        x1, x2, x3 = q
        return np.array([x1, math.exp(x3) * th, x2, x3 + lsech])

    def jac(q):
        return np.array([[1.0, 0, 0], [0, 0, math.exp(q[2]) * th], [0, 1, 0], [0, 0, 1]])

    def normal(q):
        return np.array([0.0, -sech(r), 0.0, th])

    def implicit(p):
        return p[1] * math.exp(-p[3]) - sh

    def locate(p):
        return np.array([p[0], p[2], p[3] - lsech])

    return imm, jac, normal, implicit, locate, (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)


def _m3(r):
    th2, sh2 = math.tanh(2 * r), math.sinh(2 * r)
    shift = 0.5 * math.log(math.cosh(2 * r))

    def imm(q):
        x1, x2, x3 = q
        return np.array([x1, x2, 0.5 * math.exp(-2 * x3) * th2, x3 + shift])

    def jac(q):
        return np.array([[1.0, 0, 0], [0, 1, 0], [0, 0, -math.exp(-2 * q[2]) * th2], [0, 0, 1]])

    def normal(q):
        return np.array([0.0, 0.0, sech(2 * r), th2])

    def implicit(p):
        return 2 * p[2] * math.exp(2 * p[3]) - sh2

    def locate(p):
        return np.array([p[0], p[1], p[3] - shift])

    return imm, jac, normal, implicit, locate, (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)


def _m4(r):
    def imm(q):
        return np.array([q[0], q[1], q[2], r])

    def jac(q):
        J = np.zeros((4, 3))
        J[:3] = np.eye(3)
        return J

    def normal(q):
        return np.array([0.0, 0.0, 0.0, 1.0])

    def implicit(p):
        return p[3] - r

    def locate(p):
        return np.array(p[:3], dtype=float)

    return imm, jac, normal, implicit, locate, (-1.0, -1.0, -1.0), (1.0, 1.0, 1.0)


_BUILDERS = {"M1": _m1, "M2": _m2, "M3": _m3, "M4": _m4}


def family_patch(f, r=None) -> HypersurfacePatch:
    """Closed-form patch of a family.  Normals: M1 ``-cos x1 sech r E1 - sin x1 sech r E2
    + tanh r E4``; M2 ``-sech r E2 + tanh r E4``; M3 ``sech 2r E3 + tanh 2r E4``; M4 ``E4``."""
    f = _fid(f, r)
    imm, jac, normal, implicit, locate, lo, hi = _BUILDERS[f.tag](f.r)
    return HypersurfacePatch(imm, np.array(lo), np.array(hi), jacobian=jac, normal=normal,
                             implicit=implicit, locate=locate, name=str(f))


def implicit_residual(f, p, r=None) -> float:
    """Signed residual of the family's implicit equation at the point ``p``."""
    f = _fid(f, r)
    _, _, _, implicit, *_ = _BUILDERS[f.tag](f.r)
    return float(implicit(Point.of(p).as_array()))


def expected_invariants(f, r=None) -> ExpectedInvariants:
    f = _fid(f, r)
    r = f.r
    if f.tag == "M1":
        th, s2 = math.tanh(r), sech(r) ** 2
        return ExpectedInvariants(
            kappas=(1 / th, th, -2 * th), ricci=(0.0, -4 * s2, -4 * s2),
            sectionals={(1, 2): 0.0, (1, 3): 0.0, (2, 3): -4 * s2}, constant_K=None,
            minimal=False, implicit="(x^2+y^2) e^{-2t} = sinh^2 r", w_axes=(0, 2, 1))
    if f.tag == "M2":
        th, s2 = math.tanh(r), sech(r) ** 2
        return ExpectedInvariants(
            kappas=(th, th, -2 * th), ricci=(s2, -5 * s2, -2 * s2),
            sectionals={(1, 2): -s2, (1, 3): 2 * s2, (2, 3): -4 * s2}, constant_K=None,
            minimal=True, implicit="y e^{-t} = sinh r", w_axes=(0, 2, 1))
    if f.tag == "M3":
        th, K = math.tanh(2 * r), -sech(2 * r) ** 2
        return ExpectedInvariants(
            kappas=(th, th, -2 * th), ricci=(2 * K, 2 * K, 2 * K),
            sectionals={(1, 2): K, (1, 3): K, (2, 3): K}, constant_K=K,
            minimal=True, implicit="2 z e^{2t} = sinh 2r", w_axes=(0, 1, 2))
    return ExpectedInvariants(
        kappas=(1.0, 1.0, -2.0), ricci=(0.0, 0.0, 0.0),
        sectionals={(1, 2): 0.0, (1, 3): 0.0, (2, 3): 0.0}, constant_K=0.0,
        minimal=True, implicit="t = r", w_axes=(0, 1, 2))


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------

def base_point(f, r=None) -> Point:
    f = _fid(f, r)
    r = f.r
    if f.tag == "M1":
        return Point(math.tanh(r), 0.0, 0.0, math.log(sech(r)))
    if f.tag == "M2":
        return Point(0.0, math.tanh(r), 0.0, math.log(sech(r)))
    if f.tag == "M3":
        return Point(0.0, 0.0, 0.5 * math.tanh(2 * r), 0.5 * math.log(math.cosh(2 * r)))
    return Point(0.0, 0.0, 0.0, r)


def subgroup_element(f, group_params, r=None) -> Isometry:
    """Element of the subgroup H_i: M1 (z, t, theta); M2 (x, z, t); M3 (x, y, t); M4 (x, y, z)."""
    tag = _tag(f)
    g = [float(v) for v in group_params]
    if len(g) != 3:
        raise ValueError("three group parameters expected")
    if tag == "M1":
        z, t, theta = g
        return Isometry(Point(0.0, 0.0, z, t), theta)
    if tag == "M2":
        x, z, t = g
        return Isometry(Point(x, 0.0, z, t))
    if tag == "M3":
        x, y, t = g
        return Isometry(Point(x, y, 0.0, t))
    x, y, z = g
    return Isometry(Point(x, y, z, 0.0))


def orbit_sample(f, group_params, r=None) -> Point:
    f = _fid(f, r)
    return apply_isometry(subgroup_element(f, group_params), base_point(f))


def random_group_params(f, rng: np.random.Generator, n: int) -> np.ndarray:
    g = rng.uniform(-1.0, 1.0, (n, 3))
    if _tag(f) == "M1":
        g[:, 2] = rng.uniform(0.0, 2 * math.pi, n)
    return g


def homogeneity_report(f, n: int = 100, r=None, seed: int = 0,
                       tol_implicit: float = 1e-8, tol_spectrum: float = 1e-6) -> VerificationReport:
    """Sample n subgroup elements and check that they preserve the hypersurface.

    Checks: orbit points satisfy the implicit equation; the isometry
    differential carries the normal at the base point to +-normal at the image
    and tangent vectors to tangent vectors; principal curvatures at the image
    (and of the transformed patch) agree with the base; c and d are unchanged.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    f = _fid(f, r)
    rng = np.random.default_rng(seed)
    patch = family_patch(f)
    b = base_point(f)
    q0 = patch.locate(b.as_array())
    sd0 = shape_spectrum(patch, q0)
    n0 = TangentVector(b, normal_coeffs(patch, q0))
    T0 = sd0.frame
    ang0 = angle_functions(patch, q0)

    res_impl = res_normal = res_tangent = res_spec = res_cong = res_cd = 0.0
    for g in random_group_params(f, rng, n):
        iso = subgroup_element(f, g)
        p = apply_isometry(iso, b)
        res_impl = max(res_impl, abs(implicit_residual(f, p)))
        q1 = patch.locate(p.as_array())
        n1 = normal_coeffs(patch, q1)
        pushed = isometry_differential(iso, n0).coeffs
        res_normal = max(res_normal, min(np.max(np.abs(pushed - n1)), np.max(np.abs(pushed + n1))))
        pushed_T = iso.coefficient_matrix() @ T0
        res_tangent = max(res_tangent, float(np.max(np.abs(n1 @ pushed_T))))
        sd1 = shape_spectrum(patch, q1)
        res_spec = max(res_spec, float(np.max(np.abs(sd1.kappas - sd0.kappas))))
        sd2 = shape_spectrum(transform_patch(iso, patch), q0)
        res_cong = max(res_cong, float(np.max(np.abs(sd2.kappas - sd0.kappas))))
        ang1 = angle_functions(patch, q1)
        res_cd = max(res_cd, abs(abs(ang1.c) - abs(ang0.c)), abs(abs(ang1.d) - abs(ang0.d)))

    rep = VerificationReport(f"homogeneity {f}")
    anchor = ANCHORS["homogeneity"]
    key = f"homogeneity/{f.tag}/r={f.r:g}"
    rep.add(f"{key}/implicit", res_impl, tol_implicit, anchor)
    rep.add(f"{key}/normal_pushforward", res_normal, tol_implicit, anchor)
    rep.add(f"{key}/tangent_pushforward", res_tangent, tol_implicit, anchor)
    rep.add(f"{key}/spectrum_at_orbit_points", res_spec, tol_spectrum, anchor)
    rep.add(f"{key}/spectrum_congruent_patch", res_cong, tol_spectrum, anchor)
    rep.add(f"{key}/angle_cd_constant", res_cd, tol_implicit, ANCHORS["angles"])
    return rep


# ---------------------------------------------------------------------------
# tubes and parallel families
# ---------------------------------------------------------------------------

def tube_endpoints(r: float, z0, t0, alpha, steps: int = 10_000) -> np.ndarray:
    """Endpoints of normal geodesics of length r from the focal plane {(0, 0, z, t)}."""
    if not r > 0:
        raise ValueError("tube radius must be positive")
    z0, t0, alpha = np.broadcast_arrays(*(np.atleast_1d(np.asarray(a, float)) for a in (z0, t0, alpha)))
    n = z0.size
    pts = np.zeros((n, 4))
    pts[:, 2] = z0.ravel()
    pts[:, 3] = t0.ravel()
    v = np.zeros((n, 4))
    v[:, 0] = np.cos(alpha.ravel())
    v[:, 1] = np.sin(alpha.ravel())
    ends, _ = ambient.geodesic_batch(pts, v, r, steps)
    return ends


def tube_residual(r: float, z0: float = 0.0, t0: float = 0.0, alpha: float = 0.0,
                  steps: int = 10_000) -> float:
    """Implicit residual of M1(r) at the end of a length-r normal geodesic from the focal plane."""
    end = tube_endpoints(r, z0, t0, alpha, steps)[0]
    return implicit_residual(FamilyId("M1", r), end)


def parallel_residual(f, r: float, start=(0.3, -0.2, 0.4), steps: int = 10_000) -> float:
    """Residual of M_{f,r} at the end of a length-r normal geodesic from M_{f,0}.

    The geodesic leaves M_{f,0} in the direction of increasing r: +E2 for M2
    (the opposite of the family normal at r = 0), +E3 for M3.
    """
    f = str(f).upper()
    if f not in ("M2", "M3"):
        raise ValueError("parallel families are M2 and M3")
    if r < 0:
        raise ValueError("r must be >= 0")
    if r == 0:
        return implicit_residual(FamilyId(f, 0.0), family_patch(f, 0.0)(np.asarray(start, float)))
    p0 = family_patch(f, 0.0)(np.asarray(start, float))
    v = np.zeros(4)
    v[1 if f == "M2" else 2] = 1.0
    ends, _ = ambient.geodesic_batch(p0[None], v[None], r, steps)
    return implicit_residual(FamilyId(f, r), ends[0])


def congruent_copy(f, iso: Isometry, r=None) -> HypersurfacePatch:
    """The family patch moved by an isometry (used for congruence tests)."""
    return transform_patch(iso, family_patch(_fid(f, r)))

