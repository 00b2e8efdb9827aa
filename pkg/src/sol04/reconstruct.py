"""Reconstruction of hypersurfaces with constant angle functions c and d.

Given the case data (constant angle functions, plus initial values of the
varying ones), the hypersurface is rebuilt from commuting tangent frames
whose flows are integrated with RK4; closed-form patches are provided for
comparison, and :func:`canonicalize` finds an ambient isometry carrying any
such patch onto one of the catalog families.

Cases, with ``N = a E1 + b E2 + c E3 + d E4`` oriented so that d >= 0 and
c >= 0:

* ``I_i``   c = 0, 0 < d < 1, (a, b) rotating along the surface  -> M1
* ``I_ii``  c = 0, 0 <= d < 1, (a, b) constant with b != 0        -> M2
* ``I_iii`` c = 0, 0 <= d < 1, b = 0                              -> M2
* ``II``    0 < c <= 1 (then a = b = 0)                           -> M3
* ``III``   d = 1                                                 -> M4
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .catalog import FamilyId, base_point, implicit_residual
from .errors import NoMatchError, NotInScopeError
from .hypersurface import HypersurfacePatch, normal_coeffs, transform_patch
from .solgroup import (IDENTITY_ISOMETRY, Isometry, Point, apply_isometry_arrays,
                       compose, compose_isometries, inverse)

CONSTANCY_TOL = 1e-6
ZERO_TOL = 1e-8
CONSTRAINT_TOL = 1e-10
MATCH_TOL = 1e-8

CASES = ("I_i", "I_ii", "I_iii", "II", "III")


def _require(cond, msg):
    if not cond:
        raise ValueError(msg)


@dataclass(frozen=True)
class CaseLabel:
    """A case of the classification together with its parameters.

    ``I_i``: d, a0, b0 (initial angle functions, a0^2 + b0^2 = 1 - d^2, b0 != 0);
    ``I_ii``: a, b, d; ``I_iii``: d, a_sign; ``II``: c, d; ``III``: none.
    """

    tag: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        _require(self.tag in CASES, f"unknown case {self.tag!r}")
        p = {k: float(v) for k, v in self.params.items()}
        object.__setattr__(self, "params", p)
        if self.tag == "I_i":
            d, a0, b0 = p["d"], p["a0"], p["b0"]
            _require(0 < d < 1, "case I_i needs 0 < d < 1 (d = 0 is impossible)")
            _require(abs(a0 ** 2 + b0 ** 2 - (1 - d ** 2)) < CONSTRAINT_TOL, "a0^2 + b0^2 != 1 - d^2")
            _require(b0 != 0, "case I_i needs b0 != 0")
        elif self.tag == "I_ii":
            a, b, d = p["a"], p["b"], p["d"]
            _require(0 <= d < 1, "case I_ii needs 0 <= d < 1")
            _require(b != 0, "case I_ii needs b != 0 (b = 0 is case I_iii)")
            _require(abs(a * a + b * b + d * d - 1) < CONSTRAINT_TOL, "a^2 + b^2 + d^2 != 1")
        elif self.tag == "I_iii":
            _require(0 <= p["d"] < 1, "case I_iii needs 0 <= d < 1")
            _require(p.get("a_sign", -1.0) in (1.0, -1.0), "a_sign must be +1 or -1")
        elif self.tag == "II":
            c, d = p["c"], p["d"]
            _require(0 < c <= 1 and 0 <= d < 1, "case II needs 0 < c <= 1, 0 <= d < 1")
            _require(abs(c * c + d * d - 1) < CONSTRAINT_TOL, "c^2 + d^2 != 1")

    def normal(self) -> np.ndarray:
        """Initial unit normal (frame coefficients)."""
        p = self.params
        if self.tag == "I_i":
            return np.array([p["a0"], p["b0"], 0.0, p["d"]])
        if self.tag == "I_ii":
            return np.array([p["a"], p["b"], 0.0, p["d"]])
        if self.tag == "I_iii":
            s = math.sqrt(1 - p["d"] ** 2)
            return np.array([p.get("a_sign", -1.0) * s, 0.0, 0.0, p["d"]])
        if self.tag == "II":
            return np.array([0.0, 0.0, p["c"], p["d"]])
        return np.array([0.0, 0.0, 0.0, 1.0])


@dataclass(frozen=True)
class MatchResult:
    family: FamilyId
    isometry: Isometry
    residual: float
    case: str = ""
    raw_r: Optional[float] = None


# ---------------------------------------------------------------------------
# Case I-(i): the angle functions a, b along u
# ---------------------------------------------------------------------------

def _rk4(f, y, h, n):
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * h * k1)
        k3 = f(y + 0.5 * h * k2)
        k4 = f(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def integrate_case1i(d: float, a0: float, b0: float, u_grid, max_step: float = 1e-3) -> np.ndarray:
    """Integrate ``a_u = -b s/d, b_u = a s/d`` (s = sqrt(1 - d^2)); rows are (u, a, b)."""
    if d == 0:
        raise ValueError("d = 0 is impossible in case I_i")
    _require(0 < d < 1, "need 0 < d < 1")
    _require(abs(a0 ** 2 + b0 ** 2 - (1 - d * d)) < CONSTRAINT_TOL, "a0^2 + b0^2 != 1 - d^2")
    w = math.sqrt(1 - d * d) / d
    M = np.array([[0.0, -w], [w, 0.0]])
    u = np.asarray(u_grid, dtype=float)
    out = np.empty((u.size, 3))
    y = np.array([a0, b0], dtype=float)
    out[0] = (u[0], *y)
    for i in range(1, u.size):
        du = u[i] - u[i - 1]
        n = max(1, math.ceil(abs(du) / max_step))
        y = _rk4(lambda v: M @ v, y, du / n, n)
        out[i] = (u[i], *y)
    return out


def case1i_angles(d: float, c1: float, c2: float, u):
    """Closed-form (a(u), b(u)) for case I-(i)."""
    w = math.sqrt(1 - d * d) / d
    u = np.asarray(u, dtype=float)
    return (c1 * np.cos(w * u) + c2 * np.sin(w * u), c1 * np.sin(w * u) - c2 * np.cos(w * u))


def case1i_closed_form(d: float, c1: float, c2: float, lower=(-1.0, -0.5, -0.5),
                       upper=(1.0, 0.5, 0.5)) -> HypersurfacePatch:
    """The immersion ``(u, t, z) -> (x(u, t), y(u, t), z, t)`` of case I-(i), translation removed."""
    _require(0 < d < 1, "need 0 < d < 1")
    _require(abs(c1 * c1 + c2 * c2 - (1 - d * d)) < CONSTRAINT_TOL, "c1^2 + c2^2 != 1 - d^2")
    w = math.sqrt(1 - d * d) / d
    k = -d / (1 - d * d)
    r = math.atanh(d)

    def parts(q):
        u, t, _ = q
        cu, su = math.cos(w * u), math.sin(w * u)
        return c1 * cu + c2 * su, c1 * su - c2 * cu, math.exp(t)

    def imm(q):
        A, B, et = parts(q)
        return np.array([k * et * A, k * et * B, q[2], q[1]])

    def jac(q):
        A, B, et = parts(q)
        # dA/du = -w B, dB/du = w A
        return np.array([[-k * et * w * B, k * et * A, 0.0],
                         [k * et * w * A, k * et * B, 0.0],
                         [0.0, 0.0, 1.0],
                         [0.0, 1.0, 0.0]])

    def normal(q):
        a, b = case1i_angles(d, c1, c2, q[0])
        return np.array([float(a), float(b), 0.0, d])

    def implicit(p):
        return (p[0] ** 2 + p[1] ** 2) * math.exp(-2 * p[3]) - math.sinh(r) ** 2

    return HypersurfacePatch(imm, np.array(lower, float), np.array(upper, float), jacobian=jac,
                             normal=normal, implicit=implicit, name=f"case I_i d={d:g}")


def l1_rotation(d: float, c1: float, c2: float) -> Isometry:
    """The rotation cosh r [[-c1, c2], [-c2, -c1]] (d = tanh r) aligning case I-(i) with M1."""
    r = math.atanh(d)
    return Isometry.from_matrix(math.cosh(r) * np.array([[-c1, c2], [-c2, -c1]]))


# ---------------------------------------------------------------------------
# Case I-(ii), I-(iii), II, III
# ---------------------------------------------------------------------------

def l2_rotation(a: float, b: float, d: float) -> Isometry:
    """Rotation (1/sqrt(1-d^2)) [[-b, a], [-a, -b]] sending (a, b) to (0, -sqrt(1-d^2))."""
    s = math.sqrt(1 - d * d)
    return Isometry.from_matrix(np.array([[-b, a], [-a, -b]]) / s)


L3_SWAP = Isometry(theta=math.pi / 2, eps_xy=-1)      # [[0, 1], [1, 0]]
X_REFLECTION = Isometry(theta=math.pi, eps_xy=-1)     # [[-1, 0], [0, 1]]
Z_REFLECTION = Isometry(eps_z=-1)


def _m2_normal_form(d: float, lower, upper) -> HypersurfacePatch:
    s = math.sqrt(1 - d * d)
    k = d / s
    r = math.atanh(d)

    def imm(q):
        x, t, z = q
        return np.array([x, k * math.exp(t), z, t])

    def jac(q):
        return np.array([[1.0, 0, 0], [0, k * math.exp(q[1]), 0], [0, 0, 1], [0, 1, 0]])

    return HypersurfacePatch(
        imm, np.array(lower, float), np.array(upper, float), jacobian=jac,
        normal=lambda q: np.array([0.0, -s, 0.0, d]),
        implicit=lambda p: p[1] * math.exp(-p[3]) - math.sinh(r), name=f"case I_ii d={d:g}")


def case1ii_patch(a: float, b: float, d: float, lower=(-1.0, -0.5, -0.5),
                  upper=(1.0, 0.5, 0.5)) -> tuple[Isometry, HypersurfacePatch]:
    """The rotation L2 and the normal form ``(x, t, z) -> (x, d e^t / sqrt(1-d^2), z, t)``."""
    CaseLabel("I_ii", {"a": a, "b": b, "d": d})
    return l2_rotation(a, b, d), _m2_normal_form(d, lower, upper)


def case1ii_preimage(a: float, b: float, d: float) -> HypersurfacePatch:
    """A patch with constant normal (a, b, 0, d): the normal form moved back by L2^{-1}."""
    L2, patch = case1ii_patch(a, b, d)
    return transform_patch(L2.inverse(), patch)


def case1iii_patch(d: float, a_sign: int = -1) -> tuple[Isometry, HypersurfacePatch]:
    """A patch with normal (a_sign sqrt(1-d^2), 0, 0, d) and the O(2) element reducing it to case I-(ii).

    The reduction is L3 (swap of x and y), preceded by x -> -x when a > 0.
    """
    CaseLabel("I_iii", {"d": d, "a_sign": a_sign})
    red = L3_SWAP if a_sign < 0 else compose_isometries(L3_SWAP, X_REFLECTION)
    normal_form = _m2_normal_form(d, (-1.0, -0.5, -0.5), (1.0, 0.5, 0.5))
    return red, transform_patch(red.inverse(), normal_form)


def case2_patch(c: float, d: float, lower=(-1.0, -1.0, -0.5), upper=(1.0, 1.0, 0.5)) -> HypersurfacePatch:
    """``(x, y, t) -> (x, y, (d / 2c) e^{-2t}, t)``."""
    CaseLabel("II", {"c": c, "d": d})
    k = d / (2 * c)
    sinh2r = d / c

    def imm(q):
        return np.array([q[0], q[1], k * math.exp(-2 * q[2]), q[2]])

    def jac(q):
        return np.array([[1.0, 0, 0], [0, 1, 0], [0, 0, -2 * k * math.exp(-2 * q[2])], [0, 0, 1]])

    return HypersurfacePatch(imm, np.array(lower, float), np.array(upper, float), jacobian=jac,
                             normal=lambda q: np.array([0.0, 0.0, c, d]),
                             implicit=lambda p: 2 * p[2] * math.exp(2 * p[3]) - sinh2r,
                             name=f"case II c={c:g} d={d:g}")


def case3_patch(t0: float = 0.0) -> HypersurfacePatch:
    """The slice ``t = t0``."""

    def jac(q):
        J = np.zeros((4, 3))
        J[:3] = np.eye(3)
        return J

    return HypersurfacePatch(lambda q: np.array([q[0], q[1], q[2], t0]), -np.ones(3), np.ones(3),
                             jacobian=jac, normal=lambda q: np.array([0.0, 0.0, 0.0, 1.0]),
                             implicit=lambda p: p[3] - t0, name=f"case III t={t0:g}")


# ---------------------------------------------------------------------------
# case II with a != 0: the obstruction from symmetry of the shape operator
# ---------------------------------------------------------------------------

def symmetry_obstruction(a: float, b: float, c: float, d: float, T1b: float) -> float:
    """Third symmetry condition after eliminating T2(b) and T3(b) with the other two.

    T_i(b) is the derivative of b along the i-th tangent frame vector.  For a
    unit (a, b, c, d) the value is 3ac whatever T1(b) is, so a != 0 forces c = 0.
    """
    if a == 0:
        raise ValueError("a = 0: the elimination divides by a")
    _require(abs(a * a + b * b + c * c + d * d - 1) < CONSTRAINT_TOL, "a^2+b^2+c^2+d^2 != 1")
    den = a * a + b * b
    T2b = (-3 * a * a * c * c + b * c * T1b + a * d * (3 * b * c + T1b)) / den
    T3b = (-3 * a * c * (b * c + a * d) + (b * d - a * c) * T1b) / den
    return 3 * a ** 3 * c + 3 * a * b * b * c + (b * d - a * c) * T2b - (b * c + a * d) * T3b


def symmetry_conditions(a, b, c, d, T1b, T2b, T3b) -> np.ndarray:
    """The three symmetry conditions of the shape operator in case II, as residuals."""
    return np.array([
        d * (3 * b * c + T1b) - a * (3 * c * c + T2b) + b * (c * T1b - b * T2b) / a,
        -c * (3 * b * c + T1b) - a * (3 * c * d + T3b) + b * (d * T1b - b * T3b) / a,
        3 * a ** 3 * c + 3 * a * b * b * c + (b * d - a * c) * T2b - (b * c + a * d) * T3b,
    ])


# ---------------------------------------------------------------------------
# immersion by integrating commuting frames
# ---------------------------------------------------------------------------

def _case_fields(label: CaseLabel):
    """Three commuting coordinate vector fields on the state (x, y, z, t, a, b)."""
    p = label.params
    if label.tag == "I_i":
        d = p["d"]
        s = math.sqrt(1 - d * d)
        w = s / d

        def X1(y):
            et = math.exp(y[3])
            return np.array([y[5] * et / s, -y[4] * et / s, 0.0, 0.0, -y[5] * w, y[4] * w])

        def X2(y):
            et = math.exp(y[3])
            return np.array([y[4] * d * et / s, y[5] * d * et / s, 0.0, -s, 0.0, 0.0])

    elif label.tag in ("I_ii", "I_iii"):
        d = p["d"]
        s = math.sqrt(1 - d * d)

        def X1(y):
            return np.array([y[5] / s, -y[4] / s, 0.0, 0.0, 0.0, 0.0])

        def X2(y):
            et = math.exp(y[3])
            return np.array([y[4] * d * et / s, y[5] * d * et / s, 0.0, -s, 0.0, 0.0])

    elif label.tag == "II":
        c, d = p["c"], p["d"]

        def X1(y):
            return np.array([1.0, 0, 0, 0, 0, 0])

        def X2(y):
            return np.array([0, 1.0, 0, 0, 0, 0])

        def X3(y):
            return np.array([0.0, 0.0, d * math.exp(-2 * y[3]), -c, 0.0, 0.0])

        return X1, X2, X3
    else:
        def X1(y):
            return np.array([math.exp(y[3]), 0, 0, 0, 0, 0])

        def X2(y):
            return np.array([0, math.exp(y[3]), 0, 0, 0, 0])

        def X3(y):
            return np.array([0, 0, math.exp(-2 * y[3]), 0, 0, 0])

        return X1, X2, X3

    def X3(y):
        return np.array([0.0, 0.0, 1.0, 0.0, 0.0, 0.0])

    return X1, X2, X3


def integrate_immersion(label: CaseLabel, q, start=(0.0, 0.0, 0.0, 0.0), order=(0, 1, 2),
                        max_step: float = 2e-3) -> np.ndarray:
    """State (x, y, z, t, a, b) reached by flowing the case's frame fields for times q.

    The flows commute, so the result does not depend on ``order``.
    """
    fields3 = _case_fields(label)
    n0 = label.normal()
    y = np.array([*Point.of(start), n0[0], n0[1]], dtype=float)
    q = np.asarray(q, dtype=float)
    for k in order:
        if q[k] == 0.0:
            continue
        n = max(20, math.ceil(abs(q[k]) / max_step))
        y = _rk4(fields3[k], y, q[k] / n, n)
    return y


def reconstructed_patch(label: CaseLabel, start=(0.0, 0.0, 0.0, 0.0), lower=(-0.5, -0.5, -0.5),
                        upper=(0.5, 0.5, 0.5), max_step: float = 2e-3) -> HypersurfacePatch:
    """The hypersurface of the given case through ``start``, built by integration.

    The Jacobian columns are the frame fields at the integrated state; the
    normal is left to be computed from them.
    """
    fields3 = _case_fields(label)

    def imm(q):
        return integrate_immersion(label, q, start, max_step=max_step)[:4]

    def jac(q):
        y = integrate_immersion(label, q, start, max_step=max_step)
        return np.stack([f(y)[:4] for f in fields3], axis=1)

    return HypersurfacePatch(imm, np.array(lower, float), np.array(upper, float), jacobian=jac,
                             name=f"reconstructed {label.tag}")


# ---------------------------------------------------------------------------
# canonicalization
# ---------------------------------------------------------------------------

def _spread(x) -> float:
    return float(np.max(x) - np.min(x))


def canonicalize(patch: HypersurfacePatch, samples: Optional[np.ndarray] = None,
                 tol: float = MATCH_TOL) -> MatchResult:
    """Find an isometry taking ``patch`` onto a catalog family.

    Raises :class:`NotInScopeError` if c or d vary over the samples and
    :class:`NoMatchError` if the best candidate does not fit to ``tol``.
    """
    qs = patch.grid(3) if samples is None else np.atleast_2d(samples)
    pts = np.array([patch(q) for q in qs])
    ns = np.array([normal_coeffs(patch, q) for q in qs])
    ns /= np.linalg.norm(ns, axis=1)[:, None]

    # orientation: d >= 0, then c >= 0
    ref = ns[0]
    if abs(ref[3]) > ZERO_TOL:
        ns *= np.sign(ref[3])
    elif abs(ref[2]) > ZERO_TOL:
        ns *= np.sign(ref[2])
    iso = IDENTITY_ISOMETRY
    if np.mean(ns[:, 2]) < -ZERO_TOL:
        iso = Z_REFLECTION
        ns[:, 2] *= -1
    if _spread(ns[:, 2]) > CONSTANCY_TOL or _spread(ns[:, 3]) > CONSTANCY_TOL:
        raise NotInScopeError("angle functions c, d are not constant on the patch")
    c, d = float(np.mean(ns[:, 2])), float(np.mean(ns[:, 3]))

    def moved(isometry):
        return apply_isometry_arrays(isometry, pts)

    if c > CONSTANCY_TOL:
        case = "II"
        fam = FamilyId("M3", 0.5 * math.atanh(min(d, 1 - 1e-16)))
        raw_r = None
    elif c > ZERO_TOL:
        raise NoMatchError(f"c = {c:.3g} is too close to the case boundary c = 0")
    elif abs(1 - d) <= ZERO_TOL:
        case = "III"
        raw_r = float(moved(iso)[0, 3])
        fam = FamilyId("M4", 0.0)
    else:
        ab = ns[:, :2]
        if _spread(ab[:, 0]) > CONSTANCY_TOL or _spread(ab[:, 1]) > CONSTANCY_TOL:
            case = "I_i"
            if d <= ZERO_TOL:
                raise NoMatchError("varying (a, b) with d = 0 cannot have constant principal curvatures")
            r = math.atanh(d)
            p0 = moved(iso)[0]
            a0, b0 = iso.coefficient_matrix()[:2, :2] @ ab[0]
            k = math.exp(p0[3]) * math.sinh(r) * math.cosh(r)
            axis = p0[:2] + k * np.array([a0, b0])
            iso = compose_isometries(Isometry(Point(-axis[0], -axis[1], 0.0, 0.0)), iso)
            fam = FamilyId("M1", r)
            res = float(np.max(np.abs([implicit_residual(fam, p) for p in moved(iso)])))
            if not res <= tol:
                raise NoMatchError(f"best match {fam} has residual {res:.3g}")
            return MatchResult(fam, iso, res, case)
        a, b = (float(v) for v in np.mean(ab, axis=0))
        if abs(b) > ZERO_TOL:
            case = "I_ii"
            iso = compose_isometries(l2_rotation(a, b, d), iso)
        else:
            case = "I_iii"
            if a > 0:
                iso = compose_isometries(X_REFLECTION, iso)
            iso = compose_isometries(L3_SWAP, iso)
        fam = FamilyId("M2", math.atanh(d))
        raw_r = None

    # remaining left translation: send the first sample to the family's base point
    p0 = Point.of(moved(iso)[0])
    tau = compose(base_point(fam), inverse(p0))
    iso = compose_isometries(Isometry(tau), iso)
    res = float(np.max(np.abs([implicit_residual(fam, p) for p in moved(iso)])))
    if not res <= tol:
        raise NoMatchError(f"best match {fam} has residual {res:.3g}")
    return MatchResult(fam, iso, res, case, raw_r)
