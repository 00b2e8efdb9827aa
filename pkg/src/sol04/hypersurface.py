"""Immersed hypersurfaces of Sol_0^4.

A :class:`HypersurfacePatch` is a map from a box in R^3 to coordinates of
Sol_0^4.  All extrinsic data (tangent frame, normal, shape operator,
principal curvatures, Ricci operator) are computed numerically at parameter
points, using an analytic Jacobian and a closed-form normal when the patch
supplies them and central differences otherwise.

Conventions
-----------
* Tangent vectors and normals are frame coefficients (metric = dot product).
* Weingarten: ``nabla_X N = -A X``; ``S[a, b] = g(A t_a, t_b)`` in the
  coordinate tangent basis, ``G[a, b] = g(t_a, t_b)``.
* The normal used for extrinsic data is the patch's closed-form normal when
  present, otherwise the cofactor normal with ``det[t1|t2|t3|N] > 0``.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
import scipy.linalg

from . import ambient
from .errors import DegeneratePatchError
from .solgroup import (Isometry, Point, TangentVector, apply_isometry_arrays,
                       frame_scales)

RANK_THRESHOLD = 1e-8
H_FIRST = 1e-5
H_SECOND = 1e-3


@dataclass(frozen=True)
class HypersurfacePatch:
    """An immersion ``(u1, u2, u3) -> (x, y, z, t)`` over the box ``[lower, upper]``.

    Parameters
    ----------
    immersion : callable
        Maps a parameter array of shape (3,) to coordinates of shape (4,).
    lower, upper : array_like
        Corners of the parameter box.
    jacobian : callable, optional
        Returns the 4x3 coordinate Jacobian; central differences otherwise.
    normal : callable, optional
        Closed-form unit normal as frame coefficients at a parameter point.
    implicit : callable, optional
        ``F(point)`` with the hypersurface contained in ``{F = 0}``.
    locate : callable, optional
        Inverse of the immersion on its image (point -> parameters).
    """

    immersion: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    jacobian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    normal: Optional[Callable[[np.ndarray], np.ndarray]] = None
    implicit: Optional[Callable[[np.ndarray], float]] = None
    locate: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = ""
    fd_step: float = H_FIRST

    def __post_init__(self):
        lo = np.asarray(self.lower, dtype=float).reshape(3)
        hi = np.asarray(self.upper, dtype=float).reshape(3)
        if np.any(hi <= lo):
            raise ValueError("empty parameter box")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @property
    def analytic(self) -> bool:
        return self.jacobian is not None

    def __call__(self, q) -> np.ndarray:
        return np.asarray(self.immersion(np.asarray(q, dtype=float)), dtype=float)

    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    def sample(self, n: int, rng: np.random.Generator, margin: float = 0.05) -> np.ndarray:
        """``n`` random parameter points, kept away from the box boundary."""
        span = self.upper - self.lower
        lo = self.lower + margin * span
        return lo + (1 - 2 * margin) * span * rng.random((n, 3))

    def grid(self, k: int = 3, margin: float = 0.1) -> np.ndarray:
        """A deterministic k x k x k grid of interior parameter points."""
        axes = [np.linspace(lo + margin * (hi - lo), hi - margin * (hi - lo), k)
                for lo, hi in zip(self.lower, self.upper)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)


@dataclass(frozen=True)
class AngleFunctions:
    """Frame components of the unit normal, ``N = a E1 + b E2 + c E3 + d E4``."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        s = self.a ** 2 + self.b ** 2 + self.c ** 2 + self.d ** 2
        if abs(s - 1.0) > 1e-10:
            raise ValueError(f"angle functions must satisfy a^2+b^2+c^2+d^2 = 1 (got {s})")

    def as_array(self) -> np.ndarray:
        return np.array([self.a, self.b, self.c, self.d])


@dataclass(frozen=True, eq=False)
class UnitNormal(TangentVector):
    """Cofactor unit normal; ``sign`` relates it to a closed-form normal if one exists."""

    sign: Optional[int] = None


@dataclass(frozen=True, eq=False)
class ShapeData:
    S: np.ndarray
    G: np.ndarray
    kappas: np.ndarray
    H: float
    asymmetry: float = 0.0
    normal: np.ndarray = field(default=None, repr=False)
    frame: np.ndarray = field(default=None, repr=False)

    @property
    def weingarten(self) -> np.ndarray:
        """The shape operator as a matrix acting on parameter-basis coefficients."""
        return np.linalg.solve(self.G, 0.5 * (self.S + self.S.T))


# ---------------------------------------------------------------------------
# first-order data
# ---------------------------------------------------------------------------

def coordinate_jacobian(patch: HypersurfacePatch, q) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    if patch.jacobian is not None:
        return np.asarray(patch.jacobian(q), dtype=float)
    h = patch.fd_step
    cols = []
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        cols.append((patch(q + e) - patch(q - e)) / (2 * h))
    return np.stack(cols, axis=1)


def frame_jacobian(patch: HypersurfacePatch, q) -> np.ndarray:
    """4x3 matrix whose columns are the tangent vectors d(Phi)/du_a in frame coefficients."""
    q = np.asarray(q, dtype=float)
    p = patch(q)
    T = frame_scales(p[3])[:, None] * coordinate_jacobian(patch, q)
    smin = np.linalg.svd(T, compute_uv=False)[-1]
    if not smin > RANK_THRESHOLD:
        raise DegeneratePatchError(f"immersion not of rank 3 at q={q} (sigma_min={smin:.3g})")
    return T


def tangent_basis(patch: HypersurfacePatch, q) -> list[TangentVector]:
    base = Point.of(patch(q))
    T = frame_jacobian(patch, q)
    return [TangentVector(base, T[:, a]) for a in range(3)]


def cofactor_normal(T: np.ndarray) -> np.ndarray:
    """Unit vector orthogonal to the columns of the 4x3 matrix ``T``, with det[T|n] > 0."""
    n = np.array([(-1) ** (i + 3) * np.linalg.det(np.delete(T, i, axis=0)) for i in range(4)])
    return n / np.linalg.norm(n)


def normal_coeffs(patch: HypersurfacePatch, q) -> np.ndarray:
    """The normal used for all extrinsic quantities (closed form when available)."""
    if patch.normal is not None:
        return np.asarray(patch.normal(np.asarray(q, dtype=float)), dtype=float)
    return cofactor_normal(frame_jacobian(patch, q))


def unit_normal(patch: HypersurfacePatch, q) -> UnitNormal:
    T = frame_jacobian(patch, q)
    n = cofactor_normal(T)
    sign = None
    if patch.normal is not None:
        sign = 1 if float(n @ patch.normal(np.asarray(q, dtype=float))) > 0 else -1
    return UnitNormal(Point.of(patch(q)), n, sign)


def angle_functions(patch: HypersurfacePatch, q) -> AngleFunctions:
    n = normal_coeffs(patch, q)
    n = n / np.linalg.norm(n)
    return AngleFunctions(*(float(c) for c in n))


def adapted_frame(n: AngleFunctions, base=None) -> list[TangentVector]:
    """The orthonormal tangent triple built algebraically from the angle functions."""
    a, b, c, d = n.a, n.b, n.c, n.d
    base = Point(0.0, 0.0, 0.0, 0.0) if base is None else Point.of(base)
    rows = [
        (b, -a, d, -c),
        (c, -d, -a, b),
        (d, c, -b, -a),
    ]
    return [TangentVector(base, r) for r in rows]


# ---------------------------------------------------------------------------
# shape operator
# ---------------------------------------------------------------------------

def _normal_derivative_step(patch: HypersurfacePatch) -> float:
    return H_FIRST if (patch.analytic or patch.normal is not None) else 1e-4


def shape_spectrum(patch: HypersurfacePatch, q, h: Optional[float] = None) -> ShapeData:
    """Second fundamental form, Gram matrix and principal curvatures at ``q``.

    ``nabla_{t_a} N`` is the parameter derivative of the normal's frame
    coefficients plus the connection correction; principal curvatures solve
    ``S w = kappa G w``.
    """
    q = np.asarray(q, dtype=float)
    h = _normal_derivative_step(patch) if h is None else h
    T = frame_jacobian(patch, q)
    n0 = normal_coeffs(patch, q)
    if patch.normal is None:
        ref = n0

        def nfield(u):
            n = cofactor_normal(frame_jacobian(patch, u))
            return n if n @ ref > 0 else -n
    else:
        nfield = lambda u: normal_coeffs(patch, u)  # noqa: E731
    dN = np.empty((4, 3))
    for a in range(3):
        e = np.zeros(3)
        e[a] = h
        dN[:, a] = (nfield(q + e) - nfield(q - e)) / (2 * h)
    # nabla_{t_a} N = dN[:, a] + sum_{k,j} T[k, a] n0[j] Gamma^._{kj}
    cov = dN + ambient.connection_term(T.T, n0).T
    S = -(cov.T @ T)
    G = T.T @ T
    asym = float(np.max(np.abs(S - S.T)))
    Ssym = 0.5 * (S + S.T)
    kappas = np.sort(scipy.linalg.eigh(Ssym, G, eigvals_only=True))
    H = float(np.trace(np.linalg.solve(G, Ssym)))
    return ShapeData(Ssym, G, kappas, H, asym, n0, T)


def induced_ricci_matrix(patch: HypersurfacePatch, q, shape: Optional[ShapeData] = None) -> np.ndarray:
    """Ricci form Ric[a, b] = g(Ric(t_a), t_b) from the Gauss equation contracted."""
    sd = shape_spectrum(patch, q) if shape is None else shape
    T, S, G, n = sd.frame, sd.S, sd.G, sd.normal
    d = n[3]
    j1 = T.T @ (ambient.J1 @ n)
    j2 = T.T @ (ambient.J2 @ n)
    PT = T.T @ ambient.P @ T
    return ((-2.0 + 3.0 * d * d) * G + 1.5 * np.outer(j1, j1) + 1.5 * np.outer(j2, j2)
            - 3.0 * PT + sd.H * S - S @ np.linalg.solve(G, S))


def induced_ricci(patch: HypersurfacePatch, q) -> np.ndarray:
    """Eigenvalues of the induced Ricci operator, ascending."""
    sd = shape_spectrum(patch, q)
    ric = induced_ricci_matrix(patch, q, sd)
    return np.sort(scipy.linalg.eigh(0.5 * (ric + ric.T), sd.G, eigvals_only=True))


# ---------------------------------------------------------------------------
# intrinsic geometry by finite differences
# ---------------------------------------------------------------------------

def induced_metric(patch: HypersurfacePatch, q) -> np.ndarray:
    T = frame_jacobian(patch, q)
    return T.T @ T


def _unit(a, h):
    e = np.zeros(3)
    e[a] = h
    return e


def induced_christoffel(patch: HypersurfacePatch, q, h: float = H_SECOND) -> np.ndarray:
    """Gam[a, b, c] = Gamma^c_{ab} of the induced metric (central differences)."""
    q = np.asarray(q, dtype=float)
    G = induced_metric(patch, q)
    dG = np.stack([(induced_metric(patch, q + _unit(e, h)) - induced_metric(patch, q - _unit(e, h)))
                   / (2 * h) for e in range(3)])
    # first kind: [ab, d] = (d_a G_bd + d_b G_ad - d_d G_ab) / 2
    first = 0.5 * (np.einsum("abd->abd", dG) + np.einsum("bad->abd", dG) - np.einsum("dab->abd", dG))
    return np.einsum("abd,dc->abc", first, np.linalg.inv(G))


def intrinsic_curvature(patch: HypersurfacePatch, q, h: float = H_SECOND) -> np.ndarray:
    """R[a, b, c, d] = g(R(d_a, d_b) d_c, d_d) of the induced metric."""
    q = np.asarray(q, dtype=float)
    Gam = induced_christoffel(patch, q, h)
    dGam = np.stack([(induced_christoffel(patch, q + _unit(e, h), h)
                      - induced_christoffel(patch, q - _unit(e, h), h)) / (2 * h)
                     for e in range(3)])
    # R(d_a, d_b) d_c = (d_a Gam_bc^e - d_b Gam_ac^e + Gam_bc^f Gam_af^e - Gam_ac^f Gam_bf^e) d_e
    up = (np.einsum("abce->abce", dGam) - np.einsum("bace->abce", dGam)
          + np.einsum("bcf,afe->abce", Gam, Gam) - np.einsum("acf,bfe->abce", Gam, Gam))
    return np.einsum("abce,ed->abcd", up, induced_metric(patch, q))


def gauss_prediction(patch: HypersurfacePatch, q, shape: Optional[ShapeData] = None) -> np.ndarray:
    """Curvature of M predicted by the Gauss equation from ambient curvature and S."""
    sd = shape_spectrum(patch, q) if shape is None else shape
    T, S = sd.frame, sd.S
    amb = np.einsum("ia,jb,kc,ijkl,ld->abcd", T, T, T, ambient.RIEMANN, T)
    return amb + np.einsum("bc,ad->abcd", S, S) - np.einsum("ac,bd->abcd", S, S)


def sectional_from_tensor(R: np.ndarray, G: np.ndarray, X, Y) -> float:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    den = (X @ G @ X) * (Y @ G @ Y) - (X @ G @ Y) ** 2
    return float(np.einsum("abcd,a,b,c,d->", R, X, Y, Y, X) / den)


def intrinsic_sectional(patch: HypersurfacePatch, q, X, Y, h: float = H_SECOND) -> float:
    """Sectional curvature of M for parameter-space directions X, Y (finite differences)."""
    return sectional_from_tensor(intrinsic_curvature(patch, q, h), induced_metric(patch, q), X, Y)


def intrinsic_ricci(patch: HypersurfacePatch, q, h: float = H_SECOND) -> np.ndarray:
    """Ricci eigenvalues from the finite-difference curvature tensor (independent of the Gauss route)."""
    R = intrinsic_curvature(patch, q, h)
    G = induced_metric(patch, q)
    # Ric(Y, Z) = trace(X -> R(X, Y) Z) = G^{ad} R[a, b, c, d]
    ric = np.einsum("abcd,ad->bc", R, np.linalg.inv(G))
    return np.sort(scipy.linalg.eigh(0.5 * (ric + ric.T), G, eigvals_only=True))


def fundamental_residuals(patch: HypersurfacePatch, q, h1: float = H_FIRST,
                          h2: float = H_SECOND) -> tuple[float, float]:
    """Max discrepancies in the Gauss and Codazzi equations at ``q``."""
    q = np.asarray(q, dtype=float)
    sd = shape_spectrum(patch, q)
    gauss = float(np.max(np.abs(intrinsic_curvature(patch, q, h2) - gauss_prediction(patch, q, sd))))

    Gam = induced_christoffel(patch, q, h2)

    def weingarten(u):
        return shape_spectrum(patch, u).weingarten

    A = sd.weingarten
    dA = np.stack([(weingarten(q + _unit(e, h2)) - weingarten(q - _unit(e, h2))) / (2 * h2)
                   for e in range(3)])
    # (nabla_a A)^c_b = d_a A^c_b + Gam^c_{ae} A^e_b - Gam^e_{ab} A^c_e
    nablaA = dA + np.einsum("aec,eb->acb", Gam, A) - np.einsum("abe,ce->acb", Gam, A)
    lhs_vec = nablaA - nablaA.transpose(2, 1, 0)   # [a, c, b] - [b, c, a]
    lhs = np.einsum("acb,cz->abz", lhs_vec, sd.G)
    T, n = sd.frame, sd.normal
    rhs = np.einsum("ia,jb,kz,ijkl,l->abz", T, T, T, ambient.RIEMANN, n)
    codazzi = float(np.max(np.abs(lhs - rhs)))
    return gauss, codazzi


# ---------------------------------------------------------------------------
# building patches
# ---------------------------------------------------------------------------

def graph_patch(f, grad_f, lower=(-1, -1, -1), upper=(1, 1, 1), name="graph") -> HypersurfacePatch:
    """The graph ``(x, y, z) -> (x, y, z, f(x, y, z))``."""

    def immersion(q):
        return np.array([q[0], q[1], q[2], f(q)])

    def jacobian(q):
        J = np.zeros((4, 3))
        J[:3, :3] = np.eye(3)
        J[3] = grad_f(q)
        return J

    return HypersurfacePatch(immersion, np.asarray(lower, float), np.asarray(upper, float),
                             jacobian=jacobian, implicit=lambda p: p[3] - f(p[:3]), name=name)


def transform_patch(iso: Isometry, patch: HypersurfacePatch) -> HypersurfacePatch:
    """The congruent patch ``iso o Phi`` with Jacobian, normal and implicit function carried along."""
    M = iso.coordinate_jacobian()
    C = iso.coefficient_matrix()
    inv = iso.inverse()

    def immersion(q):
        return apply_isometry_arrays(iso, patch(q))

    kw = {}
    if patch.jacobian is not None:
        kw["jacobian"] = lambda q: M @ patch.jacobian(q)
    if patch.normal is not None:
        kw["normal"] = lambda q: C @ patch.normal(q)
    if patch.implicit is not None:
        kw["implicit"] = lambda p: patch.implicit(apply_isometry_arrays(inv, p))
    if patch.locate is not None:
        kw["locate"] = lambda p: patch.locate(apply_isometry_arrays(inv, p))
    return HypersurfacePatch(immersion, patch.lower, patch.upper, name=f"{patch.name}*iso",
                             fd_step=patch.fd_step, **kw)


def reparametrize(patch: HypersurfacePatch, psi, dpsi, lower, upper) -> HypersurfacePatch:
    """The patch ``Phi o psi`` for a diffeomorphism ``psi`` with Jacobian ``dpsi``."""
    kw = {}
    if patch.jacobian is not None:
        kw["jacobian"] = lambda q: patch.jacobian(psi(q)) @ dpsi(q)
    if patch.normal is not None:
        kw["normal"] = lambda q: patch.normal(psi(q))
    return replace(patch, immersion=lambda q: patch(psi(q)), lower=np.asarray(lower, float),
                   upper=np.asarray(upper, float), locate=None, name=f"{patch.name}*psi",
                   **{"jacobian": None, "normal": None, **kw})
