"""Riemannian structure of (Sol_0^4, g) in the left-invariant frame.

Everything here is frame-constant: brackets, Levi-Civita connection,
the complex structures J1/J2, the projection P and the curvature tensor are
fixed tables indexed by frame labels.  Frame indices in the public API are
1-based (E1..E4); the arrays below are 0-based.

Table conventions::

    BRACKET[i, j]  = [E_i, E_j]
    GAMMA[i, j]    = nabla_{E_i} E_j            (GAMMA[i, j, k] = Gamma^k_{ij})
    RIEMANN[i, j, k] = R(E_i, E_j) E_k
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Callable, Optional

import numpy as np

from .errors import DomainError
from .solgroup import Point, TangentVector, frame_scales

BRACKET = np.zeros((4, 4, 4))
BRACKET[0, 3] = [-1, 0, 0, 0]
BRACKET[1, 3] = [0, -1, 0, 0]
BRACKET[2, 3] = [0, 0, 2, 0]
BRACKET[3, 0] = -BRACKET[0, 3]
BRACKET[3, 1] = -BRACKET[1, 3]
BRACKET[3, 2] = -BRACKET[2, 3]

GAMMA = np.zeros((4, 4, 4))
GAMMA[0, 0] = [0, 0, 0, 1]
GAMMA[0, 3] = [-1, 0, 0, 0]
GAMMA[1, 1] = [0, 0, 0, 1]
GAMMA[1, 3] = [0, -1, 0, 0]
GAMMA[2, 2] = [0, 0, 0, -2]
GAMMA[2, 3] = [0, 0, 2, 0]

# matrices act on coefficient column vectors
J1 = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, 1.0, 0.0],
])
J2 = np.array([
    [0.0, -1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
])
P = np.diag([0.0, 0.0, 0.0, 1.0])

STRUCTURES = {"J1": J1, "J2": J2, "P": P}


def _check_index(i):
    if i not in (1, 2, 3, 4):
        raise IndexError(f"frame index must be in 1..4, got {i}")


def _common_base(*vs: TangentVector) -> Point:
    base = vs[0].base
    for v in vs[1:]:
        if v.base != base:
            raise ValueError(f"tangent vectors live at different points: {base} vs {v.base}")
    return base


def metric(v: TangentVector, w: TangentVector) -> float:
    _common_base(v, w)
    return float(v.coeffs @ w.coeffs)


def coordinate_metric(p, xdot, ydot) -> float:
    """g evaluated on two coordinate velocities, using the coordinate expression of g."""
    t = Point.of(p).t
    a = np.asarray(xdot, dtype=float)
    b = np.asarray(ydot, dtype=float)
    weights = np.array([np.exp(-2 * t), np.exp(-2 * t), np.exp(4 * t), 1.0])
    return float(np.sum(weights * a * b))


def frame_table(kind: str, i: int, j: int) -> np.ndarray:
    """``[E_i, E_j]`` (``kind='bracket'``) or ``nabla_{E_i} E_j`` (``kind='connection'``)."""
    _check_index(i)
    _check_index(j)
    if kind == "bracket":
        return BRACKET[i - 1, j - 1].copy()
    if kind == "connection":
        return GAMMA[i - 1, j - 1].copy()
    raise ValueError(f"unknown table kind {kind!r}")


# ---------------------------------------------------------------------------
# connection
# ---------------------------------------------------------------------------

def connection_term(v, w) -> np.ndarray:
    """sum_{i,j} v^i w^j nabla_{E_i} E_j for coefficient arrays; broadcasts."""
    return np.einsum("...i,...j,ijk->...k", v, w, GAMMA)


@dataclass(frozen=True)
class AmbientField:
    """A vector field given by its frame coefficients as a function of coordinates.

    ``derivative(p, coord_velocity)`` optionally returns the directional
    derivative of the coefficient functions; otherwise central differences are
    used.
    """

    coefficients: Callable[[np.ndarray], np.ndarray]
    derivative: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None

    @property
    def analytic(self) -> bool:
        return self.derivative is not None

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.coefficients(np.asarray(p, dtype=float)), dtype=float)


def constant_field(coeffs) -> AmbientField:
    c = np.asarray(coeffs, dtype=float)
    return AmbientField(lambda p: c, lambda p, v: np.zeros(4))


def covariant_derivative(W: AmbientField, p, v: TangentVector, h: float = 1e-5) -> TangentVector:
    """nabla_v W at ``p``, via the Leibniz rule on the frame-coefficient functions."""
    p = Point.of(p)
    if v.base != p:
        raise ValueError("v must be based at p")
    x = p.as_array()
    vel = v.coeffs / frame_scales(p.t)
    if W.analytic:
        dw = np.asarray(W.derivative(x, vel), dtype=float)
    else:
        dw = (W(x + h * vel) - W(x - h * vel)) / (2 * h)
    w0 = W(x)
    out = dw + connection_term(v.coeffs, w0)
    if not np.all(np.isfinite(out)):
        raise DomainError("non-finite field values near p")
    return TangentVector(p, out)


def structure_apply(which: str, v: TangentVector) -> TangentVector:
    """Apply J1, J2 or P to ``v``."""
    try:
        m = STRUCTURES[which]
    except KeyError:
        raise ValueError(f"unknown structure {which!r}; expected one of {sorted(STRUCTURES)}")
    return TangentVector(v.base, m @ v.coeffs)


# ---------------------------------------------------------------------------
# curvature
# ---------------------------------------------------------------------------

def curvature_formula(X, Y, Z) -> np.ndarray:
    """Closed-form curvature R(X, Y)Z on coefficient arrays.

    Term by term: constant-curvature part, the two Hermitian parts with
    factor -1/2, and the P-part with factor -3.
    """
    X, Y, Z = (np.asarray(a, dtype=float) for a in (X, Y, Z))
    g = np.dot
    out = 2.0 * (g(Y, Z) * X - g(X, Z) * Y)
    for J in (J1, J2):
        JX, JY, JZ = J @ X, J @ Y, J @ Z
        out -= 0.5 * (g(JY, Z) * JX - g(JX, Z) * JY + 2.0 * g(X, JY) * JZ)
    PX, PY = P @ X, P @ Y
    out -= 3.0 * (g(PY, Z) * X + g(Y, Z) * PX - g(PX, Z) * Y - g(X, Z) * PY)
    return out


def _build_riemann() -> np.ndarray:
    e = np.eye(4)
    table = np.zeros((4, 4, 4, 4))
    for i, j, k in product(range(4), repeat=3):
        table[i, j, k] = curvature_formula(e[i], e[j], e[k])
    table.setflags(write=False)
    return table


RIEMANN = _build_riemann()


def bracket_curvature_table() -> np.ndarray:
    """R(E_i,E_j)E_k = nabla_i nabla_j E_k - nabla_j nabla_i E_k - nabla_[E_i,E_j] E_k.

    Exact for frame-constant coefficients; independent of :data:`RIEMANN`.
    """
    # nabla_{E_i}(sum_m G[j,k,m] E_m) = sum_m G[j,k,m] G[i,m]
    nn = np.einsum("jkm,imn->ijkn", GAMMA, GAMMA)
    brk = np.einsum("ijm,mkn->ijkn", BRACKET, GAMMA)
    return nn - nn.transpose(1, 0, 2, 3) - brk


def curvature_arrays(X, Y, Z) -> np.ndarray:
    return np.einsum("...i,...j,...k,ijkl->...l", X, Y, Z, RIEMANN)


def curvature(X: TangentVector, Y: TangentVector, Z: TangentVector) -> TangentVector:
    base = _common_base(X, Y, Z)
    return TangentVector(base, curvature_arrays(X.coeffs, Y.coeffs, Z.coeffs))


def sectional_arrays(X, Y) -> float:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    den = (X @ X) * (Y @ Y) - (X @ Y) ** 2
    if den < 1e-12:
        raise DomainError("degenerate plane: X and Y are (nearly) parallel")
    return float(curvature_arrays(X, Y, Y) @ X / den)


def sectional(X: TangentVector, Y: TangentVector) -> float:
    """Sectional curvature of the plane spanned by X and Y."""
    _common_base(X, Y)
    return sectional_arrays(X.coeffs, Y.coeffs)


# ---------------------------------------------------------------------------
# geodesics
# ---------------------------------------------------------------------------

def _geodesic_rhs(state: np.ndarray) -> np.ndarray:
    t = state[:, 3]
    v = state[:, 4:]
    out = np.empty_like(state)
    out[:, :4] = v / frame_scales(t)
    out[:, 4:] = -connection_term(v, v)
    return out


def geodesic_batch(points, coeffs, s: float, steps: int):
    """Integrate many geodesics at once with fixed-step RK4.

    ``points`` and ``coeffs`` are (n, 4) arrays of starting coordinates and
    initial frame coefficients.  Returns final coordinates and coefficients.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1")
    y = np.hstack([np.atleast_2d(points), np.atleast_2d(coeffs)]).astype(float)
    h = float(s) / steps
    for _ in range(steps):
        k1 = _geodesic_rhs(y)
        k2 = _geodesic_rhs(y + 0.5 * h * k1)
        k3 = _geodesic_rhs(y + 0.5 * h * k2)
        k4 = _geodesic_rhs(y + h * k3)
        y = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    if not np.all(np.isfinite(y)):
        raise DomainError("non-finite state during geodesic integration")
    return y[:, :4], y[:, 4:]


def geodesic(p0, v0: TangentVector, s: float, steps: int = 10_000):
    """Follow the unit-speed geodesic from ``p0`` with velocity ``v0`` for arclength ``s``."""
    p0 = Point.of(p0)
    if v0.base != p0:
        raise ValueError("v0 must be based at p0")
    if abs(v0.norm() - 1.0) > 1e-9:
        raise ValueError(f"initial velocity must be unit, |v0| = {v0.norm()}")
    x, v = geodesic_batch(p0.as_array()[None], v0.coeffs[None], s, steps)
    end = Point.of(x[0])
    return end, TangentVector(end, v[0])


# ---------------------------------------------------------------------------
# self-consistency
# ---------------------------------------------------------------------------

def _lie_bracket(a, b) -> np.ndarray:
    return np.einsum("i,j,ijk->k", a, b, BRACKET)


def _nijenhuis(J, a, b) -> np.ndarray:
    return (_lie_bracket(J @ a, J @ b) - J @ _lie_bracket(J @ a, b)
            - J @ _lie_bracket(a, J @ b) - _lie_bracket(a, b))


SELFCHECK_KINDS = ("torsion", "metric_compat", "curvature_oracle",
                   "curvature_symmetries", "bianchi", "compat_J", "nijenhuis")


def ambient_selfcheck(kind: str) -> float:
    """Largest absolute residual of an identity over all frame index combinations."""
    if kind == "torsion":
        res = GAMMA - GAMMA.transpose(1, 0, 2) - BRACKET
    elif kind == "metric_compat":
        res = GAMMA + GAMMA.transpose(0, 2, 1)
    elif kind == "curvature_oracle":
        res = RIEMANN - bracket_curvature_table()
    elif kind == "curvature_symmetries":
        # frame is orthonormal, so R[i, j, k, l] = g(R(E_i,E_j)E_k, E_l)
        R = RIEMANN
        res = np.concatenate([
            (R + R.transpose(1, 0, 2, 3)).ravel(),
            (R + R.transpose(0, 1, 3, 2)).ravel(),
            (R - R.transpose(2, 3, 0, 1)).ravel(),
        ])
    elif kind == "bianchi":
        R = RIEMANN
        res = R + R.transpose(1, 2, 0, 3) + R.transpose(2, 0, 1, 3)
    elif kind == "compat_J":
        res = np.concatenate([(J.T @ J - np.eye(4)).ravel() for J in (J1, J2)]
                             + [(J @ J + np.eye(4)).ravel() for J in (J1, J2)])
    elif kind == "nijenhuis":
        e = np.eye(4)
        res = np.array([_nijenhuis(J, e[i], e[j])
                        for J in (J1, J2) for i in range(4) for j in range(4)])
    else:
        raise ValueError(f"unknown selfcheck kind {kind!r}")
    return float(np.max(np.abs(res)))
