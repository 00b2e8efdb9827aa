"""The solvable Lie group Sol_0^4 and its isometry group.

Points are written in global coordinates ``(x, y, z, t)`` with the product

    (x, y, z, t) * (x', y', z', t') = (x + e^t x', y + e^t y', z + e^{-2t} z', t + t').

Tangent vectors are always stored as coefficients in the left-invariant
orthonormal frame

    E1 = e^t d/dx,  E2 = e^t d/dy,  E3 = e^{-2t} d/dz,  E4 = d/dt,

so that the Riemannian metric is the Euclidean dot product of coefficients.

The full isometry group is Sol_0^4 x| (O(2) x Z_2).  An :class:`Isometry`
first applies its linear part (a rotation/reflection of the xy-plane and an
optional reflection of z) and then left-translates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

#: Largest admissible |t|; e^{2t} overflows double precision near t = 354.
T_LIMIT = 300.0

TWO_PI = 2.0 * math.pi


def _check_t(t):
    if not np.all(np.isfinite(t)):
        raise DomainError("non-finite coordinate")
    if np.any(np.abs(t) > T_LIMIT):
        raise DomainError(f"|t| exceeds {T_LIMIT}: exponentials would overflow")


@dataclass(frozen=True)
class Point:
    """A group element in coordinates (x, y, z, t)."""

    x: float
    y: float
    z: float
    t: float

    def __post_init__(self):
        if not all(math.isfinite(float(c)) for c in (self.x, self.y, self.z, self.t)):
            raise DomainError(f"non-finite coordinates {self!r}")

    @classmethod
    def of(cls, p) -> "Point":
        if isinstance(p, Point):
            return p
        x, y, z, t = (float(c) for c in p)
        return cls(x, y, z, t)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z, self.t], dtype=float)

    def __iter__(self):
        return iter((self.x, self.y, self.z, self.t))


IDENTITY = Point(0.0, 0.0, 0.0, 0.0)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """A tangent vector at ``base`` given by its frame coefficients."""

    base: Point
    coeffs: np.ndarray = field(repr=False)

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=float).reshape(4)
        if not np.all(np.isfinite(c)):
            raise DomainError("non-finite frame coefficients")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "base", Point.of(self.base))

    @property
    def v1(self) -> float:
        return float(self.coeffs[0])

    @property
    def v2(self) -> float:
        return float(self.coeffs[1])

    @property
    def v3(self) -> float:
        return float(self.coeffs[2])

    @property
    def v4(self) -> float:
        return float(self.coeffs[3])

    def norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __repr__(self):
        c = ", ".join(f"{v:.6g}" for v in self.coeffs)
        return f"TangentVector(base={self.base!r}, coeffs=({c}))"


def frame_vector(i: int, base=IDENTITY) -> TangentVector:
    """The frame field E_i (1-based) at ``base``."""
    if i not in (1, 2, 3, 4):
        raise IndexError(f"frame index must be in 1..4, got {i}")
    c = np.zeros(4)
    c[i - 1] = 1.0
    return TangentVector(Point.of(base), c)


# ---------------------------------------------------------------------------
# group law
# ---------------------------------------------------------------------------

def compose_arrays(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Group product on coordinate arrays; broadcasts over leading axes."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    _check_t(p[..., 3])
    _check_t(q[..., 3])
    et = np.exp(p[..., 3])
    out = np.empty(np.broadcast_shapes(p.shape, q.shape))
    out[..., 0] = p[..., 0] + et * q[..., 0]
    out[..., 1] = p[..., 1] + et * q[..., 1]
    out[..., 2] = p[..., 2] + q[..., 2] / (et * et)
    out[..., 3] = p[..., 3] + q[..., 3]
    _check_t(out[..., 3])
    return out


def inverse_arrays(p: np.ndarray) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    _check_t(p[..., 3])
    et = np.exp(p[..., 3])
    out = np.empty_like(p)
    out[..., 0] = -p[..., 0] / et
    out[..., 1] = -p[..., 1] / et
    out[..., 2] = -p[..., 2] * et * et
    out[..., 3] = -p[..., 3]
    return out


def compose(p, q) -> Point:
    """Group product ``p * q``."""
    return Point.of(compose_arrays(Point.of(p).as_array(), Point.of(q).as_array()))


def inverse(p) -> Point:
    """Group inverse, so that ``compose(p, inverse(p))`` is the identity."""
    return Point.of(inverse_arrays(Point.of(p).as_array()))


# ---------------------------------------------------------------------------
# coordinate velocities <-> frame coefficients
# ---------------------------------------------------------------------------

def frame_scales(t) -> np.ndarray:
    """Factors turning coordinate velocities into frame coefficients at height t.

    Coefficient i equals ``scale_i * velocity_i``.  Broadcasts over ``t``.
    """
    t = np.asarray(t, dtype=float)
    _check_t(t)
    emt = np.exp(-t)
    return np.stack([emt, emt, 1.0 / (emt * emt), np.ones_like(emt)], axis=-1)


def to_frame_coefficients(p, coord_velocity) -> TangentVector:
    """Convert ``(xdot, ydot, zdot, tdot)`` at ``p`` to a frame-coefficient vector."""
    p = Point.of(p)
    v = np.asarray(coord_velocity, dtype=float).reshape(4)
    return TangentVector(p, frame_scales(p.t) * v)


def to_coordinate_velocity(v: TangentVector) -> np.ndarray:
    """Inverse of :func:`to_frame_coefficients`."""
    return v.coeffs / frame_scales(v.base.t)


# ---------------------------------------------------------------------------
# isometries
# ---------------------------------------------------------------------------

def _sign(e) -> int:
    e = int(e)
    if e not in (1, -1):
        raise ValueError(f"reflection flag must be +1 or -1, got {e}")
    return e


@dataclass(frozen=True)
class Isometry:
    """Element of Sol_0^4 x| (O(2) x Z_2).

    The map is ``p -> trans * L(p)`` where ``L`` sends ``(x, y)`` to
    ``R(theta) diag(1, eps_xy) (x, y)`` and ``z`` to ``eps_z z``.
    """

    trans: Point = IDENTITY
    theta: float = 0.0
    eps_xy: int = 1
    eps_z: int = 1

    def __post_init__(self):
        object.__setattr__(self, "trans", Point.of(self.trans))
        theta = math.fmod(float(self.theta), TWO_PI)
        if theta < 0.0:
            theta += TWO_PI
        if theta >= TWO_PI:
            theta = 0.0
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "eps_xy", _sign(self.eps_xy))
        object.__setattr__(self, "eps_z", _sign(self.eps_z))

    @classmethod
    def from_matrix(cls, m, trans=IDENTITY, eps_z: int = 1) -> "Isometry":
        """Build from a 2x2 orthogonal matrix acting on the xy-plane."""
        m = np.asarray(m, dtype=float)
        if not np.allclose(m @ m.T, np.eye(2), atol=1e-10):
            raise ValueError("xy part must be orthogonal")
        eps = 1 if np.linalg.det(m) > 0 else -1
        # m = R(theta) diag(1, eps): first column is (cos, sin)
        theta = math.atan2(m[1, 0], m[0, 0])
        return cls(trans, theta, eps, eps_z)

    def linear_xy(self) -> np.ndarray:
        c, s = math.cos(self.theta), math.sin(self.theta)
        return np.array([[c, -s * self.eps_xy], [s, c * self.eps_xy]])

    def coefficient_matrix(self) -> np.ndarray:
        """4x4 orthogonal action on frame coefficients."""
        m = np.eye(4)
        m[:2, :2] = self.linear_xy()
        m[2, 2] = self.eps_z
        return m

    def coordinate_jacobian(self) -> np.ndarray:
        """Jacobian of the map in coordinates (constant over Sol_0^4)."""
        s = self.trans.t
        scale = np.diag([math.exp(s), math.exp(s), math.exp(-2 * s), 1.0])
        return scale @ self.coefficient_matrix()

    def then(self, other: "Isometry") -> "Isometry":
        """The isometry ``other o self`` (apply ``self`` first)."""
        return compose_isometries(other, self)

    def inverse(self) -> "Isometry":
        # (T, L)^{-1} = (L^{-1}(T^{-1}), L^{-1})
        lin_inv = Isometry.from_matrix(self.linear_xy().T, IDENTITY, self.eps_z)
        t_inv = apply_isometry(lin_inv, inverse(self.trans))
        return Isometry(t_inv, lin_inv.theta, lin_inv.eps_xy, lin_inv.eps_z)


IDENTITY_ISOMETRY = Isometry()


def _apply_linear(iso: Isometry, pts: np.ndarray) -> np.ndarray:
    out = np.array(pts, dtype=float, copy=True)
    out[..., :2] = pts[..., :2] @ iso.linear_xy().T
    out[..., 2] = iso.eps_z * pts[..., 2]
    return out


def apply_isometry_arrays(iso: Isometry, pts) -> np.ndarray:
    """Vectorised :func:`apply_isometry` on coordinate arrays (..., 4)."""
    pts = np.asarray(pts, dtype=float)
    return compose_arrays(iso.trans.as_array(), _apply_linear(iso, pts))


def apply_isometry(iso: Isometry, p) -> Point:
    return Point.of(apply_isometry_arrays(iso, Point.of(p).as_array()))


def compose_isometries(i1: Isometry, i2: Isometry) -> Isometry:
    """The isometry ``i1 o i2``.

    The linear part normalises the translation of ``i2`` because it acts by
    group automorphisms: L1(T2 * q) = L1(T2) * L1(q).
    """
    trans = compose(i1.trans, Point.of(_apply_linear(i1, i2.trans.as_array())))
    theta = i1.theta + i1.eps_xy * i2.theta
    return Isometry(trans, theta, i1.eps_xy * i2.eps_xy, i1.eps_z * i2.eps_z)


def isometry_differential(iso: Isometry, v: TangentVector) -> TangentVector:
    """Push ``v`` forward by ``iso``; translations act trivially on coefficients."""
    return TangentVector(apply_isometry(iso, v.base), iso.coefficient_matrix() @ v.coeffs)


def left_translation(p) -> Isometry:
    return Isometry(Point.of(p))


def rotation(theta: float) -> Isometry:
    return Isometry(IDENTITY, theta)
