import math
from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import angles, points, signs, unit4
from sol04 import ambient
from sol04.ambient import (AmbientField, ambient_selfcheck, constant_field, coordinate_metric,
                           covariant_derivative, curvature, frame_table, geodesic, metric,
                           sectional, structure_apply)
from sol04.errors import DomainError
from sol04.solgroup import IDENTITY, Isometry, Point, TangentVector, frame_vector


def E(i, base=IDENTITY):
    return frame_vector(i, base)


# -- metric ------------------------------------------------------------------

def test_frame_is_orthonormal():
    p = Point(0.3, 1.0, -2.0, 0.8)
    for i, j in product(range(1, 5), repeat=2):
        assert metric(E(i, p), E(j, p)) == (1.0 if i == j else 0.0)


def test_metric_agrees_with_coordinate_expression():
    p = Point(0, 0, 0, 1)
    from sol04.solgroup import to_frame_coefficients
    v = to_frame_coefficients(p, [1, 0, 0, 0])
    assert coordinate_metric(p, [1, 0, 0, 0], [1, 0, 0, 0]) == pytest.approx(math.exp(-2), abs=1e-14)
    assert metric(v, v) == pytest.approx(math.exp(-2), abs=1e-14)


def test_metric_requires_common_base():
    with pytest.raises(ValueError):
        metric(E(1), E(1, Point(0, 0, 0, 1)))


# -- tables ------------------------------------------------------------------

def test_table_examples():
    assert frame_table("bracket", 3, 4) == pytest.approx([0, 0, 2, 0])
    assert frame_table("connection", 1, 1) == pytest.approx([0, 0, 0, 1])
    for j in range(1, 5):
        assert not frame_table("connection", 4, j).any()
    with pytest.raises(IndexError):
        frame_table("bracket", 0, 1)
    with pytest.raises(ValueError):
        frame_table("torsion", 1, 1)


def test_brackets_match_coordinate_vector_fields():
    # oracle: E_i = s_i(t) d_i with s = (e^t, e^t, e^-2t, 1); [E_i, E_4] = -s_i'/s_i E_i
    rates = {1: 1.0, 2: 1.0, 3: -2.0}
    for i in range(1, 4):
        assert frame_table("bracket", i, 4) == pytest.approx(-rates[i] * np.eye(4)[i - 1])
        assert frame_table("bracket", 4, i) == pytest.approx(rates[i] * np.eye(4)[i - 1])
    for i, j in product(range(1, 4), repeat=2):
        assert not frame_table("bracket", i, j).any()


def _christoffel_from(dg, ginv):
    # Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij); dg[m] = d_m g
    G = np.zeros((4, 4, 4))
    for i, j, k in product(range(4), repeat=3):
        G[i, j, k] = 0.5 * sum(ginv[k, l] * (dg[i][j, l] + dg[j][i, l] - dg[l][i, j]) for l in range(4))
    return G


def test_connection_table_matches_coordinate_christoffels():
    # independent route: Levi-Civita connection of the coordinate metric, applied to E_i, E_j
    for t in (-0.7, 0.0, 0.4):
        dg = np.zeros((4, 4, 4))
        h = 1e-6
        gm = lambda tt: np.diag([math.exp(-2 * tt), math.exp(-2 * tt), math.exp(4 * tt), 1.0])  # noqa: E731
        dg[3] = (gm(t + h) - gm(t - h)) / (2 * h)
        Gam = _christoffel_from(dg, np.linalg.inv(gm(t)))
        s = np.array([math.exp(t), math.exp(t), math.exp(-2 * t), 1.0])
        ds = np.array([math.exp(t), math.exp(t), -2 * math.exp(-2 * t), 0.0])   # d/dt of s
        for i, j in product(range(4), repeat=2):
            Ei = s[i] * np.eye(4)[i]
            Ej = s[j] * np.eye(4)[j]
            # nabla_{E_i} E_j = E_i(E_j^k) d_k + E_i^a E_j^b Gamma^k_ab d_k
            deriv = np.zeros(4)
            if i == 3:
                deriv[j] = ds[j]
            coord = deriv + np.einsum("a,b,abk->k", Ei, Ej, Gam)
            assert coord / s == pytest.approx(frame_table("connection", i + 1, j + 1), abs=1e-8)


# -- covariant derivative ----------------------------------------------------

def test_covariant_derivative_examples():
    W = constant_field([0, 0, 0, 1])
    assert covariant_derivative(W, IDENTITY, E(3)).coeffs == pytest.approx([0, 0, 2, 0])
    assert covariant_derivative(W, IDENTITY, E(4)).coeffs == pytest.approx([0, 0, 0, 0])
    tE1 = AmbientField(lambda p: np.array([p[3], 0, 0, 0]))
    assert covariant_derivative(tE1, IDENTITY, E(4)).coeffs == pytest.approx([1, 0, 0, 0], abs=1e-9)


def test_covariant_derivative_fd_matches_analytic():
    rng = np.random.default_rng(3)
    f = lambda p: np.array([np.sin(p[0]) * p[3], p[1] * p[2], np.cos(p[3]), p[0] ** 2])  # noqa: E731

    def df(p, v):
        return np.array([np.cos(p[0]) * p[3] * v[0] + np.sin(p[0]) * v[3],
                         v[1] * p[2] + p[1] * v[2], -np.sin(p[3]) * v[3], 2 * p[0] * v[0]])

    fd, an = AmbientField(f), AmbientField(f, df)
    for _ in range(10):
        p = Point(*rng.uniform(-1, 1, 4))
        v = TangentVector(p, rng.normal(size=4))
        assert covariant_derivative(fd, p, v).coeffs == pytest.approx(
            covariant_derivative(an, p, v).coeffs, abs=1e-8)


@given(points(), unit4(), unit4())
def test_covariant_derivative_is_metric_compatible(p, v, w):
    # for constant-coefficient fields X, Y: v<X,Y> = 0 = <nabla_v X, Y> + <X, nabla_v Y>
    p = Point.of(p)
    V = TangentVector(p, v)
    a = covariant_derivative(constant_field(v), p, V).coeffs
    b = covariant_derivative(constant_field(w), p, V).coeffs
    assert abs(a @ w + v @ b) < 1e-12


# -- structures ----------------------------------------------------------------

def test_structure_examples():
    assert structure_apply("J1", E(3)).coeffs == pytest.approx([0, 0, 0, 1])
    assert not structure_apply("P", E(2)).coeffs.any()
    with pytest.raises(ValueError):
        structure_apply("J3", E(1))


@given(unit4())
def test_structures_algebra(v):
    tv = TangentVector(IDENTITY, v)
    for J in ("J1", "J2"):
        assert structure_apply(J, structure_apply(J, tv)).coeffs == pytest.approx(-v, abs=1e-15)
        assert structure_apply(J, tv).norm() == pytest.approx(1.0, abs=1e-14)
    Pv = structure_apply("P", tv)
    assert structure_apply("P", Pv).coeffs == pytest.approx(Pv.coeffs)


# -- curvature -----------------------------------------------------------------

def test_curvature_examples():
    assert curvature(E(1), E(2), E(2)).coeffs == pytest.approx([-1, 0, 0, 0])
    assert curvature(E(3), E(4), E(4)).coeffs == pytest.approx([0, 0, -4, 0])


def test_curvature_examples_against_bracket_oracle():
    oracle = ambient.bracket_curvature_table()
    assert oracle[0, 1, 1] == pytest.approx([-1, 0, 0, 0])
    assert oracle[2, 3, 3] == pytest.approx([0, 0, -4, 0])


@given(unit4(), unit4())
def test_curvature_antisymmetry(x, z):
    X, Z = TangentVector(IDENTITY, x), TangentVector(IDENTITY, z)
    assert np.allclose(curvature(X, X, Z).coeffs, 0, atol=1e-14)


@pytest.mark.parametrize("i,j,K", [(1, 2, -1), (1, 4, -1), (2, 4, -1), (3, 4, -4), (1, 3, 2), (2, 3, 2)])
def test_frame_sectional_curvatures(i, j, K):
    assert sectional(E(i), E(j)) == pytest.approx(K, abs=1e-15)
    oracle = ambient.bracket_curvature_table()
    assert oracle[i - 1, j - 1, j - 1] @ np.eye(4)[i - 1] == pytest.approx(K, abs=1e-15)


@given(unit4(), unit4(), st.floats(-2, 2), st.floats(0.1, 2))
def test_sectional_depends_only_on_the_plane(x, y, a, b):
    X, Y = TangentVector(IDENTITY, x), TangentVector(IDENTITY, y)
    try:
        K = sectional(X, Y)
    except DomainError:
        return
    if (x @ x) * (y @ y) - (x @ y) ** 2 < 1e-6:
        return
    assert sectional(Y, X) == pytest.approx(K, abs=1e-9)
    assert sectional(X, TangentVector(IDENTITY, a * x + b * y)) == pytest.approx(K, abs=1e-8)


def test_degenerate_plane():
    with pytest.raises(DomainError):
        sectional(E(1), TangentVector(IDENTITY, [2, 0, 0, 0]))


@given(angles, signs, signs, unit4(), unit4(), unit4())
def test_curvature_is_equivariant(theta, e1, e2, x, y, z):
    C = Isometry(theta=theta, eps_xy=e1, eps_z=e2).coefficient_matrix()
    lhs = ambient.curvature_arrays(C @ x, C @ y, C @ z)
    assert np.allclose(lhs, C @ ambient.curvature_arrays(x, y, z), atol=1e-10)


@pytest.mark.parametrize("kind", ambient.SELFCHECK_KINDS)
def test_selfchecks(kind):
    assert ambient_selfcheck(kind) < 1e-12


def test_selfcheck_rejects_unknown_kind():
    with pytest.raises(ValueError):
        ambient_selfcheck("ricci")


def test_selfcheck_detects_a_broken_table(monkeypatch):
    broken = ambient.GAMMA.copy()
    broken[0, 0, 3] = 1.1
    monkeypatch.setattr(ambient, "GAMMA", broken)
    assert ambient_selfcheck("metric_compat") > 0.05


# -- geodesics -----------------------------------------------------------------

def test_t_line_is_a_geodesic():
    end, v = geodesic(IDENTITY, E(4), 1.7, steps=100)
    assert end.as_array() == pytest.approx([0, 0, 0, 1.7], abs=1e-14)
    assert v.coeffs == pytest.approx([0, 0, 0, 1], abs=1e-14)


def test_speed_is_conserved():
    _, v = geodesic(IDENTITY, E(1), 1.0)
    assert abs(v.norm() - 1) < 1e-10
    rng = np.random.default_rng(0)
    u = rng.normal(size=4)
    _, w = geodesic(Point(0.1, 0.2, 0.3, 0.4), TangentVector(Point(0.1, 0.2, 0.3, 0.4), u / np.linalg.norm(u)),
                    5.0, steps=10_000)
    assert abs(w.norm() - 1) < 1e-9


def test_geodesic_from_focal_plane_lands_on_tube():
    r, alpha = 0.8, 1.1
    p0 = Point(0, 0, 0.5, -0.3)
    v0 = TangentVector(p0, [math.cos(alpha), math.sin(alpha), 0, 0])
    end, _ = geodesic(p0, v0, r)
    assert abs((end.x ** 2 + end.y ** 2) * math.exp(-2 * end.t) - math.sinh(r) ** 2) < 1e-8


def test_geodesic_requires_unit_speed():
    with pytest.raises(ValueError):
        geodesic(IDENTITY, TangentVector(IDENTITY, [2, 0, 0, 0]), 1.0)


def test_geodesic_is_isometry_equivariant():
    iso = Isometry(Point(0.3, -0.2, 0.5, 0.1), 0.7, -1, -1)
    p0 = Point(0.1, 0.4, -0.2, 0.3)
    v = np.array([0.5, -0.5, 0.5, 0.5])
    end, _ = geodesic(p0, TangentVector(p0, v), 1.2, steps=2000)
    from sol04.solgroup import apply_isometry, isometry_differential
    v_img = isometry_differential(iso, TangentVector(p0, v))
    end_img, _ = geodesic(v_img.base, v_img, 1.2, steps=2000)
    assert end_img.as_array() == pytest.approx(apply_isometry(iso, end).as_array(), abs=1e-10)
