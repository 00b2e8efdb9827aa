import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sol04 import catalog as cat
from sol04 import hypersurface as hs
from sol04 import reconstruct as rc
from sol04.errors import NoMatchError, NotInScopeError
from sol04.reconstruct import CaseLabel, canonicalize
from sol04.solgroup import Isometry, Point, apply_isometry_arrays

TH1, SH1 = math.tanh(1.0), 1 / math.cosh(1.0)


# -- case labels -------------------------------------------------------------------

def test_case_label_constraints():
    CaseLabel("I_i", {"d": 0.6, "a0": 0.0, "b0": 0.8})
    with pytest.raises(ValueError):
        CaseLabel("I_i", {"d": 0.0, "a0": 0.0, "b0": 1.0})
    with pytest.raises(ValueError):
        CaseLabel("I_i", {"d": 0.6, "a0": 0.8, "b0": 0.0})
    with pytest.raises(ValueError):
        CaseLabel("I_ii", {"a": 0.8, "b": 0.0, "d": 0.6})
    with pytest.raises(ValueError):
        CaseLabel("II", {"c": 0.6, "d": 0.7})
    with pytest.raises(ValueError):
        CaseLabel("IV")
    assert CaseLabel("III").normal() == pytest.approx([0, 0, 0, 1])


# -- case I-(i) angle ODE ------------------------------------------------------------

def test_case1i_ode_matches_rotation_solution():
    d = TH1
    u = np.arange(0.0, 2 * math.pi * math.sinh(1.0), 1e-3)
    tab = rc.integrate_case1i(d, SH1, 0.0, u)
    assert np.max(np.abs(tab[:, 1] - SH1 * np.cos(u / math.sinh(1)))) < 1e-8
    assert np.max(np.abs(tab[:, 2] - SH1 * np.sin(u / math.sinh(1)))) < 1e-8
    assert np.max(np.abs(tab[:, 1] ** 2 + tab[:, 2] ** 2 - (1 - d * d))) < 1e-10


def test_case1i_frequency_from_zero_crossings():
    from sol04.acceptance import case1i_ode_checks
    from sol04.report import RunConfig
    checks = {c.id: c for c in case1i_ode_checks(RunConfig())}
    freq = checks["ode/case1i/frequency"]
    assert abs(freq.value - math.sqrt(1 - TH1 ** 2) / TH1) < 1e-6
    assert all(c.passed for c in checks.values())


@given(st.floats(0.05, 0.95), st.floats(0, 2 * math.pi))
def test_case1i_ode_against_closed_form(d, phase):
    s = math.sqrt(1 - d * d)
    a0, b0 = s * math.cos(phase), s * math.sin(phase)
    u = np.linspace(0, 1.0, 11)
    tab = rc.integrate_case1i(d, a0, b0, u, max_step=2e-4)
    # closed form with c1 = a0, c2 = -b0
    a, b = rc.case1i_angles(d, a0, -b0, u)
    assert np.max(np.abs(tab[:, 1] - a)) < 1e-8 and np.max(np.abs(tab[:, 2] - b)) < 1e-8


def test_case1i_ode_rejects_bad_input():
    with pytest.raises(ValueError):
        rc.integrate_case1i(0.0, 1.0, 0.0, [0, 1])
    with pytest.raises(ValueError):
        rc.integrate_case1i(0.5, 0.5, 0.5, [0, 1])


# -- closed-form patches ----------------------------------------------------------

def test_case1i_closed_form_lies_on_m1():
    patch = rc.case1i_closed_form(TH1, SH1, 0.0)
    for q in patch.sample(50, np.random.default_rng(0)):
        p = patch(q)
        assert abs((p[0] ** 2 + p[1] ** 2) * math.exp(-2 * p[3]) - math.sinh(1) ** 2) < 1e-12
    sd = hs.shape_spectrum(patch, patch.center())
    assert sd.kappas == pytest.approx(sorted([1 / TH1, TH1, -2 * TH1]), abs=1e-5)


@given(st.floats(0.1, 0.9), st.floats(0, 2 * math.pi), st.floats(-1, 1), st.floats(-0.5, 0.5))
def test_case1i_closed_form_jacobian_and_normal(d, phase, u, t):
    s = math.sqrt(1 - d * d)
    patch = rc.case1i_closed_form(d, s * math.cos(phase), s * math.sin(phase))
    q = np.array([u, t, 0.1])
    h = 1e-6
    fd = np.array([patch(q + h * e) - patch(q - h * e) for e in np.eye(3)]).T / (2 * h)
    assert np.max(np.abs(fd - patch.jacobian(q))) < 1e-6 * (1 + np.max(np.abs(fd)))
    # the supplied normal is orthogonal to the tangent plane
    bare = hs.HypersurfacePatch(patch.immersion, patch.lower, patch.upper)
    n = hs.normal_coeffs(bare, q)
    assert abs(abs(n @ patch.normal(q)) - 1) < 1e-8


@given(st.floats(0.1, 0.9), st.floats(0, 2 * math.pi))
def test_l1_is_a_rotation(d, phase):
    s = math.sqrt(1 - d * d)
    L1 = rc.l1_rotation(d, s * math.cos(phase), s * math.sin(phase))
    assert L1.eps_xy == 1
    assert np.linalg.det(L1.linear_xy()) == pytest.approx(1.0, abs=1e-12)


def test_l1_aligns_closed_form_with_m1_normal_form():
    d, c1, c2 = 0.6, 0.48, 0.64
    patch = rc.case1i_closed_form(d, c1, c2)
    L1 = rc.l1_rotation(d, c1, c2)
    r = math.atanh(d)
    m1 = cat.family_patch("M1", r)
    for q in patch.grid(2):
        moved = apply_isometry_arrays(L1, patch(q))
        assert abs(cat.implicit_residual("M1", moved, r)) < 1e-12
        # the rotated normal is the M1 normal at the same point
        n = L1.coefficient_matrix() @ patch.normal(q)
        assert n == pytest.approx(m1.normal(m1.locate(moved)), abs=1e-12)


def test_case1ii_example():
    L2, patch = rc.case1ii_patch(0.48, 0.64, 0.6)
    assert L2.linear_xy() == pytest.approx(np.array([[-0.8, 0.6], [-0.6, -0.8]]), abs=1e-15)
    r = math.atanh(0.6)
    assert r == pytest.approx(math.log(2), abs=1e-15)
    for q in patch.grid(2):
        p = patch(q)
        assert abs(p[1] * math.exp(-p[3]) - math.sinh(r)) < 1e-14


def test_l2_maps_the_normal_to_normal_form():
    for a, b, d in [(0.48, 0.64, 0.6), (-0.3, 0.5, math.sqrt(1 - 0.34)), (0.0, -0.8, 0.6)]:
        C = rc.l2_rotation(a, b, d).coefficient_matrix()
        assert C @ np.array([a, b, 0, d]) == pytest.approx([0, -math.sqrt(1 - d * d), 0, d], abs=1e-14)


def test_case1ii_aligned_input_and_plane():
    d = 0.6
    L2, _ = rc.case1ii_patch(0.0, -0.8, d)
    assert np.allclose(L2.linear_xy(), np.eye(2))
    _, plane = rc.case1ii_patch(0.0, 1.0, 0.0)
    for q in plane.grid(2):
        assert plane(q)[1] == 0.0
    assert np.max(np.abs(hs.shape_spectrum(plane, plane.center()).kappas)) < 1e-12
    with pytest.raises(ValueError):
        rc.case1ii_patch(0.8, 0.0, 0.6)


def test_case1iii_reduction():
    for sign in (-1, 1):
        red, patch = rc.case1iii_patch(0.6, sign)
        n = hs.normal_coeffs(patch, patch.center())
        assert n == pytest.approx([sign * 0.8, 0, 0, 0.6], abs=1e-14)
        moved = red.coefficient_matrix() @ n
        CaseLabel("I_ii", {"a": moved[0], "b": moved[1], "d": moved[3]})   # a valid case I-(ii) input
        assert moved == pytest.approx([0, -0.8, 0, 0.6], abs=1e-14)
    swap = rc.L3_SWAP.linear_xy()
    assert swap == pytest.approx(np.array([[0, 1], [1, 0]]), abs=1e-15)


def test_case2_examples():
    plane = rc.case2_patch(1.0, 0.0)
    assert all(plane(q)[2] == 0.0 for q in plane.grid(2))
    patch = rc.case2_patch(SH1, TH1)
    assert max(abs(cat.implicit_residual("M3", patch(q), 0.5)) for q in patch.grid(3)) < 1e-12
    sd = hs.shape_spectrum(patch, patch.center())
    assert sd.kappas == pytest.approx([-2 * TH1, TH1, TH1], abs=1e-5)


# -- case II obstruction ------------------------------------------------------------

def test_obstruction_independent_of_T1():
    v1 = rc.symmetry_obstruction(0.5, 0.5, 0.5, 0.5, 0.3)
    v2 = rc.symmetry_obstruction(0.5, 0.5, 0.5, 0.5, -1.7)
    assert v1 != 0 and abs(v1 - v2) < 1e-12


def test_obstruction_is_linear_in_c():
    # fix (a, b) and move along c with d absorbing the rest
    a, b = 0.4, 0.3
    cs = np.linspace(0.01, 0.8, 9)
    vals = [rc.symmetry_obstruction(a, b, c, math.sqrt(1 - a * a - b * b - c * c), 0.2) for c in cs]
    slope, intercept = np.polyfit(cs, vals, 1)
    assert abs(slope) > 1e-3 and abs(intercept) < 1e-10
    assert abs(rc.symmetry_obstruction(a, b, 1e-12, math.sqrt(1 - a * a - b * b), 0.2)) < 1e-10


def test_obstruction_random_samples():
    rng = np.random.default_rng(0)
    for _ in range(100):
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        v[2] = abs(v[2])
        a, b, c, d = v
        res = [rc.symmetry_obstruction(a, b, c, d, t) for t in rng.uniform(-5, 5, 10)]
        assert np.var(res) < 1e-20
        assert np.mean(res) == pytest.approx(3 * a * c, abs=1e-12)


def test_eliminated_derivatives_solve_the_first_two_conditions():
    rng = np.random.default_rng(1)
    for _ in range(20):
        v = rng.normal(size=4)
        a, b, c, d = v / np.linalg.norm(v)
        T1 = rng.normal()
        den = a * a + b * b
        T2 = (-3 * a * a * c * c + b * c * T1 + a * d * (3 * b * c + T1)) / den
        T3 = (-3 * a * c * (b * c + a * d) + (b * d - a * c) * T1) / den
        res = rc.symmetry_conditions(a, b, c, d, T1, T2, T3)
        assert abs(res[0]) < 1e-12 and abs(res[1]) < 1e-12
        assert res[2] == pytest.approx(rc.symmetry_obstruction(a, b, c, d, T1), abs=1e-12)


def test_obstruction_rejects_a_zero():
    with pytest.raises(ValueError):
        rc.symmetry_obstruction(0.0, 0.6, 0.0, 0.8, 1.0)
    with pytest.raises(ValueError):
        rc.symmetry_obstruction(0.5, 0.5, 0.5, 0.6, 1.0)


# -- integrated immersions ------------------------------------------------------------

LABELS = [
    (CaseLabel("I_i", {"d": TH1, "a0": 0.6 * SH1, "b0": 0.8 * SH1}), "M1", 1.0),
    (CaseLabel("I_i", {"d": 0.3, "a0": -0.5, "b0": math.sqrt(1 - 0.09 - 0.25)}), "M1", math.atanh(0.3)),
    (CaseLabel("I_ii", {"a": 0.48, "b": 0.64, "d": 0.6}), "M2", math.log(2)),
    (CaseLabel("I_iii", {"d": 0.6, "a_sign": 1}), "M2", math.log(2)),
    (CaseLabel("II", {"c": SH1, "d": TH1}), "M3", 0.5),
    (CaseLabel("III"), "M4", 0.0),
]


@pytest.mark.parametrize("label,fam,r", LABELS)
def test_frame_flows_commute(label, fam, r):
    start = (0.2, -0.1, 0.3, 0.4)
    q = np.array([0.3, -0.25, 0.2])
    y = rc.integrate_immersion(label, q, start)
    for order in [(2, 1, 0), (1, 0, 2), (0, 2, 1)]:
        assert rc.integrate_immersion(label, q, start, order=order) == pytest.approx(y, abs=1e-10)


@pytest.mark.parametrize("label,fam,r", LABELS)
def test_reconstructed_patch_matches_family(label, fam, r):
    patch = rc.reconstructed_patch(label, start=(0.2, -0.1, 0.3, 0.4))
    sd = hs.shape_spectrum(patch, patch.center())
    assert sd.kappas == pytest.approx(np.sort(cat.expected_invariants(fam, r).kappas), abs=1e-5)
    m = canonicalize(patch)
    assert m.family.tag == fam
    assert m.family.r == pytest.approx(r, abs=1e-8)
    assert m.residual < 1e-8


def test_case1i_reconstruction_spectrum_in_terms_of_d():
    d = 0.45
    s = math.sqrt(1 - d * d)
    patch = rc.reconstructed_patch(CaseLabel("I_i", {"d": d, "a0": 0.0, "b0": s}))
    kap = hs.shape_spectrum(patch, np.array([0.1, 0.1, 0.1])).kappas
    assert kap == pytest.approx(sorted([1 / d, d, -2 * d]), abs=1e-5)


# -- canonicalization ------------------------------------------------------------------

def test_canonicalize_examples():
    m = canonicalize(rc.case2_patch(SH1, TH1))
    assert (m.family.tag, m.family.r) == ("M3", pytest.approx(0.5, abs=1e-12)) and m.residual < 1e-10
    m = canonicalize(rc.case1ii_patch(0.48, 0.64, 0.6)[1])
    assert (m.family.tag, m.family.r) == ("M2", pytest.approx(math.log(2), abs=1e-12)) and m.residual < 1e-10
    m = canonicalize(cat.family_patch("M4", 2.0))
    assert (m.family.tag, m.family.r) == ("M4", 0.0)
    assert m.isometry.trans.t == pytest.approx(-2.0, abs=1e-15)


CONSTRUCTORS = [
    ("case1i", lambda: rc.case1i_closed_form(0.6, 0.48, 0.64), "M1", math.atanh(0.6)),
    ("case1ii", lambda: rc.case1ii_patch(0.48, 0.64, 0.6)[1], "M2", math.log(2)),
    ("case1ii_preimage", lambda: rc.case1ii_preimage(-0.48, 0.64, 0.6), "M2", math.log(2)),
    ("case1iii-", lambda: rc.case1iii_patch(0.3, -1)[1], "M2", math.atanh(0.3)),
    ("case1iii+", lambda: rc.case1iii_patch(0.3, 1)[1], "M2", math.atanh(0.3)),
    ("case2", lambda: rc.case2_patch(0.6, 0.8), "M3", 0.5 * math.atanh(0.8)),
    ("case3", lambda: rc.case3_patch(-0.4), "M4", 0.0),
]


@pytest.mark.parametrize("name,make,fam,r", CONSTRUCTORS)
def test_round_trip_for_every_constructor(name, make, fam, r):
    patch = make()
    m = canonicalize(patch)
    assert m.family.tag == fam and m.family.r == pytest.approx(r, abs=1e-10)
    assert m.residual < 1e-8
    # the fitted isometry really carries the samples onto the family
    pts = apply_isometry_arrays(m.isometry, np.array([patch(q) for q in patch.sample(20, np.random.default_rng(5))]))
    assert max(abs(cat.implicit_residual(m.family, p)) for p in pts) < 1e-8


@pytest.mark.parametrize("f,r", [("M1", 0.5), ("M2", 0.0), ("M2", 1.0), ("M3", 0.25), ("M3", 0.0)])
@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1),
       st.floats(0, 2 * math.pi), st.sampled_from([1, -1]), st.sampled_from([1, -1]))
def test_canonicalize_congruent_copies(f, r, x, y, z, t, theta, e1, e2):
    iso = Isometry(Point(x, y, z, t), theta, e1, e2)
    m = canonicalize(cat.congruent_copy(f, iso, r))
    assert m.family.tag == f and m.family.r == pytest.approx(r, abs=1e-9)


def test_canonicalize_refuses_varying_c_d():
    wavy = hs.graph_patch(lambda q: 0.3 * math.sin(q[0]), lambda q: np.array([0.3 * math.cos(q[0]), 0, 0]))
    with pytest.raises(NotInScopeError):
        canonicalize(wavy)


def test_canonicalize_reports_near_boundary_as_ambiguous():
    c = 5e-7
    with pytest.raises(NoMatchError):
        canonicalize(rc.case2_patch(c, math.sqrt(1 - c * c)))


def test_canonicalize_reports_non_matches():
    # constant c, d but not one of the families: a sphere-like graph in t of (x, y) with c = 0
    # fails the constant-(a, b) tests in a way no family can absorb
    wrong = rc.case2_patch(0.6, 0.8)
    broken = hs.HypersurfacePatch(lambda q: wrong(q) + np.array([0, 0, 0.01 * q[0] ** 2, 0]),
                                  wrong.lower, wrong.upper)
    with pytest.raises((NoMatchError, NotInScopeError)):
        canonicalize(broken)
