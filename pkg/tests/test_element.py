import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcbeam import (
    BeamElement,
    DivergedMarch,
    SectionModel,
    parabola_pieces,
    shape_circle,
    shape_logspiral,
    shape_parabola,
    shape_straight,
    shape_zigzag,
)


def _elements():
    rect = SectionModel.rectangle(1e3, 1.0, 0.1, "consistent")
    simp = rect.with_law("simplified")
    return {
        "straight": BeamElement(shape_straight(1.2), rect, 32),
        "circle": BeamElement(shape_circle(-1.0 / 0.8, 2.0), rect, 40),
        "circle_simplified": BeamElement(shape_circle(1.0 / 0.8, 2.0), simp, 40),
        "parabola": BeamElement(shape_parabola(0.5, 1.7), rect, 24),
        "parabola_projection": BeamElement(parabola_pieces(2.0, 0.6, 2)[1], rect, 24, "projection"),
        "logspiral": BeamElement(shape_logspiral(0.3, 0.2, 2.0), rect, 48),
        "zigzag": BeamElement(shape_zigzag([(0.4, 0.0), (0.6, -0.9), (0.4, 0.5)]), simp, 21),
    }


ELEMENTS = _elements()


@pytest.mark.parametrize("name", ELEMENTS)
def test_zero_forces_zero_displacements(name):
    el = ELEMENTS[name]
    assert np.max(np.abs(el.march([0.0, 0.0, 0.0]))) <= 1e-15 * el.L


def test_straight_linear_flexibility():
    # lagged-moment march: every entry exact except Z -> w, which carries (1 - 1/N^2)
    EA, EI, L = 1e3, 2.0, 1.5
    for N in (4, 16, 64):
        el = BeamElement(shape_straight(L), SectionModel.stiffness(EA, EI), N)
        _, G = el.march_jacobian([0.0, 0.0, 0.0])
        expect = np.array(
            [
                [-L / EA, 0.0, 0.0],
                [0.0, L**3 / (6 * EI) * (1 - 1 / N**2), L**2 / (2 * EI)],
                [0.0, -(L**2) / (2 * EI), -L / EI],
            ]
        )
        assert np.allclose(G, expect, rtol=1e-13, atol=1e-16)


def test_pure_moment_bends_straight_beam_into_circle():
    EI, L, M = 1.0, 1.0, 2.0
    el = BeamElement(shape_straight(L), SectionModel.stiffness(1e9, EI), 256)
    tr = el.trace([0.0, 0.0, M])
    kappa = M / EI
    assert tr.dphi[-1] == pytest.approx(-kappa * L, rel=1e-14)
    pts = el.deformed_shape(tr)
    # every node lies on the circle of radius EI/M through the origin
    R = EI / M
    r = np.hypot(pts[:, 0], pts[:, 1] - R)
    assert np.max(np.abs(r - R)) <= 2e-5 * R
    assert pts[-1, 0] == pytest.approx(math.sin(kappa * L) / kappa, rel=1e-5)


def test_internal_moment_matches_right_end_equilibrium():
    el = ELEMENTS["circle"]
    f = np.array([0.3, -0.2, 0.05])
    tr = el.trace(f)
    ub = np.array([tr.du[-1], tr.dw[-1], tr.dphi[-1]])
    assert el.end_moment_right(f, ub) == pytest.approx(tr.M[-1], rel=1e-12, abs=1e-15)


def _fd_jacobian(el, f, rel=1e-6):
    scale = np.array([el.section.EI / el.L_ref**2, el.section.EI / el.L_ref**2, el.section.EI / el.L_ref])
    G = np.zeros((3, 3))
    for j in range(3):
        d = np.zeros(3)
        d[j] = rel * scale[j]
        G[:, j] = (el.march(f + d) - el.march(f - d)) / (2 * d[j])
    return G


def _random_states(n, seed=20240):
    rng = np.random.default_rng(seed)
    names = list(ELEMENTS)
    for i in range(n):
        el = ELEMENTS[names[i % len(names)]]
        scale = np.array([el.section.EI / el.L_ref**2, el.section.EI / el.L_ref**2, el.section.EI / el.L_ref])
        yield names[i % len(names)], rng.uniform(-2.0, 2.0, 3) * scale


def test_jacobian_matches_finite_differences():
    worst = 0.0
    for name, f in _random_states(100):
        el = ELEMENTS[name]
        _, G = el.march_jacobian(f)
        Gfd = _fd_jacobian(el, f)
        D = np.diag([1 / el.L_ref, 1 / el.L_ref, 1.0])
        rel = np.linalg.norm(D @ (G - Gfd)) / np.linalg.norm(D @ G)
        worst = max(worst, rel)
    assert worst <= 1e-6


@pytest.mark.parametrize("name", ELEMENTS)
def test_shooting_inverts_the_march(name):
    el = ELEMENTS[name]
    f = np.array([0.8, -1.1, 0.4]) * el.section.EI / el.L_ref**2 * np.array([1, 1, el.L_ref])
    target = el.march(f)
    res = el.shoot(target)
    assert np.allclose(res.f_ab, f, rtol=1e-8, atol=1e-10 * np.abs(f).max())
    assert np.linalg.norm(el._scaled(res.u_b - target)) <= 1e-9


def test_shooting_zero_target_is_zero():
    el = ELEMENTS["parabola"]
    res = el.shoot(np.zeros(3))
    assert np.all(res.f_ab == 0.0)
    assert res.iterations == 0


@given(
    X=st.floats(-1.5, 1.5),
    Z=st.floats(-1.5, 1.5),
    M=st.floats(-1.5, 1.5),
)
@settings(max_examples=40, deadline=None)
def test_shooting_round_trip_property(X, Z, M):
    el = ELEMENTS["circle"]
    s = el.section.EI / el.L_ref**2
    f = np.array([X * s, Z * s, M * s * el.L_ref])
    res = el.shoot(el.march(f), f_guess=np.zeros(3))
    assert np.linalg.norm(el._scaled(res.u_b - el.march(f))) <= 1e-8


def test_simplified_law_ignores_section_depth():
    # simplified law sees only EA and EI
    a = BeamElement(shape_circle(1.0, 2.0), SectionModel.rectangle(12.0, 1.0, 1.0, "simplified"), 20)
    b = BeamElement(shape_circle(1.0, 2.0), SectionModel.stiffness(12.0, 1.0, "simplified"), 20)
    f = [0.1, 0.2, 0.3]
    assert np.array_equal(a.march(f), b.march(f))


def test_consistent_and_simplified_agree_for_thin_sections():
    thin = SectionModel.rectangle(1e4, 1.0, 1e-3, "consistent")
    f = np.array([0.0, 0.0, -thin.EI * 0.5])
    a = BeamElement(shape_circle(1.0, 3.0), thin, 64).march(f)
    b = BeamElement(shape_circle(1.0, 3.0), thin.with_law("simplified"), 64).march(f)
    assert np.allclose(a, b, rtol=1e-5, atol=1e-8)


def test_march_divergence_is_reported():
    el = BeamElement(shape_straight(1.0), SectionModel.stiffness(1.0, 1.0), 8)
    with pytest.raises(DivergedMarch):
        el.march([1e308, 1e308, 1e308])


def test_nonfinite_target_rejected():
    with pytest.raises(ValueError):
        ELEMENTS["straight"].shoot([math.nan, 0.0, 0.0])


def test_stalled_shoot_never_accepts_a_large_residual():
    el = ELEMENTS["circle"]
    s = el.section.EI / el.L_ref**2
    f = np.array([0.0, -s, -1.5 * s * el.L_ref])
    res = el.shoot(el.march(f), f_guess=np.zeros(3))
    assert res.residual_norm <= 1e-7
    assert np.allclose(res.f_ab, f, rtol=1e-6)


def test_midpoint_convergence_is_second_order():
    shape = shape_circle(1.0, 3.0)
    s = SectionModel.rectangle(1.0, 1.0, 0.2, "consistent")
    f = np.array([0.1, 0.2, -0.7]) * s.EI
    ref = BeamElement(shape, s, 4096).march(f)
    errs = [np.linalg.norm(BeamElement(shape, s, n).march(f) - ref) for n in (16, 32, 64)]
    for a, b in zip(errs, errs[1:]):
        assert 3.5 <= a / b <= 4.5
