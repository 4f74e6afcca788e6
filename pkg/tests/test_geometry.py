import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from arcbeam import geometry as geo


def _zigzag():
    return geo.shape_zigzag([(0.3, 0.0), (0.5, -0.7), (0.4, 0.4), (0.2, 1.1)])


SHAPES = {
    "straight": geo.shape_straight(2.0),
    "circle": geo.shape_circle(-1 / 2.935, 2.935 * 2.7),
    "parabola": geo.shape_parabola(0.08, 3.0),
    "parabola_offset": geo.parabola_pieces(5.0, 0.5, 2)[1],
    "logspiral": geo.shape_logspiral(1.0, 0.15, 4 * math.pi),
    "zigzag": _zigzag(),
}


def _interior_points(shape, n=401):
    x = np.linspace(0.0, shape.L, n)[1:-1]
    kinks = shape.kinks()
    if kinks.size:
        dist = np.min(np.abs(x[:, None] - kinks[None, :]), axis=1)
        x = x[dist > 1e-4 * shape.L]
    return x


@pytest.mark.parametrize("name", SHAPES)
def test_inextensibility_constraint_residual(name):
    # 1 + u0' = cos(phi0), w0' = -sin(phi0), phi0' = kappa0
    shape = SHAPES[name]
    x = _interior_points(shape)
    d = 1e-6 * shape.L
    du = (shape.u0(x + d) - shape.u0(x - d)) / (2 * d)
    dw = (shape.w0(x + d) - shape.w0(x - d)) / (2 * d)
    dphi = (shape.phi0(x + d) - shape.phi0(x - d)) / (2 * d)
    phi = shape.phi0(x)
    assert np.max(np.abs(1 + du - np.cos(phi))) <= 1e-8
    assert np.max(np.abs(dw + np.sin(phi))) <= 1e-8
    assert np.max(np.abs(dphi - shape.kappa0(x))) * shape.L <= 1e-6


@pytest.mark.parametrize("name", SHAPES)
def test_start_at_origin(name):
    s = SHAPES[name]
    assert s.u0(0.0) == pytest.approx(0.0, abs=1e-15)
    assert s.w0(0.0) == pytest.approx(0.0, abs=1e-15)


def test_circle_end_point_is_chord():
    R, th = 3.0, 1.1
    c = geo.shape_circle(1 / R, R * th)
    xe, ze = c.end_point()
    assert math.hypot(xe, ze) == pytest.approx(2 * R * math.sin(th / 2), rel=1e-14)
    assert ze == pytest.approx(-R * (1 - math.cos(th)), rel=1e-14)


def test_parabola_is_a_parabola():
    a = 0.3
    p = geo.shape_parabola(a, 4.0)
    x = np.linspace(0, p.L, 50)
    X = x + p.u0(x)
    assert np.allclose(p.w0(x), 0.5 * a * X**2, atol=1e-13)
    assert p.arc_length(X[-1]) == pytest.approx(p.L, rel=1e-13)


@given(a=st.floats(1e-3, 50.0), S=st.floats(0.0, 100.0))
@settings(max_examples=200, deadline=None)
def test_parabola_inverse_arc_length(a, S):
    X = S + geo.solve_parabola_u(a, S)
    assert float(geo._parabola_arc(a, X)) == pytest.approx(S, rel=1e-12, abs=1e-13)


def test_parabola_pieces_join_up():
    H, half = 0.5, 5.0
    whole = geo.parabola_from_span(half, H)
    pieces = geo.parabola_pieces(half, H, 3)
    assert sum(p.L for p in pieces) == pytest.approx(whole.L, rel=1e-13)
    for k, p in enumerate(pieces):
        assert p.x0 == pytest.approx(k * half / 3)
        # start slope continues the whole arch's slope at the cut
        s_cut = float(whole.arc_length(p.x0))
        assert float(p.phi0(0.0)) == pytest.approx(float(whole.phi0(s_cut)), abs=1e-13)


def test_logspiral_closed_form_length_and_curvature():
    a, b, tm = 1.0, 0.15, 4 * math.pi
    s = geo.shape_logspiral(a, b, tm)
    # L = a sqrt(1+b^2)/b (e^{b theta} - 1)
    assert s.L == pytest.approx(a * math.sqrt(1 + b * b) / b * math.expm1(b * tm), rel=1e-14)
    assert float(s.phi0(s.L)) == pytest.approx(tm, rel=1e-13)
    # radius of curvature r sqrt(1+b^2) at the start
    assert float(s.kappa0(0.0)) == pytest.approx(1 / (a * math.sqrt(1 + b * b)), rel=1e-14)


def test_zigzag_rejects_bad_input():
    with pytest.raises(ValueError):
        geo.shape_zigzag([(1.0, 0.3)])
    with pytest.raises(ValueError):
        geo.shape_zigzag([(1.0, 0.0), (-1.0, 0.3)])


def test_shape_validation():
    with pytest.raises(ValueError):
        geo.shape_circle(0.0, 1.0)
    with pytest.raises(ValueError):
        geo.shape_straight(-1.0)
    with pytest.raises(ValueError):
        geo.shape_logspiral(1.0, 0.0, 1.0)


def test_grid_arc_spacing():
    g = geo.build_grid(SHAPES["circle"], 16)
    assert g.N == 16
    assert np.allclose(g.h, SHAPES["circle"].L / 16)
    assert g.x_nodes[-1] == SHAPES["circle"].L


def test_grid_projection_spacing_uses_chords():
    p = geo.parabola_pieces(5.0, 0.5, 2)[1]
    g = geo.build_grid(p, 64, "projection")
    assert np.allclose(np.diff(g.proj_nodes), 2.5 / 64)
    # chord steps are slightly shorter than the arc they span
    assert np.all(g.h <= np.diff(g.x_nodes) + 1e-15)
    assert g.h.sum() == pytest.approx(p.L, rel=1e-4)


def test_grid_projection_only_for_parabola():
    with pytest.raises(ValueError):
        geo.build_grid(SHAPES["circle"], 8, "projection")


def test_grid_must_hit_kinks():
    z = geo.shape_zigzag([(0.5, 0.0), (1.0, -1.0), (0.5, 0.0)])
    geo.build_grid(z, 4)
    with pytest.raises(ValueError):
        geo.build_grid(z, 5)
    with pytest.raises(ValueError):
        geo.build_grid(z, 2)
