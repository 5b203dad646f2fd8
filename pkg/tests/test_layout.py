import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vnsolver.layout import (LayoutSpec, circular_layout, fit_to_canvas, make_layout, random_layout,
                             spiral_layout)


def test_circular_square():
    pts = circular_layout(4, 1, 1)
    np.testing.assert_allclose(pts, [[1, 0], [0, 1], [-1, 0], [0, -1]], atol=1e-15)


def test_circular_single_node():
    np.testing.assert_allclose(circular_layout(1), [[1.0, 0.0]])


def test_circular_flat_ellipse():
    pts = circular_layout(6, 1, 0.01)
    assert np.all(np.abs(pts[:, 1]) <= 0.1 + 1e-15)


@pytest.mark.parametrize("a,b", [(0, 1), (1, -2)])
def test_circular_rejects_nonpositive(a, b):
    with pytest.raises(ValueError):
        circular_layout(5, a, b)


@settings(max_examples=200, deadline=None)
@given(st.integers(1, 60), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_circular_on_ellipse(n, a, b):
    pts = circular_layout(n, a, b)
    lhs = pts[:, 0] ** 2 / a + pts[:, 1] ** 2 / b
    np.testing.assert_allclose(lhs, 1.0, rtol=1e-9)


def test_spiral_first_point_high_precision():
    mpmath.mp.dps = 30
    x, y = spiral_layout(1, 0.3)[0]
    assert x == pytest.approx(float(mpmath.cos(mpmath.mpf("0.3"))), abs=1e-15)
    assert y == pytest.approx(float(mpmath.sin(mpmath.mpf("0.3"))), abs=1e-15)
    assert (round(x, 6), round(y, 6)) == (0.955336, 0.29552)


def test_spiral_zero_offset_on_axis():
    pts = spiral_layout(7, 0.0)
    np.testing.assert_array_equal(pts, [[i, 0.0] for i in range(1, 8)])


def test_spiral_half_turn_alternates():
    pts = spiral_layout(3, math.pi)
    np.testing.assert_allclose(pts, [[-1, 0], [2, 0], [-3, 0]], atol=1e-12)


def test_random_layout_deterministic_and_in_range():
    a = random_layout(50, 123)
    b = random_layout(50, 123)
    np.testing.assert_array_equal(a, b)
    assert np.all((a >= 0) & (a < 1))
    assert not np.array_equal(a, random_layout(50, 124))
    assert not np.array_equal(a, random_layout(50, 123, index=1))


def test_random_layout_mean():
    pts = random_layout(1000, 7)
    assert abs(pts[:, 0].mean() - 0.5) <= 0.03


def test_make_layout_dispatch():
    assert np.array_equal(make_layout(5, LayoutSpec("circular", a=2, b=3)), circular_layout(5, 2, 3))
    assert np.array_equal(make_layout(5, LayoutSpec("spiral", r=0.5)), spiral_layout(5, 0.5))
    assert np.array_equal(make_layout(5, LayoutSpec("random", seed=9), 4), random_layout(5, 9, 4))
    with pytest.raises(ValueError):
        LayoutSpec("line")


def test_fit_single_node_to_center():
    np.testing.assert_array_equal(fit_to_canvas([[3.0, -2.0]], 224, 224), [[112.0, 112.0]])


def test_fit_unit_circle_extent():
    px = fit_to_canvas(circular_layout(64), 224, 224, 0.05)
    extent = px.max(axis=0) - px.min(axis=0)
    assert extent.max() == pytest.approx(224 * 0.9)
    assert px.min() >= 224 * 0.05 - 1e-9 and px.max() <= 224 * 0.95 + 1e-9


def test_fit_zero_extent_axis_uses_other():
    px = fit_to_canvas(spiral_layout(5, 0.0), 224, 224, 0.05)
    assert np.all(px[:, 1] == 112.0)
    assert px[:, 0].max() - px[:, 0].min() == pytest.approx(201.6)


def test_fit_flips_y():
    px = fit_to_canvas([[0, 0], [0, 1]], 100, 100)
    assert px[1, 1] < px[0, 1]


@settings(max_examples=100, deadline=None)
@given(st.integers(2, 30), st.floats(-1e3, 1e3), st.floats(-1e3, 1e3), st.floats(0.01, 100))
def test_fit_translation_scale_invariant(n, dx, dy, s):
    pts = random_layout(n, n)
    base = fit_to_canvas(pts, 224, 160, 0.05)
    moved = fit_to_canvas(pts * s + [dx, dy], 224, 160, 0.05)
    np.testing.assert_allclose(moved, base, atol=1e-6)


def test_fit_rejects_bad_args():
    with pytest.raises(ValueError):
        fit_to_canvas([[0, 0]], 1, 10)
    with pytest.raises(ValueError):
        fit_to_canvas([[0, 0]], 10, 10, 0.5)
