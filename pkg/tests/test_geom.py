import cmath
import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from scott_tiler.geom import (
    BASEPOINT,
    INFINITY,
    Geodesic,
    IdenticalGeodesics,
    Isometry,
    IsometryKind,
    NonHyperbolicElement,
    Point,
    PointNotOnBoth,
    angle_at,
    angle_between_at,
    axis_of,
    boundary_angle,
    boundary_from_angle,
    classify_isometry,
    distance_point_to_geodesic,
    geodesics_interleave,
    geodesics_intersect,
    hyperbolic_distance,
    klein_to_point,
    point_to_klein,
    rotation_about,
    translation_to,
)

# mpmath at 40 digits
ACOSH_3_2 = 0.9624236501192068949955178268487368462704
ASINH_1 = 0.8813735870195430252326093249797923090282
SQRT_2 = 1.414213562373095048801688724209698078570


coords = st.floats(-5, 5, allow_nan=False)
heights = st.floats(0.05, 5, allow_nan=False)
points = st.builds(Point, coords, heights)
angles = st.floats(0.1, 2 * math.pi - 0.1)


@st.composite
def isometries(draw):
    center = draw(points)
    theta = draw(angles)
    shift = draw(points)
    return translation_to(shift) @ rotation_about(center, theta)


@st.composite
def geodesics(draw):
    a = draw(st.floats(-5, 5))
    b = draw(st.floats(-5, 5))
    assume(abs(a - b) > 0.05)
    return Geodesic(a, b)


def test_point_rejects_lower_half_plane():
    with pytest.raises(ValueError):
        Point(0.0, -1.0)
    with pytest.raises(ValueError):
        Point(0.0, 0.0)


def test_distance_oracles():
    assert hyperbolic_distance(BASEPOINT, Point(0, 2)) == pytest.approx(math.log(2), abs=1e-14)
    assert hyperbolic_distance(BASEPOINT, Point(1, 1)) == pytest.approx(ACOSH_3_2, abs=1e-14)
    assert hyperbolic_distance(BASEPOINT, BASEPOINT) == 0.0


def test_distance_to_vertical_line():
    assert distance_point_to_geodesic(BASEPOINT, Geodesic(1.0, INFINITY)) == pytest.approx(ASINH_1, abs=1e-14)


def test_distance_to_line_moved_by_isometry():
    # carry the vertical line u = 1 and the basepoint by a rotation: the
    # result must still be asinh(1), now through the semicircle branch
    g = rotation_about(Point(0.3, 0.7), 1.1)
    line = g.apply_geodesic(Geodesic(1.0, INFINITY))
    assert not line.vertical
    assert distance_point_to_geodesic(g(BASEPOINT), line) == pytest.approx(ASINH_1, abs=1e-12)


def test_intersection_oracle():
    p = geodesics_intersect(Geodesic(-1, 2), Geodesic(0, 3))
    assert p.u == pytest.approx(1.0, abs=1e-12)
    assert p.v == pytest.approx(SQRT_2, abs=1e-12)


def test_disjoint_and_nested_geodesics_do_not_meet():
    assert geodesics_intersect(Geodesic(0, 1), Geodesic(2, 3)) is None
    assert geodesics_intersect(Geodesic(-3, 3), Geodesic(-1, 1)) is None
    assert geodesics_intersect(Geodesic(0, 1), Geodesic(1, 2)) is None  # asymptotic


def test_identical_geodesics_raise():
    with pytest.raises(IdenticalGeodesics):
        geodesics_interleave(Geodesic(0, 1), Geodesic(1, 0))


def test_degenerate_geodesic_rejected():
    with pytest.raises(ValueError):
        Geodesic(1.0, 1.0)


def test_geodesic_canonical_order():
    g = Geodesic(INFINITY, 2.0)
    assert (g.e1, g.e2) == (2.0, INFINITY)
    assert Geodesic(3, -1) == Geodesic(-1, 3)


def test_classification_examples():
    assert classify_isometry(Isometry.identity()).kind is IsometryKind.IDENTITY
    rot = classify_isometry(rotation_about(BASEPOINT, math.pi / 2))
    assert rot.kind is IsometryKind.ELLIPTIC
    assert rot.angle == pytest.approx(math.pi / 2, abs=1e-12)
    assert classify_isometry(Isometry(1, 1, 0, 1)).kind is IsometryKind.PARABOLIC
    e = math.exp(0.5)
    hyp = classify_isometry(Isometry(e, 0, 0, 1 / e))
    assert hyp.kind is IsometryKind.HYPERBOLIC
    assert hyp.translation_length == pytest.approx(1.0, abs=1e-12)


def test_axis_of_diagonal_matrix():
    e = math.exp(0.7)
    assert axis_of(Isometry(e, 0, 0, 1 / e)) == Geodesic(0.0, INFINITY)
    with pytest.raises(NonHyperbolicElement):
        axis_of(rotation_about(BASEPOINT, 1.0))


def test_rotation_angle_domain():
    for theta in (0.0, 2 * math.pi, -1.0):
        with pytest.raises(ValueError):
            rotation_about(BASEPOINT, theta)


def test_rotation_is_clockwise():
    # a quarter turn about i moves the boundary point 0 to infinity or back;
    # clockwise in the disk takes angle phi to phi - pi/2
    g = rotation_about(BASEPOINT, math.pi / 2)
    for x in (0.0, 1.0, -2.5):
        moved = boundary_angle(g.apply_boundary(x))
        assert (boundary_angle(x) - moved) % (2 * math.pi) == pytest.approx(math.pi / 2, abs=1e-12)


def test_determinant_check():
    with pytest.raises(ValueError):
        Isometry(2, 0, 0, 1)
    assert Isometry.from_matrix([[2, 0], [0, 2]], normalize=True).is_identity()


def test_sign_identification():
    g = Isometry(-1, -2, 0, -1)
    assert g == Isometry(1, 2, 0, 1)
    assert g.distance(Isometry(1, 2, 0, 1)) == 0.0


def test_right_angle_at_basepoint():
    assert angle_between_at(Geodesic(-1, 1), Geodesic(0, INFINITY), BASEPOINT) == pytest.approx(math.pi / 2)
    with pytest.raises(PointNotOnBoth):
        angle_between_at(Geodesic(-1, 1), Geodesic(0, INFINITY), Point(0, 2))


def test_angle_between_returns_acute_angle():
    line = Geodesic(0, INFINITY)
    for theta in (0.3, 1.2, 2.5):
        other = rotation_about(BASEPOINT, theta).apply_geodesic(line)
        got = angle_between_at(line, other, BASEPOINT)
        assert got == pytest.approx(min(theta, math.pi - theta), abs=1e-12)


def test_angle_at_basepoint_between_axes():
    assert angle_at(BASEPOINT, Point(0, 2), Point(0.6, 0.8)) == pytest.approx(math.pi / 2, abs=1e-12)
    # the geodesic from i to 1 + i is centred at 1/2
    assert angle_at(BASEPOINT, Point(0, 2), Point(1, 1)) == pytest.approx(math.atan(2), abs=1e-12)


@given(st.floats(-50, 50))
def test_boundary_angle_round_trip(x):
    assert boundary_from_angle(boundary_angle(x)) == pytest.approx(x, rel=1e-9, abs=1e-9)


@given(points)
def test_klein_chart_round_trip(p):
    q = klein_to_point(point_to_klein(p))
    assert hyperbolic_distance(p, q) < 1e-7


@given(isometries(), points, points)
def test_distance_is_isometry_invariant(g, p, q):
    d = hyperbolic_distance(p, q)
    assert hyperbolic_distance(g(p), g(q)) == pytest.approx(d, rel=1e-6, abs=1e-6)


@given(isometries(), points, geodesics())
def test_point_line_distance_is_invariant(g, p, line):
    d = distance_point_to_geodesic(p, line)
    assume(d < 8)
    assert distance_point_to_geodesic(g(p), g.apply_geodesic(line)) == pytest.approx(d, rel=1e-6, abs=1e-6)


@given(isometries(), isometries())
def test_classification_is_conjugation_invariant(g, h):
    a, b = classify_isometry(g), classify_isometry(h @ g @ h.inverse())
    assume(abs(abs(g.trace) - 2) > 1e-5)
    assert a.kind is b.kind
    assert abs(g.trace) == pytest.approx(abs((h @ g @ h.inverse()).trace), rel=1e-7, abs=1e-7)


@settings(max_examples=100)
@given(st.floats(0.2, 3.0), isometries())
def test_axis_equivariance(length, h):
    e = math.exp(length / 2)
    g = rotation_about(Point(0.4, 1.3), 0.9) @ Isometry(e, 0, 0, 1 / e) @ rotation_about(Point(0.4, 1.3), 0.9).inverse()
    conj = h @ g @ h.inverse()
    assert axis_of(conj).same_as(h.apply_geodesic(axis_of(g)), tol=1e-6)


@given(geodesics(), geodesics())
def test_interleave_is_symmetric_and_matches_intersection(a, b):
    assume(not a.same_as(b, 1e-3))
    assert geodesics_interleave(a, b) == geodesics_interleave(b, a)
    p = geodesics_intersect(a, b)
    assert (p is not None) == geodesics_interleave(a, b)
    if p is not None:
        assert distance_point_to_geodesic(p, a) < 1e-7
        assert distance_point_to_geodesic(p, b) < 1e-7


@given(points, angles, angles)
def test_rotations_about_a_point_compose(c, s, t):
    assume(s + t < 2 * math.pi - 1e-3)
    lhs = rotation_about(c, s) @ rotation_about(c, t)
    assert lhs.distance(rotation_about(c, s + t)) < 1e-8 * max(1, 1 / c.v, c.v) ** 2


def test_disk_centre_is_basepoint():
    assert abs(point_to_klein(BASEPOINT)) == 0.0
    w = point_to_klein(Point(0, math.e))
    assert abs(w) == pytest.approx(math.tanh(1.0), abs=1e-14)
    assert cmath.phase(w) == pytest.approx(0.0, abs=1e-15)
